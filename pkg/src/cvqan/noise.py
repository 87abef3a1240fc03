"""Physical noise budget of the round-trip multi-band access link.

Six untrusted components make up the channel excess noise attributed to an
eavesdropper (Rayleigh backscattering, frequency crosstalk, circulator
leakage, modulation, amplitude and phase noise); three receiver-calibrated
components (detector thermal, ADC quantization, common-mode rejection) are
trusted and reported separately — they enter the key rate only through the
calibrated eta/v_el receiver model, never through the excess noise.
"""

import math
from dataclasses import dataclass, fields

from .params import SystemParams, db_to_linear

UNTRUSTED_COMPONENTS = ("rb", "fc", "oc", "mo", "am", "ph")
TRUSTED_COMPONENTS = ("det", "adc", "cmrr")


@dataclass(frozen=True)
class CrosstalkFit:
    """Fitted constants of the frequency-crosstalk noise laws.

    Interband leakage between two carriers separated by delta_f follows
    v_mod·exp(a)·delta_f^b (delta_f in Hz); the aggregate over a network of N
    equally spaced users follows v_mod·c·exp(d/N), saturating at v_mod·c.
    """

    a_interband: float = 27.27
    b_interband: float = -2.066
    c_capacity: float = 3.815e-3
    d_capacity: float = -0.4576

    def __post_init__(self):
        if self.b_interband >= 0:
            raise ValueError(f"b_interband must be < 0, got {self.b_interband}")
        if self.d_capacity >= 0:
            raise ValueError(f"d_capacity must be < 0, got {self.d_capacity}")
        if self.c_capacity <= 0:
            raise ValueError(f"c_capacity must be > 0, got {self.c_capacity}")


@dataclass(frozen=True)
class NoiseBudget:
    """Per-component noise values in SNU, untrusted components summed into total_excess."""

    rb: float
    fc: float
    oc: float
    mo: float
    am: float
    ph: float
    det: float
    adc: float
    cmrr: float
    total_excess: float

    def __post_init__(self):
        for f in fields(self):
            if getattr(self, f.name) < 0:
                raise ValueError(f"noise component {f.name} must be >= 0")
        expected = self.rb + self.fc + self.oc + self.mo + self.am + self.ph
        if self.total_excess != expected:
            raise ValueError("total_excess must equal the exact six-component sum")

    @classmethod
    def from_components(cls, *, rb, fc, oc, mo, am, ph, det, adc, cmrr) -> "NoiseBudget":
        return cls(rb=rb, fc=fc, oc=oc, mo=mo, am=am, ph=ph, det=det, adc=adc,
                   cmrr=cmrr, total_excess=rb + fc + oc + mo + am + ph)

    def to_dict(self) -> dict:
        """Flat JSON-ready mapping, one key per component plus the excess sum."""
        return {f.name: getattr(self, f.name) for f in fields(self)}


def rayleigh_backscatter(params: SystemParams) -> float:
    """Excess noise from in-band Rayleigh backscattering of the outgoing carrier.

    The backscattered photon number grows with the unreturned fraction (1 − T)
    of the fiber and beats against the LO inside the detection band; referring
    it to the channel input divides by the round-trip user loss and the fiber
    transmittance.
    """
    t_fiber = db_to_linear(-params.atten_db_per_km * params.fiber_km)
    n_back = (1.0 - t_fiber) * db_to_linear(params.rayleigh_coeff_db) \
        * 0.5 * params.v_mod * params.rep_rate
    return 2.0 * n_back * params.gate_time / (db_to_linear(-params.loss_qnu_db) * t_fiber)


def interband_noise(delta_f_hz: float, v_mod: float, fit: CrosstalkFit) -> float:
    """Leakage noise between two carriers separated by delta_f_hz, in SNU.

    Evaluates the fitted power law v_mod·exp(a)·delta_f^b. Strictly decreasing
    in delta_f and linear in the aggressor's modulation variance.
    """
    if delta_f_hz <= 0:
        raise ValueError(f"delta_f_hz must be > 0, got {delta_f_hz}")
    return v_mod * math.exp(fit.a_interband) * delta_f_hz ** fit.b_interband


def crosstalk_noise(n_users: int, v_mod: float, fit: CrosstalkFit) -> float:
    """Aggregate frequency-crosstalk noise seen by one user among n_users.

    v_mod·c·exp(d/N): increasing in N with decreasing increments, saturating
    at v_mod·c as the network fills up.
    """
    if n_users < 1:
        raise ValueError(f"n_users must be >= 1, got {n_users}")
    return v_mod * fit.c_capacity * math.exp(fit.d_capacity / n_users)


def circulator_noise(params: SystemParams, n_users: int) -> float:
    """Leakage through the circulators' finite directionality, in SNU.

    Hub circulator: port-1 light leaks directly to the detector, amplified by
    input referral through the fiber and user losses. User circulators: each
    of the N users' modulated light leaks toward its own modulator port once.
    Directionality is a suppression, so D enters as 10^(−D/10).
    """
    if n_users < 1:
        raise ValueError(f"n_users must be >= 1, got {n_users}")
    leak = db_to_linear(-params.circ_directionality_db)
    qlt_referral = db_to_linear(params.atten_db_per_km * params.fiber_km) \
        * db_to_linear(params.loss_qnu_db)
    return leak * params.v_mod * (n_users + qlt_referral)


def modulation_noise(params: SystemParams) -> float:
    """Noise from the finite DAC voltage resolution driving the phase modulator."""
    r = params.dac_rel_uncertainty
    return params.v_mod * (math.pi * r + 0.5 * (math.pi * r) ** 2) ** 2


def amplitude_noise(params: SystemParams) -> float:
    """Laser relative-intensity noise mapped onto the modulated quadratures."""
    return params.v_mod * (
        math.sqrt(params.rin_sig * params.linewidth_a_hz)
        + 0.25 * params.rin_lo * params.linewidth_b_hz
    )


def phase_noise(params: SystemParams) -> float:
    """Residual phase diffusion of signal and LO lasers over one detection gate."""
    return 2.0 * math.pi * params.gate_time * params.v_mod \
        * (params.linewidth_a_hz + params.linewidth_b_hz)


def detector_thermal_noise(params: SystemParams) -> float:
    """Trusted thermal noise of the balanced receiver, in SNU."""
    return 2.0 * params.nep ** 2 * params.det_bandwidth_hz * params.gate_time \
        / (params.photon_energy_j * params.p_lo_w)


def adc_noise(params: SystemParams) -> float:
    """Trusted quantization plus intrinsic noise of the digitizer, in SNU."""
    quant = params.adc_range_v ** 2 / (12.0 * 2.0 ** (2 * params.adc_bits))
    scale = 2.0 * params.gate_time / (
        params.photon_energy_j * (params.tia_gain_ohm * params.responsivity) ** 2 * params.p_lo_w
    )
    return scale * (quant + params.adc_var_v2)


def cmrr_noise(params: SystemParams) -> float:
    """Trusted noise from finite common-mode rejection of the balanced detector."""
    rej = db_to_linear(params.cmrr_db) ** 2
    sig_term = params.photon_energy_j * params.v_mod ** 2 * params.rin_sig \
        * params.linewidth_a_hz / (8.0 * params.gate_time * params.p_lo_w * rej)
    lo_term = params.gate_time * params.p_lo_w * params.rin_lo \
        * params.linewidth_b_hz / (2.0 * params.photon_energy_j * rej)
    return sig_term + lo_term


def total_budget(params: SystemParams, n_users: int, fit: CrosstalkFit) -> NoiseBudget:
    """Assemble the full budget; total_excess is the six untrusted terms' sum."""
    return NoiseBudget.from_components(
        rb=rayleigh_backscatter(params),
        fc=crosstalk_noise(n_users, params.v_mod, fit),
        oc=circulator_noise(params, n_users),
        mo=modulation_noise(params),
        am=amplitude_noise(params),
        ph=phase_noise(params),
        det=detector_thermal_noise(params),
        adc=adc_noise(params),
        cmrr=cmrr_noise(params),
    )
