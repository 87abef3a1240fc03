"""Calibrated system parameters and unit helpers shared by every model.

All noise quantities throughout the package are expressed in shot-noise units
(SNU) normalized at the channel input: the vacuum quadrature variance is 1.
Decibel quantities convert through the usual power convention 10^(x/10).
"""

import math
from dataclasses import dataclass, fields


def db_to_linear(x_db: float) -> float:
    """Convert a decibel value to a linear power ratio, 10^(x/10)."""
    if not math.isfinite(x_db):
        raise ValueError(f"decibel value must be finite, got {x_db!r}")
    return 10.0 ** (x_db / 10.0)


def linear_to_db(ratio: float) -> float:
    """Convert a linear power ratio to decibels, 10·log10(x)."""
    if not (math.isfinite(ratio) and ratio > 0.0):
        raise ValueError(f"ratio must be finite and positive, got {ratio!r}")
    return 10.0 * math.log10(ratio)


def transmittance(fiber_km: float, atten_db_per_km: float, splitter_branches: int = 1) -> float:
    """One-way channel transmittance of fiber plus an N:1 splitter.

    T = 10^(−α·L/10) / N_S. The splitter divides the return signal evenly over
    its branches, so every branch sees the full 1/N_S penalty.
    """
    if splitter_branches < 1:
        raise ValueError(f"splitter_branches must be >= 1, got {splitter_branches}")
    if fiber_km < 0:
        raise ValueError(f"fiber_km must be >= 0, got {fiber_km}")
    return db_to_linear(-atten_db_per_km * fiber_km) / splitter_branches


# Fields that may legitimately be zero: they quantify device imperfections and
# zero means an ideal device (used by the noise formulas' limiting cases).
_NON_NEGATIVE = {
    "rin_sig",
    "rin_lo",
    "linewidth_a_hz",
    "linewidth_b_hz",
    "nep",
    "adc_var_v2",
    "dac_rel_uncertainty",
    "fiber_km",
    "loss_qnu_db",
}

_STRICTLY_POSITIVE = {
    "v_mod",
    "rep_rate",
    "gate_time",
    "det_bandwidth_hz",
    "photon_energy_j",
    "p_lo_w",
    "tia_gain_ohm",
    "responsivity",
    "adc_range_v",
}


@dataclass(frozen=True)
class SystemParams:
    """Calibrated scalars of one QLT/QNU link feeding the noise and key-rate math.

    Defaults are the reference operating point used throughout: a 1 MHz
    repetition system at quantum-level modulation (v_mod in SNU), 0.2 dB/km
    fiber and a receiver with 42% quantum efficiency.
    """

    eta: float = 0.42                  # detector quantum efficiency
    v_el: float = 0.18                 # electronic noise, SNU
    beta_rec: float = 0.97             # reconciliation efficiency
    v_mod: float = 0.5                 # modulation variance V_A, SNU
    rep_rate: float = 1e6              # repetition frequency, Hz
    gate_time: float = 1e-9            # detector integration time, s
    atten_db_per_km: float = 0.2       # fiber attenuation, dB/km
    fiber_km: float = 30.0             # one-way fiber length, km
    loss_qnu_db: float = 3.0           # intra-user round-trip loss, dB
    rayleigh_coeff_db: float = -40.0   # Rayleigh backscattering coefficient, dB
    circ_directionality_db: float = 60.0  # circulator directionality, dB (suppression)
    rin_sig: float = 8e-11             # relative intensity noise, 1/Hz
    rin_lo: float = 8e-11
    linewidth_a_hz: float = 10e3       # laser linewidths, Hz
    linewidth_b_hz: float = 10e3
    nep: float = 4.5e-12               # noise-equivalent power, W/sqrt(Hz)
    det_bandwidth_hz: float = 250e6    # detector bandwidth, Hz
    photon_energy_j: float = 1.28e-19  # photon energy hf, J
    p_lo_w: float = 8e-3               # local-oscillator power, W
    tia_gain_ohm: float = 20e3         # amplifier gain, ohm
    responsivity: float = 0.85         # photodiode responsivity, A/W
    adc_bits: int = 10                 # ADC resolution, bits
    adc_range_v: float = 1.0           # ADC full-scale range, V
    adc_var_v2: float = 1e-8           # additional ADC variance, V^2
    cmrr_db: float = 30.0              # common-mode rejection ratio, dB
    dac_rel_uncertainty: float = 0.01  # relative DAC voltage uncertainty

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not math.isfinite(value):
                raise ValueError(f"{f.name} must be finite, got {value!r}")
        if not 0.0 < self.eta <= 1.0:
            raise ValueError(f"eta must be in (0, 1], got {self.eta}")
        if not 0.0 < self.beta_rec <= 1.0:
            raise ValueError(f"beta_rec must be in (0, 1], got {self.beta_rec}")
        if self.v_el < 0.0:
            raise ValueError(f"v_el must be >= 0, got {self.v_el}")
        if self.adc_bits < 1:
            raise ValueError(f"adc_bits must be >= 1, got {self.adc_bits}")
        for name in _STRICTLY_POSITIVE:
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)}")
        for name in _NON_NEGATIVE:
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be >= 0, got {getattr(self, name)}")

    @classmethod
    def from_mapping(cls, mapping) -> "SystemParams":
        """Build from a flat key/value mapping, rejecting unknown keys."""
        known = {f.name for f in fields(cls)}
        unknown = set(mapping) - known
        if unknown:
            raise ValueError(f"unknown system parameter(s): {sorted(unknown)}")
        kwargs = dict(mapping)
        if "adc_bits" in kwargs:
            bits = kwargs["adc_bits"]
            if bits != int(bits):
                raise ValueError(f"adc_bits must be an integer, got {bits!r}")
            kwargs["adc_bits"] = int(bits)
        return cls(**kwargs)
