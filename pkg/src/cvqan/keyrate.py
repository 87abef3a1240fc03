"""Asymptotic secret key rate of the four-state protocol under collective attack.

Closed-form route: the two-mode shared state's symplectic invariants give the
first eigenvalue pair; the detector-conditioned pair follows from detection-
dependent invariants; the eavesdropper's information is capped by the Holevo
quantity. A reference matrix pipeline (:mod:`cvqan.gaussian`) computes the
same spectra explicitly and anchors these formulas in tests.
"""

import math
import warnings
from dataclasses import dataclass

from . import gaussian
from .gaussian import UnphysicalStateError
from .params import SystemParams

DETECTIONS = ("homodyne", "heterodyne")

# The four-point modulation alphabet approximates Gaussian modulation only at
# low variance; above this the correlation deficit grows and rates degrade.
Z4_VALID_V_MOD = 0.5


@dataclass(frozen=True)
class ChannelModel:
    """Channel plus receiver description entering the key-rate formulas."""

    transmittance: float
    excess_noise: float
    detection: str = "homodyne"
    eta: float = 0.42
    v_el: float = 0.18

    def __post_init__(self):
        if not 0.0 < self.transmittance <= 1.0:
            raise ValueError(f"transmittance must be in (0, 1], got {self.transmittance}")
        if self.excess_noise < 0.0:
            raise ValueError(f"excess_noise must be >= 0, got {self.excess_noise}")
        if self.detection not in DETECTIONS:
            raise ValueError(f"detection must be one of {DETECTIONS}, got {self.detection!r}")
        if not 0.0 < self.eta <= 1.0:
            raise ValueError(f"eta must be in (0, 1], got {self.eta}")
        if self.v_el < 0.0:
            raise ValueError(f"v_el must be >= 0, got {self.v_el}")


@dataclass(frozen=True)
class KeyRateResult:
    """Key-rate evaluation for one user: information terms, rates, spectra."""

    i_ab: float          # mutual information, bits/symbol
    chi_be: float        # eavesdropper bound, bits/symbol
    k_p: float           # secret fraction, bits/symbol (clamped at 0)
    k_p_raw: float       # unclamped secret fraction
    k_s: float           # secret key rate, bits/second
    eigenvalues: tuple   # symplectic eigenvalues (λ1..λ5)


def z4(alpha_sq: float, printed_last_term: bool = False) -> float:
    """Quadrature correlation of the four-point modulation alphabet.

    alpha_sq is the mean photon number of the alphabet (v_mod / 2). The last
    term uses the exponent −1/2, symmetric with the first three; set
    printed_last_term=True for the +1/2 variant (the difference is < 1e-3
    relative for v_mod <= 0.5).
    """
    if alpha_sq <= 0.0:
        raise ValueError(f"alpha_sq must be > 0, got {alpha_sq}")
    damp = 0.5 * math.exp(-alpha_sq)
    l0 = damp * (math.cosh(alpha_sq) + math.cos(alpha_sq))
    l1 = damp * (math.sinh(alpha_sq) + math.sin(alpha_sq))
    l2 = damp * (math.cosh(alpha_sq) - math.cos(alpha_sq))
    l3 = damp * (math.sinh(alpha_sq) - math.sin(alpha_sq))
    last = l3 ** 1.5 * (l0 ** 0.5 if printed_last_term else l0 ** -0.5)
    return 2.0 * alpha_sq * (
        l0 ** 1.5 * l1 ** -0.5 + l1 ** 1.5 * l2 ** -0.5 + l2 ** 1.5 * l3 ** -0.5 + last
    )


def z_gaussian(v_mod: float) -> float:
    """Quadrature correlation of Gaussian modulation, sqrt(V² − 1) with V = v_mod + 1."""
    v = v_mod + 1.0
    return math.sqrt(v * v - 1.0)


def chi_quantities(ch: ChannelModel):
    """Channel, detection and total added noise referred to the channel input.

    chi_line = 1/T − 1 + ε; homodyne detection adds [(1−η) + v_el]/η and
    heterodyne [1 + (1−η) + 2·v_el]/η; the total is chi_line + chi_det/T.
    """
    chi_line = 1.0 / ch.transmittance - 1.0 + ch.excess_noise
    if ch.detection == "homodyne":
        chi_det = ((1.0 - ch.eta) + ch.v_el) / ch.eta
    else:
        chi_det = (1.0 + (1.0 - ch.eta) + 2.0 * ch.v_el) / ch.eta
    chi_tot = chi_line + chi_det / ch.transmittance
    return chi_line, chi_det, chi_tot


def mutual_information(ch: ChannelModel, v_mod: float) -> float:
    """Sender/receiver mutual information in bits per symbol.

    Homodyne: ½·log2((V + chi_tot)/(1 + chi_tot)); heterodyne measures both
    quadratures and doubles it (with its own chi_tot).
    """
    v = v_mod + 1.0
    _, _, chi_tot = chi_quantities(ch)
    half_bits = 0.5 * math.log2((v + chi_tot) / (1.0 + chi_tot))
    return half_bits if ch.detection == "homodyne" else 2.0 * half_bits


def g_entropy(x: float) -> float:
    """Von Neumann entropy of a thermal state with mean photon number x, in bits."""
    if x < 0.0:
        if x > -1e-12:  # numerical noise around the vacuum
            return 0.0
        raise ValueError(f"mean photon number must be >= 0, got {x}")
    if x == 0.0:
        return 0.0
    return (x + 1.0) * math.log2(x + 1.0) - x * math.log2(x)


def _lambda_pair(s: float, p: float, what: str):
    """Solve λ² pairs from sum/product invariants: λ² = (s ± sqrt(s² − 4p))/2."""
    disc = s * s - 4.0 * p
    if disc < 0.0:
        if disc < -1e-9 * max(s * s, 1.0):
            raise UnphysicalStateError(f"negative discriminant solving {what} eigenvalues")
        disc = 0.0
    root = math.sqrt(disc)
    hi = 0.5 * (s + root)
    lo = 0.5 * (s - root)
    if lo < 0.0:
        if lo < -1e-9 * max(abs(hi), 1.0):
            raise UnphysicalStateError(f"negative {what} eigenvalue squared")
        lo = 0.0
    return math.sqrt(hi), math.sqrt(lo)


def holevo_bound(ch: ChannelModel, v_mod: float):
    """Eavesdropper's information bound, closed form.

    Returns (chi_be in bits/symbol, eigenvalues (λ1..λ5), λ5 = 1 exactly).
    Raises UnphysicalStateError outside the physical parameter region.
    """
    v = v_mod + 1.0
    z = z4(v_mod / 2.0)
    chi_line, _, chi_tot = chi_quantities(ch)
    t = ch.transmittance

    a_inv = v * v + t * t * (v + chi_line) ** 2 - 2.0 * t * z * z
    b_inv = (t * v * v + t * v * chi_line - t * z * z) ** 2
    lam1, lam2 = _lambda_pair(a_inv, b_inv, "shared-state")

    sqrt_b = math.sqrt(b_inv)
    denom = t * (v + chi_tot)
    if ch.detection == "homodyne":
        chi_det = ((1.0 - ch.eta) + ch.v_el) / ch.eta
        c_inv = (v * sqrt_b + t * (v + chi_line) + a_inv * chi_det) / denom
        d_inv = sqrt_b * (v + sqrt_b * chi_det) / denom
    else:
        chi_det = (1.0 + (1.0 - ch.eta) + 2.0 * ch.v_el) / ch.eta
        # The 2·t·z² term generalizes the Gaussian-modulation 2·t·(V²−1):
        # required for exact agreement with the matrix pipeline at any z.
        c_inv = (
            a_inv * chi_det ** 2 + b_inv + 1.0
            + 2.0 * chi_det * (v * sqrt_b + t * (v + chi_line))
            + 2.0 * t * z * z
        ) / denom ** 2
        d_inv = ((v + sqrt_b * chi_det) / denom) ** 2
    lam3, lam4 = _lambda_pair(c_inv, d_inv, "conditioned-state")

    for lam in (lam1, lam2, lam3, lam4):
        if lam < 1.0 - 1e-9:
            raise UnphysicalStateError(f"symplectic eigenvalue {lam:.9g} < 1")

    chi_be = (
        g_entropy((lam1 - 1.0) / 2.0)
        + g_entropy((lam2 - 1.0) / 2.0)
        - g_entropy((lam3 - 1.0) / 2.0)
        - g_entropy((lam4 - 1.0) / 2.0)
    )
    return chi_be, (lam1, lam2, lam3, lam4, 1.0)


def secret_key(ch: ChannelModel, params: SystemParams, v_mod: float = None) -> KeyRateResult:
    """Secret fraction and key rate for one user.

    k_p = beta_rec·I_AB − chi_BE, reported clamped at zero with the raw value
    retained; k_s scales by the repetition rate.
    """
    if v_mod is None:
        v_mod = params.v_mod
    if v_mod <= 0.0:
        raise ValueError(f"v_mod must be > 0, got {v_mod}")
    if v_mod > Z4_VALID_V_MOD:
        warnings.warn(
            f"v_mod = {v_mod} exceeds {Z4_VALID_V_MOD}; the four-point alphabet's "
            "correlation deviates from the Gaussian value there",
            stacklevel=2,
        )
    i_ab = mutual_information(ch, v_mod)
    chi_be, lams = holevo_bound(ch, v_mod)
    k_p_raw = params.beta_rec * i_ab - chi_be
    k_p = max(0.0, k_p_raw)
    return KeyRateResult(
        i_ab=i_ab,
        chi_be=chi_be,
        k_p=k_p,
        k_p_raw=k_p_raw,
        k_s=params.rep_rate * k_p,
        eigenvalues=lams,
    )


def holevo_bound_matrix(ch: ChannelModel, v_mod: float):
    """Matrix-pipeline route to the same bound; see :mod:`cvqan.gaussian`."""
    return gaussian.holevo_bound_matrix(ch, v_mod)


def plob_bound(t: float) -> float:
    """Repeaterless secret-key capacity of a pure-loss channel, −log2(1 − T)."""
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"transmittance must be in [0, 1], got {t}")
    if t == 1.0:
        return math.inf
    return -math.log2(1.0 - t)
