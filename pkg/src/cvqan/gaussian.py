"""Gaussian-state covariance machinery for the eavesdropper bound.

This is the explicit matrix route: build the two-mode state shared through
the channel, append the EPR-equivalent model of the imperfect detector, mix
on a beam splitter, condition on the measured mode, and read off symplectic
eigenvalues. The closed forms in :mod:`cvqan.keyrate` must agree with this
pipeline to high precision; tests enforce that equivalence.
"""

from dataclasses import dataclass

import numpy as np

_SIGMA_Z = np.diag([1.0, -1.0])
_I2 = np.eye(2)


class UnphysicalStateError(ValueError):
    """A covariance matrix violates the uncertainty bound (symplectic eigenvalue < 1).

    Signals an invalid parameter region rather than a numerical bug.
    """


@dataclass(frozen=True)
class CovMatrix:
    """Symmetric 2n×2n covariance matrix in (x1, p1, ..., xn, pn) ordering."""

    entries: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] % 2:
            raise ValueError(f"covariance matrix must be square with even size, got {m.shape}")
        if not np.allclose(m, m.T, rtol=0.0, atol=1e-12):
            raise ValueError("covariance matrix must be symmetric to 1e-12")
        object.__setattr__(self, "entries", m)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def symplectic_eigenvalues(self) -> np.ndarray:
        return symplectic_eigenvalues(self.entries)


def symplectic_form(n_modes: int) -> np.ndarray:
    """Block-diagonal symplectic form, [[0, 1], [-1, 0]] per mode."""
    omega = np.zeros((2 * n_modes, 2 * n_modes))
    for k in range(n_modes):
        omega[2 * k, 2 * k + 1] = 1.0
        omega[2 * k + 1, 2 * k] = -1.0
    return omega


def symplectic_eigenvalues(gamma: np.ndarray, physical_tol: float = 1e-9) -> np.ndarray:
    """Symplectic spectrum of a covariance matrix, sorted descending.

    The eigenvalues of Ω·γ come in ±iλ pairs; the moduli are paired by sorting
    and taking every other entry. Raises UnphysicalStateError when any λ falls
    below 1 − physical_tol.
    """
    gamma = np.asarray(gamma, dtype=float)
    n_modes = gamma.shape[0] // 2
    moduli = np.sort(np.abs(np.linalg.eigvals(symplectic_form(n_modes) @ gamma)))
    lams = moduli[::2]
    pair_gap = np.abs(moduli[1::2] - lams)
    if np.any(pair_gap > 1e-6 * np.maximum(lams, 1.0)):
        raise UnphysicalStateError("symplectic spectrum did not pair into ±iλ doublets")
    if np.any(lams < 1.0 - physical_tol):
        raise UnphysicalStateError(
            f"unphysical symplectic eigenvalue {lams.min():.6g} < 1"
        )
    return lams[::-1].copy()


def symplectic_rotation(theta: float) -> np.ndarray:
    """Single-mode phase-plane rotation; symplectic and orthogonal."""
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, s], [-s, c]])


def epr_cov(v: float) -> np.ndarray:
    """Two-mode squeezed state of quadrature variance v (v >= 1)."""
    if v < 1.0:
        raise ValueError(f"EPR variance must be >= 1, got {v}")
    c = np.sqrt(v * v - 1.0)
    return np.block([[v * _I2, c * _SIGMA_Z], [c * _SIGMA_Z, v * _I2]])


def shared_state_cov(v: float, t: float, chi_line: float, z_corr: float) -> np.ndarray:
    """Two-mode sender/receiver state after the noisy lossy channel.

    Diagonal blocks v and t·(v + chi_line); off-diagonal √t·z_corr·σ_z, where
    z_corr is the quadrature correlation of the modulation alphabet.
    """
    b = t * (v + chi_line)
    c = np.sqrt(t) * z_corr
    return np.block([[v * _I2, c * _SIGMA_Z], [c * _SIGMA_Z, b * _I2]])


def detector_bs_symplectic(eta: float) -> np.ndarray:
    """8×8 beam-splitter map mixing the received mode with one EPR arm.

    Mode order (A, B, F0, G); the splitter of transmittance eta acts on the
    middle two modes and models the detector's quantum efficiency.
    """
    if not 0.0 < eta <= 1.0:
        raise ValueError(f"eta must be in (0, 1], got {eta}")
    y = np.eye(8)
    r, q = np.sqrt(eta), np.sqrt(1.0 - eta)
    y[2:4, 2:4] = r * _I2
    y[2:4, 4:6] = q * _I2
    y[4:6, 2:4] = -q * _I2
    y[4:6, 4:6] = r * _I2
    return y


def detector_epr_variance(eta: float, v_el: float, detection: str) -> float:
    """EPR variance modelling electronic noise v_el behind efficiency eta."""
    if eta >= 1.0:
        if v_el > 0.0:
            raise ValueError("eta = 1 with v_el > 0 has no EPR-equivalent detector model")
        return 1.0
    scale = 1.0 if detection == "homodyne" else 2.0
    return 1.0 + scale * v_el / (1.0 - eta)


def build_conditional_matrices(ch, v_mod: float) -> dict:
    """All covariance matrices of the detector-conditioned eavesdropper bound.

    Returns a dict with keys: shared (sender/receiver two-mode state),
    detector_epr, bs (the 8×8 splitter map), joint (modes A, F, G, B ordered
    with the measured mode last) and conditioned (3-mode matrix after the
    measurement of the receiver mode).
    """
    from .keyrate import chi_quantities, z4  # deferred: keyrate imports this module

    v = v_mod + 1.0
    chi_line, _, _ = chi_quantities(ch)
    z = z4(v_mod / 2.0)
    gamma_shared = shared_state_cov(v, ch.transmittance, chi_line, z)
    gamma_epr = epr_cov(detector_epr_variance(ch.eta, ch.v_el, ch.detection))

    pre = np.zeros((8, 8))
    pre[:4, :4] = gamma_shared
    pre[4:, 4:] = gamma_epr
    y = detector_bs_symplectic(ch.eta)
    post = y.T @ pre @ y  # modes (A, B3, F, G)

    order = [0, 1, 4, 5, 6, 7, 2, 3]  # -> (A, F, G, B3)
    joint = post[np.ix_(order, order)]
    gamma_afg = joint[:6, :6]
    sigma = joint[6:, :6]
    gamma_b = joint[6:, 6:]

    if ch.detection == "homodyne":
        x_proj = np.diag([1.0, 0.0])
        h = np.linalg.pinv(x_proj @ gamma_b @ x_proj)
    else:
        h = np.linalg.inv(gamma_b + _I2)
    conditioned = gamma_afg - sigma.T @ h @ sigma

    return {
        "shared": CovMatrix(gamma_shared),
        "detector_epr": CovMatrix(gamma_epr),
        "bs": y,
        "joint": CovMatrix(joint),
        "conditioned": CovMatrix(0.5 * (conditioned + conditioned.T)),
    }


def holevo_bound_matrix(ch, v_mod: float):
    """Eavesdropper information bound via the explicit matrix pipeline.

    Returns (chi_be in bits/symbol, eigenvalues (λ1..λ5)). This is the oracle
    route for the closed forms in :mod:`cvqan.keyrate`.
    """
    from .keyrate import g_entropy

    mats = build_conditional_matrices(ch, v_mod)
    lam12 = mats["shared"].symplectic_eigenvalues()
    lam345 = mats["conditioned"].symplectic_eigenvalues()
    chi_be = (
        g_entropy((lam12[0] - 1.0) / 2.0)
        + g_entropy((lam12[1] - 1.0) / 2.0)
        - sum(g_entropy((lam - 1.0) / 2.0) for lam in lam345)
    )
    lams = (lam12[0], lam12[1], lam345[0], lam345[1], lam345[2])
    return chi_be, lams
