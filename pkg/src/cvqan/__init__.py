"""cvqan: simulator and analysis engine for a multi-user CV-QKD access network.

A single hub (laser plus coherent receiver) serves many users over a
round-trip fiber plant; users modulate four-point coherent states on distinct
RF carriers and are separated by frequency-division multiplexing. The package
models the physical noise budget of that architecture, evaluates asymptotic
secret key rates for homodyne and heterodyne detection, simulates the full
DSP signal chain, and regenerates the crosstalk noise laws by Monte Carlo.
"""

from ._kernels import BACKEND as KERNEL_BACKEND
from .gaussian import CovMatrix, UnphysicalStateError
from .keyrate import (
    ChannelModel,
    KeyRateResult,
    chi_quantities,
    g_entropy,
    holevo_bound,
    holevo_bound_matrix,
    mutual_information,
    plob_bound,
    secret_key,
    z4,
    z_gaussian,
)
from .network import NetworkConfig, SweepGrid, evaluate_user, sweep
from .noise import CrosstalkFit, NoiseBudget, total_budget
from .params import SystemParams, db_to_linear, linear_to_db, transmittance

__version__ = "0.1.0"

__all__ = [
    "ChannelModel",
    "CovMatrix",
    "CrosstalkFit",
    "KERNEL_BACKEND",
    "KeyRateResult",
    "NetworkConfig",
    "NoiseBudget",
    "SweepGrid",
    "SystemParams",
    "UnphysicalStateError",
    "chi_quantities",
    "db_to_linear",
    "evaluate_user",
    "g_entropy",
    "holevo_bound",
    "holevo_bound_matrix",
    "linear_to_db",
    "mutual_information",
    "plob_bound",
    "secret_key",
    "sweep",
    "transmittance",
    "z4",
    "z_gaussian",
    "__version__",
]
