"""Whole-network evaluation: per-user budgets, key rates, and sweep grids."""

from dataclasses import dataclass, field, replace

from . import noise
from .keyrate import ChannelModel, KeyRateResult, plob_bound, secret_key
from .noise import CrosstalkFit, NoiseBudget
from .params import SystemParams, transmittance


@dataclass(frozen=True)
class NetworkConfig:
    """Topology of one hub with n_users active users behind an N:1 splitter."""

    system: SystemParams
    n_users: int = 8
    splitter_branches: int = 8
    base_carrier_hz: float = 10e6
    carrier_spacing_hz: float = 10e6
    fiber_km: float = None
    detection: str = "homodyne"
    v_mod_per_user: tuple = None
    fit: CrosstalkFit = field(default_factory=CrosstalkFit)

    def __post_init__(self):
        if self.n_users < 1:
            raise ValueError("n_users must be >= 1")
        if self.n_users > self.splitter_branches:
            raise ValueError("more active users than splitter branches")
        if self.fiber_km is None:
            object.__setattr__(self, "fiber_km", self.system.fiber_km)
        if self.fiber_km < 0:
            raise ValueError("fiber_km must be >= 0")
        top = self.base_carrier_hz + (self.n_users - 1) * self.carrier_spacing_hz
        if top > self.system.det_bandwidth_hz:
            raise ValueError("highest carrier exceeds the detector bandwidth")
        if self.v_mod_per_user is not None:
            v = tuple(float(x) for x in self.v_mod_per_user)
            if len(v) != self.n_users:
                raise ValueError("v_mod_per_user must list one value per user")
            if any(x <= 0 for x in v):
                raise ValueError("per-user modulation variances must be > 0")
            object.__setattr__(self, "v_mod_per_user", v)

    def user_v_mod(self, user_index: int) -> float:
        if not 0 <= user_index < self.n_users:
            raise ValueError(f"user_index out of range 0..{self.n_users - 1}")
        if self.v_mod_per_user is not None:
            return self.v_mod_per_user[user_index]
        return self.system.v_mod


def evaluate_user(config: NetworkConfig, user_index: int,
                  excess_override: float = None) -> tuple:
    """Noise budget and key rate of one user in the configured network.

    The active-user count drives the crosstalk and circulator terms; the
    splitter hardware drives the transmittance. An explicit excess_override
    replaces the modelled budget total (for measured operating points).
    Infeasible points report zero rate rather than raising.
    """
    v_mod = config.user_v_mod(user_index)
    params = replace(config.system, fiber_km=config.fiber_km, v_mod=v_mod)
    budget = noise.total_budget(params, config.n_users, config.fit)
    excess = budget.total_excess if excess_override is None else excess_override
    t = transmittance(config.fiber_km, params.atten_db_per_km, config.splitter_branches)
    ch = ChannelModel(
        transmittance=t,
        excess_noise=excess,
        detection=config.detection,
        eta=params.eta,
        v_el=params.v_el,
    )
    return budget, secret_key(ch, params, v_mod)


@dataclass(frozen=True)
class SweepCell:
    fiber_km: float
    n_users: int
    transmittance: float
    budget: NoiseBudget
    rate: KeyRateResult
    plob: float


@dataclass(frozen=True)
class SweepGrid:
    """Rectangular distance × capacity grid of per-user evaluations."""

    distances_km: tuple
    capacities: tuple
    cells: tuple  # row-major: index = i_distance * len(capacities) + i_capacity

    def cell(self, i_distance: int, i_capacity: int) -> SweepCell:
        return self.cells[i_distance * len(self.capacities) + i_capacity]

    def to_rows(self):
        """Long-format rows (L_km, N, T, eps_total, i_ab, chi_be, kp, ks_bps, plob)."""
        rows = []
        for cell in self.cells:
            rows.append({
                "L_km": cell.fiber_km,
                "N": cell.n_users,
                "T": cell.transmittance,
                "eps_snu": cell.budget.total_excess,
                "i_ab": cell.rate.i_ab,
                "chi_be": cell.rate.chi_be,
                "kp": cell.rate.k_p,
                "ks_bps": cell.rate.k_s,
                "plob": cell.plob,
            })
        return rows


def sweep(config: NetworkConfig, distances_km, capacities) -> SweepGrid:
    """Evaluate one representative user over a distance × capacity grid.

    Each capacity cell models a network built for that many users: the
    splitter branch count follows the capacity (never below the configured
    hardware), and the crosstalk/circulator terms see the same count.
    """
    distances = tuple(float(d) for d in distances_km)
    caps = tuple(int(n) for n in capacities)
    if not distances or not caps:
        raise ValueError("sweep axes must be non-empty")
    if any(d < 0 for d in distances):
        raise ValueError("distances must be >= 0")
    if any(n < 1 for n in caps):
        raise ValueError("capacities must be >= 1")

    cells = []
    bandwidth = config.system.det_bandwidth_hz
    for dist in distances:
        for cap in caps:
            # Denser carrier plans for larger capacities keep every user
            # inside the detector bandwidth; the capacity noise law already
            # folds in the grid dependence.
            spacing = config.carrier_spacing_hz
            if cap > 1:
                spacing = min(spacing, (bandwidth - config.base_carrier_hz) / (cap - 1))
            cfg = replace(
                config,
                n_users=cap,
                splitter_branches=max(cap, 1),
                fiber_km=dist,
                carrier_spacing_hz=spacing,
                v_mod_per_user=None,
            )
            budget, rate = evaluate_user(cfg, 0)
            t = transmittance(dist, config.system.atten_db_per_km, cap)
            cells.append(SweepCell(
                fiber_km=dist, n_users=cap, transmittance=t,
                budget=budget, rate=rate, plob=plob_bound(t),
            ))
    return SweepGrid(distances_km=distances, capacities=caps, cells=tuple(cells))
