"""Scenario files: one TOML document driving every batch command.

A scenario has a [system] table (flat keys matching SystemParams fields, SI
units), a [network] table, an optional [crosstalk_fit] table, and per-command
tables [keyrate_sweep], [simulate], [monte_carlo]. Unknown keys anywhere are
rejected up front so typos fail fast instead of silently using defaults.
"""

import sys
from dataclasses import dataclass, field, fields

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .dsp.pipeline import SimulationSettings
from .network import NetworkConfig
from .noise import CrosstalkFit
from .params import SystemParams


class ScenarioError(ValueError):
    """Invalid or inconsistent scenario file."""


@dataclass(frozen=True)
class SweepSettings:
    """Axes of the distance × capacity key-rate sweep."""

    distances_km: tuple = tuple(float(x) for x in range(0, 61))
    capacities: tuple = (2, 8, 64, 128)

    def __post_init__(self):
        if not self.distances_km:
            raise ScenarioError("distances_km must not be empty")
        if not self.capacities:
            raise ScenarioError("capacities must not be empty")
        object.__setattr__(self, "distances_km", tuple(float(d) for d in self.distances_km))
        object.__setattr__(self, "capacities", tuple(int(n) for n in self.capacities))


@dataclass(frozen=True)
class MonteCarloSettings:
    """Grids and effort of the crosstalk Monte Carlo runs."""

    trials: int = 1000
    n_symbols: int = 512
    symbol_rate_hz: float = 1e6
    victim_carrier_hz: float = 100e6
    delta_f_hz: tuple = (5e6, 10e6, 20e6, 50e6)
    capacities: tuple = (2, 3, 4, 6, 8)
    capacity_spacing_hz: float = 10e6
    capacity_trials: int = 200
    v_mod: float = 1.0

    def __post_init__(self):
        if self.trials < 100:
            raise ScenarioError("fits need at least 100 trials per point")
        if len(self.delta_f_hz) < 2 or len(self.capacities) < 2:
            raise ScenarioError("fit grids need at least two points")
        object.__setattr__(self, "delta_f_hz", tuple(float(x) for x in self.delta_f_hz))
        object.__setattr__(self, "capacities", tuple(int(x) for x in self.capacities))


@dataclass(frozen=True)
class Scenario:
    system: SystemParams = field(default_factory=SystemParams)
    network: NetworkConfig = None
    fit: CrosstalkFit = field(default_factory=CrosstalkFit)
    sweep: SweepSettings = field(default_factory=SweepSettings)
    simulate: SimulationSettings = field(default_factory=SimulationSettings)
    monte_carlo: MonteCarloSettings = field(default_factory=MonteCarloSettings)

    def __post_init__(self):
        if self.network is None:
            object.__setattr__(self, "network", NetworkConfig(system=self.system, fit=self.fit))


_SECTIONS = ("system", "network", "crosstalk_fit", "keyrate_sweep", "simulate", "monte_carlo")


def _build(cls, table, what):
    known = {f.name for f in fields(cls)}
    unknown = set(table) - known
    if unknown:
        raise ScenarioError(f"unknown key(s) in [{what}]: {sorted(unknown)}")
    try:
        return cls(**{k: tuple(v) if isinstance(v, list) else v for k, v in table.items()})
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f"invalid [{what}] section: {exc}") from exc


def load_scenario(path) -> Scenario:
    """Parse and fully validate a scenario file."""
    with open(path, "rb") as fh:
        try:
            doc = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ScenarioError(f"malformed TOML: {exc}") from exc

    unknown = set(doc) - set(_SECTIONS)
    if unknown:
        raise ScenarioError(f"unknown section(s): {sorted(unknown)}")

    try:
        system = SystemParams.from_mapping(doc.get("system", {}))
    except ValueError as exc:
        raise ScenarioError(f"invalid [system] section: {exc}") from exc
    fit = _build(CrosstalkFit, doc.get("crosstalk_fit", {}), "crosstalk_fit")

    net_table = dict(doc.get("network", {}))
    known_net = {f.name for f in fields(NetworkConfig)} - {"system", "fit"}
    unknown = set(net_table) - known_net
    if unknown:
        raise ScenarioError(f"unknown key(s) in [network]: {sorted(unknown)}")
    if "v_mod_per_user" in net_table:
        net_table["v_mod_per_user"] = tuple(net_table["v_mod_per_user"])
    try:
        network = NetworkConfig(system=system, fit=fit, **net_table)
    except ValueError as exc:
        raise ScenarioError(f"invalid [network] section: {exc}") from exc

    return Scenario(
        system=system,
        network=network,
        fit=fit,
        sweep=_build(SweepSettings, doc.get("keyrate_sweep", {}), "keyrate_sweep"),
        simulate=_build(SimulationSettings, doc.get("simulate", {}), "simulate"),
        monte_carlo=_build(MonteCarloSettings, doc.get("monte_carlo", {}), "monte_carlo"),
    )
