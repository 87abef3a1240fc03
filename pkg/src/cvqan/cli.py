"""Batch front-end: run scenarios, write plot-ready CSV/JSON artifacts.

Every command reads one scenario file, validates it completely before any
computation, computes deterministically under the given seed, and writes its
outputs atomically (temp file then rename). Exit codes: 0 success, 1
validation failure, 2 computation infeasibility.
"""

import argparse
import csv
import io
import json
import os
import sys
import tempfile
import warnings
from pathlib import Path

from . import crosstalk
from .gaussian import UnphysicalStateError
from .network import sweep
from .scenario import ScenarioError, load_scenario

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_INFEASIBLE = 2


def _env_default(name, fallback, cast):
    raw = os.environ.get(name)
    if raw is None:
        return fallback
    try:
        return cast(raw)
    except ValueError:
        raise ScenarioError(f"environment variable {name} is not a valid {cast.__name__}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="cvqan",
        description="Multi-user CV-QKD access network: sweeps, budgets, simulations, fits.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", type=Path,
                        default=_env_default("CVQAN_SCENARIO", None, Path),
                        help="scenario TOML file (env: CVQAN_SCENARIO)")
    common.add_argument("--out", type=Path,
                        default=_env_default("CVQAN_OUT", Path("."), Path),
                        help="output directory (env: CVQAN_OUT)")
    common.add_argument("--seed", type=int,
                        default=_env_default("CVQAN_SEED", 0, int),
                        help="master random seed (env: CVQAN_SEED)")
    common.add_argument("--threads", type=int,
                        default=_env_default("CVQAN_THREADS", 1, int),
                        help="worker threads for Monte Carlo trials (env: CVQAN_THREADS)")

    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("keyrate-sweep", parents=[common],
                   help="distance x capacity secret-key-rate grid with PLOB column")
    sub.add_parser("noise-breakdown", parents=[common],
                   help="per-component noise budget in SNU, trusted/untrusted flagged")
    sub.add_parser("simulate", parents=[common],
                   help="end-to-end multi-user DSP simulation: sync, SER, excess noise")
    sub.add_parser("crosstalk-fit", parents=[common],
                   help="Monte Carlo crosstalk grids and refitted noise laws")
    return p


def _atomic_write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_csv(path: Path, header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    _atomic_write(path, buf.getvalue())


def _write_json(path: Path, payload):
    _atomic_write(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def cmd_keyrate_sweep(scenario, out_dir: Path, seed: int, threads: int):
    grid = sweep(scenario.network, scenario.sweep.distances_km, scenario.sweep.capacities)
    rows = grid.to_rows()
    header = ["L_km", "N", "T", "eps_snu", "i_ab", "chi_be", "kp", "ks_bps", "plob"]
    _write_csv(out_dir / "keyrate_sweep.csv", header,
               [[r[k] for k in header] for r in rows])
    return [out_dir / "keyrate_sweep.csv"]


def cmd_noise_breakdown(scenario, out_dir: Path, seed: int, threads: int):
    from .noise import TRUSTED_COMPONENTS, UNTRUSTED_COMPONENTS, total_budget

    budget = total_budget(scenario.system, scenario.network.n_users, scenario.fit)
    payload = {
        "n_users": scenario.network.n_users,
        "untrusted_snu": {k: getattr(budget, k) for k in UNTRUSTED_COMPONENTS},
        "trusted_snu": {k: getattr(budget, k) for k in TRUSTED_COMPONENTS},
        "total_excess_snu": budget.total_excess,
    }
    _write_json(out_dir / "noise_budget.json", payload)
    return [out_dir / "noise_budget.json"]


def cmd_simulate(scenario, out_dir: Path, seed: int, threads: int):
    from .dsp.pipeline import run_simulation

    report = run_simulation(scenario.simulate, seed=seed)
    frame_rows = [
        [r.frame, r.user, r.offset_symbols, r.sync_ok, r.ser, r.t_hat, r.eps_hat, r.v_b]
        for r in report.records
    ]
    _write_csv(out_dir / "sim_frames.csv",
               ["frame", "user", "offset_symbols", "sync_ok", "ser", "t_hat", "eps_hat", "v_b"],
               frame_rows)

    const_rows = []
    for user in sorted(report.constellations):
        for z in report.constellations[user]:
            const_rows.append([user, float(z.real), float(z.imag)])
    _write_csv(out_dir / "sim_constellation.csv", ["user", "re", "im"], const_rows)

    n_users = report.settings.n_users
    summary = {
        "n_frames": report.settings.n_frames,
        "mean_eps_snu": {str(u): report.mean_eps(u) for u in range(n_users)},
        "sync_success_rate": {str(u): report.sync_success_rate(u) for u in range(n_users)},
        "total_symbol_errors": report.total_symbol_errors(),
    }
    _write_json(out_dir / "sim_summary.json", summary)
    return [out_dir / "sim_frames.csv", out_dir / "sim_constellation.csv",
            out_dir / "sim_summary.json"]


def cmd_crosstalk_fit(scenario, out_dir: Path, seed: int, threads: int):
    mc = scenario.monte_carlo
    settings = crosstalk.McSettings(
        symbol_rate_hz=mc.symbol_rate_hz,
        n_symbols=mc.n_symbols,
        victim_carrier_hz=mc.victim_carrier_hz,
        trials=mc.trials,
    )
    sample_rows = []
    inter_runs = []
    for delta_f in mc.delta_f_hz:
        run = crosstalk.mc_interband(delta_f, mc.v_mod, settings=settings,
                                     seed=seed, threads=threads)
        inter_runs.append(run)
        sample_rows.append(["interband", run.grid_value, run.mean_snu,
                            run.stderr_snu, run.trials])
    cap_runs = []
    for n in mc.capacities:
        run = crosstalk.mc_capacity(n, mc.v_mod, spacing_hz=mc.capacity_spacing_hz,
                                    trials=mc.capacity_trials, settings=settings,
                                    seed=seed, threads=threads)
        cap_runs.append(run)
        sample_rows.append(["capacity", run.grid_value, run.mean_snu,
                            run.stderr_snu, run.trials])
    _write_csv(out_dir / "crosstalk_samples.csv",
               ["kind", "grid_value", "mean_snu", "stderr_snu", "trials"], sample_rows)

    fit_inter = crosstalk.fit_interband([r.grid_value for r in inter_runs],
                                        [r.mean_snu for r in inter_runs], mc.v_mod)
    fit_cap = crosstalk.fit_capacity([r.grid_value for r in cap_runs],
                                     [r.mean_snu for r in cap_runs], mc.v_mod)
    payload = {
        "interband": {
            "a": fit_inter.constants[0],
            "b": fit_inter.constants[1],
            "residual": fit_inter.residual_norm,
            "predict_se": fit_inter.predict_se,
        },
        "capacity": {
            "c": fit_cap.constants[0],
            "d": fit_cap.constants[1],
            "residual": fit_cap.residual_norm,
            "predict_se": fit_cap.predict_se,
        },
    }
    _write_json(out_dir / "crosstalk_fit.json", payload)
    return [out_dir / "crosstalk_samples.csv", out_dir / "crosstalk_fit.json"]


_COMMANDS = {
    "keyrate-sweep": cmd_keyrate_sweep,
    "noise-breakdown": cmd_noise_breakdown,
    "simulate": cmd_simulate,
    "crosstalk-fit": cmd_crosstalk_fit,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.scenario is None:
            raise ScenarioError("--scenario is required (or set CVQAN_SCENARIO)")
        if not args.scenario.exists():
            raise ScenarioError(f"scenario file not found: {args.scenario}")
        if args.threads < 1:
            raise ScenarioError("--threads must be >= 1")
        if args.seed < 0:
            raise ScenarioError("--seed must be >= 0")
        scenario = load_scenario(args.scenario)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION

    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            written = _COMMANDS[args.command](scenario, args.out, args.seed, args.threads)
    except UnphysicalStateError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION

    for path in written:
        print(path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
