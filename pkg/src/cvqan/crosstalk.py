"""Monte Carlo measurement and refitting of frequency-crosstalk noise.

The closed-form crosstalk laws in :mod:`cvqan.noise` are fits; this module
regenerates them from first principles with the DSP chain: unsynchronized
aggressor transmitters leak sidelobe power into a victim band, where the
receiver chain measures it as added variance in shot-noise units referred to
the channel input. The victim-band measurement sums both recovered
quadratures (total in-band leakage), the quantity the fitted laws describe.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .dsp.receiver import FilterSpec, ReceiverChain
from .dsp.signals import ChannelSpec, SymbolFrame, UserTx, channel_and_detect


@dataclass(frozen=True)
class McSettings:
    """Shared Monte Carlo configuration."""

    symbol_rate_hz: float = 1e6
    n_symbols: int = 512
    # The victim sits far from DC so the aggressors' negative-frequency image
    # sidelobes (2·f_victim + delta_f away) stay negligible against the direct
    # ones; the leakage law depends on the carrier spacing alone.
    victim_carrier_hz: float = 100e6
    trials: int = 1000
    edge_symbols: int = 16  # dropped at both stream ends (filter transients)

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.n_symbols < 64:
            raise ValueError("n_symbols must be >= 64")
        if self.victim_carrier_hz <= 2 * self.symbol_rate_hz:
            raise ValueError("victim carrier too close to DC for its stopband")


@dataclass(frozen=True)
class McRun:
    """Monte Carlo estimate at one grid point."""

    grid_value: float      # delta_f in Hz, or network capacity N
    mean_snu: float
    stderr_snu: float
    trials: int
    samples: np.ndarray = field(repr=False, default=None)


def _sample_rate_for(max_carrier_hz: float, victim_carrier_hz: float,
                     symbol_rate_hz: float) -> float:
    """Power-of-two multiple of the symbol rate for faithful leakage numbers.

    Rectangular pulses have slowly decaying sidelobes, so three constraints
    apply beyond plain Nyquist: folded replicas must stay far (~80 lobes) from
    the victim band, and the discrete-time sidelobe envelope (a Dirichlet
    kernel) must track the continuous one out to the largest spacing, which
    needs roughly 8.5 samples per sidelobe oscillation.
    """
    needed = max(
        2.2 * (max_carrier_hz + 2.0 * symbol_rate_hz),
        max_carrier_hz + victim_carrier_hz + 80.0 * symbol_rate_hz,
        8.5 * (max_carrier_hz - victim_carrier_hz),
    )
    k = max(1, math.ceil(math.log2(needed / symbol_rate_hz)))
    return symbol_rate_hz * 2.0 ** k


def _victim_chain(settings: McSettings, max_carrier_hz: float, filter_spec=None):
    fs = _sample_rate_for(max_carrier_hz, settings.victim_carrier_hz, settings.symbol_rate_hz)
    spec = filter_spec or FilterSpec.for_carrier(settings.victim_carrier_hz, settings.symbol_rate_hz)
    return ReceiverChain(settings.victim_carrier_hz, fs, settings.symbol_rate_hz, spec), fs


def _leak_one_trial(chain, settings, fs, aggressors, v_mod, rng, trial_index=0, n_trials=1):
    """Total both-quadrature leakage of the aggressors into the victim band.

    Measured at the chain's decimated output in its native scale: the
    demodulator has unit amplitude gain for narrowband in-band content, so
    the summed variance of both recovered quadratures is the leaked band
    power in shot-noise units at the channel input. (The rect-symbol
    overshoot gain of the signal path is an inter-symbol artifact and does
    not apply to noise-like leakage.)"""
    sps = chain.samples_per_symbol
    # Sub-symbol timing dominates the trial-to-trial spread, so stratify it:
    # the first aggressor sweeps a uniform delay grid across trials, the rest
    # draw at random. Carrier phases are always random.
    base_delay = int((trial_index + 0.5) / max(n_trials, 1) * sps) % sps
    users = []
    for i, carrier in enumerate(aggressors):
        symbols = rng.integers(0, 4, settings.n_symbols)
        users.append(UserTx(
            frame=SymbolFrame(symbols, preamble_len=32),
            v_mod=v_mod,
            carrier_hz=carrier,
            rf_phase=float(rng.uniform(0.0, 2.0 * math.pi)),
            delay_samples=base_delay if i == 0 else int(rng.integers(0, sps)),
        ))
    n_samples = settings.n_symbols * sps  # trailing partial symbols are cut off
    wf = channel_and_detect(users, ChannelSpec(), sample_rate_hz=fs,
                            symbol_rate_hz=settings.symbol_rate_hz,
                            n_samples=n_samples, rng=rng)
    z = chain.process(wf)[settings.edge_symbols:-settings.edge_symbols]
    return float(np.var(z.real) + np.var(z.imag))


def _run_trials(worker, trials, seed_key, threads=1):
    """Deterministic trial fan-out: per-trial generators spawn from one seed,
    so serial and threaded runs produce identical samples in the same order."""
    seqs = np.random.SeedSequence(seed_key).spawn(trials)
    jobs = list(enumerate(seqs))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            vals = list(pool.map(lambda js: worker(np.random.default_rng(js[1]), js[0]), jobs))
    else:
        vals = [worker(np.random.default_rng(s), i) for i, s in jobs]
    return np.asarray(vals)


def mc_interband(delta_f_hz: float, v_mod: float, trials: int = None,
                 settings: McSettings = McSettings(), filter_spec: FilterSpec = None,
                 seed: int = 0, threads: int = 1) -> McRun:
    """Monte Carlo interband leakage for one aggressor at spacing delta_f_hz.

    The aggressor transmits random symbols with random carrier phase and
    sub-symbol timing each trial; the victim band is empty. Returns the
    leaked variance in SNU referred to the channel input (mean and standard
    error over trials).
    """
    if delta_f_hz < 2.0 * settings.symbol_rate_hz:
        raise ValueError("delta_f_hz overlaps the victim passband")
    trials = settings.trials if trials is None else trials
    aggressor = settings.victim_carrier_hz + delta_f_hz
    chain, fs = _victim_chain(settings, aggressor, filter_spec)

    vals = _run_trials(
        lambda rng, i: _leak_one_trial(chain, settings, fs, [aggressor], v_mod, rng, i, trials),
        trials, [0x1B, seed, int(delta_f_hz)], threads,
    )
    return McRun(grid_value=delta_f_hz, mean_snu=float(vals.mean()),
                 stderr_snu=float(vals.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0,
                 trials=trials, samples=vals)


def mc_capacity(n_users: int, v_mod: float, spacing_hz: float = 10e6, trials: int = None,
                settings: McSettings = McSettings(), filter_spec: FilterSpec = None,
                seed: int = 0, threads: int = 1) -> McRun:
    """Monte Carlo victim-band leakage with n_users on an equally spaced grid.

    The victim holds the lowest carrier; the other n_users − 1 transmitters
    occupy successive carriers above it, so every inter-user distance occurs
    once (leakage from equal distances on both sides does not stack).
    """
    if n_users < 2:
        raise ValueError("capacity runs need at least 2 users")
    trials = settings.trials if trials is None else trials
    aggressors = [settings.victim_carrier_hz + k * spacing_hz for k in range(1, n_users)]
    chain, fs = _victim_chain(settings, aggressors[-1], filter_spec)

    vals = _run_trials(
        lambda rng, i: _leak_one_trial(chain, settings, fs, aggressors, v_mod, rng, i, trials),
        trials, [0xCA, seed, n_users], threads,
    )
    return McRun(grid_value=float(n_users), mean_snu=float(vals.mean()),
                 stderr_snu=float(vals.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0,
                 trials=trials, samples=vals)


@dataclass(frozen=True)
class FitResult:
    """Log-space least-squares fit with residual diagnostics."""

    constants: tuple
    residual_norm: float      # RMS residual in log space
    predict_se: float         # standard error of a held-out log prediction


def fit_interband(delta_f_hz, eps_snu, v_mod: float) -> FitResult:
    """Fit eps = v_mod·exp(a)·delta_f^b by least squares in log space.

    Linear in (a, b) after taking logs, so the fit is deterministic. Returns
    (a, b) with the residual RMS and an out-of-sample prediction standard
    error derived from the residuals.
    """
    delta_f = np.asarray(delta_f_hz, dtype=float)
    eps = np.asarray(eps_snu, dtype=float)
    if delta_f.size != eps.size or delta_f.size < 2:
        raise ValueError("need at least two grid points")
    if np.any(eps <= 0) or np.any(delta_f <= 0):
        raise ValueError("log-space fit needs positive samples")
    x = np.log(delta_f)
    y = np.log(eps) - math.log(v_mod)
    coeffs, resid = _linear_fit(x, y)
    b, a = coeffs
    return FitResult(constants=(a, b), residual_norm=resid,
                     predict_se=_prediction_se(x, y, coeffs))


def fit_capacity(n_users, eps_snu, v_mod: float) -> FitResult:
    """Fit eps = v_mod·c·exp(d/N) by least squares on log eps versus 1/N."""
    n = np.asarray(n_users, dtype=float)
    eps = np.asarray(eps_snu, dtype=float)
    if n.size != eps.size or n.size < 2:
        raise ValueError("need at least two grid points")
    if np.any(eps <= 0) or np.any(n < 1):
        raise ValueError("log-space fit needs positive samples and N >= 1")
    x = 1.0 / n
    y = np.log(eps) - math.log(v_mod)
    coeffs, resid = _linear_fit(x, y)
    d, log_c = coeffs
    return FitResult(constants=(math.exp(log_c), d), residual_norm=resid,
                     predict_se=_prediction_se(x, y, coeffs))


def _linear_fit(x, y):
    design = np.column_stack([x, np.ones_like(x)])
    coeffs, *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - design @ coeffs
    dof = max(1, x.size - 2)
    return coeffs, float(np.sqrt(np.sum(resid ** 2) / dof))


def _prediction_se(x, y, coeffs):
    """Standard error of predicting a new point at a typical grid location."""
    resid = y - (coeffs[0] * x + coeffs[1])
    dof = max(1, x.size - 2)
    s2 = float(np.sum(resid ** 2) / dof)
    return math.sqrt(s2 * (1.0 + 1.0 / x.size))
