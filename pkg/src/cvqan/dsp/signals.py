"""Transmit-side signal model: symbol frames, modulation, multi-user channel.

The simulation runs at the baseband-equivalent level of the detected
photocurrent: the optical carrier is never sampled. Coherent detection of N
frequency-multiplexed users yields the sum of their RF-carrier waveforms
scaled by the channel coupling, plus white detection noise; no cross-user
beat terms appear (they cancel in balanced detection, and optical-frequency
terms fall far outside the receiver bandwidth).
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .._kernels import synth_waveform


@dataclass(frozen=True)
class Waveform:
    """Uniformly sampled real signal."""

    samples: np.ndarray
    sample_rate_hz: float
    t0: float = 0.0

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1:
            raise ValueError("waveform samples must be one-dimensional")
        if self.sample_rate_hz <= 0:
            raise ValueError(f"sample_rate_hz must be > 0, got {self.sample_rate_hz}")
        object.__setattr__(self, "samples", samples)

    def __len__(self):
        return self.samples.size

    @property
    def duration_s(self) -> float:
        return self.samples.size / self.sample_rate_hz


MIN_PREAMBLE = 32


@dataclass(frozen=True)
class SymbolFrame:
    """A frame of four-point symbols: a fixed known preamble then payload."""

    symbols: np.ndarray
    frame_id: int = 0
    preamble_len: int = MIN_PREAMBLE

    def __post_init__(self):
        symbols = np.asarray(self.symbols, dtype=np.int64)
        if symbols.ndim != 1:
            raise ValueError("symbols must be one-dimensional")
        if symbols.size and (symbols.min() < 0 or symbols.max() > 3):
            raise ValueError("symbols must lie in {0, 1, 2, 3}")
        if self.preamble_len < MIN_PREAMBLE:
            raise ValueError(f"preamble must be at least {MIN_PREAMBLE} symbols")
        if symbols.size < self.preamble_len:
            raise ValueError("frame shorter than its preamble")
        object.__setattr__(self, "symbols", symbols)

    @property
    def preamble(self) -> np.ndarray:
        return self.symbols[: self.preamble_len]

    @property
    def payload(self) -> np.ndarray:
        return self.symbols[self.preamble_len:]

    def __len__(self):
        return self.symbols.size

    @classmethod
    def random(cls, rng, n_payload: int, preamble: np.ndarray, frame_id: int = 0) -> "SymbolFrame":
        """Uniformly random payload appended to a fixed preamble."""
        payload = rng.integers(0, 4, n_payload)
        symbols = np.concatenate([np.asarray(preamble, dtype=np.int64), payload])
        return cls(symbols=symbols, frame_id=frame_id, preamble_len=len(preamble))


def encode_symbols(symbols, v_mod: float):
    """Map symbols k to quadrature amplitude pairs (a, b).

    k splits into two bits (b1, b2); a = 1 − 2·b1 and b = 1 − 2·b2, scaled by
    sqrt(v_mod) so a long uniform frame has per-quadrature variance v_mod.
    The four points sit at the odd multiples of 45 degrees, up to the global
    rotation resolved later by the preamble.
    """
    symbols = np.asarray(symbols)
    if symbols.size and (symbols.min() < 0 or symbols.max() > 3):
        raise ValueError("symbols must lie in {0, 1, 2, 3}")
    scale = math.sqrt(v_mod)
    a = scale * (1.0 - 2.0 * (symbols >> 1))
    b = scale * (1.0 - 2.0 * (symbols & 1))
    return a, b


def decode_symbols(z) -> np.ndarray:
    """Nearest-point decisions on complex symbols back to k, inverse of encode."""
    z = np.asarray(z)
    b1 = (z.real < 0).astype(np.int64)
    b2 = (z.imag < 0).astype(np.int64)
    return (b1 << 1) | b2


def symbols_to_complex(symbols, v_mod: float = 1.0) -> np.ndarray:
    """Complex constellation points a + i·b of a symbol sequence."""
    a, b = encode_symbols(symbols, v_mod)
    return a + 1j * b


def assign_carriers(base_hz: float, spacing_hz: float, n_users: int):
    """Carrier plan: user i transmits at base + i·spacing (0-based)."""
    if n_users < 1:
        raise ValueError(f"n_users must be >= 1, got {n_users}")
    if base_hz <= 0:
        raise ValueError(f"base_hz must be > 0, got {base_hz}")
    if spacing_hz <= 0 and n_users > 1:
        raise ValueError("carrier spacing must be > 0 for distinct carriers")
    return [base_hz + i * spacing_hz for i in range(n_users)]


def modulate(frame: SymbolFrame, v_mod: float, carrier_hz: float,
             sample_rate_hz: float, symbol_rate_hz: float, phase0: float = 0.0) -> Waveform:
    """Rectangular-pulse carrier modulation a·sin(ωt) + b·cos(ωt) of a frame.

    The carrier phase is continuous across symbol boundaries; amplitudes are
    constant within each symbol.
    """
    if carrier_hz <= 0 or carrier_hz >= sample_rate_hz / 2:
        raise ValueError(
            f"carrier {carrier_hz} Hz violates Nyquist for sample rate {sample_rate_hz} Hz"
        )
    sps = sample_rate_hz / symbol_rate_hz
    if abs(sps - round(sps)) > 1e-9 or round(sps) < 2:
        raise ValueError("sample_rate_hz must be an integer multiple (>= 2) of symbol_rate_hz")
    a, b = encode_symbols(frame.symbols, v_mod)
    omega_dt = 2.0 * math.pi * carrier_hz / sample_rate_hz
    samples = synth_waveform(a, b, int(round(sps)), omega_dt, phase0)
    return Waveform(samples=samples, sample_rate_hz=sample_rate_hz)


@dataclass(frozen=True)
class UserTx:
    """One user's transmitter: frame, modulation depth, carrier, timing."""

    frame: SymbolFrame
    v_mod: float
    carrier_hz: float
    rf_phase: float = 0.0
    delay_samples: int = 0

    def __post_init__(self):
        if self.v_mod <= 0:
            raise ValueError(f"v_mod must be > 0, got {self.v_mod}")
        if self.delay_samples < 0:
            raise ValueError("delay_samples must be >= 0")


@dataclass(frozen=True)
class ChannelSpec:
    """Round-trip channel plus detection noise model.

    transmittance is the lumped power coupling (channel times detector
    efficiency); excess_snu adds per-quadrature Gaussian noise at the channel
    input; shot_noise_std is the white detection noise per sample that
    calibrates the shot-noise unit; electronic_snu scales additional white
    receiver noise relative to shot; drift_linewidth_hz drives a slow Wiener
    phase walk common to all users; gate_jitter_var rotates each symbol by an
    independent phase of that variance; random_frame_phase draws one common
    optical phase offset per call.
    """

    transmittance: float = 1.0
    excess_snu: float = 0.0
    shot_noise_std: float = 0.0
    electronic_snu: float = 0.0
    drift_linewidth_hz: float = 0.0
    gate_jitter_var: float = 0.0
    random_frame_phase: bool = False

    def __post_init__(self):
        if not 0.0 < self.transmittance <= 1.0:
            raise ValueError(f"transmittance must be in (0, 1], got {self.transmittance}")
        for name in ("excess_snu", "shot_noise_std", "electronic_snu",
                     "drift_linewidth_hz", "gate_jitter_var"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")


def _require_rng(channel: ChannelSpec, rng):
    needs = (channel.excess_snu > 0 or channel.shot_noise_std > 0
             or channel.electronic_snu > 0 or channel.drift_linewidth_hz > 0
             or channel.gate_jitter_var > 0 or channel.random_frame_phase)
    if needs and rng is None:
        raise ValueError("this channel configuration requires an rng")


def channel_and_detect(users, channel: ChannelSpec, *, sample_rate_hz: float,
                       symbol_rate_hz: float, n_samples: int = None, rng=None,
                       return_truth: bool = False):
    """Superimpose all users through the lossy channel onto the detector output.

    `users` is a list of UserTx (full model) or a list of Waveform (plain
    superposition; noise models that need symbol access are rejected).
    Returns the detected Waveform, plus a truth dict (common phase offset,
    drift track) when return_truth is set.
    """
    if not users:
        raise ValueError("at least one user required")
    _require_rng(channel, rng)
    amp = math.sqrt(channel.transmittance)

    if all(isinstance(u, Waveform) for u in users):
        rates = {u.sample_rate_hz for u in users}
        if len(rates) != 1:
            raise ValueError(f"mismatched sample rates: {sorted(rates)}")
        if rates != {sample_rate_hz}:
            raise ValueError("waveform sample rates disagree with sample_rate_hz")
        if channel.drift_linewidth_hz > 0 or channel.excess_snu > 0 or channel.gate_jitter_var > 0:
            raise ValueError("symbol-level channel noise requires UserTx inputs")
        length = n_samples or max(len(u) for u in users)
        out = np.zeros(length)
        for u in users:
            out[: len(u)] += amp * u.samples
        if channel.shot_noise_std > 0:
            out += _detection_noise(channel, length, rng)
        return (Waveform(out, sample_rate_hz), {}) if return_truth else Waveform(out, sample_rate_hz)

    if not all(isinstance(u, UserTx) for u in users):
        raise TypeError("users must be all Waveform or all UserTx")

    sps = sample_rate_hz / symbol_rate_hz
    if abs(sps - round(sps)) > 1e-9:
        raise ValueError("sample_rate_hz must be an integer multiple of symbol_rate_hz")
    sps = int(round(sps))

    if n_samples is None:
        n_samples = max(u.delay_samples + len(u.frame) * sps for u in users)

    phi0 = rng.uniform(0.0, 2.0 * math.pi) if channel.random_frame_phase else 0.0
    drift = None
    if channel.drift_linewidth_hz > 0:
        step_var = 2.0 * math.pi * channel.drift_linewidth_hz / sample_rate_hz
        drift = np.cumsum(rng.normal(0.0, math.sqrt(step_var), n_samples))

    out = np.zeros(n_samples)
    truth = {"phi0": phi0, "drift": drift, "sent": []}
    for user in users:
        if user.carrier_hz >= sample_rate_hz / 2:
            raise ValueError(f"carrier {user.carrier_hz} Hz violates Nyquist")
        a, b = encode_symbols(user.frame.symbols, user.v_mod)
        truth["sent"].append((a.copy(), b.copy()))
        if channel.excess_snu > 0:
            sigma = math.sqrt(channel.excess_snu)
            a = a + rng.normal(0.0, sigma, a.size)
            b = b + rng.normal(0.0, sigma, b.size)
        if channel.gate_jitter_var > 0:
            jitter = rng.normal(0.0, math.sqrt(channel.gate_jitter_var), a.size)
            cj, sj = np.cos(jitter), np.sin(jitter)
            a, b = a * cj - b * sj, a * sj + b * cj
        omega_dt = 2.0 * math.pi * user.carrier_hz / sample_rate_hz
        extra = None
        if drift is not None:
            start = user.delay_samples
            extra = drift[start:start + a.size * sps]
        wf = synth_waveform(a, b, sps, omega_dt, user.rf_phase + phi0, extra)
        end = min(user.delay_samples + wf.size, n_samples)
        out[user.delay_samples:end] += amp * wf[: end - user.delay_samples]

    if channel.shot_noise_std > 0 or channel.electronic_snu > 0:
        out += _detection_noise(channel, n_samples, rng)

    result = Waveform(out, sample_rate_hz)
    return (result, truth) if return_truth else result


def _detection_noise(channel: ChannelSpec, n: int, rng) -> np.ndarray:
    """White detection noise: shot plus electronic, both flat over the band."""
    var = channel.shot_noise_std ** 2 * (1.0 + channel.electronic_snu)
    return rng.normal(0.0, math.sqrt(var), n) if var > 0 else np.zeros(n)
