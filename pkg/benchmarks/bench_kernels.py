"""Benchmark the compiled signal kernels against the pure-NumPy fallback.

Run directly: python benchmarks/bench_kernels.py
"""

import time

import numpy as np

from cvqan._kernels import _ref

try:
    from cvqan._kernels import _fast
except ImportError:
    _fast = None


def timeit(fn, *args, repeat=7):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    rng = np.random.default_rng(0)
    n_sym, sps = 16384, 100
    a = rng.choice([-1.0, 1.0], n_sym)
    b = rng.choice([-1.0, 1.0], n_sym)
    drift = np.cumsum(rng.normal(0, 1e-4, n_sym * sps))
    x = rng.normal(0, 1, n_sym * sps)
    omega = 2 * np.pi * 20e6 / 100e6

    cases = [
        ("synth_waveform (plain)", lambda m: m.synth_waveform(a, b, sps, omega, 0.1)),
        ("synth_waveform (drift)", lambda m: m.synth_waveform(a, b, sps, omega, 0.1, drift)),
        ("mix_carrier", lambda m: m.mix_carrier(x, omega, 0.0)),
    ]

    print(f"{n_sym} symbols x {sps} samples/symbol ({n_sym * sps} samples)")
    print(f"{'kernel':<26}{'numpy':>12}{'cython':>12}{'speedup':>10}")
    for name, call in cases:
        t_ref = timeit(call, _ref)
        if _fast is None:
            print(f"{name:<26}{t_ref * 1e3:>10.2f}ms{'n/a':>12}{'n/a':>10}")
            continue
        t_fast = timeit(call, _fast)
        check_r = call(_ref)
        check_f = call(_fast)
        if isinstance(check_r, tuple):
            assert all(np.allclose(r, f, atol=1e-12) for r, f in zip(check_r, check_f))
        else:
            assert np.allclose(check_r, check_f, atol=1e-12)
        print(f"{name:<26}{t_ref * 1e3:>10.2f}ms{t_fast * 1e3:>10.2f}ms{t_ref / t_fast:>9.2f}x")


if __name__ == "__main__":
    main()
