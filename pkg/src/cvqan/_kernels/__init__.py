"""Signal-synthesis kernels with a compiled fast path.

The compiled Cython extension is used when it importable; otherwise the
pure-NumPy reference implementation is selected. Setting the environment
variable ``CVQAN_PURE_PYTHON=1`` forces the reference implementation (useful
for benchmarking and debugging).
"""

import os

from . import _ref

if os.environ.get("CVQAN_PURE_PYTHON", "") == "1":
    _impl = _ref
else:
    try:
        from . import _fast as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _ref

BACKEND = _impl.BACKEND
synth_waveform = _impl.synth_waveform
mix_carrier = _impl.mix_carrier

__all__ = ["BACKEND", "synth_waveform", "mix_carrier", "_ref"]
