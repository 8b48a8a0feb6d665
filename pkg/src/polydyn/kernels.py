"""Kernel backend selection.

Prefers the compiled extension; falls back to the numpy implementation
when the extension is absent or the POLYDYN_PURE environment variable is
set to a nonempty value. Both backends expose horner_many,
iterate_escape and aberth_batch with identical contracts.
"""

import os

if os.environ.get("POLYDYN_PURE"):
    from . import _kernels_py as _impl
else:
    try:
        from . import _speedups as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernels_py as _impl

BACKEND = _impl.BACKEND
GUESS_PHASE = _impl.GUESS_PHASE
horner_many = _impl.horner_many
iterate_escape = _impl.iterate_escape
aberth_batch = _impl.aberth_batch
