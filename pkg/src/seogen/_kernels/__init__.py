"""Kernel backend selection.

Prefers the compiled Cython module when it was built; falls back to the
pure-Python/numpy implementation otherwise. Set SEOGEN_PURE_PYTHON=1 to
force the fallback (used by the benchmark and the backend-parity tests).
"""

from __future__ import annotations

import os

from . import _pyfallback

if os.environ.get("SEOGEN_PURE_PYTHON"):
    _impl = _pyfallback
    BACKEND = "python"
else:
    try:
        from . import _speedups as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        _impl = _pyfallback
        BACKEND = "python"

theta = _impl.theta
length_penalty = _impl.length_penalty
rank_penalty = _impl.rank_penalty
score_candidates = _impl.score_candidates
lcs_length = _impl.lcs_length

__all__ = [
    "BACKEND",
    "theta",
    "length_penalty",
    "rank_penalty",
    "score_candidates",
    "lcs_length",
]
