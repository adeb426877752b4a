"""Pure-Python/numpy implementations of the hot kernels.

Same contracts as the compiled module in _speedups.pyx; both must produce
bit-identical float64 results (all operations are plain IEEE-754 double
arithmetic in the same evaluation order).
"""

from __future__ import annotations

import math

import numpy as np


def theta(length: float, r: float) -> float:
    """Triangular ramp peaking at r: length below r, 2r - length at or above."""
    if length < r:
        return float(length)
    return float(2.0 * r - length)


def length_penalty(length: float, r: float, alpha: float) -> float:
    base = 5.0 + theta(length, r) + 1.0
    if base <= 0.0:
        raise ValueError(
            f"length penalty undefined for length={length}, r={r}: "
            f"5 + theta + 1 = {base} is not positive (requires length < 2*r + 6)"
        )
    return math.pow(base, alpha) / math.pow(6.0, alpha)


def rank_penalty(rank: float, match_pos: float, beta: float, position_scale: float) -> float:
    return 1.0 + math.exp(-rank - match_pos / position_scale + beta)


def score_candidates(cand_log_probs: np.ndarray, rp_eff: np.ndarray, lp: float) -> np.ndarray:
    """Penalized scores for a beam-step candidate matrix.

    cand_log_probs[b, v] is the cumulative log-probability of extending
    beam b with token v; rp_eff[b, v] the effective rank penalty of that
    extension; lp the (shared) length penalty at the new length. Returns
    cand_log_probs / (lp * rp_eff) elementwise.
    """
    return cand_log_probs / (lp * rp_eff)


def lcs_length(a: np.ndarray, b: np.ndarray) -> int:
    """Longest-common-subsequence length of two int64 id sequences."""
    a = np.ascontiguousarray(a, dtype=np.int64)
    b = np.ascontiguousarray(b, dtype=np.int64)
    m, n = len(a), len(b)
    if m == 0 or n == 0:
        return 0
    row = np.zeros(n + 1, dtype=np.int64)
    for i in range(m):
        prev = 0
        ai = a[i]
        for j in range(n):
            cur = row[j + 1]
            if ai == b[j]:
                row[j + 1] = prev + 1
            elif row[j] > cur:
                row[j + 1] = row[j]
            prev = cur
    return int(row[n])
