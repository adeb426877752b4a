"""Backend parity and contracts for the scalar/array kernels."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from seogen import _kernels
from seogen._kernels import _pyfallback

try:
    from seogen._kernels import _speedups
except ImportError:
    _speedups = None

BACKENDS = [_pyfallback] + ([_speedups] if _speedups is not None else [])

needs_compiled = pytest.mark.skipif(
    _speedups is None, reason="compiled extension not built"
)


@pytest.mark.parametrize("impl", BACKENDS)
def test_theta_ramp(impl):
    assert impl.theta(0.0, 12.0) == 0.0
    assert impl.theta(5.0, 12.0) == 5.0
    assert impl.theta(11.0, 12.0) == 11.0
    assert impl.theta(12.0, 12.0) == 12.0
    assert impl.theta(18.0, 12.0) == 6.0
    assert impl.theta(24.0, 12.0) == 0.0
    assert impl.theta(29.0, 12.0) == -5.0


@pytest.mark.parametrize("impl", BACKENDS)
def test_length_penalty_values(impl):
    assert impl.length_penalty(12.0, 12.0, 0.6) == pytest.approx((18 / 6) ** 0.6)
    assert impl.length_penalty(6.0, 12.0, 0.6) == pytest.approx(2.0**0.6)
    assert impl.length_penalty(18.0, 12.0, 0.6) == pytest.approx(2.0**0.6)
    assert impl.length_penalty(12.0, 12.0, 0.0) == 1.0


@pytest.mark.parametrize("impl", BACKENDS)
def test_length_penalty_domain(impl):
    with pytest.raises(ValueError):
        impl.length_penalty(30.0, 12.0, 0.6)  # 2r + 6 exactly
    # one step inside the domain still works
    assert impl.length_penalty(29.0, 12.0, 0.6) > 0.0


@pytest.mark.parametrize("impl", BACKENDS)
def test_rank_penalty_values(impl):
    assert impl.rank_penalty(0.0, 0.0, 1.5, 3.0) == pytest.approx(1 + math.exp(1.5))
    assert impl.rank_penalty(2.0, 6.0, 1.5, 3.0) == pytest.approx(1 + math.exp(-2.5))
    assert impl.rank_penalty(0.0, 0.0, 0.0, 3.0) == pytest.approx(2.0)


@pytest.mark.parametrize("impl", BACKENDS)
def test_score_candidates_matches_scalar(impl):
    rng = np.random.default_rng(0)
    logp = -rng.random((4, 7))
    rp = 1.0 + rng.random((4, 7))
    lp = 1.7
    out = impl.score_candidates(logp, rp, lp)
    for b in range(4):
        for v in range(7):
            assert out[b, v] == logp[b, v] / (lp * rp[b, v])


def _lcs_reference(a, b):
    table = [[0] * (len(b) + 1) for _ in range(len(a) + 1)]
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            if x == y:
                table[i + 1][j + 1] = table[i][j] + 1
            else:
                table[i + 1][j + 1] = max(table[i][j + 1], table[i + 1][j])
    return table[len(a)][len(b)]


@pytest.mark.parametrize("impl", BACKENDS)
def test_lcs_cases(impl):
    def lcs(a, b):
        return impl.lcs_length(np.array(a, dtype=np.int64), np.array(b, dtype=np.int64))

    assert lcs([], [1, 2]) == 0
    assert lcs([1, 2, 3], [1, 2, 3]) == 3
    assert lcs([1, 2, 3], [4, 5, 6]) == 0
    assert lcs([1, 2, 3, 4], [2, 4]) == 2
    assert lcs([1, 3, 1, 3], [3, 1, 3, 1]) == 3


@given(
    a=st.lists(st.integers(0, 5), max_size=12),
    b=st.lists(st.integers(0, 5), max_size=12),
)
@settings(max_examples=60, deadline=None)
def test_lcs_matches_reference(a, b):
    got = _kernels.lcs_length(np.array(a, dtype=np.int64), np.array(b, dtype=np.int64))
    assert got == _lcs_reference(a, b)


@needs_compiled
@given(
    length=st.integers(0, 28),
    r=st.integers(1, 20),
    alpha=st.floats(0.0, 2.0, allow_nan=False),
)
@settings(max_examples=100, deadline=None)
def test_backends_bitwise_identical_scalars(length, r, alpha):
    if length >= 2 * r + 6:
        return
    assert _speedups.theta(float(length), float(r)) == _pyfallback.theta(
        float(length), float(r)
    )
    assert _speedups.length_penalty(
        float(length), float(r), alpha
    ) == _pyfallback.length_penalty(float(length), float(r), alpha)


@needs_compiled
@given(
    rank=st.integers(0, 10),
    pos=st.integers(0, 20),
    beta=st.floats(-5.0, 5.0, allow_nan=False),
)
@settings(max_examples=100, deadline=None)
def test_backends_bitwise_identical_rank_penalty(rank, pos, beta):
    got = _speedups.rank_penalty(float(rank), float(pos), beta, 3.0)
    want = _pyfallback.rank_penalty(float(rank), float(pos), beta, 3.0)
    assert got == want


@needs_compiled
def test_backends_bitwise_identical_arrays():
    rng = np.random.default_rng(123)
    for _ in range(20):
        b, v = rng.integers(1, 9, size=2)
        logp = -rng.random((b, v)) * 30
        rp = 1.0 + rng.random((b, v)) * 5
        lp = float(0.5 + rng.random() * 3)
        fast = _speedups.score_candidates(logp, rp, lp)
        slow = _pyfallback.score_candidates(logp, rp, lp)
        assert np.array_equal(fast, slow)

        a = rng.integers(0, 6, size=rng.integers(0, 30)).astype(np.int64)
        c = rng.integers(0, 6, size=rng.integers(0, 30)).astype(np.int64)
        assert _speedups.lcs_length(a, c) == _pyfallback.lcs_length(a, c)


def test_active_backend_exposed():
    import os

    assert _kernels.BACKEND in ("cython", "python")
    if _speedups is not None and not os.environ.get("SEOGEN_PURE_PYTHON"):
        assert _kernels.BACKEND == "cython"
