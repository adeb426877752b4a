"""Benchmark: compiled kernels vs the pure-Python fallback.

Times each hot kernel in both backends (imported side by side), then an
end-to-end synthetic decode in two subprocesses so backend selection
happens the same way it does in production (SEOGEN_PURE_PYTHON=1 forces
the fallback).

Usage: python3 benchmarks/bench_kernels.py [--repeats N] [--skip-decode]
"""

from __future__ import annotations

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from seogen._kernels import _pyfallback

try:
    from seogen._kernels import _speedups
except ImportError:
    _speedups = None


def timeit(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_pair(name: str, make_fn, repeats: int) -> None:
    py_time = timeit(make_fn(_pyfallback), repeats)
    if _speedups is None:
        print(f"{name:<18} python {py_time * 1e3:9.3f} ms   (compiled module not built)")
        return
    cy_time = timeit(make_fn(_speedups), repeats)
    speedup = py_time / cy_time if cy_time > 0 else float("inf")
    print(
        f"{name:<18} python {py_time * 1e3:9.3f} ms   "
        f"cython {cy_time * 1e3:9.3f} ms   speedup {speedup:5.1f}x"
    )


def make_lcs(impl):
    rng = np.random.default_rng(0)
    a = rng.integers(0, 50, size=400).astype(np.int64)
    b = rng.integers(0, 50, size=400).astype(np.int64)
    return lambda: impl.lcs_length(a, b)


def make_score_candidates(impl):
    rng = np.random.default_rng(1)
    logp = -rng.random((64, 8000))
    rp = 1.0 + rng.random((64, 8000))
    return lambda: impl.score_candidates(logp, rp, 1.7)


def make_rank_penalty(impl):
    def run():
        for rank in range(200):
            for pos in range(200):
                impl.rank_penalty(float(rank), float(pos), 1.5, 3.0)

    return run


def make_length_penalty(impl):
    def run():
        for length in range(28):
            for _ in range(1000):
                impl.length_penalty(float(length), 12.0, 0.6)

    return run


def decode_workload() -> float:
    """Synthetic beam search: random table scorer, beam 64, 40 decodes."""
    from seogen.decoder import DecodeConfig, DecodeKeyword, decode
    from seogen.penalties import PenaltyParams
    from seogen.scorer import TableScorer
    from seogen.tokenizer import Vocab

    vocab = Vocab.from_tokens(list("abcdefgh"))
    rng = np.random.default_rng(7)
    table = TableScorer(len(vocab))

    def set_random(prefix):
        raw = rng.random(len(vocab)) + 1e-3
        table.set(prefix, np.log(raw / raw.sum()))

    set_random((Vocab.bos_id,))
    for t in range(len(vocab)):
        set_random((Vocab.bos_id, t))

    config = DecodeConfig(
        beam_size=64,
        max_len=12,
        penalty=PenaltyParams(r=8, alpha=0.6, beta=1.5),
        n_best=4,
    )
    keywords = (DecodeKeyword(subtokens=(4,), rank=0),)
    t0 = time.perf_counter()
    for _ in range(40):
        decode([4, 5], table, config, vocab, keywords=keywords)
    return time.perf_counter() - t0


def bench_decode() -> None:
    results = {}
    for label, env_value in (("cython", None), ("python", "1")):
        env = dict(os.environ)
        env.pop("SEOGEN_PURE_PYTHON", None)
        if env_value:
            env["SEOGEN_PURE_PYTHON"] = env_value
        out = subprocess.run(
            [sys.executable, os.path.abspath(__file__), "--inner-decode"],
            env=env,
            capture_output=True,
            text=True,
            check=True,
        )
        backend, seconds = out.stdout.split()
        results[label] = (backend, float(seconds))
    (cy_backend, cy_time), (py_backend, py_time) = results["cython"], results["python"]
    if cy_backend != "cython":
        print(f"decode             python {py_time * 1e3:9.3f} ms   (compiled module not built)")
        return
    assert py_backend == "python"
    print(
        f"decode (40 runs)   python {py_time * 1e3:9.3f} ms   "
        f"cython {cy_time * 1e3:9.3f} ms   speedup {py_time / cy_time:5.1f}x"
    )


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=20,
                        help="repetitions per kernel; best time wins")
    parser.add_argument("--skip-decode", action="store_true",
                        help="skip the end-to-end decode comparison")
    parser.add_argument("--inner-decode", action="store_true",
                        help=argparse.SUPPRESS)
    args = parser.parse_args()

    if args.inner_decode:
        from seogen._kernels import BACKEND

        print(BACKEND, decode_workload())
        return

    print(f"numpy {np.__version__}, best of {args.repeats} repeats\n")
    bench_pair("lcs_length", make_lcs, args.repeats)
    bench_pair("score_candidates", make_score_candidates, args.repeats)
    bench_pair("rank_penalty", make_rank_penalty, args.repeats)
    bench_pair("length_penalty", make_length_penalty, args.repeats)
    if not args.skip_decode:
        bench_decode()


if __name__ == "__main__":
    main()
