"""Pluggable next-token scorers.

A scorer maps (source subtokens, generated prefix) to a proper
log-distribution over the whole vocabulary. Two implementations ship:
TableScorer, an explicit lookup table used as a testing oracle substrate,
and NGramScorer, an add-kappa smoothed n-gram model over title corpora
with an optional copy bonus for subtokens present in the source. Any
model exposing the same score_next contract (e.g. a neural decoder) can
be dropped in behind the decoder without further changes.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from collections import Counter
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import ParseError, ValidationError
from .tokenizer import Vocab

NORMALIZATION_TOL = 1e-6

MODEL_MAGIC = "seogen-ngram"
MODEL_VERSION = 1


def validate_log_distribution(log_probs: np.ndarray, tol: float = NORMALIZATION_TOL) -> None:
    """Assert exp-sum equals 1 within tol."""
    total = _logsumexp(np.asarray(log_probs, dtype=np.float64))
    if not abs(total) <= tol:
        raise ValidationError(
            f"log-probabilities do not form a distribution (logsumexp={total!r})"
        )


def _logsumexp(x: np.ndarray) -> float:
    m = float(np.max(x))
    if math.isinf(m):
        return m
    return m + math.log(float(np.sum(np.exp(x - m))))


class Scorer(ABC):
    """Next-token probability contract consumed by the decoder."""

    vocab_size: int

    @abstractmethod
    def score_next(self, source: Sequence[int], prefix: Sequence[int]) -> np.ndarray:
        """Log-distribution over the full vocabulary for the next token.

        prefix must begin with BOS. Must be deterministic for fixed
        inputs and scorer state, and safe to call concurrently.
        """

    def _check_prefix(self, prefix: Sequence[int]) -> None:
        if not prefix or prefix[0] != Vocab.bos_id:
            raise ValidationError("prefix must begin with BOS")


class TableScorer(Scorer):
    """Explicit prefix-to-distribution table with a uniform fallback."""

    def __init__(self, vocab_size: int, table: dict[tuple[int, ...], np.ndarray] | None = None):
        if vocab_size < 1:
            raise ValidationError("vocab_size must be >= 1")
        self.vocab_size = vocab_size
        self._table: dict[tuple[int, ...], np.ndarray] = {}
        self._uniform = np.full(vocab_size, -math.log(vocab_size))
        for prefix, dist in (table or {}).items():
            self.set(prefix, dist)

    def set(self, prefix: Sequence[int], log_probs: np.ndarray) -> None:
        arr = np.asarray(log_probs, dtype=np.float64)
        if arr.shape != (self.vocab_size,):
            raise ValidationError(
                f"distribution for prefix {tuple(prefix)} has shape {arr.shape}, "
                f"expected ({self.vocab_size},)"
            )
        validate_log_distribution(arr)
        self._table[tuple(prefix)] = arr

    def score_next(self, source: Sequence[int], prefix: Sequence[int]) -> np.ndarray:
        self._check_prefix(prefix)
        dist = self._table.get(tuple(prefix), self._uniform)
        return dist.copy()


class NGramScorer(Scorer):
    """Add-kappa smoothed n-gram scorer with an additive copy bonus.

    With copy_bonus 0 the source is ignored entirely; with copy_bonus
    lambda > 0, subtokens present in the source gain lambda in log space
    before renormalization.
    """

    def __init__(
        self,
        order: int,
        vocab_size: int,
        kappa: float,
        copy_bonus: float = 0.0,
        counts: dict[tuple[int, ...], Counter] | None = None,
    ):
        if order < 1:
            raise ValidationError(f"order must be >= 1, got {order}")
        if kappa <= 0:
            raise ValidationError(f"kappa must be > 0, got {kappa}")
        if copy_bonus < 0:
            raise ValidationError(f"copy_bonus must be >= 0, got {copy_bonus}")
        if vocab_size < 1:
            raise ValidationError("vocab_size must be >= 1")
        self.order = order
        self.vocab_size = vocab_size
        self.kappa = float(kappa)
        self.copy_bonus = float(copy_bonus)
        self._counts = counts if counts is not None else {}
        self._totals = {ctx: sum(c.values()) for ctx, c in self._counts.items()}

    def _context(self, prefix: Sequence[int]) -> tuple[int, ...]:
        n_ctx = self.order - 1
        if n_ctx == 0:
            return ()
        padded = [Vocab.bos_id] * max(0, n_ctx - len(prefix)) + list(prefix)
        return tuple(padded[-n_ctx:])

    def score_next(self, source: Sequence[int], prefix: Sequence[int]) -> np.ndarray:
        self._check_prefix(prefix)
        ctx = self._context(prefix)
        probs = np.full(self.vocab_size, self.kappa, dtype=np.float64)
        total = self.kappa * self.vocab_size
        counter = self._counts.get(ctx)
        if counter:
            for tok, cnt in counter.items():
                probs[tok] += cnt
            total += self._totals[ctx]
        log_probs = np.log(probs) - math.log(total)
        if self.copy_bonus > 0.0:
            src = sorted(set(source))
            if src:
                log_probs[src] += self.copy_bonus
            log_probs -= _logsumexp(log_probs)
        return log_probs

    def save(self, path: str | Path) -> None:
        """Line-based count dump; floats stored as hex for exact round trips."""
        lines = [
            f"{MODEL_MAGIC} {MODEL_VERSION}",
            f"order {self.order}",
            f"vocab_size {self.vocab_size}",
            f"kappa {self.kappa.hex()}",
            f"copy_bonus {self.copy_bonus.hex()}",
        ]
        entries = []
        for ctx in sorted(self._counts):
            for tok in sorted(self._counts[ctx]):
                entries.append((ctx, tok, self._counts[ctx][tok]))
        lines.append(f"counts {len(entries)}")
        for ctx, tok, cnt in entries:
            ctx_str = ",".join(map(str, ctx)) if ctx else "-"
            lines.append(f"{ctx_str}\t{tok}\t{cnt}")
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "NGramScorer":
        text_lines = Path(path).read_text(encoding="utf-8").splitlines()
        if not text_lines:
            raise ParseError("empty model file", str(path), 1)
        magic = text_lines[0].split()
        if len(magic) != 2 or magic[0] != MODEL_MAGIC:
            raise ParseError(f"bad magic header {text_lines[0]!r}", str(path), 1)
        if int(magic[1]) != MODEL_VERSION:
            raise ParseError(f"unsupported model version {magic[1]}", str(path), 1)

        def header(idx: int, key: str) -> str:
            parts = text_lines[idx].split(maxsplit=1)
            if len(parts) != 2 or parts[0] != key:
                raise ParseError(f"expected {key!r} header", str(path), idx + 1)
            return parts[1]

        order = int(header(1, "order"))
        vocab_size = int(header(2, "vocab_size"))
        kappa = float.fromhex(header(3, "kappa"))
        copy_bonus = float.fromhex(header(4, "copy_bonus"))
        n_entries = int(header(5, "counts"))
        counts: dict[tuple[int, ...], Counter] = {}
        for i in range(n_entries):
            lineno = 7 + i
            try:
                ctx_str, tok_str, cnt_str = text_lines[6 + i].split("\t")
            except (IndexError, ValueError):
                raise ParseError("malformed count line", str(path), lineno) from None
            ctx = () if ctx_str == "-" else tuple(int(x) for x in ctx_str.split(","))
            counts.setdefault(ctx, Counter())[int(tok_str)] = int(cnt_str)
        return cls(order=order, vocab_size=vocab_size, kappa=kappa,
                   copy_bonus=copy_bonus, counts=counts)


def train_ngram(
    titles: Iterable[Sequence[int]],
    vocab_size: int,
    order: int = 3,
    kappa: float = 0.1,
    copy_bonus: float = 0.0,
) -> NGramScorer:
    """Count conditional n-grams over BOS-padded, EOS-terminated titles."""
    counts: dict[tuple[int, ...], Counter] = {}
    n_titles = 0
    for title in titles:
        n_titles += 1
        seq = [Vocab.bos_id] * (order - 1) + list(title) + [Vocab.eos_id]
        for i in range(order - 1, len(seq)):
            ctx = tuple(seq[i - order + 1:i])
            counts.setdefault(ctx, Counter())[seq[i]] += 1
    if n_titles == 0:
        raise ValidationError("cannot train an n-gram scorer on an empty title list")
    return NGramScorer(order=order, vocab_size=vocab_size, kappa=kappa,
                       copy_bonus=copy_bonus, counts=counts)


def perplexity(scorer: NGramScorer, titles: Iterable[Sequence[int]]) -> float:
    """exp of the mean negative log-probability over all title positions."""
    total_logp = 0.0
    n_positions = 0
    for title in titles:
        prefix = [Vocab.bos_id]
        for tok in list(title) + [Vocab.eos_id]:
            log_probs = scorer.score_next((), prefix)
            total_logp += float(log_probs[tok])
            n_positions += 1
            prefix.append(tok)
    if n_positions == 0:
        raise ValidationError("perplexity requires at least one title")
    return math.exp(-total_logp / n_positions)
