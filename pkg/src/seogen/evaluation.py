"""Automatic and manual evaluation of generated headlines.

Covers clipped n-gram overlap and LCS-based overlap against reference
titles, an embedding-based sentence similarity, rank correlations, a
Monte Carlo permutation test, and aggregation of human judgement sheets.
"""

from __future__ import annotations

import csv
import json
import math
import warnings
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, NamedTuple, Sequence

import numpy as np
from scipy import stats

from . import _kernels
from .errors import ParseError, ValidationError

_EDGE_PUNCT = ".,;:!?\"'()[]{}«»„“”‚‘’-–"


def eval_tokenize(text: str) -> list[str]:
    """Lowercased whitespace tokens with punctuation stripped from the
    edges; tokens that were pure punctuation disappear."""
    out = []
    for raw in text.lower().split():
        word = raw.strip(_EDGE_PUNCT)
        if word:
            out.append(word)
    return out


class RougeScore(NamedTuple):
    precision: float
    recall: float
    f1: float


def _f1(precision: float, recall: float) -> float:
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def _ngrams(words: Sequence[str], n: int) -> Counter:
    return Counter(tuple(words[i : i + n]) for i in range(len(words) - n + 1))


def rouge_n(generated: Sequence[str], reference: Sequence[str], n: int) -> RougeScore:
    """Clipped n-gram overlap: each reference n-gram credits at most its
    own count. Empty inputs score 0 on the affected sides."""
    if n < 1:
        raise ValidationError("n-gram order must be >= 1")
    gen_counts = _ngrams(generated, n)
    ref_counts = _ngrams(reference, n)
    overlap = sum((gen_counts & ref_counts).values())
    n_gen = sum(gen_counts.values())
    n_ref = sum(ref_counts.values())
    precision = overlap / n_gen if n_gen else 0.0
    recall = overlap / n_ref if n_ref else 0.0
    return RougeScore(precision, recall, _f1(precision, recall))


def rouge_l(generated: Sequence[str], reference: Sequence[str]) -> RougeScore:
    """Longest-common-subsequence overlap."""
    if not generated or not reference:
        return RougeScore(0.0, 0.0, 0.0)
    ids = {w: i for i, w in enumerate(dict.fromkeys([*generated, *reference]))}
    a = np.array([ids[w] for w in generated], dtype=np.int64)
    b = np.array([ids[w] for w in reference], dtype=np.int64)
    lcs = _kernels.lcs_length(a, b)
    precision = lcs / len(generated)
    recall = lcs / len(reference)
    return RougeScore(precision, recall, _f1(precision, recall))


class EmbeddingStore:
    """Word vectors from a text file: a "<count> <dim>" header line, then
    one "<word> <v1> ... <vdim>" line per word. Lookup tries the exact
    word, then its lowercased form."""

    def __init__(self, vectors: dict[str, np.ndarray], dim: int):
        self.dim = dim
        self._vectors = vectors

    @classmethod
    def load(cls, path: str | Path) -> "EmbeddingStore":
        lines = Path(path).read_text(encoding="utf-8").splitlines()
        if not lines:
            raise ParseError("empty embedding file", path=str(path), line=1)
        header = lines[0].split()
        if len(header) != 2:
            raise ParseError(
                "header must be '<count> <dim>'", path=str(path), line=1
            )
        try:
            count, dim = int(header[0]), int(header[1])
        except ValueError as exc:
            raise ParseError(str(exc), path=str(path), line=1) from exc
        vectors: dict[str, np.ndarray] = {}
        for lineno, line in enumerate(lines[1:], start=2):
            if not line.strip():
                continue
            parts = line.split()
            if len(parts) != dim + 1:
                raise ParseError(
                    f"expected {dim} vector components, got {len(parts) - 1}",
                    path=str(path),
                    line=lineno,
                )
            try:
                vectors[parts[0]] = np.array([float(x) for x in parts[1:]])
            except ValueError as exc:
                raise ParseError(str(exc), path=str(path), line=lineno) from exc
        if len(vectors) != count:
            raise ParseError(
                f"header announced {count} vectors, file has {len(vectors)}",
                path=str(path),
                line=1,
            )
        return cls(vectors, dim)

    def lookup(self, word: str) -> np.ndarray | None:
        vec = self._vectors.get(word)
        if vec is None:
            vec = self._vectors.get(word.lower())
        return vec

    def __contains__(self, word: str) -> bool:
        return self.lookup(word) is not None

    def __len__(self) -> int:
        return len(self._vectors)


def _cosine(a: np.ndarray, b: np.ndarray) -> float:
    denom = float(np.linalg.norm(a) * np.linalg.norm(b))
    if denom == 0.0:
        return 0.0
    return float(a @ b) / denom


def sentence_sim(
    generated: Sequence[str], reference: Sequence[str], store: EmbeddingStore
) -> float:
    """Mean over embeddable generated words of the best cosine similarity
    against embeddable reference words. Words missing from the store are
    skipped on both sides; with nothing to compare the score is 0 and a
    warning is emitted."""
    gen_vecs = [v for v in (store.lookup(w) for w in generated) if v is not None]
    ref_vecs = [v for v in (store.lookup(w) for w in reference) if v is not None]
    if not gen_vecs or not ref_vecs:
        warnings.warn(
            "sentence similarity undefined: no embeddable words on one side",
            stacklevel=2,
        )
        return 0.0
    total = math.fsum(max(_cosine(g, r) for r in ref_vecs) for g in gen_vecs)
    return total / len(gen_vecs)


def _pearson(x: np.ndarray, y: np.ndarray) -> float:
    # fsum keeps perfectly (anti)correlated series at exactly +/-1.0:
    # the numerator and the squared sums are then the same exact values.
    dx = x - x.mean()
    dy = y - y.mean()
    num = math.fsum((dx * dy).tolist())
    denom = math.sqrt(math.fsum((dx * dx).tolist()) * math.fsum((dy * dy).tolist()))
    return num / denom


def correlation(
    xs: Sequence[float], ys: Sequence[float], method: str = "spearman"
) -> float:
    if method not in ("spearman", "pearson"):
        raise ValidationError(f"unknown correlation method {method!r}")
    if len(xs) != len(ys):
        raise ValidationError(f"length mismatch: {len(xs)} vs {len(ys)}")
    if len(xs) < 3:
        raise ValidationError("correlation needs at least 3 points")
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    if np.all(x == x[0]) or np.all(y == y[0]):
        raise ValidationError("correlation undefined for a constant series")
    if method == "spearman":
        return _pearson(stats.rankdata(x), stats.rankdata(y))
    return _pearson(x, y)


def permutation_test(
    group_a: Sequence[float],
    group_b: Sequence[float],
    n_perms: int = 9999,
    seed: int = 0,
) -> float:
    """One-sided Monte Carlo test of mean(A) > mean(B).

    p = (1 + #{permutations with mean difference >= observed}) / (n_perms + 1),
    so 0 < p <= 1 always.
    """
    if not group_a or not group_b:
        raise ValidationError("both groups must be non-empty")
    if n_perms < 1:
        raise ValidationError("n_perms must be >= 1")
    a = np.asarray(group_a, dtype=np.float64)
    b = np.asarray(group_b, dtype=np.float64)
    observed = a.mean() - b.mean()
    pooled = np.concatenate([a, b])
    rng = np.random.default_rng(seed)
    perms = np.tile(pooled, (n_perms, 1))
    perms = rng.permuted(perms, axis=1)
    diffs = perms[:, : len(a)].mean(axis=1) - perms[:, len(a) :].mean(axis=1)
    count = int(np.count_nonzero(diffs >= observed))
    return (1 + count) / (n_perms + 1)


@dataclass(frozen=True)
class ManualJudgement:
    title_id: str
    judge: str
    grammar_ok: int
    false_info: int
    quality: int

    def __post_init__(self):
        if self.grammar_ok not in (0, 1):
            raise ValidationError(f"grammar_ok must be 0 or 1, got {self.grammar_ok}")
        if self.false_info not in (0, 1):
            raise ValidationError(f"false_info must be 0 or 1, got {self.false_info}")
        if not 1 <= self.quality <= 5:
            raise ValidationError(f"quality must be in 1..5, got {self.quality}")


def load_judgements(path: str | Path) -> list[ManualJudgement]:
    """CSV with columns title_id, judge, grammar_ok, false_info, quality."""
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        required = {"title_id", "judge", "grammar_ok", "false_info", "quality"}
        if reader.fieldnames is None or not required.issubset(reader.fieldnames):
            raise ParseError(
                f"judgement sheet needs columns {sorted(required)}", path=str(path), line=1
            )
        for lineno, row in enumerate(reader, start=2):
            try:
                out.append(
                    ManualJudgement(
                        title_id=row["title_id"],
                        judge=row["judge"],
                        grammar_ok=int(row["grammar_ok"]),
                        false_info=int(row["false_info"]),
                        quality=int(row["quality"]),
                    )
                )
            except (ValueError, ValidationError) as exc:
                raise ParseError(str(exc), path=str(path), line=lineno) from exc
    return out


QUALITY_BANDS = ("high", "medium", "low")


def quality_band(mean_quality: float) -> str:
    if mean_quality >= 4.5:
        return "high"
    if mean_quality >= 3.5:
        return "medium"
    return "low"


@dataclass(frozen=True)
class ManualAggregate:
    n_titles: int
    grammar_ok_pct: float
    false_info_pct: float
    mean_quality: float
    band_counts: dict[str, int]
    per_title_quality: dict[str, float]


def aggregate_manual(judgements: Sequence[ManualJudgement]) -> ManualAggregate:
    """Per-title means folded into corpus-level percentages, plus a
    high/medium/low quality histogram. Every title needs at least two
    judgements."""
    if not judgements:
        raise ValidationError("no judgements to aggregate")
    by_title: dict[str, list[ManualJudgement]] = {}
    for j in judgements:
        by_title.setdefault(j.title_id, []).append(j)
    for title_id, rows in by_title.items():
        if len(rows) < 2:
            raise ValidationError(
                f"title {title_id!r} has {len(rows)} judgement(s), need at least 2"
            )
        judges = [r.judge for r in rows]
        if len(set(judges)) != len(judges):
            raise ValidationError(f"duplicate judge for title {title_id!r}")

    def title_mean(rows: list[ManualJudgement], attr: str) -> float:
        return math.fsum(getattr(r, attr) for r in rows) / len(rows)

    grammar = [title_mean(rows, "grammar_ok") for rows in by_title.values()]
    false_info = [title_mean(rows, "false_info") for rows in by_title.values()]
    quality = {t: title_mean(rows, "quality") for t, rows in by_title.items()}
    bands = Counter(quality_band(q) for q in quality.values())
    n = len(by_title)
    return ManualAggregate(
        n_titles=n,
        grammar_ok_pct=100.0 * math.fsum(grammar) / n,
        false_info_pct=100.0 * math.fsum(false_info) / n,
        mean_quality=math.fsum(quality.values()) / n,
        band_counts={band: bands.get(band, 0) for band in QUALITY_BANDS},
        per_title_quality=quality,
    )


@dataclass(frozen=True)
class DocumentEval:
    doc_id: str
    rouge1: RougeScore
    rouge2: RougeScore
    rougeL: RougeScore
    sentence_sim: float | None


@dataclass(frozen=True)
class EvalReport:
    documents: tuple[DocumentEval, ...]
    mean_rouge1: RougeScore
    mean_rouge2: RougeScore
    mean_rougeL: RougeScore
    mean_sentence_sim: float | None
    manual: ManualAggregate | None = None

    def to_json(self) -> str:
        def rs(score: RougeScore) -> dict:
            return {"precision": score.precision, "recall": score.recall, "f1": score.f1}

        payload = {
            "documents": [
                {
                    "id": d.doc_id,
                    "rouge1": rs(d.rouge1),
                    "rouge2": rs(d.rouge2),
                    "rougeL": rs(d.rougeL),
                    "sentence_sim": d.sentence_sim,
                }
                for d in self.documents
            ],
            "mean": {
                "rouge1": rs(self.mean_rouge1),
                "rouge2": rs(self.mean_rouge2),
                "rougeL": rs(self.mean_rougeL),
                "sentence_sim": self.mean_sentence_sim,
            },
        }
        if self.manual is not None:
            payload["manual"] = {
                "n_titles": self.manual.n_titles,
                "grammar_ok_pct": self.manual.grammar_ok_pct,
                "false_info_pct": self.manual.false_info_pct,
                "mean_quality": self.manual.mean_quality,
                "band_counts": self.manual.band_counts,
            }
        return json.dumps(payload, indent=1)


def _mean_rouge(scores: Iterable[RougeScore]) -> RougeScore:
    scores = list(scores)
    n = len(scores)
    return RougeScore(
        math.fsum(s.precision for s in scores) / n,
        math.fsum(s.recall for s in scores) / n,
        math.fsum(s.f1 for s in scores) / n,
    )


def evaluate_pairs(
    pairs: Sequence[tuple[str, str, str]],
    store: EmbeddingStore | None = None,
    manual: ManualAggregate | None = None,
) -> EvalReport:
    """Evaluate (doc_id, generated_title, reference_title) triples.

    Sentence similarity appears only when an embedding store is given;
    document means are plain arithmetic means over the per-document rows.
    """
    if not pairs:
        raise ValidationError("no (generated, reference) pairs to evaluate")
    docs = []
    for doc_id, generated, reference in pairs:
        gen_words = eval_tokenize(generated)
        ref_words = eval_tokenize(reference)
        sim = sentence_sim(gen_words, ref_words, store) if store is not None else None
        docs.append(
            DocumentEval(
                doc_id=doc_id,
                rouge1=rouge_n(gen_words, ref_words, 1),
                rouge2=rouge_n(gen_words, ref_words, 2),
                rougeL=rouge_l(gen_words, ref_words),
                sentence_sim=sim,
            )
        )
    sims = [d.sentence_sim for d in docs if d.sentence_sim is not None]
    return EvalReport(
        documents=tuple(docs),
        mean_rouge1=_mean_rouge(d.rouge1 for d in docs),
        mean_rouge2=_mean_rouge(d.rouge2 for d in docs),
        mean_rougeL=_mean_rouge(d.rougeL for d in docs),
        mean_sentence_sim=(math.fsum(sims) / len(sims)) if sims else None,
        manual=manual,
    )
