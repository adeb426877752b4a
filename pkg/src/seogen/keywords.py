"""Keyword candidate extraction, features, and learned ranking.

Candidates come from an entity-recognition client and are scored by a
pairwise-trained linear model over cheap features (entity relevance,
search volume and its short-term trend, tf-idf, first-occurrence
position). Rank 0 is the most important keyword.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .clients import NerClient, VolumeClient, volume_features
from .corpus import Article, word_count
from .errors import ValidationError
from .textmatch import count_surface, find_surface
from .tokenizer import Vocab, keyword_to_subtokens

NUMERIC_FEATURES = ("relevance", "volume", "volume_delta_3d", "tfidf", "first_pos_ratio")


@dataclass
class KeywordCandidate:
    surface: str
    subtokens: tuple[int, ...]
    relevance: float = 0.0
    tag: str = ""
    search_volume: float = 0.0
    volume_delta_3d: float = 0.0
    tfidf: float = 0.0
    first_pos_ratio: float = 1.0

    def __post_init__(self):
        if not self.surface:
            raise ValidationError("keyword surface must be non-empty")
        if not 0.0 <= self.relevance <= 1.0:
            raise ValidationError(f"relevance {self.relevance} outside [0, 1]")
        if not 0.0 <= self.search_volume <= 100.0:
            raise ValidationError(f"search volume {self.search_volume} outside [0, 100]")
        if self.tfidf < 0.0:
            raise ValidationError(f"tf-idf {self.tfidf} must be non-negative")
        if not 0.0 <= self.first_pos_ratio <= 1.0:
            raise ValidationError(
                f"first position ratio {self.first_pos_ratio} outside [0, 1]"
            )


class RankedKeyword(NamedTuple):
    candidate: KeywordCandidate
    rank: int
    score: float


class RankLabel(NamedTuple):
    surface: str
    label: int | None


class DocFreqTable:
    """Document frequencies over a reference corpus, computed lazily."""

    def __init__(self, texts: Sequence[str]):
        self._texts = list(texts)
        self._cache: dict[str, int] = {}

    @classmethod
    def from_articles(cls, articles: Iterable[Article]) -> "DocFreqTable":
        return cls([a.text for a in articles])

    @property
    def n_docs(self) -> int:
        return len(self._texts)

    def df(self, term: str) -> int:
        if term not in self._cache:
            self._cache[term] = sum(
                1 for text in self._texts if find_surface(term, text) is not None
            )
        return self._cache[term]


def extract_candidates(
    article: Article, ner_client: NerClient, vocab: Vocab
) -> list[KeywordCandidate]:
    """Entity surfaces as keyword candidates, deduplicated case-sensitively
    (first occurrence wins). Volume and corpus features start at their
    defaults until populate_features fills them."""
    out: list[KeywordCandidate] = []
    seen: set[str] = set()
    for ent in ner_client.entities(article):
        if ent.surface in seen:
            continue
        seen.add(ent.surface)
        out.append(
            KeywordCandidate(
                surface=ent.surface,
                subtokens=tuple(keyword_to_subtokens(ent.surface, vocab)),
                relevance=ent.relevance,
                tag=ent.tag,
            )
        )
    return out


def extract_candidates_many(
    articles: Sequence[Article],
    ner_client: NerClient,
    vocab: Vocab,
    max_workers: int = 4,
) -> list[list[KeywordCandidate]]:
    """Concurrent extraction; results keep the input article order."""
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        return list(
            pool.map(lambda a: extract_candidates(a, ner_client, vocab), articles)
        )


def compute_tfidf(surface: str, article: Article, df_table: DocFreqTable) -> float:
    """Term frequency normalized by article length, times smoothed idf
    ln((1 + N) / (1 + df)) + 1."""
    n_words = word_count(article.text)
    if n_words == 0:
        return 0.0
    tf = count_surface(surface, article.text) / n_words
    idf = math.log((1 + df_table.n_docs) / (1 + df_table.df(surface))) + 1.0
    return tf * idf


def first_position_ratio(surface: str, article: Article) -> float:
    """Word index of the first occurrence over total words; 1.0 if absent."""
    n_words = word_count(article.text)
    if n_words == 0:
        return 1.0
    offset = find_surface(surface, article.text)
    if offset is None:
        return 1.0
    index = len(article.text[:offset].split())
    return min(1.0, index / n_words)


def populate_features(
    candidates: Iterable[KeywordCandidate],
    article: Article,
    volume_client: VolumeClient,
    df_table: DocFreqTable,
) -> list[KeywordCandidate]:
    at = article.published_at
    out = []
    for cand in candidates:
        vol, delta = volume_features(volume_client.volumes(cand.surface), at)
        out.append(
            replace(
                cand,
                search_volume=vol,
                volume_delta_3d=delta,
                tfidf=compute_tfidf(cand.surface, article, df_table),
                first_pos_ratio=first_position_ratio(cand.surface, article),
            )
        )
    return out


def build_rank_labels(
    article: Article, candidates: Iterable[KeywordCandidate]
) -> list[RankLabel]:
    """Weak labels from the human-written title: candidates appearing in it
    are labeled 0, 1, ... by first-occurrence position (overlapping
    surfaces tie-break longer-surface-first); absent candidates get None.

    Output order is deterministic regardless of input order: labeled
    candidates first by label, then unlabeled ones by surface.
    """
    present: list[tuple[int, int, str]] = []
    absent: list[str] = []
    for cand in candidates:
        pos = find_surface(cand.surface, article.title)
        if pos is None:
            absent.append(cand.surface)
        else:
            present.append((pos, -len(cand.surface), cand.surface))
    present.sort()
    labels = [RankLabel(surface, i) for i, (_, _, surface) in enumerate(present)]
    labels.extend(RankLabel(surface, None) for surface in sorted(absent))
    return labels


@dataclass
class RankModel:
    """Linear scorer over numeric features plus a one-hot syntactic tag."""

    weights: np.ndarray
    tag_vocab: tuple[str, ...] = ()
    version: int = 1
    loss_history: tuple[float, ...] = field(default=(), compare=False)

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=np.float64)
        expected = len(NUMERIC_FEATURES) + len(self.tag_vocab)
        if self.weights.shape != (expected,):
            raise ValidationError(
                f"weight vector has shape {self.weights.shape}, expected ({expected},)"
            )

    @classmethod
    def zeros(cls, tag_vocab: tuple[str, ...] = ()) -> "RankModel":
        return cls(np.zeros(len(NUMERIC_FEATURES) + len(tag_vocab)), tag_vocab)

    def encode(self, cand: KeywordCandidate) -> np.ndarray:
        x = np.zeros(len(self.weights))
        x[0] = cand.relevance
        x[1] = cand.search_volume / 100.0
        x[2] = cand.volume_delta_3d
        x[3] = cand.tfidf
        x[4] = cand.first_pos_ratio
        if cand.tag in self.tag_vocab:
            x[len(NUMERIC_FEATURES) + self.tag_vocab.index(cand.tag)] = 1.0
        return x

    def score(self, cand: KeywordCandidate) -> float:
        return float(self.weights @ self.encode(cand))

    def save(self, path: str | Path) -> None:
        payload = {
            "version": self.version,
            "tag_vocab": list(self.tag_vocab),
            "weights": [w.hex() for w in self.weights.tolist()],
        }
        Path(path).write_text(json.dumps(payload, indent=1), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "RankModel":
        try:
            payload = json.loads(Path(path).read_text(encoding="utf-8"))
            weights = np.array([float.fromhex(w) for w in payload["weights"]])
            return cls(weights, tuple(payload["tag_vocab"]), int(payload["version"]))
        except (KeyError, TypeError, json.JSONDecodeError) as exc:
            raise ValidationError(f"cannot read ranker model {path}: {exc}") from exc


def _preference_pairs(
    corpus_candidates: Iterable[tuple[Article, Sequence[KeywordCandidate]]],
    model: RankModel,
) -> tuple[np.ndarray, np.ndarray]:
    """Feature matrices (better, worse) for all within-article preference
    pairs: lower label beats higher label beats unlabeled."""
    better_rows, worse_rows = [], []
    for article, candidates in corpus_candidates:
        by_surface = {c.surface: c for c in candidates}
        labels = build_rank_labels(article, candidates)
        labeled = [(lab.label, by_surface[lab.surface]) for lab in labels if lab.label is not None]
        unlabeled = [by_surface[lab.surface] for lab in labels if lab.label is None]
        for i, (lab_i, cand_i) in enumerate(labeled):
            for lab_j, cand_j in labeled[i + 1 :]:
                assert lab_i < lab_j
                better_rows.append(model.encode(cand_i))
                worse_rows.append(model.encode(cand_j))
            for cand_j in unlabeled:
                better_rows.append(model.encode(cand_i))
                worse_rows.append(model.encode(cand_j))
    if not better_rows:
        raise ValidationError("no preference pairs: need articles whose titles contain candidates")
    return np.array(better_rows), np.array(worse_rows)


def _pairwise_loss(weights: np.ndarray, diffs: np.ndarray) -> float:
    margins = diffs @ weights
    # log(1 + exp(-m)) computed stably for both signs of m.
    return float(np.mean(np.logaddexp(0.0, -margins)))


def train_ranker(
    corpus_candidates: Iterable[tuple[Article, Sequence[KeywordCandidate]]],
    tag_vocab: tuple[str, ...] = (),
    epochs: int = 200,
    lr: float = 1.0,
) -> RankModel:
    """Fit the linear model on pairwise logistic loss by full-batch
    gradient descent from zero weights. A halving line search keeps the
    loss non-increasing from epoch to epoch; training is deterministic.
    """
    if epochs < 1:
        raise ValidationError("epochs must be >= 1")
    if lr <= 0:
        raise ValidationError("learning rate must be positive")
    model = RankModel.zeros(tag_vocab)
    better, worse = _preference_pairs(corpus_candidates, model)
    diffs = better - worse

    weights = model.weights.copy()
    losses = [_pairwise_loss(weights, diffs)]
    for _ in range(epochs):
        margins = diffs @ weights
        # d/dw mean log(1 + exp(-x.w)) = mean(-sigmoid(-x.w) * x)
        sig = 1.0 / (1.0 + np.exp(np.clip(margins, -500, 500)))
        grad = -(diffs * sig[:, None]).mean(axis=0)
        step = lr
        trial, trial_loss = weights, losses[-1]
        while step >= 1e-12:
            moved = weights - step * grad
            moved_loss = _pairwise_loss(moved, diffs)
            if moved_loss <= losses[-1]:
                trial, trial_loss = moved, moved_loss
                break
            step /= 2.0
        weights = trial
        losses.append(trial_loss)
    return RankModel(weights, tag_vocab, loss_history=tuple(losses))


def rank_keywords(
    candidates: Sequence[KeywordCandidate], model: RankModel
) -> list[RankedKeyword]:
    """Candidates ordered by model score descending; ties broken by
    surface so that ranks do not depend on the input permutation."""
    scored = sorted(
        ((model.score(c), c) for c in candidates),
        key=lambda sc: (-sc[0], sc[1].surface),
    )
    return [RankedKeyword(c, rank, score) for rank, (score, c) in enumerate(scored)]


def rank_with_scores(
    candidates: Sequence[KeywordCandidate], scores: dict[str, float]
) -> list[RankedKeyword]:
    """Rank by externally supplied scores, bypassing the model. Surfaces
    missing from the map score 0."""
    scored = sorted(
        ((float(scores.get(c.surface, 0.0)), c) for c in candidates),
        key=lambda sc: (-sc[0], sc[1].surface),
    )
    return [RankedKeyword(c, rank, score) for rank, (score, c) in enumerate(scored)]


def load_external_scores(path: str | Path) -> dict[str, dict[str, float]]:
    """JSON map article_id -> [{surface, score}] flattened to nested dicts."""
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(raw, dict):
        raise ValidationError(f"external scores {path} must be a JSON object")
    out: dict[str, dict[str, float]] = {}
    for aid, entries in raw.items():
        out[str(aid)] = {str(e["surface"]): float(e["score"]) for e in entries}
    return out


def apply_pins(
    ranked: Sequence[RankedKeyword],
    pinned: Sequence[str] = (),
    excluded: Sequence[str] = (),
) -> list[RankedKeyword]:
    """Re-rank for editorial control: excluded surfaces are dropped and
    pinned surfaces take ranks 0.. in pin order; the rest keep their
    relative order. Unknown pinned or excluded surfaces are ignored."""
    overlap = set(pinned) & set(excluded)
    if overlap:
        raise ValidationError(f"surfaces both pinned and excluded: {sorted(overlap)}")
    by_surface = {rk.candidate.surface: rk for rk in ranked}
    head = [by_surface[s] for s in dict.fromkeys(pinned) if s in by_surface]
    head_surfaces = {rk.candidate.surface for rk in head}
    tail = [
        rk
        for rk in sorted(ranked, key=lambda rk: rk.rank)
        if rk.candidate.surface not in head_surfaces
        and rk.candidate.surface not in set(excluded)
    ]
    return [
        RankedKeyword(rk.candidate, rank, rk.score)
        for rank, rk in enumerate(head + tail)
    ]
