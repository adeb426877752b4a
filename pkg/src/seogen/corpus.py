"""Corpus ingestion: load, validate, filter, split, and summarize articles.

The corpus format is UTF-8 line-delimited JSON, one object per line with
keys id, title, text, and optional department / published_at (ISO date).
"""

from __future__ import annotations

import json
import random
import re
from dataclasses import dataclass
from datetime import date
from pathlib import Path
from typing import Iterable, Sequence

from .errors import ParseError, ValidationError

# Filters applied to raw corpora: keep bodies of 30..512 words and titles
# of 3..12 words (inclusive); both ranges are overridable.
DEFAULT_MIN_BODY_WORDS = 30
DEFAULT_MAX_BODY_WORDS = 512
DEFAULT_MIN_TITLE_WORDS = 3
DEFAULT_MAX_TITLE_WORDS = 12

# Terminators that end a sentence when followed by whitespace and an
# uppercase letter or digit; a trailing abbreviation suppresses the split.
_SENTENCE_BOUNDARY = re.compile(r"([.!?])(\s+)(?=[A-ZÄÖÜ0-9])")

DEFAULT_ABBREVIATIONS = frozenset(
    {
        "Dr", "Prof", "Nr", "St", "Mio", "Mrd", "ca", "bzw", "usw", "vgl",
        "z.B", "u.a", "d.h", "Abs", "Art", "etc",
    }
)


@dataclass(frozen=True)
class Article:
    id: str
    title: str
    text: str
    department: str | None = None
    published_at: date | None = None

    def __post_init__(self):
        if not self.id:
            raise ValidationError("article id must be non-empty")
        if not self.title.strip():
            raise ValidationError(f"article {self.id}: title must be non-empty")
        if not self.text.strip():
            raise ValidationError(f"article {self.id}: text must be non-empty")


@dataclass(frozen=True)
class CorpusSplit:
    train: tuple[Article, ...]
    validation: tuple[Article, ...]
    test_auto: tuple[Article, ...]
    test_manual: tuple[Article, ...]

    @property
    def partitions(self) -> tuple[tuple[Article, ...], ...]:
        return (self.train, self.validation, self.test_auto, self.test_manual)


@dataclass(frozen=True)
class CorpusStats:
    n_docs: int
    avg_article_words: float
    avg_article_sentences: float
    avg_title_words: float
    avg_title_sentences: float


def word_count(text: str) -> int:
    """Words are maximal non-whitespace runs."""
    return len(text.split())


def split_sentences(text: str, abbreviations: frozenset[str] = DEFAULT_ABBREVIATIONS) -> list[str]:
    """Rule-based sentence splitting on ./!/? + whitespace + uppercase/digit.

    A period preceded by a known abbreviation does not end a sentence.
    """
    sentences: list[str] = []
    start = 0
    for m in _SENTENCE_BOUNDARY.finditer(text):
        if m.group(1) == ".":
            before = text[start:m.start()].split()
            last_word = before[-1] if before else ""
            if last_word in abbreviations:
                continue
        seg = text[start:m.end(1)].strip()
        if seg:
            sentences.append(seg)
        start = m.end()
    tail = text[start:].strip()
    if tail:
        sentences.append(tail)
    return sentences


def _parse_record(obj: dict, path: str, line: int) -> Article:
    if not isinstance(obj, dict):
        raise ParseError("record is not a JSON object", path, line)
    allowed = {"id", "title", "text", "department", "published_at"}
    unknown = set(obj) - allowed
    if unknown:
        raise ParseError(f"unknown keys {sorted(unknown)}", path, line)
    for key in ("id", "title", "text"):
        if key not in obj:
            raise ParseError(f"missing key {key!r}", path, line)
        if not isinstance(obj[key], str):
            raise ParseError(f"key {key!r} must be a string", path, line)
    published = None
    if obj.get("published_at") is not None:
        try:
            published = date.fromisoformat(obj["published_at"])
        except (TypeError, ValueError):
            raise ParseError(
                f"published_at {obj['published_at']!r} is not an ISO date", path, line
            ) from None
    try:
        return Article(
            id=obj["id"],
            title=obj["title"],
            text=obj["text"],
            department=obj.get("department"),
            published_at=published,
        )
    except ValidationError as exc:
        raise ParseError(str(exc), path, line) from None


def load_corpus(path: str | Path, departments: Iterable[str] | None = None) -> list[Article]:
    """Load a JSONL corpus; rejects malformed records and duplicate ids.

    departments, when given, keeps only articles from that allowlist.
    """
    path = Path(path)
    articles: list[Article] = []
    seen: set[str] = set()
    allow = set(departments) if departments is not None else None
    with path.open("r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            if not raw.strip():
                continue
            try:
                obj = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON ({exc.msg})", str(path), lineno) from None
            article = _parse_record(obj, str(path), lineno)
            if article.id in seen:
                raise ValidationError(
                    f"{path}:{lineno}: duplicate article id {article.id!r}"
                )
            seen.add(article.id)
            if allow is not None and article.department not in allow:
                continue
            articles.append(article)
    return articles


def save_corpus(articles: Iterable[Article], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for a in articles:
            rec = {"id": a.id, "title": a.title, "text": a.text}
            if a.department is not None:
                rec["department"] = a.department
            if a.published_at is not None:
                rec["published_at"] = a.published_at.isoformat()
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")


def filter_articles(
    articles: Iterable[Article],
    min_body_words: int = DEFAULT_MIN_BODY_WORDS,
    max_body_words: int = DEFAULT_MAX_BODY_WORDS,
    min_title_words: int = DEFAULT_MIN_TITLE_WORDS,
    max_title_words: int = DEFAULT_MAX_TITLE_WORDS,
) -> list[Article]:
    """Keep articles within the body and title word-count bounds (inclusive)."""
    kept = []
    for a in articles:
        if not min_body_words <= word_count(a.text) <= max_body_words:
            continue
        if not min_title_words <= word_count(a.title) <= max_title_words:
            continue
        kept.append(a)
    return kept


def split_corpus(
    articles: Sequence[Article],
    sizes: tuple[int, int, int, int],
    seed: int,
) -> CorpusSplit:
    """Deterministic shuffle under seed, then sequential partition."""
    if len(sizes) != 4:
        raise ValidationError(f"sizes must have four entries, got {len(sizes)}")
    if any(s < 0 for s in sizes):
        raise ValidationError(f"sizes must be non-negative, got {sizes}")
    total = sum(sizes)
    if total > len(articles):
        raise ValidationError(
            f"requested split of {total} articles but only {len(articles)} available"
        )
    shuffled = list(articles)
    random.Random(seed).shuffle(shuffled)
    parts = []
    offset = 0
    for size in sizes:
        parts.append(tuple(shuffled[offset:offset + size]))
        offset += size
    return CorpusSplit(*parts)


def corpus_stats(
    articles: Sequence[Article],
    abbreviations: frozenset[str] = DEFAULT_ABBREVIATIONS,
) -> CorpusStats:
    """Average word and sentence counts over a non-empty corpus."""
    if not articles:
        raise ValidationError("corpus_stats requires a non-empty corpus")
    n = len(articles)
    return CorpusStats(
        n_docs=n,
        avg_article_words=sum(word_count(a.text) for a in articles) / n,
        avg_article_sentences=sum(len(split_sentences(a.text, abbreviations)) for a in articles) / n,
        avg_title_words=sum(word_count(a.title) for a in articles) / n,
        avg_title_sentences=sum(len(split_sentences(a.title, abbreviations)) for a in articles) / n,
    )


def load_abbreviations(path: str | Path) -> frozenset[str]:
    """One abbreviation per line; blank lines and #-comments ignored."""
    out = set()
    for ln in Path(path).read_text(encoding="utf-8").splitlines():
        ln = ln.strip()
        if ln and not ln.startswith("#"):
            out.add(ln.rstrip("."))
    return frozenset(out)
