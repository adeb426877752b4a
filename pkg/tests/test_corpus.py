"""Corpus loading, validation, filtering, splitting, sentence rules."""

import json

import pytest

from seogen.corpus import (
    Article,
    corpus_stats,
    filter_articles,
    load_abbreviations,
    load_corpus,
    save_corpus,
    split_corpus,
    split_sentences,
    word_count,
)
from seogen.errors import ParseError, ValidationError


def _write_jsonl(path, records):
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")


def _article(i, body_words, title_words):
    return Article(
        id=f"a{i}",
        title=" ".join(f"t{j}" for j in range(title_words)),
        text=" ".join(f"w{j}" for j in range(body_words)),
    )


def test_word_count():
    assert word_count("ein zwei  drei") == 3
    assert word_count("") == 0
    assert word_count("  ") == 0


def test_load_corpus_round_trip(tmp_path):
    path = tmp_path / "c.jsonl"
    _write_jsonl(
        path,
        [
            {"id": "a", "title": "Ein Titel hier", "text": "Text eins."},
            {"id": "b", "title": "Noch ein Titel", "text": "Text zwei.",
             "department": "sport", "published_at": "2024-03-01"},
        ],
    )
    arts = load_corpus(path)
    assert [a.id for a in arts] == ["a", "b"]
    assert arts[1].department == "sport"
    assert arts[1].published_at.isoformat() == "2024-03-01"

    out = tmp_path / "o.jsonl"
    save_corpus(arts, out)
    assert [a.id for a in load_corpus(out)] == ["a", "b"]


def test_load_corpus_parse_error_has_line(tmp_path):
    path = tmp_path / "c.jsonl"
    path.write_text(
        '{"id": "a", "title": "Ein Titel", "text": "T."}\nnot json\n', encoding="utf-8"
    )
    with pytest.raises(ParseError) as exc:
        load_corpus(path)
    assert exc.value.line == 2
    assert str(path) in str(exc.value)


def test_load_corpus_missing_field(tmp_path):
    path = tmp_path / "c.jsonl"
    _write_jsonl(path, [{"id": "a", "title": "Nur Titel"}])
    with pytest.raises(ParseError):
        load_corpus(path)


def test_load_corpus_duplicate_id(tmp_path):
    path = tmp_path / "c.jsonl"
    _write_jsonl(
        path,
        [
            {"id": "a", "title": "Titel eins", "text": "T."},
            {"id": "a", "title": "Titel zwei", "text": "T."},
        ],
    )
    with pytest.raises(ValidationError):
        load_corpus(path)


def test_department_allowlist(tmp_path):
    path = tmp_path / "c.jsonl"
    _write_jsonl(
        path,
        [
            {"id": "a", "title": "Titel eins", "text": "T.", "department": "sport"},
            {"id": "b", "title": "Titel zwei", "text": "T.", "department": "politik"},
            {"id": "c", "title": "Titel drei", "text": "T."},
        ],
    )
    arts = load_corpus(path, departments=["sport"])
    assert [a.id for a in arts] == ["a"]


def test_filter_bounds_inclusive():
    # boundary fixture: kept iff 30 <= body <= 512 and 3 <= title <= 12
    cases = [
        (29, 5, False),
        (30, 5, True),
        (512, 5, True),
        (513, 5, False),
        (100, 2, False),
        (100, 3, True),
        (100, 12, True),
        (100, 13, False),
        (30, 3, True),
        (512, 12, True),
    ]
    articles = [_article(i, body, title) for i, (body, title, _) in enumerate(cases)]
    kept = filter_articles(articles)
    expected = [f"a{i}" for i, (_, _, keep) in enumerate(cases) if keep]
    assert [a.id for a in kept] == expected


def test_sentence_splitting_basic():
    text = "Der Zug kommt. Die Bahn streikt! Warum? Niemand weiß es."
    assert split_sentences(text) == [
        "Der Zug kommt.",
        "Die Bahn streikt!",
        "Warum?",
        "Niemand weiß es.",
    ]


def test_sentence_splitting_requires_upper_or_digit():
    # lowercase after the period: no boundary
    assert split_sentences("Das gilt z. b. nicht immer.") == [
        "Das gilt z. b. nicht immer."
    ]
    assert split_sentences("Es war 2023. 2024 wird besser.") == [
        "Es war 2023.",
        "2024 wird besser.",
    ]


def test_sentence_splitting_abbreviations():
    text = "Laut Dr. Meier steigt die Zahl. Ca. zehn Prozent fehlen."
    sents = split_sentences(text)
    assert sents == ["Laut Dr. Meier steigt die Zahl.", "Ca. zehn Prozent fehlen."]


def test_load_abbreviations(tmp_path):
    path = tmp_path / "abbr.txt"
    path.write_text("Dr.\nProf\n# comment\n\nca.\n", encoding="utf-8")
    abbr = load_abbreviations(path)
    assert abbr == frozenset({"Dr", "Prof", "ca"})


def test_split_corpus_deterministic_partition():
    articles = [_article(i, 40, 5) for i in range(20)]
    split1 = split_corpus(articles, (10, 4, 3, 3), seed=13)
    split2 = split_corpus(articles, (10, 4, 3, 3), seed=13)
    assert split1 == split2
    # different seed shuffles differently
    split3 = split_corpus(articles, (10, 4, 3, 3), seed=14)
    assert split1 != split3
    all_ids = sorted(a.id for part in split1.partitions for a in part)
    assert all_ids == sorted(a.id for a in articles)
    assert tuple(len(p) for p in split1.partitions) == (10, 4, 3, 3)


def test_split_corpus_size_mismatch():
    articles = [_article(i, 40, 5) for i in range(5)]
    with pytest.raises(ValidationError):
        split_corpus(articles, (3, 3, 3, 3), seed=0)


def test_corpus_stats():
    arts = [_article(0, 10, 4), _article(1, 20, 6)]
    stats = corpus_stats(arts)
    assert stats.n_docs == 2
    assert stats.avg_article_words == 15.0
    assert stats.avg_title_words == 5.0
    with pytest.raises(ValidationError):
        corpus_stats([])
