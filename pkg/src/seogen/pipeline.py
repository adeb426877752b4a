"""Glue from configuration to the end-to-end headline pipeline.

Loads the artifacts a generation run needs (vocabulary, language model,
keyword ranker, fixture clients) and runs article text through keyword
ranking and beam-search decoding into JSON-ready result dicts.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Sequence

from .clients import CatalogNerClient, FixtureNerClient, FixtureVolumeClient, NerClient, VolumeClient
from .config import RunConfig
from .corpus import Article, load_corpus
from .decoder import Candidate, DecodeConfig, DecodeKeyword, decode
from .errors import ValidationError
from .keywords import (
    DocFreqTable,
    RankedKeyword,
    RankModel,
    apply_pins,
    extract_candidates,
    load_external_scores,
    populate_features,
    rank_keywords,
    rank_with_scores,
)
from .scorer import NGramScorer, Scorer
from .tokenizer import Vocab, encode, load_vocab


@dataclass
class Resources:
    """Everything a generation run needs, loaded once."""

    vocab: Vocab
    scorer: Scorer
    ranker: RankModel
    ner_client: NerClient | None
    volume_client: VolumeClient | None
    df_table: DocFreqTable
    external_scores: dict[str, dict[str, float]] | None = None


class _EmptyVolumeClient(VolumeClient):
    def volumes(self, keyword):
        return []


def load_resources(cfg: RunConfig, prefer_catalog: bool = False) -> Resources:
    """Load artifacts named by the config. The NER client comes from
    ner_catalog (surface scanning) when prefer_catalog is set or no
    per-article fixture is given; a fixture map can stand in for a
    catalog by taking the union of its entities."""
    cfg.require_paths("vocab", "scorer_model")
    vocab = load_vocab(cfg.vocab)
    scorer = NGramScorer.load(cfg.scorer_model)
    if scorer.vocab_size != len(vocab):
        raise ValidationError(
            f"model expects vocab of {scorer.vocab_size}, file has {len(vocab)}"
        )

    ranker = RankModel.zeros()
    if cfg.ranker_model is not None:
        cfg.require_paths("ranker_model")
        ranker = RankModel.load(cfg.ranker_model)

    ner_client: NerClient | None = None
    if prefer_catalog and cfg.ner_catalog is not None:
        cfg.require_paths("ner_catalog")
        ner_client = CatalogNerClient.from_file(cfg.ner_catalog)
    elif prefer_catalog and cfg.ner_fixture is not None:
        cfg.require_paths("ner_fixture")
        ner_client = CatalogNerClient.from_fixture_map(cfg.ner_fixture)
    elif cfg.ner_fixture is not None:
        cfg.require_paths("ner_fixture")
        ner_client = FixtureNerClient(cfg.ner_fixture)
    elif cfg.ner_catalog is not None:
        cfg.require_paths("ner_catalog")
        ner_client = CatalogNerClient.from_file(cfg.ner_catalog)

    volume_client: VolumeClient | None = None
    if cfg.volume_fixture is not None:
        cfg.require_paths("volume_fixture")
        volume_client = FixtureVolumeClient(cfg.volume_fixture)

    if cfg.corpus is not None:
        cfg.require_paths("corpus")
        df_table = DocFreqTable.from_articles(load_corpus(cfg.corpus))
    else:
        df_table = DocFreqTable([])

    external = None
    if cfg.external_scores is not None:
        cfg.require_paths("external_scores")
        external = load_external_scores(cfg.external_scores)

    return Resources(
        vocab=vocab,
        scorer=scorer,
        ranker=ranker,
        ner_client=ner_client,
        volume_client=volume_client,
        df_table=df_table,
        external_scores=external,
    )


def article_for_text(text: str) -> Article:
    """Wrap pasted text in an Article with a content-derived id."""
    digest = hashlib.sha256(text.encode("utf-8")).hexdigest()[:12]
    # The placeholder title never reaches generation; titles only matter
    # for training labels and evaluation.
    return Article(id=f"text-{digest}", title="(untitled)", text=text)


def rank_article_keywords(
    article: Article,
    res: Resources,
    pinned: Sequence[str] = (),
    excluded: Sequence[str] = (),
) -> list[RankedKeyword]:
    if res.ner_client is None:
        return []
    candidates = extract_candidates(article, res.ner_client, res.vocab)
    if res.volume_client is not None:
        df = res.df_table if res.df_table.n_docs else DocFreqTable([article.text])
        candidates = populate_features(candidates, article, res.volume_client, df)
    if res.external_scores is not None and article.id in res.external_scores:
        ranked = rank_with_scores(candidates, res.external_scores[article.id])
    else:
        ranked = rank_keywords(candidates, res.ranker)
    if pinned or excluded:
        ranked = apply_pins(ranked, pinned, excluded)
    return ranked


def to_decode_keywords(ranked: Sequence[RankedKeyword]) -> list[DecodeKeyword]:
    return [
        DecodeKeyword(subtokens=rk.candidate.subtokens, rank=rk.rank) for rk in ranked
    ]


def generate_for_article(
    article: Article,
    res: Resources,
    decode_cfg: DecodeConfig,
    use_keywords: bool = True,
    pinned: Sequence[str] = (),
    excluded: Sequence[str] = (),
) -> dict:
    """Run one article through the pipeline; returns a JSON-ready dict."""
    ranked = (
        rank_article_keywords(article, res, pinned, excluded) if use_keywords else []
    )
    source = encode(article.text, res.vocab)
    candidates = decode(
        source,
        res.scorer,
        decode_cfg,
        res.vocab,
        keywords=to_decode_keywords(ranked),
    )
    return {
        "id": article.id,
        "candidates": [_candidate_dict(c, ranked) for c in candidates],
        "keywords": [
            {
                "surface": rk.candidate.surface,
                "rank": rk.rank,
                "score": rk.score,
                "search_volume": rk.candidate.search_volume,
            }
            for rk in ranked
        ],
    }


def _candidate_dict(cand: Candidate, ranked: Sequence[RankedKeyword]) -> dict:
    matched = sorted({m.keyword_index for m in cand.beam.matches})
    return {
        "title": cand.text,
        "score": cand.score,
        "matched_keywords": [ranked[i].candidate.surface for i in matched],
    }
