"""Command-line interface for the headline-generation pipeline.

Results go to stdout as JSON (JSONL for per-article output); progress and
diagnostics go to stderr. Exit codes: 0 success, 2 usage error, 3 invalid
input or config, 4 I/O or backend failure, 5 internal error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .config import RunConfig
from .corpus import (
    corpus_stats,
    filter_articles,
    load_abbreviations,
    load_corpus,
    save_corpus,
    split_corpus,
)
from .errors import SeogenError, TransportError, ValidationError
from .evaluation import (
    EmbeddingStore,
    aggregate_manual,
    evaluate_pairs,
    load_judgements,
    permutation_test,
)
from .keywords import train_ranker
from .pipeline import generate_for_article, load_resources, rank_article_keywords
from .scorer import NGramScorer, perplexity, train_ngram
from .tokenizer import build_vocab, encode, load_vocab, save_vocab

log = logging.getLogger("seogen")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INVALID = 3
EXIT_IO = 4
EXIT_INTERNAL = 5


def _emit(obj) -> None:
    print(json.dumps(obj, ensure_ascii=False))


def _load_config(args) -> RunConfig:
    cfg = RunConfig.from_file(args.config) if args.config else RunConfig()
    overrides = {
        dotted: getattr(args, attr)
        for attr, dotted in getattr(args, "_overrides", {}).items()
        if getattr(args, attr, None) is not None
    }
    if getattr(args, "no_keywords", False):
        overrides["decode.use_keywords"] = False
    return cfg.with_overrides(overrides)


def _add_config_flag(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file; flags override its values")


def _add_artifact_flags(p: argparse.ArgumentParser) -> dict[str, str]:
    p.add_argument("--vocab", help="vocabulary file")
    p.add_argument("--model", dest="scorer_model", help="language-model file")
    p.add_argument("--ranker", dest="ranker_model", help="keyword ranker model")
    p.add_argument("--external-scores", dest="external_scores",
                   help="JSON keyword scores that bypass the ranker")
    p.add_argument("--ner-fixture", dest="ner_fixture",
                   help="per-article entity fixture (JSON map)")
    p.add_argument("--ner-catalog", dest="ner_catalog",
                   help="entity catalog matched against text (JSON list)")
    p.add_argument("--volumes", dest="volume_fixture",
                   help="search-volume fixture (JSON map)")
    p.add_argument("--df-corpus", dest="corpus",
                   help="corpus for document frequencies (JSONL)")
    return {
        "vocab": "vocab",
        "scorer_model": "scorer_model",
        "ranker_model": "ranker_model",
        "external_scores": "external_scores",
        "ner_fixture": "ner_fixture",
        "ner_catalog": "ner_catalog",
        "volume_fixture": "volume_fixture",
        "corpus": "corpus",
    }


def _add_decode_flags(p: argparse.ArgumentParser) -> dict[str, str]:
    p.add_argument("--beam-size", type=int, dest="beam_size")
    p.add_argument("--max-len", type=int, dest="max_len")
    p.add_argument("--n-best", type=int, dest="n_best")
    p.add_argument("--r", type=int, dest="r", help="length-penalty target length")
    p.add_argument("--alpha", type=float, dest="alpha", help="length-penalty strength")
    p.add_argument("--beta", type=float, dest="beta", help="rank-penalty offset")
    p.add_argument("--position-scale", type=float, dest="position_scale")
    p.add_argument("--rank-penalty-combine", choices=("max", "product"),
                   dest="rank_penalty_combine")
    p.add_argument("--no-keywords", action="store_true",
                   help="decode without keyword shaping")
    return {
        "beam_size": "decode.beam_size",
        "max_len": "decode.max_len",
        "n_best": "decode.n_best",
        "r": "decode.r",
        "alpha": "decode.alpha",
        "beta": "decode.beta",
        "position_scale": "decode.position_scale",
        "rank_penalty_combine": "decode.rank_penalty_combine",
    }


def cmd_ingest(args) -> int:
    cfg = _load_config(args)
    f = cfg.filters
    departments = args.departments.split(",") if args.departments else None
    articles = load_corpus(args.input, departments=departments)
    kept = filter_articles(
        articles,
        min_body_words=f.min_body_words,
        max_body_words=f.max_body_words,
        min_title_words=f.min_title_words,
        max_title_words=f.max_title_words,
    )
    save_corpus(kept, args.output)
    out = {"read": len(articles), "kept": len(kept), "dropped": len(articles) - len(kept)}
    if kept:
        if args.abbreviations:
            stats = corpus_stats(kept, load_abbreviations(args.abbreviations))
        else:
            stats = corpus_stats(kept)
        out["stats"] = {
            "avg_article_words": stats.avg_article_words,
            "avg_article_sentences": stats.avg_article_sentences,
            "avg_title_words": stats.avg_title_words,
            "avg_title_sentences": stats.avg_title_sentences,
        }
    if args.split_sizes:
        sizes = tuple(int(s) for s in args.split_sizes.split(","))
        split = split_corpus(kept, sizes, seed=args.seed)
        base = Path(args.output)
        names = ("train", "validation", "test_auto", "test_manual")
        for name, part in zip(names, split.partitions):
            part_path = base.with_name(f"{base.stem}.{name}{base.suffix}")
            save_corpus(part, part_path)
            out.setdefault("splits", {})[name] = {"path": str(part_path), "n": len(part)}
    _emit(out)
    return EXIT_OK


def cmd_build_vocab(args) -> int:
    articles = load_corpus(args.input)
    texts = [a.title for a in articles] + [a.text for a in articles]
    vocab = build_vocab(texts, top_k=args.top_k)
    save_vocab(vocab, args.output)
    _emit({"tokens": len(vocab), "path": args.output})
    return EXIT_OK


def cmd_train_lm(args) -> int:
    vocab = load_vocab(args.vocab)
    articles = load_corpus(args.corpus)
    titles = [encode(a.title, vocab) for a in articles]
    scorer = train_ngram(
        titles,
        vocab_size=len(vocab),
        order=args.order,
        kappa=args.kappa,
        copy_bonus=args.copy_bonus,
    )
    scorer.save(args.model_out)
    _emit(
        {
            "titles": len(titles),
            "order": args.order,
            "vocab_size": len(vocab),
            "train_perplexity": perplexity(scorer, titles),
            "path": args.model_out,
        }
    )
    return EXIT_OK


def cmd_rank_keywords(args) -> int:
    cfg = _load_config(args)
    cfg = cfg.with_overrides({"corpus": cfg.corpus or args.input})
    res = load_resources(cfg)
    if res.ner_client is None:
        raise ValidationError("rank-keywords needs --ner-fixture or --ner-catalog")
    articles = load_corpus(args.input)

    if args.train_out:
        corpus_candidates = []
        for article in articles:
            ranked = rank_article_keywords(article, res)
            corpus_candidates.append((article, [rk.candidate for rk in ranked]))
        model = train_ranker(
            corpus_candidates,
            tag_vocab=_tag_vocab(corpus_candidates),
            epochs=args.epochs,
        )
        model.save(args.train_out)
        log.info(
            "trained ranker on %d articles, loss %.6f -> %.6f",
            len(articles), model.loss_history[0], model.loss_history[-1],
        )
        res.ranker = model

    for article in articles:
        ranked = rank_article_keywords(article, res)
        _emit(
            {
                "id": article.id,
                "keywords": [
                    {
                        "surface": rk.candidate.surface,
                        "rank": rk.rank,
                        "score": rk.score,
                        "relevance": rk.candidate.relevance,
                        "search_volume": rk.candidate.search_volume,
                        "volume_delta_3d": rk.candidate.volume_delta_3d,
                        "tfidf": rk.candidate.tfidf,
                        "first_pos_ratio": rk.candidate.first_pos_ratio,
                    }
                    for rk in ranked
                ],
            }
        )
    return EXIT_OK


def _tag_vocab(corpus_candidates) -> tuple[str, ...]:
    tags = sorted({c.tag for _, cands in corpus_candidates for c in cands if c.tag})
    return tuple(tags)


def cmd_generate(args) -> int:
    cfg = _load_config(args)
    res = load_resources(cfg)
    decode_cfg = cfg.decode.to_decode_config()
    articles = load_corpus(args.input)
    for article in articles:
        _emit(
            generate_for_article(
                article, res, decode_cfg, use_keywords=cfg.decode.use_keywords
            )
        )
    return EXIT_OK


def cmd_evaluate(args) -> int:
    references = {a.id: a.title for a in load_corpus(args.corpus)}
    pairs = []
    with open(args.generated, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            rec = json.loads(line)
            if rec["id"] not in references:
                raise ValidationError(f"no reference title for article {rec['id']!r}")
            if not rec.get("candidates"):
                raise ValidationError(f"article {rec['id']!r} has no candidates")
            pairs.append((rec["id"], rec["candidates"][0]["title"], references[rec["id"]]))

    store = EmbeddingStore.load(args.embeddings) if args.embeddings else None
    manual = None
    if args.judgements:
        manual = aggregate_manual(load_judgements(args.judgements))
    report = evaluate_pairs(pairs, store=store, manual=manual)
    if args.report_out:
        Path(args.report_out).write_text(report.to_json(), encoding="utf-8")
    summary = {
        "documents": len(report.documents),
        "rouge1_f1": report.mean_rouge1.f1,
        "rouge2_f1": report.mean_rouge2.f1,
        "rougeL_f1": report.mean_rougeL.f1,
    }
    if report.mean_sentence_sim is not None:
        summary["sentence_sim"] = report.mean_sentence_sim
    if manual is not None:
        summary["manual_mean_quality"] = manual.mean_quality
    _emit(summary)
    return EXIT_OK


def _read_group(path: str) -> list[float]:
    text = Path(path).read_text(encoding="utf-8").strip()
    if text.startswith("["):
        return [float(x) for x in json.loads(text)]
    return [float(line) for line in text.splitlines() if line.strip()]


def cmd_permtest(args) -> int:
    a = _read_group(args.group_a)
    b = _read_group(args.group_b)
    p = permutation_test(a, b, n_perms=args.n_perms, seed=args.seed)
    observed = sum(a) / len(a) - sum(b) / len(b)
    _emit({"p_value": p, "observed_diff": observed, "n_perms": args.n_perms, "seed": args.seed})
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    cfg = _load_config(args)
    app = create_app(cfg)
    uvicorn.run(app, host=cfg.service.host, port=cfg.service.port, log_level="info")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="seogen",
        description="Search-optimized headline generation",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", default="INFO",
                        choices=("DEBUG", "INFO", "WARNING", "ERROR"))
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="validate, filter, and split a JSONL corpus")
    _add_config_flag(p)
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--departments", help="comma-separated allowlist")
    p.add_argument("--abbreviations", help="abbreviation list for sentence stats")
    p.add_argument("--split-sizes", help="train,validation,test_auto,test_manual")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--min-body-words", type=int, dest="min_body_words")
    p.add_argument("--max-body-words", type=int, dest="max_body_words")
    p.add_argument("--min-title-words", type=int, dest="min_title_words")
    p.add_argument("--max-title-words", type=int, dest="max_title_words")
    p.set_defaults(func=cmd_ingest, _overrides={
        "min_body_words": "filters.min_body_words",
        "max_body_words": "filters.max_body_words",
        "min_title_words": "filters.min_title_words",
        "max_title_words": "filters.max_title_words",
    })

    p = sub.add_parser("build-vocab", help="derive a subtoken vocabulary from a corpus")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--top-k", type=int, default=1000)
    p.set_defaults(func=cmd_build_vocab)

    p = sub.add_parser("train-lm", help="train the n-gram title model")
    p.add_argument("--corpus", required=True)
    p.add_argument("--vocab", required=True)
    p.add_argument("--model-out", required=True)
    p.add_argument("--order", type=int, default=3)
    p.add_argument("--kappa", type=float, default=0.1)
    p.add_argument("--copy-bonus", type=float, default=0.0)
    p.set_defaults(func=cmd_train_lm)

    p = sub.add_parser("rank-keywords", help="extract and rank keywords per article")
    _add_config_flag(p)
    p.add_argument("--input", required=True, help="articles to process (JSONL)")
    p.add_argument("--train-out", help="train the ranker on this corpus and save it")
    p.add_argument("--epochs", type=int, default=200)
    overrides = _add_artifact_flags(p)
    p.set_defaults(func=cmd_rank_keywords, _overrides=overrides)

    p = sub.add_parser("generate", help="generate headline candidates")
    _add_config_flag(p)
    p.add_argument("--input", required=True, help="articles to process (JSONL)")
    overrides = _add_artifact_flags(p)
    overrides.update(_add_decode_flags(p))
    p.set_defaults(func=cmd_generate, _overrides=overrides)

    p = sub.add_parser("evaluate", help="score generated titles against references")
    p.add_argument("--generated", required=True, help="output of the generate command")
    p.add_argument("--corpus", required=True, help="reference articles (JSONL)")
    p.add_argument("--embeddings", help="word-vector file for sentence similarity")
    p.add_argument("--judgements", help="manual judgement sheet (CSV)")
    p.add_argument("--report-out", help="write the full JSON report here")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("permtest", help="one-sided Monte Carlo permutation test")
    p.add_argument("--group-a", required=True, help="metric values, one per line or JSON list")
    p.add_argument("--group-b", required=True)
    p.add_argument("--n-perms", type=int, default=9999)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_permtest)

    p = sub.add_parser("serve", help="run the suggestion service")
    _add_config_flag(p)
    p.add_argument("--host", dest="host")
    p.add_argument("--port", type=int, dest="port")
    overrides = _add_artifact_flags(p)
    overrides.update({"host": "service.host", "port": "service.port"})
    p.set_defaults(func=cmd_serve, _overrides=overrides)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=getattr(logging, args.log_level),
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except ValidationError as exc:
        log.error("%s", exc)
        return EXIT_INVALID
    except (TransportError, OSError) as exc:
        log.error("%s", exc)
        return EXIT_IO
    except SeogenError as exc:
        log.error("internal error: %s", exc)
        return EXIT_INTERNAL
    except Exception as exc:  # pragma: no cover - last resort
        log.exception("unexpected error: %s", exc)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
