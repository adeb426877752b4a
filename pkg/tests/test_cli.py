"""End-to-end CLI behavior on the bundled toy corpus."""

import json

import pytest

from seogen.errors import InternalError
from seogen.scorer import NGramScorer
from seogen.tokenizer import load_vocab

from conftest import run_cli


def parse_jsonl(text):
    return [json.loads(line) for line in text.splitlines() if line.strip()]


class TestExitCodes:
    def test_usage_error_is_2(self):
        code, _ = run_cli(["ingest"])  # missing required flags
        assert code == 2
        code, _ = run_cli(["no-such-command"])
        assert code == 2

    def test_validation_error_is_3(self, toy_pipeline, tmp_path):
        # generate without a configured vocabulary
        corpus = toy_pipeline["held_out"]
        code, _ = run_cli(["generate", "--input", corpus, "--model", toy_pipeline["lm"]])
        assert code == 3

    def test_parse_error_is_3(self, toy_pipeline, tmp_path):
        bad = tmp_path / "bad.jsonl"
        bad.write_text('{"id": "x"\n', encoding="utf-8")
        code, _ = run_cli(["ingest", "--input", bad, "--output", tmp_path / "out.jsonl"])
        assert code == 3

    def test_missing_file_is_4(self, tmp_path):
        code, _ = run_cli(
            ["ingest", "--input", tmp_path / "fehlt.jsonl",
             "--output", tmp_path / "out.jsonl"]
        )
        assert code == 4

    def test_internal_error_is_5(self, tmp_path, monkeypatch):
        import seogen.cli as cli_mod

        def boom(args):
            raise InternalError("kaput")

        monkeypatch.setattr(cli_mod, "cmd_permtest", boom)
        a = tmp_path / "a.txt"
        b = tmp_path / "b.txt"
        a.write_text("1\n2\n", encoding="utf-8")
        b.write_text("0\n1\n", encoding="utf-8")
        code, _ = run_cli(["permtest", "--group-a", a, "--group-b", b])
        assert code == 5

    def test_version_exits_0(self):
        code, out = run_cli(["--version"])
        assert code == 0
        assert out.startswith("seogen ")


class TestIngest:
    def test_report_and_splits(self, toy_pipeline):
        # artifacts were produced by the session fixture; verify on disk
        root = toy_pipeline["root"]
        for part, n in (("train", 40), ("validation", 8), ("test_auto", 8), ("test_manual", 4)):
            lines = (root / f"corpus.{part}.jsonl").read_text(encoding="utf-8").splitlines()
            assert len(lines) == n

    def test_ingest_summary_fields(self, data_dir, tmp_path):
        code, out = run_cli(
            ["ingest", "--input", data_dir / "toy_corpus.jsonl",
             "--output", tmp_path / "c.jsonl"]
        )
        assert code == 0
        report = json.loads(out)
        assert report["read"] == report["kept"] + report["dropped"]
        stats = report["stats"]
        assert stats["avg_article_words"] > 30
        assert 3 <= stats["avg_title_words"] <= 12
        assert stats["avg_article_sentences"] >= 1

    def test_department_filter(self, data_dir, tmp_path):
        code, out = run_cli(
            ["ingest", "--input", data_dir / "toy_corpus.jsonl",
             "--output", tmp_path / "c.jsonl", "--departments", "sport"]
        )
        assert code == 0
        kept = parse_jsonl((tmp_path / "c.jsonl").read_text(encoding="utf-8"))
        assert kept and all(rec["department"] == "sport" for rec in kept)

    def test_filter_flag_overrides_defaults(self, data_dir, tmp_path):
        code, out_default = run_cli(
            ["ingest", "--input", data_dir / "toy_corpus.jsonl",
             "--output", tmp_path / "a.jsonl"]
        )
        assert code == 0
        code, out_strict = run_cli(
            ["ingest", "--input", data_dir / "toy_corpus.jsonl",
             "--output", tmp_path / "b.jsonl", "--max-title-words", "6"]
        )
        assert code == 0
        assert json.loads(out_strict)["kept"] < json.loads(out_default)["kept"]

    def test_split_deterministic(self, data_dir, tmp_path):
        outs = []
        for name in ("x", "y"):
            out_path = tmp_path / f"{name}.jsonl"
            code, _ = run_cli(
                ["ingest", "--input", data_dir / "toy_corpus.jsonl",
                 "--output", out_path, "--split-sizes", "40,8,8,4", "--seed", 7]
            )
            assert code == 0
            outs.append((tmp_path / f"{name}.train.jsonl").read_text(encoding="utf-8"))
        assert outs[0] == outs[1]


class TestArtifacts:
    def test_vocab_loads(self, toy_pipeline):
        vocab = load_vocab(toy_pipeline["vocab"])
        assert len(vocab) > 50

    def test_lm_loads_and_roundtrips(self, toy_pipeline):
        scorer = NGramScorer.load(toy_pipeline["lm"])
        assert scorer.order == 3
        assert scorer.kappa == 0.05
        assert scorer.copy_bonus == 0.5

    def test_train_lm_reports_perplexity(self, toy_pipeline, tmp_path):
        code, out = run_cli(
            ["train-lm", "--corpus", toy_pipeline["train"],
             "--vocab", toy_pipeline["vocab"], "--model-out", tmp_path / "lm.txt",
             "--order", 2, "--kappa", "0.1"]
        )
        assert code == 0
        report = json.loads(out)
        assert report["order"] == 2
        assert report["train_perplexity"] > 1.0
        vocab = load_vocab(toy_pipeline["vocab"])
        assert report["train_perplexity"] < len(vocab)


class TestRankKeywords:
    def test_output_shape(self, toy_pipeline):
        code, out = run_cli(
            ["rank-keywords", "--input", toy_pipeline["held_out"],
             "--vocab", toy_pipeline["vocab"], "--model", toy_pipeline["lm"],
             "--ranker", toy_pipeline["ranker"],
             "--ner-fixture", toy_pipeline["ner_fixture"],
             "--volumes", toy_pipeline["volumes"],
             "--df-corpus", toy_pipeline["train"]]
        )
        assert code == 0
        records = parse_jsonl(out)
        assert len(records) == 8
        saw_keywords = False
        for rec in records:
            kws = rec["keywords"]
            assert [k["rank"] for k in kws] == list(range(len(kws)))
            scores = [k["score"] for k in kws]
            assert scores == sorted(scores, reverse=True)
            saw_keywords = saw_keywords or bool(kws)
        assert saw_keywords
        all_kws = [k for rec in records for k in rec["keywords"]]
        assert any(k["search_volume"] > 0 for k in all_kws)
        assert any(k["tfidf"] > 0 for k in all_kws)

    def test_external_scores_bypass(self, toy_pipeline, data_dir, tmp_path):
        external = json.loads((data_dir / "external_scores.json").read_text(encoding="utf-8"))
        target_id, entries = next(iter(external.items()))
        want_order = [e["surface"] for e in sorted(entries, key=lambda e: -e["score"])]

        corpus = toy_pipeline["corpus"]
        with open(corpus, encoding="utf-8") as fh:
            matching = [line for line in fh if json.loads(line)["id"] == target_id]
        assert matching, f"article {target_id} not in filtered corpus"
        one = tmp_path / "one.jsonl"
        one.write_text(matching[0], encoding="utf-8")

        code, out = run_cli(
            ["rank-keywords", "--input", one,
             "--vocab", toy_pipeline["vocab"], "--model", toy_pipeline["lm"],
             "--ner-fixture", toy_pipeline["ner_fixture"],
             "--external-scores", data_dir / "external_scores.json"]
        )
        assert code == 0
        (record,) = parse_jsonl(out)
        got = [k["surface"] for k in record["keywords"] if k["surface"] in set(want_order)]
        assert got == want_order


class TestGenerate:
    def generate(self, toy_pipeline, extra=()):
        return run_cli(
            ["generate", "--input", toy_pipeline["held_out"],
             "--vocab", toy_pipeline["vocab"], "--model", toy_pipeline["lm"],
             "--ranker", toy_pipeline["ranker"],
             "--ner-fixture", toy_pipeline["ner_fixture"],
             "--volumes", toy_pipeline["volumes"],
             "--df-corpus", toy_pipeline["train"],
             "--beam-size", 8, "--max-len", 12, "--r", 8, "--n-best", 3,
             *extra]
        )

    def test_candidates_shape(self, toy_pipeline):
        code, out = self.generate(toy_pipeline)
        assert code == 0
        records = parse_jsonl(out)
        assert len(records) == 8
        for rec in records:
            assert 1 <= len(rec["candidates"]) <= 3
            scores = [c["score"] for c in rec["candidates"]]
            assert scores == sorted(scores, reverse=True)
            for cand in rec["candidates"]:
                assert cand["title"].strip()

    def test_deterministic(self, toy_pipeline):
        _, a = self.generate(toy_pipeline)
        _, b = self.generate(toy_pipeline)
        assert a == b

    def test_no_keywords_flag(self, toy_pipeline):
        code, out = self.generate(toy_pipeline, extra=["--no-keywords"])
        assert code == 0
        for rec in parse_jsonl(out):
            assert rec["keywords"] == []
            for cand in rec["candidates"]:
                assert cand["matched_keywords"] == []

    def test_flags_override_config_file(self, toy_pipeline, tmp_path):
        config = tmp_path / "config.json"
        config.write_text(json.dumps({
            "vocab": str(toy_pipeline["vocab"]),
            "scorer_model": str(toy_pipeline["lm"]),
            "decode": {"beam_size": 8, "max_len": 12, "r": 8, "n_best": 1},
        }), encoding="utf-8")
        code, out = run_cli(
            ["generate", "--input", toy_pipeline["held_out"], "--config", config,
             "--n-best", 2]
        )
        assert code == 0
        for rec in parse_jsonl(out):
            assert len(rec["candidates"]) == 2


class TestEvaluate:
    def test_summary_and_report(self, toy_pipeline, tmp_path):
        code, gen_out = run_cli(
            ["generate", "--input", toy_pipeline["held_out"],
             "--vocab", toy_pipeline["vocab"], "--model", toy_pipeline["lm"],
             "--beam-size", 8, "--max-len", 12, "--r", 8]
        )
        assert code == 0
        generated = tmp_path / "generated.jsonl"
        generated.write_text(gen_out, encoding="utf-8")

        report_path = tmp_path / "report.json"
        code, out = run_cli(
            ["evaluate", "--generated", generated,
             "--corpus", toy_pipeline["held_out"],
             "--embeddings", toy_pipeline["embeddings"],
             "--report-out", report_path]
        )
        assert code == 0
        summary = json.loads(out)
        assert summary["documents"] == 8
        for key in ("rouge1_f1", "rouge2_f1", "rougeL_f1", "sentence_sim"):
            assert 0.0 <= summary[key] <= 1.0
        report = json.loads(report_path.read_text(encoding="utf-8"))
        assert len(report["documents"]) == 8
        assert report["mean"]["rouge1"]["f1"] == pytest.approx(summary["rouge1_f1"])

    def test_judgements_summary(self, toy_pipeline, data_dir, tmp_path):
        generated = tmp_path / "generated.jsonl"
        lines = []
        with open(toy_pipeline["held_out"], encoding="utf-8") as fh:
            for line in fh:
                rec = json.loads(line)
                lines.append(json.dumps({
                    "id": rec["id"],
                    "candidates": [{"title": rec["title"], "score": 0.0}],
                }))
        generated.write_text("\n".join(lines) + "\n", encoding="utf-8")
        code, out = run_cli(
            ["evaluate", "--generated", generated,
             "--corpus", toy_pipeline["held_out"],
             "--judgements", data_dir / "judgements.csv"]
        )
        assert code == 0
        summary = json.loads(out)
        # identity pairs: perfect overlap
        assert summary["rouge1_f1"] == 1.0
        assert 1.0 <= summary["manual_mean_quality"] <= 5.0

    def test_missing_reference_is_3(self, toy_pipeline, tmp_path):
        generated = tmp_path / "generated.jsonl"
        generated.write_text(
            json.dumps({"id": "gibtsnicht", "candidates": [{"title": "x"}]}) + "\n",
            encoding="utf-8",
        )
        code, _ = run_cli(
            ["evaluate", "--generated", generated, "--corpus", toy_pipeline["held_out"]]
        )
        assert code == 3


class TestPermtest:
    def test_matches_library_and_reads_both_formats(self, tmp_path):
        from seogen.evaluation import permutation_test

        a_lines = tmp_path / "a.txt"
        a_lines.write_text("10\n11\n12\n", encoding="utf-8")
        b_json = tmp_path / "b.json"
        b_json.write_text("[0, 1, 2]", encoding="utf-8")
        code, out = run_cli(
            ["permtest", "--group-a", a_lines, "--group-b", b_json,
             "--n-perms", 999, "--seed", 1]
        )
        assert code == 0
        report = json.loads(out)
        assert report["p_value"] == permutation_test(
            [10, 11, 12], [0, 1, 2], n_perms=999, seed=1
        )
        assert report["observed_diff"] == 10.0
        assert report["n_perms"] == 999 and report["seed"] == 1
