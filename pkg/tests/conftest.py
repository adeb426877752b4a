import contextlib
import io
import json
import sys
from pathlib import Path

import pytest

from seogen.cli import main as cli_main

DATA = Path(__file__).resolve().parent.parent / "data"


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One line per acceptance criterion once the suite has run."""
    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None) if module else None
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for status, name in results:
        terminalreporter.write_line(f"[{status}] {name}")


def run_cli(argv) -> tuple[int, str]:
    """Run the CLI in-process, returning (exit code, captured stdout)."""
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        try:
            code = cli_main([str(a) for a in argv])
        except SystemExit as exc:  # argparse usage errors and --version
            code = int(exc.code or 0)
    return code, buf.getvalue()


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA


@pytest.fixture(scope="session")
def toy_pipeline(tmp_path_factory) -> dict:
    """Artifacts trained on the bundled toy corpus, shared by the CLI and
    service tests."""
    root = tmp_path_factory.mktemp("pipeline")
    paths = {
        "root": root,
        "corpus": root / "corpus.jsonl",
        "train": root / "corpus.train.jsonl",
        "held_out": root / "corpus.test_auto.jsonl",
        "vocab": root / "vocab.txt",
        "lm": root / "lm.txt",
        "ranker": root / "ranker.json",
        "ner_fixture": DATA / "ner_fixture.json",
        "ner_catalog": DATA / "ner_catalog.json",
        "volumes": DATA / "volumes.json",
        "embeddings": DATA / "embeddings.txt",
        "judgements": DATA / "judgements.csv",
        "external_scores": DATA / "external_scores.json",
    }

    code, out = run_cli(
        ["ingest", "--input", DATA / "toy_corpus.jsonl", "--output", paths["corpus"],
         "--split-sizes", "40,8,8,4", "--seed", 7]
    )
    assert code == 0, out
    assert json.loads(out)["kept"] >= 50

    code, _ = run_cli(
        ["build-vocab", "--input", paths["train"], "--output", paths["vocab"],
         "--top-k", 300]
    )
    assert code == 0

    code, _ = run_cli(
        ["train-lm", "--corpus", paths["train"], "--vocab", paths["vocab"],
         "--model-out", paths["lm"], "--order", 3, "--kappa", "0.05",
         "--copy-bonus", "0.5"]
    )
    assert code == 0

    code, _ = run_cli(
        ["rank-keywords", "--input", paths["train"], "--vocab", paths["vocab"],
         "--model", paths["lm"], "--ner-fixture", paths["ner_fixture"],
         "--volumes", paths["volumes"], "--df-corpus", paths["train"],
         "--train-out", paths["ranker"]]
    )
    assert code == 0

    return paths
