import io
import json
import subprocess
import sys
from contextlib import redirect_stderr, redirect_stdout
from pathlib import Path

import pytest

from fraseo import cli, lexicon, lm

TESTS_DIR = Path(__file__).resolve().parent


def run_cli(argv):
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        status = cli.main(argv)
    return status, out.getvalue(), err.getvalue()


def test_generate_plain():
    status, out, err = run_cli(["generate", "dibujar", "animales"])
    assert status == 0
    assert err == ""
    lines = out.splitlines()
    assert lines[0] == "Yo dibujo animales."
    assert len(lines) == 3


def test_generate_json_is_canonical():
    status, out, _ = run_cli(["generate", "--format", "json", "lobo", "comer", "niñas"])
    assert status == 0
    payload = json.loads(out)
    assert out == json.dumps(payload, sort_keys=True, ensure_ascii=False, indent=2) + "\n"
    assert payload["input"] == ["lobo", "comer", "niñas"]
    assert payload["mode"] == "affirmative"
    top = payload["candidates"][0]
    assert top["text"] == "El lobo come niñas."
    assert top["tree"].startswith("(S ")
    assert {"position", "category", "rationale"} <= set(top["insertions"][0])
    assert any(line.startswith("mode ") for line in top["trace"])


def test_generate_echo_exit_2():
    status, out, _ = run_cli(["generate", "caer", "sal", "a", "mantel"])
    assert status == 2
    assert out.strip() == "caer sal a mantel"
    status, out, _ = run_cli(
        ["generate", "--format", "json", "caer", "sal", "a", "mantel"]
    )
    assert status == 2
    payload = json.loads(out)
    assert payload["echo"] == "caer sal a mantel"
    assert payload["candidates"] == []
    assert payload["mode"] is None


def test_generate_question_marker():
    status, out, _ = run_cli(["generate", "pájaros", "poder", "volar", "?"])
    assert status == 0
    assert out.splitlines()[0] == "¿Los pájaros pueden volar?"


def test_bad_configuration_exit_1(tmp_path):
    missing = str(tmp_path / "nope.xml")
    status, out, err = run_cli(["generate", "--lexicon", missing, "comer"])
    assert status == 1
    assert out == ""
    assert err.startswith("error: ")


def test_evaluate_bundled_corpus(bundled_fixtures):
    status, out, _ = run_cli(
        ["evaluate", "--corpus", str(bundled_fixtures / "exact_match_corpus.tsv")]
    )
    assert status == 0
    payload = json.loads(out)
    assert payload["total"] == 9
    assert payload["matched"] == 9
    assert payload["rate"] == 1.0
    assert all(outcome["status"] == "matched" for outcome in payload["outcomes"])


def test_evaluate_unreachable_corpus(bundled_fixtures):
    status, out, _ = run_cli(
        ["evaluate", "--corpus", str(bundled_fixtures / "non_svo_corpus.tsv")]
    )
    assert status == 0
    payload = json.loads(out)
    assert payload["rate"] == 0.0
    assert payload["outcomes"][0]["status"] == "echo"


def test_agreement_perfect(test_fixtures):
    status, out, _ = run_cli(
        ["agreement", "--annotations", str(test_fixtures / "perfect_annotations.xml")]
    )
    assert status == 0
    payload = json.loads(out)
    assert payload["alpha"] == 1.0
    assert payload["accuracy"] == 1.0
    assert payload["degenerate"] is False
    assert all(value == 1.0 for value in payload["pairwise_alpha"].values())


def test_agreement_matches_frozen_expectations(test_fixtures):
    expected = json.loads(
        (test_fixtures / "random_annotations_expected.json").read_text(encoding="utf-8")
    )
    status, out, _ = run_cli(
        ["agreement", "--annotations", str(test_fixtures / "random_annotations.xml")]
    )
    assert status == 0
    payload = json.loads(out)
    assert payload["degenerate"] == expected["degenerate"]
    assert payload["alpha"] == pytest.approx(expected["alpha"], abs=1e-9)
    assert payload["accuracy"] == pytest.approx(expected["accuracy"], abs=1e-9)
    for key in ("pairwise_alpha", "pairwise_accuracy"):
        assert set(payload[key]) == set(expected[key])
        for pair, value in expected[key].items():
            assert payload[key][pair] == pytest.approx(value, abs=1e-9)


def test_build_lexicon_subcommand(bundled_fixtures, tmp_path):
    out_path = tmp_path / "merged.xml"
    report_path = tmp_path / "report.json"
    status, out, _ = run_cli(
        [
            "build-lexicon",
            "--primary", str(bundled_fixtures / "source_a.xml"),
            "--expansion", str(bundled_fixtures / "source_b.xml"),
            "--oracle", str(bundled_fixtures / "allowlist.tsv"),
            "--out", str(out_path),
            "--report", str(report_path),
        ]
    )
    assert status == 0
    assert out.strip() == "wrote 7 entries to %s" % out_path
    merged = lexicon.load_lexicon(out_path)
    assert len(merged) == 7
    report = json.loads(report_path.read_text(encoding="utf-8"))
    assert report["merged_common"] == 2
    assert report["merged_unique"] == 5
    assert report["dropped_records"] == 3


def test_train_lm_subcommand(data_dir, tmp_path):
    out_path = tmp_path / "toy.lm"
    status, out, _ = run_cli(
        ["train-lm", "--corpus", str(data_dir / "toy_corpus.tagged"), "--out", str(out_path)]
    )
    assert status == 0
    assert out.strip() == "trained model covering 15 verbs; skipped 0 malformed lines"
    model = lm.NGramModel.load(out_path)
    assert model.top_preposition("ir") == ("a", 1.0)


def test_repl_round_trip():
    proc = subprocess.run(
        [sys.executable, "-m", "fraseo.cli", "repl"],
        input="dibujar animales\ncaer sal a mantel\nexit\n",
        capture_output=True,
        text=True,
        timeout=120,
    )
    assert proc.returncode == 0
    assert "Yo dibujo animales." in proc.stdout
    assert "caer sal a mantel" in proc.stdout
    assert proc.stdout.count("> ") == 3


def test_repl_eof_exits_cleanly():
    proc = subprocess.run(
        [sys.executable, "-m", "fraseo.cli", "repl"],
        input="",
        capture_output=True,
        text=True,
        timeout=120,
    )
    assert proc.returncode == 0
