import json

import pytest

from crowdquery.cli import main
from crowdquery.kb import PLUS, load_kb

DB = "http://dbpedia.org/resource/"


def run_cli(capsys, *args):
    code = main(list(args))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_profile_reports_class_aggregate(capsys, fixtures_dir):
    code, out, _ = run_cli(
        capsys, "profile", str(fixtures_dir / "figure2_ext.nt"),
        "--class", "http://schema.org/Movie",
        "--predicate", "http://dbpedia.org/property/producer")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].startswith("# AM\t")
    assert lines[0].endswith("\t3")
    assert len(lines) == 1 + 4  # aggregate plus one row per movie


def test_profile_empty_dataset(capsys, tmp_path):
    empty = tmp_path / "empty.nt"
    empty.write_text("", encoding="utf-8")
    code, out, _ = run_cli(capsys, "profile", str(empty))
    assert code == 0
    assert out.strip() == ""


def test_run_crowd_off_equals_plain_evaluation(capsys, fixtures_dir):
    code, out, _ = run_cli(
        capsys, "run", str(fixtures_dir / "figure2.nt"),
        str(fixtures_dir / "movies.rq"), "--crowd", "off", "--format", "jsonl")
    assert code == 0
    records = [json.loads(line) for line in out.splitlines()]
    answers = [r for r in records if r["type"] == "answer"]
    summary = next(r for r in records if r["type"] == "summary")
    assert len(answers) == 5
    assert summary["crowdsourced"] == 0 and summary["tasks"] == 0


def test_run_worked_example_crowdsources_one_triple(capsys, fixtures_dir, tmp_path):
    kb_out = tmp_path / "kb.csv"
    code, out, _ = run_cli(
        capsys, "run", str(fixtures_dir / "figure2.nt"),
        str(fixtures_dir / "movies.rq"),
        "--crowd", "sim", "--tau", "0.60", "--alpha", "0.5",
        "--kb-in", str(fixtures_dir / "movies_kb.csv"),
        "--kb-out", str(kb_out), "--format", "jsonl")
    assert code == 0
    records = [json.loads(line) for line in out.splitlines()]
    summary = next(r for r in records if r["type"] == "summary")
    assert summary["crowdsourced"] == 1
    assert summary["tasks"] == 1
    gates = [r for r in records if r["type"] == "gate"]
    assert [g["decision"] for g in gates] == [
        "below-threshold", "complete", "crowdsourced", "below-threshold"]
    # the sim oracle defaults to the data set itself, which knows producers
    # for Legal_Eagles, so the answer folds into the positive set
    assert load_kb(kb_out).size(PLUS) >= 1


def test_run_with_gold_reports_metrics(capsys, fixtures_dir, tmp_path):
    gold = tmp_path / "gold.csv"
    gold.write_text(
        f"<{DB}Legal_Eagles>,http://dbpedia.org/property/producer,"
        f"<{DB}Ivan_Reitman>\n", encoding="utf-8")
    code, out, _ = run_cli(
        capsys, "run", str(fixtures_dir / "figure2.nt"),
        str(fixtures_dir / "movies.rq"),
        "--crowd", "sim", "--tau", "0.60", "--seed", "1",
        "--kb-in", str(fixtures_dir / "movies_kb.csv"),
        "--gold", str(gold), "--format", "jsonl")
    assert code == 0
    summary = json.loads(out.splitlines()[-1])
    assert "precision" in summary and "recall" in summary


def test_run_text_report_has_summary(capsys, fixtures_dir):
    code, out, _ = run_cli(
        capsys, "run", str(fixtures_dir / "capitals.nt"),
        str(fixtures_dir / "capitals.rq"), "--crowd", "off")
    assert code == 0
    assert out.startswith("?city\t?country")
    assert "# summary: answers=3" in out


def test_parse_error_is_nonzero_exit(capsys, fixtures_dir, tmp_path):
    bad = tmp_path / "bad.rq"
    bad.write_text("SELECT WHERE oops", encoding="utf-8")
    code, _, err = run_cli(
        capsys, "run", str(fixtures_dir / "figure2.nt"), str(bad))
    assert code == 1
    assert "error" in err


def test_missing_data_file_is_nonzero_exit(capsys, fixtures_dir):
    code, _, err = run_cli(
        capsys, "run", "/nonexistent/data.nt", str(fixtures_dir / "movies.rq"))
    assert code == 1


def test_kb_persists_across_runs(capsys, fixtures_dir, tmp_path):
    kb_path = tmp_path / "kb.csv"
    code, out, _ = run_cli(
        capsys, "run", str(fixtures_dir / "capitals.nt"),
        str(fixtures_dir / "capitals.rq"),
        "--crowd", "replay", "--replay", str(fixtures_dir / "capitals_replay.csv"),
        "--kb-out", str(kb_path), "--format", "jsonl")
    assert code == 0
    records = [json.loads(line) for line in out.splitlines()]
    answers = [r for r in records if r["type"] == "answer"]
    assert {"city": f"<{DB}Madrid>", "country": f"<{DB}Spain>", "type": "answer"} \
        in answers
    kb = load_kb(kb_path)
    assert kb.size(PLUS) == 1

    # second run with the learned KB and the crowd off still answers Madrid
    code, out, _ = run_cli(
        capsys, "run", str(fixtures_dir / "capitals.nt"),
        str(fixtures_dir / "capitals.rq"),
        "--crowd", "off", "--kb-in", str(kb_path), "--format", "jsonl")
    assert code == 0
    records = [json.loads(line) for line in out.splitlines()]
    answers = [r for r in records if r["type"] == "answer"]
    assert len(answers) == 4


def test_replay_without_file_is_an_error(capsys, fixtures_dir):
    with pytest.raises(SystemExit):
        main(["run", str(fixtures_dir / "capitals.nt"),
              str(fixtures_dir / "capitals.rq"), "--crowd", "replay"])
