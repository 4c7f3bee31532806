"""CLI behavior: snapshots, scoring, pipelines, determinism, exit codes."""

import csv
import json
import math
import os
from pathlib import Path

import pytest

from scippl.cli import main
from scippl.lm import import_token_logprobs
from scippl.synthdata import write_planted_corpus


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    """Small planted corpus, ingested, trained, and scored once."""
    root = tmp_path_factory.mktemp("cli")
    write_planted_corpus(root / "papers.jsonl", root / "reviews.jsonl",
                         n_papers=600, seed=11)
    out = root / "out"
    base = ["--papers", str(root / "papers.jsonl"),
            "--reviews", str(root / "reviews.jsonl"),
            "--out", str(out), "--cutoff", "2023-06", "--seed", "5",
            "--jif-year", "2024"]
    assert main(base + ["ingest"]) == 0
    assert main(base + ["train-lm"]) == 0
    assert main(base + ["score"]) == 0
    return root, out, base


def read_csv(path):
    with open(path, "r", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def test_ingest_snapshot_small(tmp_path, capsys):
    lines = [json.dumps({"doc_id": f"p{i}", "title": "t", "abstract": "some words",
                         "pub_date": "2024-01-02", "journal_id": "j",
                         "doc_type": "research"}) for i in range(3)]
    (tmp_path / "papers.jsonl").write_text("\n".join(lines) + "\n")
    rc = main(["--papers", str(tmp_path / "papers.jsonl"),
               "--out", str(tmp_path / "out"), "ingest"])
    assert rc == 0
    snapshot = (tmp_path / "out" / "papers.snapshot.jsonl").read_text().strip()
    assert len(snapshot.splitlines()) == 3
    assert "loaded: 3" in capsys.readouterr().out


def test_ingest_missing_file_exit_2(tmp_path, capsys):
    missing = tmp_path / "nope.jsonl"
    rc = main(["--papers", str(missing), "--out", str(tmp_path / "out"), "ingest"])
    assert rc == 2
    assert str(missing) in capsys.readouterr().err


def test_ingest_mixed_lines(tmp_path, capsys):
    lines = [json.dumps({"doc_id": "ok", "abstract": "fine words",
                         "pub_date": "2024-01-02"}),
             "garbage",
             json.dumps({"doc_id": "noabs", "abstract": "",
                         "pub_date": "2024-01-02"})]
    (tmp_path / "papers.jsonl").write_text("\n".join(lines) + "\n")
    rc = main(["--papers", str(tmp_path / "papers.jsonl"),
               "--out", str(tmp_path / "out"), "ingest"])
    assert rc == 0
    out = capsys.readouterr().out
    assert "malformed line: 1" in out
    assert "missing abstract: 1" in out
    snapshot = (tmp_path / "out" / "papers.snapshot.jsonl").read_text()
    assert len(snapshot.strip().splitlines()) == 1


def test_score_outputs_and_determinism(workspace):
    root, out, base = workspace
    rows = read_csv(out / "scores.csv")
    assert len(rows) == 600          # focal papers only (post-cutoff)
    assert all(float(r["perplexity"]) >= 1.0 for r in rows)
    assert set(rows[0]) == {"doc_id", "model_id", "token_count", "perplexity"}
    first = (out / "scores.csv").read_bytes()
    assert main(base + ["score"]) == 0
    assert (out / "scores.csv").read_bytes() == first


def test_analyze_rerun_byte_identical(workspace):
    root, out, base = workspace
    assert main(base + ["analyze", "disparity"]) == 0
    b1 = (out / "disparity_bins.csv").read_bytes()
    t1 = (out / "disparity_tests.csv").read_bytes()
    assert main(base + ["analyze", "disparity"]) == 0
    assert (out / "disparity_bins.csv").read_bytes() == b1
    assert (out / "disparity_tests.csv").read_bytes() == t1


def test_extreme_share_csv_shape(workspace):
    root, out, base = workspace
    assert main(base + ["analyze", "extreme-share", "--flag", "jif-top"]) == 0
    rows = read_csv(out / "extreme_share_jif_top.csv")
    assert len(rows) == 10
    assert all(0.0 <= float(r["proportion"]) <= 1.0 for r in rows)


def test_jif_pipeline_rows(workspace):
    root, out, base = workspace
    assert main(base + ["analyze", "jif"]) == 0
    rows = read_csv(out / "jif.csv")
    assert len(rows) == 150          # every journal has backbone citable items
    for r in rows:
        num = float(r["citation_numerator"])
        den = float(r["citable_denominator"])
        assert float(r["jif"]) == pytest.approx(num / den)


def test_import_logprobs_round_trip(workspace, tmp_path):
    root, out, base = workspace
    lines = [json.dumps({"doc_id": f"d{i}", "model_id": "ext",
                         "tokens": ["a", "b", "c"],
                         "logprobs": [-0.5 * (i + 1), -1.0, -2.0]})
             for i in range(10)]
    lp = tmp_path / "logprobs.jsonl"
    lp.write_text("\n".join(lines) + "\n")
    out2 = tmp_path / "out2"
    rc = main(["--logprobs", str(lp), "--out", str(out2), "import-logprobs"])
    assert rc == 0
    rows = read_csv(out2 / "scores.csv")
    recomputed = import_token_logprobs(lines)
    expected = {d.doc_id: d.perplexity for d in recomputed.documents}
    assert len(rows) == 10
    for r in rows:
        assert float(r["perplexity"]) == pytest.approx(expected[r["doc_id"]],
                                                       rel=1e-12)


def test_word_ratio_empty_group_nonzero_exit(tmp_path, capsys):
    # one paper only: the median split cannot produce two groups
    (tmp_path / "papers.jsonl").write_text(json.dumps(
        {"doc_id": "solo", "abstract": "alone words", "pub_date": "2024-01-01",
         "journal_id": "j", "doc_type": "research"}) + "\n")
    out = tmp_path / "out"
    out.mkdir()
    (out / "scores.csv").write_text(
        "doc_id,model_id,token_count,perplexity\nsolo,kn3,2,5.0\n")
    rc = main(["--papers", str(tmp_path / "papers.jsonl"), "--out", str(out),
               "analyze", "word-ratio"])
    assert rc == 1
    assert "two scored papers" in capsys.readouterr().err


def test_unknown_pipeline_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["analyze", "no-such-pipeline"])
    assert exc.value.code == 2
    err = capsys.readouterr().err
    assert "extreme-share" in err     # usage error lists available pipelines


def test_config_file_and_flag_precedence(tmp_path, workspace, monkeypatch):
    root, out, base = workspace
    cfgfile = tmp_path / "run.cfg"
    cfgfile.write_text(
        f"papers = {root / 'papers.jsonl'}\n"
        f"out = {tmp_path / 'cfg_out'}\n"
        "bins = 5\n"
        "seed = 9\n"
        "# comment line\n")
    monkeypatch.setenv("SCIPPL_CONFIG", str(cfgfile))
    assert main(["ingest"]) == 0
    assert (tmp_path / "cfg_out" / "papers.snapshot.jsonl").exists()
    # a flag beats the config value
    assert main(["--out", str(tmp_path / "flag_out"), "ingest"]) == 0
    assert (tmp_path / "flag_out" / "papers.snapshot.jsonl").exists()


def test_bad_config_key_exit_2(tmp_path, capsys):
    cfgfile = tmp_path / "bad.cfg"
    cfgfile.write_text("no_such_key = 5\n")
    rc = main(["--config", str(cfgfile), "ingest"])
    assert rc == 2
    assert "no_such_key" in capsys.readouterr().err


def test_svg_emission(workspace):
    root, out, base = workspace
    assert main(base + ["--svg", "analyze", "interdisciplinarity"]) == 0
    svg = (out / "interdisciplinarity_bins.svg").read_text()
    assert svg.startswith("<svg")
    assert "polyline" in svg


def test_box_chart_emission(workspace):
    root, out, base = workspace
    assert main(base + ["--svg", "analyze", "group-share",
                        "--label", "doc-type"]) == 0
    svg = (out / "group_share_doc_type.svg").read_text()
    assert svg.startswith("<svg")
    assert "rect" in svg    # box bodies


def test_month_dummies_flag(workspace):
    root, out, base = workspace
    rc = main(base + ["analyze", "extreme-share", "--flag", "jif-top",
                      "--month-dummies"])
    assert rc == 0
    rows = read_csv(out / "extreme_share_jif_top_tests.csv")
    fields = {(r["test"], r["field"]) for r in rows}
    assert ("logistic_log_perplexity", "odds_ratio") in fields


def test_report_regenerates_charts(workspace, capsys):
    root, out, base = workspace
    assert main(base + ["report"]) == 0
    assert "chart(s)" in capsys.readouterr().out
    assert (out / "disparity_bins.svg").exists()


def test_stability_pipeline(workspace, tmp_path):
    root, out, base = workspace
    # synonym groups over the generator's common vocabulary
    words = [f"tok{i:04d}" for i in range(40)]
    groups = ["\t".join(words[i:i + 2]) for i in range(0, 40, 2)]
    syn = tmp_path / "synonyms.tsv"
    syn.write_text("\n".join(groups) + "\n")
    rc = main(base + ["--synonyms", str(syn), "analyze", "stability"])
    assert rc == 0
    rows = read_csv(out / "stability.csv")
    assert [int(r["k"]) for r in rows] == list(range(1, 11))
    assert all(float(r["mean_abs_delta"]) >= 0.0 for r in rows)
    tests = {r["field"]: r["value"] for r in read_csv(out / "stability_tests.csv")}
    assert "quad_coefficient" in tests
    assert math.isfinite(float(tests["quad_coefficient"]))
