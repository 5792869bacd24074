import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from audiencesim.cli import main


@pytest.fixture
def runner():
    return CliRunner()


# -- pipeline run ---------------------------------------------------------


def test_pipeline_run_smoke(runner, fixture_video, persona_file, tmp_path):
    config = tmp_path / "config.yaml"
    config.write_text(f"personas:\n  file: {persona_file}\n", encoding="utf-8")
    result = runner.invoke(
        main,
        [
            "--config",
            str(config),
            "--mock",
            "--seed",
            "7",
            "pipeline",
            "run",
            str(fixture_video),
            "--title",
            "CLI clip",
            "--count",
            "10",
            "--out",
            str(tmp_path / "runs"),
        ],
    )
    assert result.exit_code == 0, result.output
    payload = json.loads(result.stdout)
    assert payload["comment_count"] == 10
    assert Path(payload["manifest"]).is_file()
    comments = json.loads(
        (Path(payload["artifact_dir"]) / "comments.json").read_text()
    )["comments"]
    assert len(comments) == 10
    # progress lines go to stderr, machine output to stdout
    assert "generating_comments: 100%" in result.stderr


def test_pipeline_run_requires_persona_source(runner, fixture_video, tmp_path):
    result = runner.invoke(
        main,
        [
            "--mock",
            "pipeline",
            "run",
            str(fixture_video),
            "--title",
            "T",
            "--out",
            str(tmp_path / "runs"),
        ],
    )
    assert result.exit_code == 2
    assert "no persona file configured" in result.stderr


def test_pipeline_run_no_persona_flag(runner, fixture_video, tmp_path):
    result = runner.invoke(
        main,
        [
            "--mock",
            "--seed",
            "7",
            "pipeline",
            "run",
            str(fixture_video),
            "--title",
            "T",
            "--count",
            "3",
            "--no-persona",
            "--out",
            str(tmp_path / "runs"),
        ],
    )
    assert result.exit_code == 0, result.output
    payload = json.loads(result.stdout)
    comments = json.loads(
        (Path(payload["artifact_dir"]) / "comments.json").read_text()
    )["comments"]
    assert all(c["persona_id"] is None for c in comments)


def test_missing_video_is_input_error(runner, tmp_path):
    result = runner.invoke(
        main, ["--mock", "pipeline", "run", str(tmp_path / "nope.mp4"), "--title", "T"]
    )
    assert result.exit_code == 2


# -- persona verbs --------------------------------------------------------


def test_persona_import_and_index_and_query(runner, persona_file, tmp_path):
    imported = tmp_path / "personas.json"
    result = runner.invoke(
        main, ["persona", "import", str(persona_file), "--out", str(imported)]
    )
    assert result.exit_code == 0, result.output
    records = json.loads(imported.read_text())
    assert len(records) == 40
    assert all(r["persona_id"].startswith("p_") for r in records)

    index_path = tmp_path / "personas.idx"
    result = runner.invoke(
        main,
        [
            "--mock",
            "persona",
            "index",
            str(persona_file),
            "--out",
            str(index_path),
        ],
    )
    assert result.exit_code == 0, result.output
    assert index_path.is_file()

    result = runner.invoke(
        main,
        [
            "--mock",
            "persona",
            "query",
            "-k",
            "topic 3",
            "-k",
            "hobby 1",
            "-n",
            "5",
            "--index",
            str(index_path),
        ],
    )
    assert result.exit_code == 0, result.output
    ranked = json.loads(result.stdout)
    assert len(ranked) == 5
    assert ranked[0]["score"] >= ranked[-1]["score"]
    assert all(set(r) == {"persona_id", "score", "text"} for r in ranked)


def test_persona_index_requires_some_file(runner):
    result = runner.invoke(main, ["--mock", "persona", "index"])
    assert result.exit_code == 2


# -- generate -------------------------------------------------------------


def test_generate_appends_to_run(runner, session_run, tmp_path):
    import shutil

    artifact_dir = tmp_path / "copy"
    shutil.copytree(session_run["artifact_dir"], artifact_dir)
    config = tmp_path / "config.yaml"
    config.write_text(
        f"personas:\n  file: {session_run['config'].personas.file}\n",
        encoding="utf-8",
    )
    result = runner.invoke(
        main,
        [
            "--config",
            str(config),
            "--mock",
            "--seed",
            "7",
            "generate",
            "--artifacts",
            str(artifact_dir),
            "--count",
            "4",
        ],
    )
    assert result.exit_code == 0, result.output
    payload = json.loads(result.stdout)
    assert len(payload["comments"]) == 4
    base_count = session_run["manifest"]["comment_count"]
    expected = [
        f"{session_run['manifest']['video_id']}.c{n:05d}"
        for n in range(base_count + 1, base_count + 5)
    ]
    assert [c["comment_id"] for c in payload["comments"]] == expected


def test_generate_without_run_conflicts(runner, tmp_path):
    result = runner.invoke(
        main, ["--mock", "generate", "--artifacts", str(tmp_path), "--count", "2"]
    )
    assert result.exit_code == 2


# -- eval -----------------------------------------------------------------


@pytest.fixture
def corpus_files(tmp_path):
    a = tmp_path / "model_a.txt"
    a.write_text("loved the bread part\ngreat pacing throughout\n", encoding="utf-8")
    b = tmp_path / "model_b.txt"
    b.write_text("nice video\nnice video\nnice video again\n", encoding="utf-8")
    return a, b


def test_eval_json_report(runner, corpus_files, tmp_path):
    a, b = corpus_files
    summary = tmp_path / "summary.txt"
    summary.write_text("a video about baking bread", encoding="utf-8")
    result = runner.invoke(
        main,
        [
            "--mock",
            "eval",
            "--corpus",
            f"model_a={a}",
            "--corpus",
            f"model_b={b}",
            "--summary",
            str(summary),
        ],
    )
    assert result.exit_code == 0, result.output
    rows = json.loads(result.stdout)
    assert {row["corpus_label"] for row in rows} == {"model_a", "model_b"}
    for label in ("model_a", "model_b"):
        names = {r["metric_name"] for r in rows if r["corpus_label"] == label}
        assert "avg_char_length" in names
        assert "rouge_1" in names
        assert "self_bleu" in names


def test_eval_diversity_only_warns(runner, corpus_files):
    a, b = corpus_files
    result = runner.invoke(
        main, ["--mock", "eval", "--corpus", f"model_a={a}", "--corpus", f"model_b={b}"]
    )
    assert result.exit_code == 0, result.output
    assert "relevance metrics are skipped" in result.stderr
    rows = json.loads(result.stdout)
    assert all(r["metric_name"] != "rouge_1" for r in rows)
    assert any(r["metric_name"] == "self_bleu" for r in rows)


def test_eval_csv_output(runner, corpus_files, tmp_path):
    a, _ = corpus_files
    out = tmp_path / "report.csv"
    result = runner.invoke(
        main,
        ["--mock", "eval", "--corpus", f"model_a={a}", "--out", str(out)],
    )
    assert result.exit_code == 0, result.output
    header = out.read_text().splitlines()[0]
    assert header == "corpus_label,metric_name,value,normalized_value,sample_size,params"


def test_eval_rejects_malformed_corpus_spec(runner, corpus_files):
    a, _ = corpus_files
    result = runner.invoke(main, ["--mock", "eval", "--corpus", str(a)])
    assert result.exit_code == 2
    assert "LABEL=PATH" in result.stderr
