"""Command line driver: process videos, manage personas, generate comment
batches, run the metric battery, and launch the service.

Progress goes to stderr; machine-readable results go to stdout or files.
Exit codes: 0 success, 2 validation, 3 gateway, 4 budget, 5 internal.
"""

from __future__ import annotations

import functools
import json
import sys
from pathlib import Path

import click

from audiencesim.config import AppConfig, load_config
from audiencesim.errors import AppError, InputError
from audiencesim.gateway.factory import build_backend


def _fail_with_exit_code(f):
    """Convert toolkit errors into the documented process exit codes."""

    @functools.wraps(f)
    def wrapper(*args, **kwargs):
        try:
            return f(*args, **kwargs)
        except AppError as exc:
            click.echo(f"error: {exc}", err=True)
            raise SystemExit(exc.exit_code)

    return wrapper


@click.group()
@click.option(
    "--config",
    "config_path",
    type=click.Path(exists=True, dir_okay=False),
    default=None,
    help="YAML config file; defaults apply when omitted.",
)
@click.option("--seed", type=int, default=None, help="Override the configured seed.")
@click.option(
    "--mock/--no-mock",
    "mock",
    default=None,
    help="Force deterministic mock gateways on or off.",
)
@click.pass_context
@_fail_with_exit_code
def main(ctx, config_path, seed, mock):
    """Simulated audience feedback for videos."""
    ctx.obj = load_config(config_path, mock=mock, seed=seed)


@main.group()
def pipeline():
    """Full video-to-comments runs."""


def _echo_progress():
    last = {}

    def report(stage: str, fraction: float) -> None:
        percent = int(fraction * 100)
        if last.get(stage) == percent:
            return
        last[stage] = percent
        click.echo(f"{stage}: {percent}%", err=True)

    return report


@pipeline.command("run")
@click.argument("video", type=click.Path(exists=True, dir_okay=False))
@click.option("--title", required=True)
@click.option("--description", default="")
@click.option("--author", default="")
@click.option(
    "--thumbnail", type=click.Path(exists=True, dir_okay=False), default=None
)
@click.option(
    "--out",
    "out_dir",
    type=click.Path(file_okay=False),
    default="./runs",
    show_default=True,
    help="Artifacts land in OUT/<video_id>/.",
)
@click.option("--count", type=int, default=None, help="Initial batch size.")
@click.option("--no-persona", is_flag=True, help="Skip persona retrieval entirely.")
@click.pass_obj
@_fail_with_exit_code
def pipeline_run(
    config: AppConfig, video, title, description, author, thumbnail, out_dir, count, no_persona
):
    """Run every stage on VIDEO and write artifacts plus a run manifest."""
    from audiencesim.pipeline import MANIFEST_FILE, run_pipeline

    if not no_persona and not config.personas.file:
        raise InputError(
            "no persona file configured; set personas.file or pass --no-persona"
        )
    thumb_bytes = Path(thumbnail).read_bytes() if thumbnail else None
    manifest = run_pipeline(
        video,
        config,
        out_dir,
        title=title,
        description=description,
        author=author,
        thumbnail=thumb_bytes,
        count=count,
        no_persona=no_persona,
        progress=_echo_progress(),
    )
    artifact_dir = Path(out_dir) / manifest["video_id"]
    click.echo(
        json.dumps(
            {
                "video_id": manifest["video_id"],
                "artifact_dir": str(artifact_dir),
                "manifest": str(artifact_dir / MANIFEST_FILE),
                "comment_count": manifest["comment_count"],
            },
            indent=2,
        )
    )


@main.group()
def persona():
    """Persona file and retrieval index management."""


@persona.command("import")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option(
    "--out",
    type=click.Path(dir_okay=False),
    default=None,
    help="Write the deduplicated personas as JSON.",
)
@_fail_with_exit_code
def persona_import(file, out):
    """Validate FILE and report how many distinct personas it defines."""
    from audiencesim.personas import load_personas

    personas = load_personas(file)
    if out:
        records = [
            {"persona_id": p.persona_id, "text": p.text, "source": p.source}
            for p in personas
        ]
        Path(out).write_text(
            json.dumps(records, indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
        )
    click.echo(f"imported {len(personas)} personas from {file}", err=True)


@persona.command("index")
@click.argument("file", type=click.Path(exists=True, dir_okay=False), required=False)
@click.option(
    "--out", type=click.Path(dir_okay=False), default=None, help="Index file path."
)
@click.pass_obj
@_fail_with_exit_code
def persona_index(config: AppConfig, file, out):
    """Embed every persona in FILE and save the retrieval index."""
    from audiencesim.personas import build_index, load_personas, save_index

    file = file or config.personas.file
    if not file:
        raise InputError("no persona file given; pass FILE or set personas.file")
    out = out or config.personas.index_file
    if not out:
        raise InputError("no index path given; pass --out or set personas.index_file")
    backend = build_backend("embedding", config.gateway("embedding"))
    index = build_index(load_personas(file), backend)
    save_index(index, out)
    click.echo(
        f"indexed {len(index.entries)} personas with {index.model_name} -> {out}",
        err=True,
    )


@persona.command("query")
@click.option(
    "--keywords",
    "-k",
    multiple=True,
    required=True,
    help="Keyword, repeatable; all are joined into one query.",
)
@click.option("--top", "-n", type=int, default=None, help="How many to return.")
@click.option(
    "--index", "index_path", type=click.Path(exists=True, dir_okay=False), default=None
)
@click.pass_obj
@_fail_with_exit_code
def persona_query(config: AppConfig, keywords, top, index_path):
    """Rank indexed personas against the given keywords."""
    from audiencesim.personas import load_index, rank_personas

    index_path = index_path or config.personas.index_file
    if not index_path:
        raise InputError("no index path given; pass --index or set personas.index_file")
    backend = build_backend("embedding", config.gateway("embedding"))
    index = load_index(
        index_path, expected_model_name=config.gateway("embedding").model_name
    )
    ranked = rank_personas(
        index,
        list(keywords),
        top if top is not None else config.personas.top_k,
        backend,
        min_score=config.personas.min_score,
    )
    click.echo(
        json.dumps(
            [
                {
                    "persona_id": r.persona_id,
                    "score": r.score,
                    "text": index.text_of(r.persona_id),
                }
                for r in ranked
            ],
            indent=2,
            ensure_ascii=False,
        )
    )


@main.command()
@click.option(
    "--artifacts",
    "artifact_dir",
    required=True,
    type=click.Path(exists=True, file_okay=False),
    help="Artifact directory of a finished pipeline run.",
)
@click.option("--count", type=int, default=None, help="Batch size.")
@click.option("--no-persona", is_flag=True)
@click.option(
    "--out",
    type=click.Path(dir_okay=False),
    default=None,
    help="Also write the new batch to this JSON file.",
)
@click.pass_obj
@_fail_with_exit_code
def generate(config: AppConfig, artifact_dir, count, no_persona, out):
    """Generate another comment batch from cached summary and ranking."""
    from audiencesim.comments.model import comment_to_record
    from audiencesim.pipeline import generate_more

    batch = generate_more(
        config,
        artifact_dir,
        count if count is not None else config.comments.default_count,
        no_persona=no_persona,
    )
    records = [comment_to_record(c) for c in batch]
    payload = json.dumps({"comments": records}, indent=2, ensure_ascii=False)
    if out:
        Path(out).write_text(payload + "\n", encoding="utf-8")
    click.echo(payload)


def _read_summary_text(path: str) -> str:
    """Accept either a summary artifact or a plain text file."""
    raw = Path(path).read_text(encoding="utf-8")
    try:
        record = json.loads(raw)
    except json.JSONDecodeError:
        return raw.strip()
    if isinstance(record, dict) and "summary_text" in record:
        return record["summary_text"]
    return raw.strip()


@main.command("eval")
@click.option(
    "--corpus",
    "corpus_specs",
    multiple=True,
    required=True,
    metavar="LABEL=PATH",
    help="Labeled corpus file, repeatable.",
)
@click.option(
    "--summary",
    "summary_path",
    type=click.Path(exists=True, dir_okay=False),
    default=None,
    help="Summary artifact or plain text; omit for diversity-only metrics.",
)
@click.option(
    "--with-judge",
    is_flag=True,
    help="Score relevance with the configured chat model as judge.",
)
@click.option(
    "--out",
    type=click.Path(dir_okay=False),
    default=None,
    help="Report file; .csv extension switches the format, JSON otherwise.",
)
@click.pass_obj
@_fail_with_exit_code
def eval_command(config: AppConfig, corpus_specs, summary_path, with_judge, out):
    """Run the metric battery over labeled comment corpora."""
    from audiencesim.metrics.evaluate import (
        evaluate,
        load_corpus_file,
        report_to_csv,
        report_to_json,
    )

    corpora = []
    for spec in corpus_specs:
        label, sep, path = spec.partition("=")
        if not sep or not label or not path:
            raise InputError(f"corpus must be LABEL=PATH, got {spec!r}")
        corpora.append(load_corpus_file(path, label))

    summary_text = None
    if summary_path:
        summary_text = _read_summary_text(summary_path)
    else:
        click.echo(
            "warning: no summary given; relevance metrics are skipped", err=True
        )

    judges = ()
    if with_judge:
        judges = (build_backend("chat", config.gateway("chat")),)
    embed = build_backend("embedding", config.gateway("embedding"))
    reports = evaluate(
        corpora,
        summary_text,
        embed,
        judges,
        distinct_orders=config.metrics.distinct_orders,
        bleu_max_n=config.metrics.bleu_max_n,
        seed=config.metrics.seed,
        max_pairs=config.metrics.max_pairs,
    )
    if out and out.endswith(".csv"):
        payload = report_to_csv(reports)
    else:
        payload = report_to_json(reports)
    if out:
        Path(out).write_text(payload + "\n", encoding="utf-8")
        click.echo(f"wrote {out}", err=True)
    else:
        click.echo(payload)


@main.command()
@click.option("--host", default=None, help="Bind host (config default otherwise).")
@click.option("--port", type=int, default=None, help="Bind port.")
@click.pass_obj
@_fail_with_exit_code
def serve(config: AppConfig, host, port):
    """Launch the HTTP service with its background worker."""
    import uvicorn

    from audiencesim.service.api import create_app

    app = create_app(config)
    uvicorn.run(
        app,
        host=host or config.service.host,
        port=port or config.service.port,
        log_level="info",
    )


if __name__ == "__main__":
    main()
