"""The offline pipeline: video file in, comment batch and run manifest out.

Every stage persists its result as a JSON artifact in the video's artifact
directory and is skipped on rerun when that artifact already exists, which
is what makes a killed run resumable from the last completed stage.  In
mock mode all timestamps come from a deterministic stepping clock, so two
runs with the same seed produce byte-identical artifacts and manifest.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import os
from datetime import datetime, timedelta, timezone
from pathlib import Path
from typing import Callable

from audiencesim import __version__
from audiencesim.comments.engine import generate_batch
from audiencesim.comments.identity import DEFAULT_NAMES, load_name_file
from audiencesim.comments.model import (
    Comment,
    IdentityPool,
    comment_from_record,
    comment_to_record,
)
from audiencesim.config import AppConfig
from audiencesim.errors import ConflictError, InputError, PipelineError
from audiencesim.gateway.factory import build_backend
from audiencesim.gateway.types import MediaClip, TranscriptSegment, normalize_segments
from audiencesim.personas import (
    Persona,
    build_index,
    load_index,
    load_personas,
    rank_personas,
    save_index,
)
from audiencesim.summarize import (
    VideoSummary,
    build_summary_prompt,
    summarize,
    summary_from_record,
    summary_to_record,
)
from audiencesim.video.captioning import FrameCaption, caption_video
from audiencesim.video.frames import VideoAsset, probe_duration

PIPELINE_STAGES = (
    "transcribing",
    "captioning",
    "summarizing",
    "ranking_personas",
    "generating_comments",
)

STAGE_ARTIFACTS = {
    "transcribing": "transcript.json",
    "captioning": "captions.json",
    "summarizing": "summary.json",
    "ranking_personas": "ranking.json",
    "generating_comments": "comments.json",
}

MANIFEST_FILE = "manifest.json"


class SteppingClock:
    """Deterministic timestamps: a fixed base plus one second per call."""

    BASE = datetime(2020, 1, 1, tzinfo=timezone.utc)

    def __init__(self):
        self._ticks = 0

    def __call__(self) -> str:
        stamp = self.BASE + timedelta(seconds=self._ticks)
        self._ticks += 1
        return stamp.strftime("%Y-%m-%dT%H:%M:%SZ")


def wall_clock() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def derive_video_id(video_bytes: bytes) -> str:
    """Content-derived id, stable across reruns of the same file."""
    return "vid_" + hashlib.sha256(video_bytes).hexdigest()[:12]


def write_json_atomic(path: Path, payload) -> None:
    rendered = json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(rendered, encoding="utf-8")
    os.replace(tmp, path)


def _sha256_file(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


class PipelineRunner:
    """Runs the stages for one video against one artifact directory.

    The CLI drives it directly; the service wraps it in a background job.
    ``progress(stage, fraction)`` reports completion within the current
    stage; a stage restored from its artifact reports 1.0 immediately.
    """

    def __init__(
        self,
        config: AppConfig,
        artifact_dir: Path,
        *,
        backends: dict | None = None,
        clock: Callable[[], str] | None = None,
        progress: Callable[[str, float], None] | None = None,
    ):
        self.config = config
        self.artifact_dir = Path(artifact_dir)
        self.artifact_dir.mkdir(parents=True, exist_ok=True)
        self._backends = backends or {}
        self.clock = clock or (SteppingClock() if config.mock else wall_clock)
        self._progress = progress

    def backend(self, modality: str):
        if modality not in self._backends:
            self._backends[modality] = build_backend(
                modality, self.config.gateway(modality)
            )
        return self._backends[modality]

    def artifact_path(self, stage: str) -> Path:
        return self.artifact_dir / STAGE_ARTIFACTS[stage]

    def _report(self, stage: str, fraction: float) -> None:
        if self._progress is not None:
            self._progress(stage, fraction)

    def _run_stage(self, stage: str, compute: Callable[[], dict]) -> dict:
        """Load the stage artifact if present, else compute and persist it."""
        path = self.artifact_path(stage)
        if path.is_file():
            self._report(stage, 1.0)
            return json.loads(path.read_text(encoding="utf-8"))
        self._report(stage, 0.0)
        try:
            payload = compute()
        except PipelineError:
            raise
        except Exception as exc:
            raise PipelineError(stage, str(exc), cause=exc) from exc
        write_json_atomic(path, payload)
        self._report(stage, 1.0)
        return payload

    # -- stages ----------------------------------------------------------

    def run_transcription(self, asset: VideoAsset, video_bytes: bytes) -> list[TranscriptSegment]:
        def compute() -> dict:
            clip = MediaClip(data=video_bytes, duration=asset.duration)
            segments = normalize_segments(self.backend("transcription").transcribe(clip))
            return {
                "model_name": self.config.gateway("transcription").model_name,
                "segments": [
                    {"start": s.start, "end": s.end, "text": s.text} for s in segments
                ],
            }

        payload = self._run_stage("transcribing", compute)
        return [
            TranscriptSegment(start=s["start"], end=s["end"], text=s["text"])
            for s in payload["segments"]
        ]

    def run_captioning(
        self, asset: VideoAsset, transcript: list[TranscriptSegment]
    ) -> list[FrameCaption]:
        def compute() -> dict:
            captions = caption_video(
                asset,
                transcript,
                self.backend("caption"),
                sample_rate=self.config.video.sample_rate,
                window=self.config.video.panel_window,
                parallelism=self.config.video.caption_parallelism,
                max_duration=self.config.video.max_duration,
                on_panel_done=lambda done, total: self._report(
                    "captioning", done / total
                ),
            )
            return {
                "model_name": self.config.gateway("caption").model_name,
                "panel_count": len(captions),
                "captions": [
                    {"timestamp": c.timestamp, "text": c.text} for c in captions
                ],
            }

        payload = self._run_stage("captioning", compute)
        return [
            FrameCaption(timestamp=c["timestamp"], text=c["text"])
            for c in payload["captions"]
        ]

    def run_summary(
        self,
        asset: VideoAsset,
        captions: list[FrameCaption],
        transcript: list[TranscriptSegment],
    ) -> VideoSummary:
        def compute() -> dict:
            chat_config = self.config.gateway("chat")
            prompt = build_summary_prompt(captions, transcript, asset, chat_config)
            summary = summarize(prompt, self.backend("chat"), asset.video_id)
            return summary_to_record(
                summary, model_name=chat_config.model_name, created_at=self.clock()
            )

        payload = self._run_stage("summarizing", compute)
        return summary_from_record(payload, asset.video_id)

    def run_ranking(
        self, summary: VideoSummary, no_persona: bool
    ) -> list[Persona] | None:
        def compute() -> dict:
            if no_persona:
                return {"no_persona": True, "ranked": []}
            persona_file = self.config.personas.file
            if not persona_file:
                raise InputError(
                    "no persona file configured; set personas.file or pass --no-persona"
                )
            index = self._load_or_build_index(persona_file)
            ranked = rank_personas(
                index,
                list(summary.keywords),
                self.config.personas.top_k,
                self.backend("embedding"),
                min_score=self.config.personas.min_score,
            )
            texts = {pid: text for pid, text, _ in index.entries}
            return {
                "no_persona": False,
                "model_name": index.model_name,
                "query_keywords": list(summary.keywords),
                "ranked": [
                    {"persona_id": r.persona_id, "score": r.score, "text": texts[r.persona_id]}
                    for r in ranked
                ],
            }

        payload = self._run_stage("ranking_personas", compute)
        if payload.get("no_persona"):
            return None
        return [
            Persona(persona_id=r["persona_id"], text=r["text"])
            for r in payload["ranked"]
        ]

    def run_comments(
        self,
        asset: VideoAsset,
        summary: VideoSummary,
        ranked: list[Persona] | None,
        count: int,
        start_ordinal: int = 1,
    ) -> list[Comment]:
        def compute() -> dict:
            pool = self._identity_pool()
            ordinal = iter(range(start_ordinal, start_ordinal + count))

            def allocate_id() -> str:
                return f"{asset.video_id}.c{next(ordinal):05d}"

            batch = generate_batch(
                summary,
                asset,
                ranked,
                self.backend("chat"),
                count,
                pool=pool,
                rng_seed=self.config.seed,
                allocate_id=allocate_id,
                clock=self.clock,
                parallelism=self.config.comments.parallelism,
            )
            return {"comments": [comment_to_record(c) for c in batch]}

        payload = self._run_stage("generating_comments", compute)
        return [comment_from_record(r) for r in payload["comments"]]

    # -- helpers ---------------------------------------------------------

    def _identity_pool(self) -> IdentityPool:
        names = DEFAULT_NAMES
        if self.config.comments.name_file:
            names = load_name_file(self.config.comments.name_file)
        return IdentityPool(names=names, rng_seed=self.config.seed)

    def _load_or_build_index(self, persona_file: str):
        embed = self.backend("embedding")
        index_file = self.config.personas.index_file
        if index_file and Path(index_file).is_file():
            return load_index(
                index_file,
                expected_model_name=self.config.gateway("embedding").model_name,
            )
        personas = load_personas(persona_file)
        index = build_index(personas, embed)
        if index_file:
            save_index(index, index_file)
        return index


def run_pipeline(
    video_path: str | Path,
    config: AppConfig,
    out_dir: str | Path,
    *,
    title: str,
    description: str = "",
    author: str = "",
    thumbnail: bytes | None = None,
    count: int | None = None,
    no_persona: bool = False,
    backends: dict | None = None,
    clock: Callable[[], str] | None = None,
    progress: Callable[[str, float], None] | None = None,
) -> dict:
    """Run every stage for one video file and write the run manifest.

    Returns the manifest.  On stage failure the manifest is still written,
    recording the failed stage, and the error is re-raised.
    """
    video_path = Path(video_path)
    if not video_path.is_file():
        raise InputError(f"video file not found: {video_path}")
    video_bytes = video_path.read_bytes()
    if not video_bytes:
        raise InputError(f"video file is empty: {video_path}")
    video_id = derive_video_id(video_bytes)
    artifact_dir = Path(out_dir) / video_id

    runner = PipelineRunner(
        config, artifact_dir, backends=backends, clock=clock, progress=progress
    )
    asset = VideoAsset(
        video_id=video_id,
        file_path=video_path,
        title=title,
        description=description,
        author=author,
        duration=probe_duration(video_path),
        thumbnail=thumbnail,
    )
    save_asset(asset, artifact_dir)

    batch_size = count if count is not None else config.comments.default_count
    failed_stage = None
    error_text = None
    try:
        transcript = runner.run_transcription(asset, video_bytes)
        captions = runner.run_captioning(asset, transcript)
        summary = runner.run_summary(asset, captions, transcript)
        ranked = runner.run_ranking(summary, no_persona)
        runner.run_comments(asset, summary, ranked, batch_size)
    except PipelineError as exc:
        failed_stage = exc.stage
        error_text = str(exc)
        raise
    except Exception as exc:
        failed_stage = "unknown"
        error_text = str(exc)
        raise
    finally:
        manifest = build_manifest(
            config=config,
            video_id=video_id,
            video_path=video_path,
            video_sha256=hashlib.sha256(video_bytes).hexdigest(),
            artifact_dir=artifact_dir,
            count=batch_size,
            no_persona=no_persona,
            failed_stage=failed_stage,
            error=error_text,
        )
        write_json_atomic(artifact_dir / MANIFEST_FILE, manifest)
    return manifest


ASSET_FILE = "asset.json"
THUMBNAIL_FILE = "thumbnail.bin"
EXTRA_COMMENTS_FILE = "extra_comments.json"


def _next_artifact_ordinal(artifact_dir: Path, video_id: str) -> int:
    highest = 0
    prefix = f"{video_id}.c"
    for name in (STAGE_ARTIFACTS["generating_comments"], EXTRA_COMMENTS_FILE):
        path = Path(artifact_dir) / name
        if not path.is_file():
            continue
        payload = json.loads(path.read_text(encoding="utf-8"))
        for record in payload["comments"]:
            cid = record["comment_id"]
            if cid.startswith(prefix):
                highest = max(highest, int(cid[len(prefix):]))
    return highest + 1


def generate_more(
    config: AppConfig,
    artifact_dir: str | Path,
    count: int,
    *,
    no_persona: bool = False,
    backends: dict | None = None,
    clock: Callable[[], str] | None = None,
) -> list[Comment]:
    """Another comment batch against a finished run's artifacts.

    Reuses the cached summary and persona ranking; new comments continue
    the ordinal sequence and are appended to an extra-comments artifact so
    repeated calls never reuse ids.
    """
    artifact_dir = Path(artifact_dir)
    runner = PipelineRunner(config, artifact_dir, backends=backends, clock=clock)
    summary_path = runner.artifact_path("summarizing")
    if not summary_path.is_file():
        raise ConflictError(
            f"no summary artifact in {artifact_dir}; run the pipeline first"
        )
    asset = load_asset(artifact_dir)
    summary = summary_from_record(
        json.loads(summary_path.read_text(encoding="utf-8")), asset.video_id
    )
    ranked = runner.run_ranking(summary, no_persona)

    start = _next_artifact_ordinal(artifact_dir, asset.video_id)
    ordinal = iter(range(start, start + count))

    def allocate_id() -> str:
        return f"{asset.video_id}.c{next(ordinal):05d}"

    batch = generate_batch(
        summary,
        asset,
        ranked,
        runner.backend("chat"),
        count,
        pool=runner._identity_pool(),
        rng_seed=config.seed + start,
        allocate_id=allocate_id,
        clock=runner.clock,
        parallelism=config.comments.parallelism,
    )

    extra_path = artifact_dir / EXTRA_COMMENTS_FILE
    existing = []
    if extra_path.is_file():
        existing = json.loads(extra_path.read_text(encoding="utf-8"))["comments"]
    existing.extend(comment_to_record(c) for c in batch)
    write_json_atomic(extra_path, {"comments": existing})
    return batch


def save_asset(asset: VideoAsset, artifact_dir: Path) -> None:
    """Snapshot the video metadata next to the stage artifacts so later
    batch generation can rebuild prompts without the original CLI flags."""
    artifact_dir.mkdir(parents=True, exist_ok=True)
    if asset.thumbnail is not None:
        (artifact_dir / THUMBNAIL_FILE).write_bytes(asset.thumbnail)
    write_json_atomic(
        artifact_dir / ASSET_FILE,
        {
            "video_id": asset.video_id,
            "file_path": str(asset.file_path),
            "title": asset.title,
            "description": asset.description,
            "author": asset.author,
            "duration": asset.duration,
            "has_thumbnail": asset.thumbnail is not None,
        },
    )


def load_asset(artifact_dir: Path) -> VideoAsset:
    path = Path(artifact_dir) / ASSET_FILE
    if not path.is_file():
        raise InputError(
            f"no asset snapshot in {artifact_dir}; run the pipeline there first"
        )
    record = json.loads(path.read_text(encoding="utf-8"))
    thumb_path = Path(artifact_dir) / THUMBNAIL_FILE
    thumbnail = thumb_path.read_bytes() if record["has_thumbnail"] else None
    return VideoAsset(
        video_id=record["video_id"],
        file_path=Path(record["file_path"]),
        title=record["title"],
        description=record["description"],
        author=record["author"],
        duration=record["duration"],
        thumbnail=thumbnail,
    )


def build_manifest(
    *,
    config: AppConfig,
    video_id: str,
    video_path: Path,
    video_sha256: str,
    artifact_dir: Path,
    count: int,
    no_persona: bool,
    failed_stage: str | None = None,
    error: str | None = None,
) -> dict:
    """Everything needed to reproduce the run: config snapshot, input
    hashes, seed, and the hash of every stage artifact.  Deliberately free
    of wall-clock timestamps so mock-mode reruns are byte-identical."""
    artifacts = {}
    for stage, filename in STAGE_ARTIFACTS.items():
        path = artifact_dir / filename
        if path.is_file():
            artifacts[stage] = {"path": filename, "sha256": _sha256_file(path)}

    inputs: dict = {"video_file": video_path.name, "video_sha256": video_sha256}
    persona_file = config.personas.file
    if persona_file and Path(persona_file).is_file() and not no_persona:
        inputs["persona_file"] = Path(persona_file).name
        inputs["persona_sha256"] = _sha256_file(Path(persona_file))

    manifest = {
        "tool_version": __version__,
        "video_id": video_id,
        "seed": config.seed,
        "mock": config.mock,
        "no_persona": no_persona,
        "comment_count": count,
        "inputs": inputs,
        "config": dataclasses.asdict(config),
        "artifacts": artifacts,
    }
    if failed_stage is not None:
        manifest["failed_stage"] = failed_stage
        manifest["error"] = error
    return manifest
