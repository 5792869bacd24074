"""Background job execution for the service.

One worker pool drains the job table; jobs for the same video never run
concurrently.  A full job walks every pipeline stage through PipelineRunner,
so a worker killed mid-job resumes from the last persisted stage artifact
when the service restarts.  Generation jobs reuse the cached summary and
ranking artifacts and only call the comment engine.
"""

from __future__ import annotations

import json
import logging
import threading
import time
from pathlib import Path

from audiencesim.comments.engine import generate_batch
from audiencesim.comments.model import Comment
from audiencesim.config import AppConfig
from audiencesim.errors import ConflictError, NotFoundError
from audiencesim.personas import Persona
from audiencesim.pipeline import PipelineRunner, wall_clock
from audiencesim.service.store import Store
from audiencesim.summarize import summary_from_record
from audiencesim.video.frames import VideoAsset

logger = logging.getLogger(__name__)

# Share of overall job progress each stage accounts for.  Captioning moves
# in proportion to panels completed, so it carries the largest share.
JOB_STAGE_WEIGHTS = {
    "transcribing": 0.10,
    "captioning": 0.50,
    "summarizing": 0.15,
    "ranking_personas": 0.05,
    "generating_comments": 0.20,
}

_STAGE_BASE = {}
_running = 0.0
for _stage, _weight in JOB_STAGE_WEIGHTS.items():
    _STAGE_BASE[_stage] = _running
    _running += _weight


def overall_progress(stage: str, fraction: float) -> float:
    """Map (stage, within-stage fraction) onto the 0..1 job progress."""
    fraction = min(1.0, max(0.0, fraction))
    return _STAGE_BASE[stage] + JOB_STAGE_WEIGHTS[stage] * fraction


def artifact_dir_for(data_dir: Path, video_id: str) -> Path:
    return Path(data_dir) / "artifacts" / video_id


def run_generation(
    store: Store,
    config: AppConfig,
    video_id: str,
    count: int,
    *,
    backends: dict | None = None,
    clock=None,
    no_persona: bool = False,
    data_dir: Path | None = None,
) -> list[Comment]:
    """Generate one more comment batch for an already-processed video.

    Reuses the persisted summary and persona ranking; raises a conflict
    error when the video has not been summarized yet.  Used by both the
    generate-more job kind and the CLI `generate` verb.
    """
    video = store.get_video(video_id)
    directory = artifact_dir_for(data_dir or store.db_path.parent, video_id)
    runner = PipelineRunner(config, directory, backends=backends, clock=clock)
    if not runner.artifact_path("summarizing").is_file():
        raise ConflictError(
            f"video {video_id} has no summary yet; wait for its job to finish"
        )

    asset = VideoAsset(
        video_id=video_id,
        file_path=Path(video["file_path"]),
        title=video["title"],
        description=video["description"],
        author=video["author"],
        duration=video["duration"],
    )
    summary_payload = json.loads(
        runner.artifact_path("summarizing").read_text(encoding="utf-8")
    )
    summary = summary_from_record(summary_payload, video_id)
    ranked = runner.run_ranking(summary, no_persona)

    start = store.next_comment_ordinal(video_id)
    ordinal = iter(range(start, start + count))

    def allocate_id() -> str:
        return f"{video_id}.c{next(ordinal):05d}"

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
    _persist_batch(store, batch, ranked)
    return batch


def _persist_batch(
    store: Store, batch: list[Comment], ranked: list[Persona] | None
) -> None:
    if ranked:
        used = {c.persona_id for c in batch if c.persona_id}
        for persona in ranked:
            if persona.persona_id in used:
                store.upsert_persona(persona)
    store.add_comments(batch)


class JobWorker:
    """Polls the store for runnable jobs and executes them on a thread pool."""

    def __init__(
        self,
        store: Store,
        config: AppConfig,
        data_dir: str | Path,
        *,
        backends: dict | None = None,
        clock=None,
        parallelism: int = 1,
        poll_interval: float = 0.05,
    ):
        self.store = store
        self.config = config
        self.data_dir = Path(data_dir)
        self.backends = backends
        self.clock = clock
        self.poll_interval = poll_interval
        self.parallelism = max(1, parallelism)
        self._busy: set[str] = set()
        self._busy_lock = threading.Lock()
        self._stop = threading.Event()
        self._threads: list[threading.Thread] = []

    def start(self) -> None:
        self._stop.clear()
        for i in range(self.parallelism):
            thread = threading.Thread(
                target=self._loop, name=f"job-worker-{i}", daemon=True
            )
            thread.start()
            self._threads.append(thread)

    def stop(self) -> None:
        self._stop.set()
        for thread in self._threads:
            thread.join(timeout=10)
        self._threads.clear()

    def drain(self, timeout: float = 60.0) -> None:
        """Block until no runnable or in-flight job remains (test helper)."""
        deadline = time.monotonic() + timeout
        while time.monotonic() < deadline:
            with self._busy_lock:
                busy = bool(self._busy)
            if not busy and self.store.next_queued_job(set()) is None:
                return
            time.sleep(0.02)
        raise TimeoutError("jobs did not drain in time")

    def _loop(self) -> None:
        while not self._stop.is_set():
            job = self._claim()
            if job is None:
                self._stop.wait(self.poll_interval)
                continue
            try:
                self.process_job(job)
            finally:
                with self._busy_lock:
                    self._busy.discard(job["video_id"])

    def _claim(self) -> dict | None:
        with self._busy_lock:
            job = self.store.next_queued_job(self._busy)
            if job is not None:
                self._busy.add(job["video_id"])
            return job

    def process_job(self, job: dict) -> None:
        job_id = job["job_id"]
        try:
            if job["kind"] == "full":
                self._process_full(job)
            else:
                self._process_generate(job)
            self.store.update_job(job_id, stage="done", progress=1.0, at=wall_clock())
        except Exception as exc:
            logger.exception("job %s failed", job_id)
            self.store.update_job(
                job_id, stage="failed", error=str(exc), at=wall_clock()
            )

    def _process_full(self, job: dict) -> None:
        video = self.store.get_video(job["video_id"])
        video_id = job["video_id"]

        def progress(stage: str, fraction: float) -> None:
            self.store.update_job(
                job["job_id"],
                stage=stage,
                progress=overall_progress(stage, fraction),
                at=wall_clock(),
            )

        directory = artifact_dir_for(self.data_dir, video_id)
        runner = PipelineRunner(
            self.config,
            directory,
            backends=self.backends,
            clock=self.clock,
            progress=progress,
        )
        asset = VideoAsset(
            video_id=video_id,
            file_path=Path(video["file_path"]),
            title=video["title"],
            description=video["description"],
            author=video["author"],
            duration=video["duration"],
        )
        video_bytes = asset.file_path.read_bytes()
        transcript = runner.run_transcription(asset, video_bytes)
        captions = runner.run_captioning(asset, transcript)
        summary = runner.run_summary(asset, captions, transcript)
        ranked = runner.run_ranking(summary, job["no_persona"])
        batch = runner.run_comments(asset, summary, ranked, job["count"])
        if not self._batch_already_stored(batch):
            _persist_batch(self.store, batch, ranked)

    def _process_generate(self, job: dict) -> None:
        self.store.update_job(
            job["job_id"],
            stage="generating_comments",
            progress=overall_progress("generating_comments", 0.0),
            at=wall_clock(),
        )
        run_generation(
            self.store,
            self.config,
            job["video_id"],
            job["count"],
            backends=self.backends,
            clock=self.clock,
            no_persona=job["no_persona"],
            data_dir=self.data_dir,
        )

    def _batch_already_stored(self, batch: list[Comment]) -> bool:
        """True when a resumed job's comments landed in the store before the
        crash; inserting again would duplicate them."""
        if not batch:
            return True
        try:
            self.store.get_comment(batch[0].comment_id)
            return True
        except NotFoundError:
            return False
