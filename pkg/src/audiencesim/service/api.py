"""HTTP API over the store, the job queue, and the comment engine.

Routes are documented in docs/api.md.  The UI and the CLI are both clients
of this API; neither talks to a model gateway directly.
"""

from __future__ import annotations

import hmac
import json
import os
import shutil
import threading
from contextlib import asynccontextmanager
from pathlib import Path

from fastapi import Depends, FastAPI, File, Form, Header, HTTPException, UploadFile
from fastapi.responses import FileResponse, JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from audiencesim import __version__
from audiencesim.comments.engine import generate_custom, generate_reply
from audiencesim.comments.model import Comment, comment_to_record
from audiencesim.config import AppConfig
from audiencesim.errors import (
    AppError,
    BudgetError,
    ConflictError,
    GatewayError,
    InputError,
    NotFoundError,
)
from audiencesim.gateway.factory import build_backend
from audiencesim.pipeline import (
    PipelineRunner,
    SteppingClock,
    derive_video_id,
    wall_clock,
)
from audiencesim.service.jobs import JobWorker, artifact_dir_for
from audiencesim.service.store import Store
from audiencesim.summarize import VideoSummary, summary_from_record
from audiencesim.video.frames import VideoAsset, probe_duration

_ALLOWED_SUFFIXES = {".mp4", ".mov", ".avi", ".mkv", ".webm", ".m4v"}


class ReplyBody(BaseModel):
    body: str


class PersonaBody(BaseModel):
    persona_text: str


class GenerateBody(BaseModel):
    count: int


def _http_status(exc: AppError) -> int:
    if isinstance(exc, NotFoundError):
        return 404
    if isinstance(exc, ConflictError):
        return 409
    if isinstance(exc, (InputError, BudgetError)):
        return 422
    if isinstance(exc, GatewayError):
        return 502
    # PipelineError carries the exit code of its cause
    return {2: 422, 3: 502, 4: 422}.get(exc.exit_code, 500)


def create_app(
    config: AppConfig,
    *,
    store: Store | None = None,
    backends: dict | None = None,
    start_worker: bool = True,
    worker_poll_interval: float = 0.05,
) -> FastAPI:
    data_dir = Path(config.service.data_dir)
    data_dir.mkdir(parents=True, exist_ok=True)
    (data_dir / "videos").mkdir(exist_ok=True)
    (data_dir / "artifacts").mkdir(exist_ok=True)

    store = store or Store(data_dir / "service.db")
    clock = SteppingClock() if config.mock else wall_clock
    worker = JobWorker(
        store,
        config,
        data_dir,
        backends=backends,
        parallelism=config.service.worker_parallelism,
        poll_interval=worker_poll_interval,
    )
    backend_cache: dict = dict(backends) if backends else {}
    append_lock = threading.Lock()

    def chat_backend():
        if "chat" not in backend_cache:
            backend_cache["chat"] = build_backend("chat", config.gateway("chat"))
        return backend_cache["chat"]

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        if start_worker:
            worker.start()
        try:
            yield
        finally:
            worker.stop()
            store.close()

    app = FastAPI(title="audiencesim", version=__version__, lifespan=lifespan)
    app.state.store = store
    app.state.worker = worker
    app.state.config = config

    def require_token(x_auth_token: str | None = Header(default=None)) -> None:
        ref = config.service.auth_token_ref
        expected = os.environ.get(ref, "") if ref else ""
        if not expected:
            return
        if x_auth_token is None or not hmac.compare_digest(expected, x_auth_token):
            raise HTTPException(status_code=401, detail="missing or invalid token")

    guarded = [Depends(require_token)]

    @app.exception_handler(AppError)
    async def handle_app_error(request, exc: AppError):
        return JSONResponse(
            status_code=_http_status(exc),
            content={"error": type(exc).__name__, "detail": str(exc)},
        )

    def video_payload(record: dict) -> dict:
        payload = {k: v for k, v in record.items() if not k.endswith("_path")}
        payload["has_thumbnail"] = record["thumbnail_path"] is not None
        return payload

    def load_summary(video_id: str) -> tuple[VideoSummary, PipelineRunner]:
        runner = PipelineRunner(
            config,
            artifact_dir_for(data_dir, video_id),
            backends=backend_cache,
            clock=clock,
        )
        path = runner.artifact_path("summarizing")
        if not path.is_file():
            raise ConflictError(
                f"video {video_id} is not summarized yet; wait for its job"
            )
        record = json.loads(path.read_text(encoding="utf-8"))
        return summary_from_record(record, video_id), runner

    def asset_for(record: dict) -> VideoAsset:
        return VideoAsset(
            video_id=record["video_id"],
            file_path=Path(record["file_path"]),
            title=record["title"],
            description=record["description"],
            author=record["author"],
            duration=record["duration"],
        )

    # -- videos ----------------------------------------------------------

    @app.post("/api/videos", status_code=201, dependencies=guarded)
    async def upload_video(
        file: UploadFile = File(...),
        title: str = Form(...),
        description: str = Form(""),
        author: str = Form(""),
        thumbnail: UploadFile | None = File(default=None),
    ):
        content = await file.read()
        if not content:
            raise InputError("uploaded video file is empty")
        if not title.strip():
            raise InputError("video title must be nonempty")
        suffix = Path(file.filename or "").suffix.lower()
        if suffix not in _ALLOWED_SUFFIXES:
            suffix = ".mp4"
        video_id = store.allocate_video_id(derive_video_id(content))
        video_dir = data_dir / "videos" / video_id
        video_dir.mkdir(parents=True, exist_ok=True)
        video_path = video_dir / f"video{suffix}"
        video_path.write_bytes(content)

        thumbnail_path = None
        if thumbnail is not None:
            thumb_bytes = await thumbnail.read()
            if thumb_bytes:
                ext = Path(thumbnail.filename or "").suffix.lower() or ".png"
                thumbnail_path = video_dir / f"thumbnail{ext}"
                thumbnail_path.write_bytes(thumb_bytes)

        try:
            duration = probe_duration(video_path)
        except AppError:
            shutil.rmtree(video_dir, ignore_errors=True)
            raise

        now = clock()
        store.create_video(
            video_id=video_id,
            title=title,
            description=description,
            author=author,
            duration=duration,
            file_path=str(video_path),
            thumbnail_path=str(thumbnail_path) if thumbnail_path else None,
            upload_time=now,
        )
        job = store.create_job(
            video_id,
            "full",
            config.comments.default_count,
            now,
            no_persona=not config.personas.file,
        )
        return {"video_id": video_id, "job_id": job["job_id"]}

    @app.get("/api/videos")
    def list_videos():
        videos = []
        for record in store.list_videos():
            payload = video_payload(record)
            if record["latest_job_id"]:
                job = store.get_job(record["latest_job_id"])
                payload["latest_job"] = {
                    "job_id": job["job_id"],
                    "stage": job["stage"],
                    "progress": job["progress"],
                }
            else:
                payload["latest_job"] = None
            videos.append(payload)
        return {"videos": videos}

    @app.get("/api/videos/{video_id}")
    def get_video(video_id: str):
        return video_payload(store.get_video(video_id))

    @app.get("/api/videos/{video_id}/file")
    def get_video_file(video_id: str):
        record = store.get_video(video_id)
        return FileResponse(record["file_path"])

    @app.get("/api/videos/{video_id}/thumbnail")
    def get_thumbnail(video_id: str):
        record = store.get_video(video_id)
        if not record["thumbnail_path"]:
            raise NotFoundError(f"video {video_id} has no thumbnail")
        return FileResponse(record["thumbnail_path"])

    # -- jobs ------------------------------------------------------------

    @app.get("/api/jobs/{job_id}")
    def get_job(job_id: str):
        return store.get_job(job_id)

    # -- comments --------------------------------------------------------

    @app.get("/api/videos/{video_id}/comments")
    def list_comments(video_id: str):
        store.get_video(video_id)
        nodes: dict[str, dict] = {}
        roots: list[dict] = []
        for comment in store.comments_for(video_id):
            node = comment_to_record(comment)
            node["persona_text"] = (
                store.persona_text(comment.persona_id) if comment.persona_id else None
            )
            node["children"] = []
            nodes[comment.comment_id] = node
            if comment.parent_id:
                nodes[comment.parent_id]["children"].append(node)
            else:
                roots.append(node)
        active = store.active_job_for(video_id)
        return {
            "comments": roots,
            "active_job": active["job_id"] if active else None,
        }

    @app.post("/api/comments/{comment_id}/reply", status_code=201, dependencies=guarded)
    def post_reply(comment_id: str, payload: ReplyBody):
        if not payload.body.strip():
            raise InputError("reply body must be nonempty")
        replied = store.get_comment(comment_id)
        record = store.get_video(replied.video_id)
        summary, runner = load_summary(replied.video_id)
        persona = (
            store.get_persona(replied.persona_id) if replied.persona_id else None
        )
        with append_lock:
            start = store.next_comment_ordinal(replied.video_id)
            user_node = Comment(
                comment_id=f"{replied.video_id}.c{start:05d}",
                video_id=replied.video_id,
                kind="reply",
                body=payload.body.strip(),
                author_name="creator",
                avatar_seed="creator",
                persona_id=None,
                parent_id=comment_id,
                created_at=clock(),
            )
            generated = generate_reply(
                replied,
                user_node.body,
                summary,
                asset_for(record),
                persona,
                chat_backend(),
                comment_id=f"{replied.video_id}.c{start + 1:05d}",
                parent_id=user_node.comment_id,
                pool=runner._identity_pool(),
                created_at=clock(),
            )
            store.add_comments([user_node, generated])
        return {
            "user_comment": comment_to_record(user_node),
            "generated_comment": comment_to_record(generated),
        }

    @app.post(
        "/api/videos/{video_id}/persona-comments",
        status_code=201,
        dependencies=guarded,
    )
    def post_custom_persona(video_id: str, payload: PersonaBody):
        record = store.get_video(video_id)
        summary, runner = load_summary(video_id)
        with append_lock:
            ordinal = store.next_comment_ordinal(video_id)
            persona, comment = generate_custom(
                payload.persona_text,
                summary,
                asset_for(record),
                chat_backend(),
                comment_id=f"{video_id}.c{ordinal:05d}",
                pool=runner._identity_pool(),
                created_at=clock(),
            )
            store.upsert_persona(persona)
            store.add_comments([comment])
        node = comment_to_record(comment)
        node["persona_text"] = persona.text
        return node

    @app.post("/api/videos/{video_id}/generate", status_code=202, dependencies=guarded)
    def request_more(video_id: str, payload: GenerateBody):
        store.get_video(video_id)
        if payload.count < 1:
            raise InputError(f"count must be >= 1, got {payload.count}")
        load_summary(video_id)
        job = store.create_job(
            video_id,
            "generate",
            payload.count,
            clock(),
            no_persona=not config.personas.file,
        )
        return {"job_id": job["job_id"]}

    frontend_dir = config.service.frontend_dir
    if frontend_dir and Path(frontend_dir).is_dir():
        app.mount("/", StaticFiles(directory=frontend_dir, html=True), name="ui")

    return app
