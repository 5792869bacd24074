"""Embedded relational store for videos, jobs, comments, and personas.

One sqlite file per data directory.  Referential integrity is enforced at
write time: a comment's video, persona, and parent must already exist, and
a parent must belong to the same video.  Job stage and progress can only
move forward, which is what makes polled progress monotone even across a
worker restart.
"""

from __future__ import annotations

import json
import sqlite3
import threading
import uuid
from pathlib import Path

from audiencesim.comments.model import Comment
from audiencesim.errors import ConflictError, InputError, NotFoundError
from audiencesim.personas import Persona

JOB_TERMINAL_STAGES = ("done", "failed")

JOB_STAGE_ORDER = (
    "queued",
    "transcribing",
    "captioning",
    "summarizing",
    "ranking_personas",
    "generating_comments",
    "done",
)

_SCHEMA = """
CREATE TABLE IF NOT EXISTS videos (
    video_id TEXT PRIMARY KEY,
    title TEXT NOT NULL,
    description TEXT NOT NULL DEFAULT '',
    author TEXT NOT NULL DEFAULT '',
    duration REAL NOT NULL,
    file_path TEXT NOT NULL,
    thumbnail_path TEXT,
    upload_time TEXT NOT NULL,
    owner TEXT NOT NULL DEFAULT 'local',
    latest_job_id TEXT
);
CREATE TABLE IF NOT EXISTS jobs (
    job_id TEXT PRIMARY KEY,
    video_id TEXT NOT NULL REFERENCES videos(video_id),
    kind TEXT NOT NULL,
    count INTEGER NOT NULL,
    no_persona INTEGER NOT NULL DEFAULT 0,
    stage TEXT NOT NULL,
    progress REAL NOT NULL DEFAULT 0.0,
    error TEXT,
    created_at TEXT NOT NULL,
    updated_at TEXT NOT NULL,
    stage_history TEXT NOT NULL DEFAULT '[]'
);
CREATE TABLE IF NOT EXISTS personas (
    persona_id TEXT PRIMARY KEY,
    text TEXT NOT NULL,
    source TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS comments (
    comment_id TEXT PRIMARY KEY,
    video_id TEXT NOT NULL REFERENCES videos(video_id),
    kind TEXT NOT NULL,
    body TEXT NOT NULL,
    author_name TEXT NOT NULL,
    avatar_seed TEXT NOT NULL,
    persona_id TEXT REFERENCES personas(persona_id),
    parent_id TEXT REFERENCES comments(comment_id),
    created_at TEXT NOT NULL
);
"""


class Store:
    """Thread-safe wrapper over one sqlite database file."""

    def __init__(self, db_path: str | Path):
        self.db_path = Path(db_path)
        self.db_path.parent.mkdir(parents=True, exist_ok=True)
        # One connection shared across the API and worker threads; the lock
        # serializes access, sqlite handles durability.
        self._conn = sqlite3.connect(self.db_path, check_same_thread=False)
        self._conn.row_factory = sqlite3.Row
        self._lock = threading.RLock()
        with self._lock, self._conn:
            self._conn.executescript(_SCHEMA)

    def close(self) -> None:
        with self._lock:
            self._conn.close()

    # -- videos ----------------------------------------------------------

    def allocate_video_id(self, content_id: str) -> str:
        """Content-derived id, suffixed when the same bytes were uploaded
        before: uploads are distinct entities."""
        with self._lock:
            candidate = content_id
            n = 1
            while self._one("SELECT 1 FROM videos WHERE video_id = ?", (candidate,)):
                n += 1
                candidate = f"{content_id}-{n}"
            return candidate

    def create_video(
        self,
        *,
        video_id: str,
        title: str,
        description: str,
        author: str,
        duration: float,
        file_path: str,
        thumbnail_path: str | None,
        upload_time: str,
    ) -> dict:
        if not title.strip():
            raise InputError("video title must be nonempty")
        with self._lock, self._conn:
            self._conn.execute(
                "INSERT INTO videos (video_id, title, description, author, duration,"
                " file_path, thumbnail_path, upload_time) VALUES (?,?,?,?,?,?,?,?)",
                (
                    video_id,
                    title,
                    description,
                    author,
                    duration,
                    file_path,
                    thumbnail_path,
                    upload_time,
                ),
            )
        return self.get_video(video_id)

    def get_video(self, video_id: str) -> dict:
        row = self._one("SELECT * FROM videos WHERE video_id = ?", (video_id,))
        if row is None:
            raise NotFoundError(f"video not found: {video_id}")
        return dict(row)

    def list_videos(self) -> list[dict]:
        with self._lock:
            rows = self._conn.execute(
                "SELECT * FROM videos ORDER BY upload_time, video_id"
            ).fetchall()
        return [dict(r) for r in rows]

    # -- jobs ------------------------------------------------------------

    def create_job(
        self,
        video_id: str,
        kind: str,
        count: int,
        created_at: str,
        no_persona: bool = False,
    ) -> dict:
        if kind not in ("full", "generate"):
            raise InputError(f"unknown job kind: {kind}")
        if count < 1:
            raise InputError(f"job comment count must be >= 1, got {count}")
        self.get_video(video_id)
        job_id = "job_" + uuid.uuid4().hex[:12]
        history = json.dumps([{"stage": "queued", "at": created_at}])
        with self._lock, self._conn:
            self._conn.execute(
                "INSERT INTO jobs (job_id, video_id, kind, count, no_persona, stage,"
                " progress, created_at, updated_at, stage_history)"
                " VALUES (?,?,?,?,?,'queued',0.0,?,?,?)",
                (
                    job_id,
                    video_id,
                    kind,
                    count,
                    int(no_persona),
                    created_at,
                    created_at,
                    history,
                ),
            )
            self._conn.execute(
                "UPDATE videos SET latest_job_id = ? WHERE video_id = ?",
                (job_id, video_id),
            )
        return self.get_job(job_id)

    def get_job(self, job_id: str) -> dict:
        row = self._one("SELECT * FROM jobs WHERE job_id = ?", (job_id,))
        if row is None:
            raise NotFoundError(f"job not found: {job_id}")
        job = dict(row)
        job["no_persona"] = bool(job["no_persona"])
        job["stage_history"] = json.loads(job["stage_history"])
        return job

    def update_job(
        self,
        job_id: str,
        *,
        stage: str | None = None,
        progress: float | None = None,
        error: str | None = None,
        at: str = "",
    ) -> dict:
        """Advance a job.  Stage and progress never move backward; "failed"
        is reachable from anywhere, after which the job is frozen."""
        with self._lock, self._conn:
            current = self.get_job(job_id)
            if current["stage"] == "failed":
                return current
            new_stage = current["stage"]
            history = current["stage_history"]
            if stage is not None and stage != current["stage"]:
                if stage == "failed":
                    new_stage = stage
                elif stage not in JOB_STAGE_ORDER:
                    raise InputError(f"unknown job stage: {stage}")
                elif JOB_STAGE_ORDER.index(stage) > JOB_STAGE_ORDER.index(
                    current["stage"]
                ):
                    new_stage = stage
                if new_stage == stage:
                    history = history + [{"stage": stage, "at": at}]
            new_progress = current["progress"]
            if progress is not None:
                new_progress = max(new_progress, min(1.0, progress))
            if new_stage == "done":
                new_progress = 1.0
            self._conn.execute(
                "UPDATE jobs SET stage = ?, progress = ?, error = ?,"
                " updated_at = ?, stage_history = ? WHERE job_id = ?",
                (
                    new_stage,
                    new_progress,
                    error if error is not None else current["error"],
                    at or current["updated_at"],
                    json.dumps(history),
                    job_id,
                ),
            )
        return self.get_job(job_id)

    def active_job_for(self, video_id: str) -> dict | None:
        row = self._one(
            "SELECT * FROM jobs WHERE video_id = ? AND stage NOT IN (?, ?)"
            " ORDER BY created_at LIMIT 1",
            (video_id, *JOB_TERMINAL_STAGES),
        )
        return self.get_job(row["job_id"]) if row else None

    def next_queued_job(self, busy_videos: set[str]) -> dict | None:
        """Oldest queued or resumable job whose video is not being worked.

        Non-terminal, non-queued stages can only exist after a crash; they
        are eligible again so a restarted worker resumes them.
        """
        with self._lock:
            rows = self._conn.execute(
                "SELECT job_id, video_id FROM jobs WHERE stage NOT IN (?, ?)"
                " ORDER BY created_at, job_id",
                JOB_TERMINAL_STAGES,
            ).fetchall()
        for row in rows:
            if row["video_id"] not in busy_videos:
                return self.get_job(row["job_id"])
        return None

    # -- personas --------------------------------------------------------

    def upsert_persona(self, persona: Persona) -> None:
        with self._lock, self._conn:
            existing = self._one(
                "SELECT text FROM personas WHERE persona_id = ?", (persona.persona_id,)
            )
            if existing is None:
                self._conn.execute(
                    "INSERT INTO personas (persona_id, text, source) VALUES (?,?,?)",
                    (persona.persona_id, persona.text, persona.source),
                )
            elif existing["text"] != persona.text:
                raise ConflictError(
                    f"persona_id '{persona.persona_id}' already stored with "
                    "different text"
                )

    def persona_text(self, persona_id: str) -> str:
        return self.get_persona(persona_id).text

    def get_persona(self, persona_id: str) -> Persona:
        row = self._one(
            "SELECT * FROM personas WHERE persona_id = ?", (persona_id,)
        )
        if row is None:
            raise NotFoundError(f"persona not found: {persona_id}")
        return Persona(
            persona_id=row["persona_id"], text=row["text"], source=row["source"]
        )

    # -- comments --------------------------------------------------------

    def add_comments(self, comments: list[Comment]) -> None:
        """Persist a batch transactionally; every reference must resolve."""
        with self._lock, self._conn:
            known_ids = {c.comment_id for c in comments}
            for comment in comments:
                self.get_video(comment.video_id)
                if comment.persona_id is not None:
                    self.persona_text(comment.persona_id)
                if comment.parent_id is not None and comment.parent_id not in known_ids:
                    parent = self._one(
                        "SELECT video_id FROM comments WHERE comment_id = ?",
                        (comment.parent_id,),
                    )
                    if parent is None:
                        raise InputError(
                            f"parent comment not found: {comment.parent_id}"
                        )
                    if parent["video_id"] != comment.video_id:
                        raise InputError(
                            "parent comment belongs to a different video"
                        )
            self._conn.executemany(
                "INSERT INTO comments (comment_id, video_id, kind, body, author_name,"
                " avatar_seed, persona_id, parent_id, created_at)"
                " VALUES (?,?,?,?,?,?,?,?,?)",
                [
                    (
                        c.comment_id,
                        c.video_id,
                        c.kind,
                        c.body,
                        c.author_name,
                        c.avatar_seed,
                        c.persona_id,
                        c.parent_id,
                        c.created_at,
                    )
                    for c in comments
                ],
            )

    def get_comment(self, comment_id: str) -> Comment:
        row = self._one(
            "SELECT * FROM comments WHERE comment_id = ?", (comment_id,)
        )
        if row is None:
            raise NotFoundError(f"comment not found: {comment_id}")
        return self._to_comment(row)

    def comments_for(self, video_id: str) -> list[Comment]:
        self.get_video(video_id)
        with self._lock:
            rows = self._conn.execute(
                "SELECT * FROM comments WHERE video_id = ?"
                " ORDER BY comment_id",
                (video_id,),
            ).fetchall()
        return [self._to_comment(r) for r in rows]

    def next_comment_ordinal(self, video_id: str) -> int:
        """1-based ordinal for the next comment id on this video."""
        comments = self.comments_for(video_id)
        highest = 0
        for comment in comments:
            _, _, suffix = comment.comment_id.rpartition(".c")
            if suffix.isdigit():
                highest = max(highest, int(suffix))
        return highest + 1

    # -- internals -------------------------------------------------------

    def _one(self, sql: str, params: tuple) -> sqlite3.Row | None:
        with self._lock:
            return self._conn.execute(sql, params).fetchone()

    @staticmethod
    def _to_comment(row: sqlite3.Row) -> Comment:
        return Comment(
            comment_id=row["comment_id"],
            video_id=row["video_id"],
            kind=row["kind"],
            body=row["body"],
            author_name=row["author_name"],
            avatar_seed=row["avatar_seed"],
            persona_id=row["persona_id"],
            parent_id=row["parent_id"],
            created_at=row["created_at"],
        )
