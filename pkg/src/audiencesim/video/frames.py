"""Frame sampling from video containers."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import cv2
import numpy as np

from audiencesim.errors import InputError

DEFAULT_SAMPLE_RATE = 1.0

# Length guard: long uploads are rejected up front rather than discovered
# mid-pipeline.  25 minutes, overridable in config.
MAX_VIDEO_SECONDS = 1500.0


@dataclass(frozen=True)
class VideoAsset:
    """A stored video plus the creator-supplied metadata shown to viewers."""

    video_id: str
    file_path: Path
    title: str
    description: str = ""
    author: str = ""
    duration: float = 0.0
    thumbnail: bytes | None = field(default=None, repr=False)

    def __post_init__(self):
        if not self.video_id.strip():
            raise InputError("video_id must be nonempty")
        if not self.title.strip():
            raise InputError("video title must be nonempty")
        if self.duration <= 0:
            raise InputError(f"video duration must be > 0, got {self.duration}")


@dataclass(frozen=True)
class SampledFrame:
    """One decoded frame on the sampling grid; timestamp = index / rate."""

    index: int
    timestamp: float
    image: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.index < 0:
            raise InputError(f"frame index must be >= 0, got {self.index}")
        if self.timestamp < 0:
            raise InputError(f"frame timestamp must be >= 0, got {self.timestamp}")
        if self.image.ndim != 3 or self.image.shape[2] != 3:
            raise InputError(
                f"frame image must be HxWx3, got shape {self.image.shape}"
            )


def probe_duration(path: str | Path) -> float:
    """Duration in seconds from container metadata."""
    capture = cv2.VideoCapture(str(path))
    try:
        if not capture.isOpened():
            raise InputError(f"could not open video file: {path}")
        fps = capture.get(cv2.CAP_PROP_FPS)
        frame_count = capture.get(cv2.CAP_PROP_FRAME_COUNT)
        if fps <= 0 or frame_count <= 0:
            raise InputError(f"video has no decodable frames: {path}")
        return frame_count / fps
    finally:
        capture.release()


def extract_frames(
    asset: VideoAsset,
    sample_rate: float = DEFAULT_SAMPLE_RATE,
    max_duration: float = MAX_VIDEO_SECONDS,
) -> list[SampledFrame]:
    """Sample floor(duration x rate) frames at timestamps i / rate.

    Frames are read sequentially and matched to the sampling grid by source
    frame index; if the container ends a frame or two early, the last
    decoded frame fills the remaining grid slots.
    """
    if sample_rate <= 0:
        raise InputError(f"sample_rate must be > 0, got {sample_rate}")
    if asset.duration > max_duration:
        raise InputError(
            f"video is {asset.duration:.1f}s long, over the {max_duration:.0f}s limit"
        )
    target_count = math.floor(asset.duration * sample_rate)
    if target_count == 0:
        raise InputError(
            f"video too short to sample at {sample_rate} fps "
            f"({asset.duration:.2f}s)"
        )

    capture = cv2.VideoCapture(str(asset.file_path))
    try:
        if not capture.isOpened():
            raise InputError(f"could not decode video file: {asset.file_path}")
        native_fps = capture.get(cv2.CAP_PROP_FPS)
        if native_fps <= 0:
            raise InputError(f"video reports no frame rate: {asset.file_path}")

        # Source frame index holding the frame at each grid timestamp.
        targets = [
            math.floor(i / sample_rate * native_fps) for i in range(target_count)
        ]
        frames: list[SampledFrame] = []
        last_image: np.ndarray | None = None
        src_index = 0
        next_slot = 0
        while next_slot < target_count:
            ok, image = capture.read()
            if not ok:
                break
            last_image = image
            while next_slot < target_count and targets[next_slot] == src_index:
                frames.append(
                    SampledFrame(
                        index=next_slot,
                        timestamp=next_slot / sample_rate,
                        image=image,
                    )
                )
                next_slot += 1
            src_index += 1
        if last_image is None:
            raise InputError(f"video contains no decodable frames: {asset.file_path}")
        # Tail tolerance: metadata may promise slightly more than decodes.
        while next_slot < target_count:
            frames.append(
                SampledFrame(
                    index=next_slot,
                    timestamp=next_slot / sample_rate,
                    image=last_image,
                )
            )
            next_slot += 1
        return frames
    finally:
        capture.release()
