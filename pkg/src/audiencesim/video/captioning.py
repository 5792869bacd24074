"""Panel captioning through a vision backend."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

from audiencesim.errors import InputError, PipelineError
from audiencesim.gateway.base import CaptionBackend
from audiencesim.gateway.types import TranscriptSegment, normalize_segments
from audiencesim.video.frames import (
    DEFAULT_SAMPLE_RATE,
    MAX_VIDEO_SECONDS,
    VideoAsset,
    extract_frames,
)
from audiencesim.video.panels import (
    PANEL_SPAN,
    FramePanel,
    align_dialogue,
    assemble_panels,
    panel_png,
)

# Default instruction sent with every panel.  The image is a 2x2 grid of 4
# consecutive one-per-second frames, so the wording fixes which quadrant is
# "current" and what the caption must cover.
DEFAULT_CAPTION_INSTRUCTION = (
    "You are an AI visual assistant that can generate audio description for "
    "a video clip. You receive a image of 4 frames, which are sampled during "
    "4 seconds of the video clip. You also receive the audio caption during "
    "the 4 seconds. \n\nThe 4-th frame is the current frame, using the "
    "provided frames and audio caption, generate an audio description of the "
    "current frame in a detailed manner. Include details like object counts, "
    "position of the objects, relative position between the objects, the "
    "visual composition, the emotion, what might be going on during the "
    "clip, etc. Imagine describing the video clip to someone who cannot see "
    "the clip."
)


@dataclass(frozen=True)
class FrameCaption:
    """What is on screen around one timestamp, in narration form."""

    timestamp: float
    text: str

    def __post_init__(self):
        if self.timestamp < 0:
            raise InputError(f"caption timestamp must be >= 0, got {self.timestamp}")
        if not self.text.strip():
            raise InputError("caption text must be nonempty")


def caption_panels(
    panels: list[FramePanel],
    backend: CaptionBackend,
    instruction: str = DEFAULT_CAPTION_INSTRUCTION,
    parallelism: int = 4,
    on_panel_done: Callable[[int, int], None] | None = None,
) -> list[FrameCaption]:
    """One caption per panel, chronological regardless of completion order.

    Calls fan out over a thread pool; results are reassembled by panel
    index, so concurrency never reorders the caption list.
    ``on_panel_done(done, total)`` fires as results are collected, for
    progress reporting.
    """
    if not panels:
        raise PipelineError("captioning", "no panels to caption")
    if parallelism < 1:
        raise InputError(f"parallelism must be >= 1, got {parallelism}")

    def call(panel: FramePanel) -> str:
        return backend.caption(panel_png(panel), panel.dialogue, instruction)

    with ThreadPoolExecutor(max_workers=parallelism) as pool:
        futures = [(panel, pool.submit(call, panel)) for panel in panels]
        captions = []
        for done, (panel, future) in enumerate(futures, start=1):
            try:
                text = future.result()
            except Exception as exc:
                raise PipelineError(
                    "captioning",
                    f"caption call failed for panel {panel.panel_index}: {exc}",
                    cause=exc,
                ) from exc
            captions.append(FrameCaption(timestamp=panel.current_timestamp, text=text))
            if on_panel_done is not None:
                on_panel_done(done, len(panels))
    return captions


def caption_video(
    asset: VideoAsset,
    transcript: list[TranscriptSegment],
    backend: CaptionBackend,
    sample_rate: float = DEFAULT_SAMPLE_RATE,
    window: float = float(PANEL_SPAN),
    instruction: str = DEFAULT_CAPTION_INSTRUCTION,
    parallelism: int = 4,
    max_duration: float = MAX_VIDEO_SECONDS,
    on_panel_done: Callable[[int, int], None] | None = None,
) -> list[FrameCaption]:
    """Full visual pass: sample frames, build panels, caption each one."""
    frames = extract_frames(asset, sample_rate=sample_rate, max_duration=max_duration)
    ordered = normalize_segments(transcript)
    pairs = align_dialogue(frames, ordered, window=window)
    panels = assemble_panels(frames, pairs)
    return caption_panels(
        panels,
        backend,
        instruction=instruction,
        parallelism=parallelism,
        on_panel_done=on_panel_done,
    )
