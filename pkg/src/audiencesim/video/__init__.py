"""Video understanding: frame sampling, panel assembly, and captioning."""

from audiencesim.video.captioning import (
    DEFAULT_CAPTION_INSTRUCTION,
    FrameCaption,
    caption_video,
)
from audiencesim.video.frames import (
    DEFAULT_SAMPLE_RATE,
    MAX_VIDEO_SECONDS,
    SampledFrame,
    VideoAsset,
    extract_frames,
    probe_duration,
)
from audiencesim.video.panels import (
    PANEL_SPAN,
    FramePanel,
    align_dialogue,
    assemble_panels,
    panel_png,
)

__all__ = [
    "DEFAULT_CAPTION_INSTRUCTION",
    "DEFAULT_SAMPLE_RATE",
    "FrameCaption",
    "FramePanel",
    "MAX_VIDEO_SECONDS",
    "PANEL_SPAN",
    "SampledFrame",
    "VideoAsset",
    "align_dialogue",
    "assemble_panels",
    "caption_video",
    "extract_frames",
    "panel_png",
    "probe_duration",
]
