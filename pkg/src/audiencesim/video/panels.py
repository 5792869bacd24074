"""Panel assembly: group sampled frames in fours and pair each group with
the dialogue spoken over its time span.

A panel is a 2x2 composite of 4 consecutive frames in reading order; the
bottom-right quadrant is the current frame the caption describes.  Panels
tile the frame sequence with stride 4, so a video costs duration/4 caption
calls.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import cv2
import numpy as np

from audiencesim.errors import InputError
from audiencesim.gateway.types import TranscriptSegment
from audiencesim.video.frames import SampledFrame

PANEL_SPAN = 4

Window = tuple[float, float]


@dataclass(frozen=True)
class FramePanel:
    panel_index: int
    frames: tuple[SampledFrame, SampledFrame, SampledFrame, SampledFrame]
    composite: np.ndarray = field(repr=False)
    dialogue: str = ""

    def __post_init__(self):
        if self.panel_index < 0:
            raise InputError(f"panel_index must be >= 0, got {self.panel_index}")
        if len(self.frames) != PANEL_SPAN:
            raise InputError(f"a panel holds exactly {PANEL_SPAN} frames")

    @property
    def current_timestamp(self) -> float:
        """Timestamp of the current (bottom-right) frame."""
        return self.frames[-1].timestamp


def panel_windows(frames: list[SampledFrame], window: float) -> list[Window]:
    """Dialogue window [t - window, t] for each panel, t = its current frame."""
    return [
        (group[-1].timestamp - window, group[-1].timestamp)
        for group in _panel_groups(frames)
    ]


def align_dialogue(
    frames: list[SampledFrame],
    transcript: list[TranscriptSegment],
    window: float = float(PANEL_SPAN),
) -> list[tuple[Window, str]]:
    """Pair every panel window with the transcript spoken inside it.

    A segment belongs to a window when their spans overlap with positive or
    touching measure: segment.start < window end and segment.end > window
    start.  Overlapping segments concatenate in transcript order; a window
    with no speech pairs with the empty string.
    """
    if window <= 0:
        raise InputError(f"dialogue window must be > 0, got {window}")
    pairs: list[tuple[Window, str]] = []
    for win_start, win_end in panel_windows(frames, window):
        spoken = [
            seg.text
            for seg in transcript
            if seg.start < win_end and seg.end > win_start
        ]
        pairs.append(((win_start, win_end), " ".join(spoken)))
    return pairs


def assemble_panels(
    frames: list[SampledFrame], dialogue_pairs: list[tuple[Window, str]]
) -> list[FramePanel]:
    """Build the 2x2 composites, one panel per stride-4 frame group.

    A final group short of 4 frames repeats its last frame into the empty
    slots, so every composite has the full quadrant layout.
    """
    groups = _panel_groups(frames)
    if len(dialogue_pairs) != len(groups):
        raise InputError(
            f"got {len(dialogue_pairs)} dialogue pairs for {len(groups)} panels"
        )
    shapes = {f.image.shape for f in frames}
    if len(shapes) != 1:
        raise InputError(f"frames disagree on shape: {sorted(shapes)}")

    panels = []
    for k, group in enumerate(groups):
        images = [f.image for f in group]
        composite = np.vstack(
            [np.hstack(images[0:2]), np.hstack(images[2:4])]
        )
        panels.append(
            FramePanel(
                panel_index=k,
                frames=tuple(group),
                composite=composite,
                dialogue=dialogue_pairs[k][1],
            )
        )
    return panels


def panel_png(panel: FramePanel) -> bytes:
    """Encode the composite as PNG bytes for the caption gateway."""
    ok, buffer = cv2.imencode(".png", panel.composite)
    if not ok:
        raise InputError(f"could not encode panel {panel.panel_index} as PNG")
    return buffer.tobytes()


def _panel_groups(frames: list[SampledFrame]) -> list[list[SampledFrame]]:
    if not frames:
        raise InputError("cannot build panels from zero frames")
    for position, frame in enumerate(frames):
        if frame.index != position:
            raise InputError(
                f"frame indices must be consecutive from 0; "
                f"position {position} holds index {frame.index}"
            )
    groups = []
    for k in range(0, len(frames), PANEL_SPAN):
        group = list(frames[k : k + PANEL_SPAN])
        while len(group) < PANEL_SPAN:
            group.append(group[-1])
        groups.append(group)
    return groups
