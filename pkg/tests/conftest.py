"""Shared fixtures: a tiny synthetic video, persona files, mock configs.

Tests marked ``acceptance`` get one PASS/FAIL line each in the terminal
summary, so the acceptance gate is readable at a glance.
"""

from __future__ import annotations

import dataclasses

import cv2
import numpy as np
import pytest

from audiencesim.config import load_config

_acceptance_results = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when != "call":
        return
    marker = item.get_closest_marker("acceptance")
    if marker:
        _acceptance_results.append((marker.args[0], marker.args[1], report.outcome))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _acceptance_results:
        return
    terminalreporter.section("acceptance criteria")
    for number, description, outcome in sorted(_acceptance_results):
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"[{status}] criterion {number}: {description}")


def write_clip(path, duration_s=11.0, fps=8.0, size=(64, 48), seed=0):
    """A small random-noise video; noise keeps every frame distinct."""
    writer = cv2.VideoWriter(
        str(path), cv2.VideoWriter_fourcc(*"mp4v"), fps, size
    )
    if not writer.isOpened():
        raise RuntimeError("cv2 cannot open a VideoWriter in this environment")
    rng = np.random.default_rng(seed)
    for _ in range(int(round(duration_s * fps))):
        frame = rng.integers(0, 255, (size[1], size[0], 3), dtype=np.uint8)
        writer.write(frame)
    writer.release()
    return path


@pytest.fixture(scope="session")
def fixture_video(tmp_path_factory):
    return write_clip(tmp_path_factory.mktemp("video") / "clip.mp4")


@pytest.fixture(scope="session")
def persona_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("personas") / "personas.txt"
    lines = [
        f"persona number {i} who cares about topic {i % 7} and hobby {i % 5}"
        for i in range(40)
    ]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


@pytest.fixture()
def mock_config(persona_file, tmp_path):
    config = load_config(None, mock=True, seed=7)
    return dataclasses.replace(
        config,
        personas=dataclasses.replace(
            config.personas, file=str(persona_file)
        ),
        service=dataclasses.replace(
            config.service, data_dir=str(tmp_path / "data")
        ),
    )


@pytest.fixture(scope="session")
def session_run(tmp_path_factory, fixture_video, persona_file):
    """One finished mock pipeline run shared by read-only tests."""
    from audiencesim.pipeline import run_pipeline

    out_dir = tmp_path_factory.mktemp("run")
    config = load_config(None, mock=True, seed=7)
    config = dataclasses.replace(
        config, personas=dataclasses.replace(config.personas, file=str(persona_file))
    )
    manifest = run_pipeline(
        fixture_video,
        config,
        out_dir,
        title="Fixture clip",
        description="synthetic noise footage",
        author="tester",
    )
    return {
        "config": config,
        "out_dir": out_dir,
        "manifest": manifest,
        "artifact_dir": out_dir / manifest["video_id"],
        "video_path": fixture_video,
    }
