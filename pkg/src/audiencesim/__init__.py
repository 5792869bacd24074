"""Simulated audience comments for unpublished videos.

Pipeline: video -> transcript + frame captions -> summary + keywords ->
persona retrieval -> comment generation, plus an evaluation suite for
comment corpora and an HTTP service exposing the whole loop.
"""

__version__ = "0.1.0"
