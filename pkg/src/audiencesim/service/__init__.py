"""HTTP service: persistence, background jobs, and the JSON API."""

from audiencesim.service.api import create_app
from audiencesim.service.jobs import JOB_STAGE_WEIGHTS, JobWorker, run_generation
from audiencesim.service.store import Store

__all__ = ["JOB_STAGE_WEIGHTS", "JobWorker", "Store", "create_app", "run_generation"]
