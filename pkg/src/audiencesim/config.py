"""Application configuration: YAML file plus CLI overrides.

Secrets never appear here; gateway sections reference environment variable
names (``api_key_ref``) and the value is read only at call time.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from pathlib import Path

import yaml

from audiencesim.errors import InputError
from audiencesim.gateway.base import GatewayConfig
from audiencesim.gateway.factory import MODALITIES

DEFAULT_CHAT_BUDGET = 200_000

_DEFAULT_MODELS = {
    "transcription": "mock-transcriber",
    "caption": "mock-captioner",
    "chat": "mock-chat",
    "embedding": "mock-embedding",
}


@dataclass
class VideoConfig:
    sample_rate: float = 1.0
    panel_window: float = 4.0
    max_duration: float = 1500.0
    caption_parallelism: int = 4

    def __post_init__(self):
        if self.sample_rate <= 0:
            raise InputError(f"sample_rate must be > 0, got {self.sample_rate}")
        if self.panel_window <= 0:
            raise InputError(f"panel_window must be > 0, got {self.panel_window}")
        if self.max_duration <= 0:
            raise InputError(f"max_duration must be > 0, got {self.max_duration}")
        if self.caption_parallelism < 1:
            raise InputError("caption_parallelism must be >= 1")


@dataclass
class PersonaConfig:
    file: str = ""
    index_file: str = ""
    top_k: int = 30
    min_score: float = 0.0

    def __post_init__(self):
        if self.top_k < 1:
            raise InputError(f"top_k must be >= 1, got {self.top_k}")


@dataclass
class CommentConfig:
    default_count: int = 30
    parallelism: int = 4
    name_file: str = ""

    def __post_init__(self):
        if self.default_count < 1:
            raise InputError("default_count must be >= 1")
        if self.parallelism < 1:
            raise InputError("parallelism must be >= 1")


@dataclass
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8000
    data_dir: str = "./data"
    auth_token_ref: str = ""
    frontend_dir: str = ""
    worker_parallelism: int = 1

    def __post_init__(self):
        if not 0 < self.port < 65536:
            raise InputError(f"port must be in 1..65535, got {self.port}")
        if self.worker_parallelism < 1:
            raise InputError(
                f"worker_parallelism must be >= 1, got {self.worker_parallelism}"
            )


@dataclass
class MetricConfig:
    distinct_orders: tuple[int, ...] = (1, 2, 3, 4)
    bleu_max_n: int = 4
    seed: int = 0
    max_pairs: int = 200

    def __post_init__(self):
        self.distinct_orders = tuple(self.distinct_orders)
        if not self.distinct_orders:
            raise InputError("distinct_orders must be nonempty")
        if any(n not in (1, 2, 3, 4) for n in self.distinct_orders):
            raise InputError("distinct_orders entries must be in 1..4")
        if self.bleu_max_n < 1:
            raise InputError("bleu_max_n must be >= 1")
        if self.max_pairs < 1:
            raise InputError("max_pairs must be >= 1")


@dataclass
class AppConfig:
    gateways: dict[str, GatewayConfig] = field(default_factory=dict)
    video: VideoConfig = field(default_factory=VideoConfig)
    personas: PersonaConfig = field(default_factory=PersonaConfig)
    comments: CommentConfig = field(default_factory=CommentConfig)
    service: ServiceConfig = field(default_factory=ServiceConfig)
    metrics: MetricConfig = field(default_factory=MetricConfig)
    seed: int = 0
    mock: bool = False

    def __post_init__(self):
        for modality in MODALITIES:
            if modality not in self.gateways:
                self.gateways[modality] = _default_gateway(modality)
        if self.mock:
            for modality, gw in self.gateways.items():
                if gw.backend_kind != "mock":
                    self.gateways[modality] = GatewayConfig(
                        backend_kind="mock",
                        model_name=_DEFAULT_MODELS[modality],
                        context_budget=gw.context_budget,
                    )

    def gateway(self, modality: str) -> GatewayConfig:
        if modality not in self.gateways:
            raise InputError(f"no gateway configured for modality {modality!r}")
        return self.gateways[modality]


def _default_gateway(modality: str) -> GatewayConfig:
    budget = DEFAULT_CHAT_BUDGET if modality == "chat" else None
    return GatewayConfig(
        backend_kind="mock",
        model_name=_DEFAULT_MODELS[modality],
        context_budget=budget,
    )


def load_config(
    path: str | Path | None = None,
    *,
    mock: bool | None = None,
    seed: int | None = None,
) -> AppConfig:
    """Build the config from an optional YAML file and CLI overrides.

    ``mock=True`` forces every gateway onto its mock backend; ``seed``
    overrides the run seed.  Unknown keys are rejected so typos fail fast.
    """
    data: dict = {}
    if path is not None:
        path = Path(path)
        if not path.is_file():
            raise InputError(f"config file not found: {path}")
        try:
            loaded = yaml.safe_load(path.read_text(encoding="utf-8"))
        except yaml.YAMLError as exc:
            raise InputError(f"config file is not valid YAML: {path}: {exc}") from exc
        if loaded is None:
            loaded = {}
        if not isinstance(loaded, dict):
            raise InputError(f"config root must be a mapping: {path}")
        data = loaded

    known = {"gateways", "video", "personas", "comments", "service", "metrics", "seed", "mock"}
    unknown = set(data) - known
    if unknown:
        raise InputError(f"unknown config sections: {sorted(unknown)}")

    gateways = {}
    for modality, section in (data.get("gateways") or {}).items():
        if modality not in MODALITIES:
            raise InputError(
                f"unknown gateway modality {modality!r}; expected one of {MODALITIES}"
            )
        gateways[modality] = _gateway_from_section(modality, section or {})

    config = AppConfig(
        gateways=gateways,
        video=_build_section(VideoConfig, data.get("video"), "video"),
        personas=_build_section(PersonaConfig, data.get("personas"), "personas"),
        comments=_build_section(CommentConfig, data.get("comments"), "comments"),
        service=_build_section(ServiceConfig, data.get("service"), "service"),
        metrics=_build_section(MetricConfig, data.get("metrics"), "metrics"),
        seed=int(data.get("seed", 0)),
        mock=bool(data.get("mock", False)),
    )
    if seed is not None:
        config.seed = int(seed)
    if mock:
        return AppConfig(
            gateways=dict(config.gateways),
            video=config.video,
            personas=config.personas,
            comments=config.comments,
            service=config.service,
            metrics=config.metrics,
            seed=config.seed,
            mock=True,
        )
    return config


def _gateway_from_section(modality: str, section: dict) -> GatewayConfig:
    if not isinstance(section, dict):
        raise InputError(f"gateway section {modality!r} must be a mapping")
    allowed = {
        "backend_kind",
        "model_name",
        "endpoint_url",
        "api_key_ref",
        "timeout",
        "max_retries",
        "context_budget",
    }
    unknown = set(section) - allowed
    if unknown:
        raise InputError(
            f"unknown keys in gateway {modality!r}: {sorted(unknown)}"
        )
    defaults = _default_gateway(modality)
    values = {
        "backend_kind": section.get("backend_kind", defaults.backend_kind),
        "model_name": section.get("model_name", defaults.model_name),
        "endpoint_url": section.get("endpoint_url", ""),
        "api_key_ref": section.get("api_key_ref", ""),
        "timeout": float(section.get("timeout", defaults.timeout)),
        "max_retries": int(section.get("max_retries", defaults.max_retries)),
        "context_budget": section.get("context_budget", defaults.context_budget),
    }
    return GatewayConfig(**values)


def _build_section(cls, section, name: str):
    if section is None:
        return cls()
    if not isinstance(section, dict):
        raise InputError(f"config section {name!r} must be a mapping")
    allowed = {f.name for f in fields(cls)}
    unknown = set(section) - allowed
    if unknown:
        raise InputError(f"unknown keys in config section {name!r}: {sorted(unknown)}")
    return cls(**section)
