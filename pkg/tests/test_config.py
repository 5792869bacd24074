import pytest

from audiencesim.config import DEFAULT_CHAT_BUDGET, AppConfig, load_config
from audiencesim.errors import InputError


def write_config(tmp_path, text):
    path = tmp_path / "config.yaml"
    path.write_text(text, encoding="utf-8")
    return path


def test_defaults_without_file():
    config = load_config(None)
    assert config.seed == 0
    assert config.mock is False
    assert config.video.sample_rate == 1.0
    assert config.video.panel_window == 4.0
    assert config.personas.top_k == 30
    assert config.personas.min_score == 0.0
    assert config.comments.default_count == 30
    assert config.metrics.distinct_orders == (1, 2, 3, 4)
    assert config.gateway("chat").context_budget == DEFAULT_CHAT_BUDGET
    for modality in ("transcription", "caption", "chat", "embedding"):
        assert config.gateway(modality).backend_kind == "mock"


def test_file_values_land(tmp_path):
    path = write_config(
        tmp_path,
        """
seed: 42
video:
  sample_rate: 2.0
personas:
  top_k: 10
  min_score: 0.25
comments:
  default_count: 12
service:
  port: 9000
  worker_parallelism: 2
metrics:
  max_pairs: 50
""",
    )
    config = load_config(path)
    assert config.seed == 42
    assert config.video.sample_rate == 2.0
    assert config.personas.top_k == 10
    assert config.personas.min_score == 0.25
    assert config.comments.default_count == 12
    assert config.service.port == 9000
    assert config.service.worker_parallelism == 2
    assert config.metrics.max_pairs == 50


def test_gateway_section(tmp_path):
    path = write_config(
        tmp_path,
        """
gateways:
  chat:
    backend_kind: remote
    model_name: prod-chat
    endpoint_url: https://gw.example
    api_key_ref: CHAT_KEY
    context_budget: 64000
""",
    )
    config = load_config(path)
    chat = config.gateway("chat")
    assert chat.backend_kind == "remote"
    assert chat.model_name == "prod-chat"
    assert chat.api_key_ref == "CHAT_KEY"
    assert chat.context_budget == 64000
    # unconfigured modalities fall back to mocks
    assert config.gateway("caption").backend_kind == "mock"


def test_mock_flag_forces_mock_backends(tmp_path):
    path = write_config(
        tmp_path,
        """
gateways:
  chat:
    backend_kind: remote
    model_name: prod-chat
    endpoint_url: https://gw.example
    context_budget: 64000
""",
    )
    config = load_config(path, mock=True)
    chat = config.gateway("chat")
    assert chat.backend_kind == "mock"
    # budget carries over so budget-abort behavior is testable in mock mode
    assert chat.context_budget == 64000
    assert config.mock is True


def test_seed_override_beats_file(tmp_path):
    path = write_config(tmp_path, "seed: 42\n")
    assert load_config(path, seed=7).seed == 7


def test_unknown_section_rejected(tmp_path):
    path = write_config(tmp_path, "vidoe:\n  sample_rate: 2.0\n")
    with pytest.raises(InputError, match="vidoe"):
        load_config(path)


def test_unknown_key_rejected(tmp_path):
    path = write_config(tmp_path, "video:\n  samplerate: 2.0\n")
    with pytest.raises(InputError, match="samplerate"):
        load_config(path)


def test_unknown_gateway_modality_rejected(tmp_path):
    path = write_config(tmp_path, "gateways:\n  speech:\n    model_name: x\n")
    with pytest.raises(InputError, match="speech"):
        load_config(path)


def test_unknown_gateway_key_rejected(tmp_path):
    path = write_config(tmp_path, "gateways:\n  chat:\n    api_key: inline\n")
    with pytest.raises(InputError, match="api_key"):
        load_config(path)


def test_missing_file_rejected(tmp_path):
    with pytest.raises(InputError, match="not found"):
        load_config(tmp_path / "nope.yaml")


def test_invalid_yaml_rejected(tmp_path):
    path = write_config(tmp_path, "video: [unclosed\n")
    with pytest.raises(InputError, match="YAML"):
        load_config(path)


def test_non_mapping_root_rejected(tmp_path):
    path = write_config(tmp_path, "- a\n- b\n")
    with pytest.raises(InputError, match="mapping"):
        load_config(path)


@pytest.mark.parametrize(
    "section,body",
    [
        ("video", "sample_rate: 0"),
        ("video", "caption_parallelism: 0"),
        ("personas", "top_k: 0"),
        ("comments", "default_count: 0"),
        ("service", "port: 0"),
        ("service", "worker_parallelism: 0"),
        ("metrics", "distinct_orders: [5]"),
        ("metrics", "max_pairs: 0"),
    ],
)
def test_section_validation(tmp_path, section, body):
    path = write_config(tmp_path, f"{section}:\n  {body}\n")
    with pytest.raises(InputError):
        load_config(path)


def test_gateway_accessor_rejects_unknown():
    with pytest.raises(InputError):
        AppConfig().gateway("speech")
