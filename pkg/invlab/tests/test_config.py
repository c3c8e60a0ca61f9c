import pytest

from invlab.core.config import DEFAULT_SEED, load_settings
from invlab.core.errors import ConfigError


def test_defaults(monkeypatch):
    for name in ("INVLAB_THREADS", "INVLAB_SEED", "INVLAB_LOG_LEVEL", "INVLAB_GROUP_ORDER_CAP"):
        monkeypatch.delenv(name, raising=False)
    settings = load_settings()
    assert settings.seed == DEFAULT_SEED
    assert settings.log_level == "INFO"
    assert settings.threads >= 1


def test_environment_is_read(monkeypatch):
    monkeypatch.setenv("INVLAB_THREADS", "3")
    monkeypatch.setenv("INVLAB_SEED", "0x10")
    monkeypatch.setenv("INVLAB_LOG_LEVEL", "debug")
    settings = load_settings()
    assert (settings.threads, settings.seed, settings.log_level) == (3, 16, "DEBUG")


def test_overrides_win_over_environment(monkeypatch):
    monkeypatch.setenv("INVLAB_THREADS", "3")
    assert load_settings(threads=1).threads == 1
    assert load_settings(threads=None).threads == 3


@pytest.mark.parametrize("name,value", [
    ("INVLAB_THREADS", "0"),
    ("INVLAB_LOG_LEVEL", "chatty"),
    ("INVLAB_GATE_HORIZON", "-1"),
])
def test_invalid_environment(monkeypatch, name, value):
    monkeypatch.setenv(name, value)
    with pytest.raises(ConfigError):
        load_settings()
