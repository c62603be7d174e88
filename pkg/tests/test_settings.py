import logging

import pytest

from core.errors import ConfigError
from core.logkit import OK, TagFormatter, configure_logging, get_logger
from core.settings.env_config import load_settings

ENV_NAMES = ("RECON_SEED", "RECON_MAX_WORKERS", "RECON_LOG_LEVEL", "RECON_OUTPUT_DIR",
             "RECON_P_MAX", "ARMA_P_MAX", "RECON_Q_MAX", "ARMA_Q_MAX")


@pytest.fixture
def clean_env(monkeypatch):
    for name in ENV_NAMES:
        monkeypatch.delenv(name, raising=False)
    return monkeypatch


def test_defaults(clean_env):
    s = load_settings()
    assert (s.seed, s.max_workers, s.p_max, s.q_max) == (0, 1, 2, 2)
    assert s.log_level == "INFO"


def test_order_grid_fallback_chain(clean_env):
    clean_env.setenv("ARMA_P_MAX", "3")
    assert load_settings().p_max == 3
    clean_env.setenv("RECON_P_MAX", "1")
    assert load_settings().p_max == 1


def test_bad_values_are_config_errors(clean_env):
    clean_env.setenv("RECON_SEED", "abc")
    with pytest.raises(ConfigError):
        load_settings()
    clean_env.setenv("RECON_SEED", "-4")
    with pytest.raises(ConfigError):
        load_settings()
    clean_env.setenv("RECON_SEED", "4")
    clean_env.setenv("RECON_MAX_WORKERS", "0")
    with pytest.raises(ConfigError):
        load_settings()


def test_tags():
    fmt = TagFormatter()
    record = logging.LogRecord("recon.x", OK, __file__, 1, "Wrote %s", ("a.svg",), None)
    assert fmt.format(record) == "[OK] Wrote a.svg"
    record = logging.LogRecord("recon.x", logging.CRITICAL, __file__, 1, "boom", (), None)
    assert fmt.format(record) == "[FATAL ERROR] boom"


def test_logger_writes_to_stderr(capsys):
    configure_logging("DEBUG")
    log = get_logger("core.tests")
    log.ok("done")
    log.warning("careful")
    captured = capsys.readouterr()
    assert captured.out == ""
    assert "[OK] done" in captured.err
    assert "[WARN] careful" in captured.err
    assert log.name == "recon.tests"
