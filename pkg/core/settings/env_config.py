import os
from dataclasses import dataclass
from functools import lru_cache

from dotenv import load_dotenv

from core.errors import ConfigError

load_dotenv()

# --- ORDER GRID FALLBACK CHAIN ---
# First variable that is set wins, then the built-in default.
_P_MAX_CANDIDATES = ("RECON_P_MAX", "ARMA_P_MAX")
_Q_MAX_CANDIDATES = ("RECON_Q_MAX", "ARMA_Q_MAX")


@dataclass(frozen=True)
class Settings:
    seed: int = 0
    max_workers: int = 1
    log_level: str = "INFO"
    output_dir: str = "outputs"
    p_max: int = 2
    q_max: int = 2


def _int_env(names: tuple[str, ...], default: int, minimum: int = 0) -> int:
    for name in names:
        raw = os.getenv(name)
        if raw is None or raw.strip() == "":
            continue
        try:
            value = int(raw)
        except ValueError:
            raise ConfigError(f"{name} must be an integer, got {raw!r}") from None
        if value < minimum:
            raise ConfigError(f"{name} must be >= {minimum}, got {value}")
        return value
    return default


def load_settings() -> Settings:
    """Read the environment (after `.env`) into a Settings record."""
    return Settings(
        seed=_int_env(("RECON_SEED",), 0),
        max_workers=_int_env(("RECON_MAX_WORKERS",), 1, minimum=1),
        log_level=os.getenv("RECON_LOG_LEVEL", "INFO").upper(),
        output_dir=os.getenv("RECON_OUTPUT_DIR", "outputs"),
        p_max=_int_env(_P_MAX_CANDIDATES, 2),
        q_max=_int_env(_Q_MAX_CANDIDATES, 2),
    )


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    return load_settings()
