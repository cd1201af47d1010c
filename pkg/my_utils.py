import logging
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from dotenv import load_dotenv

# Absolute path to the config directory, so the CLI works from any working directory.
_CONFIG_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "config")
ENV_PATH = os.path.join(_CONFIG_DIR, "env.system")

LOG_FORMAT = "%(asctime)s [%(levelname)s] %(threadName)s - %(message)s"


def load_env(env_path: str | Path) -> bool:
    """Load variables from the given .env file into os.environ; False if it does not exist."""
    env_path = Path(env_path)
    if not env_path.exists():
        return False
    load_dotenv(dotenv_path=env_path, override=False)
    return True


def _env_int(key: str, default: int) -> int:
    raw = os.getenv(key)
    if raw is None or not raw.strip():
        return default
    try:
        return int(float(raw))  # accepts 1e8
    except ValueError:
        raise ValueError(f"{key}={raw!r} is not a number") from None


@dataclass(frozen=True)
class Settings:
    budget: int = 100_000_000
    oracle_cap: int = 2000
    checkpoint_every: int = 100
    jobs: int = 1
    log_level: str = "INFO"
    log_dir: str | None = None
    prime_cap: int = 10_000_000


def load_settings(env_path: str | Path | None = None) -> Settings:
    """Defaults, overridden by config/env.system (or env_path), overridden by the real environment."""
    load_env(env_path or ENV_PATH)
    return Settings(
        budget=_env_int("MOTZKIN_BUDGET", Settings.budget),
        oracle_cap=_env_int("MOTZKIN_ORACLE_CAP", Settings.oracle_cap),
        checkpoint_every=_env_int("MOTZKIN_CHECKPOINT_EVERY", Settings.checkpoint_every),
        jobs=_env_int("MOTZKIN_JOBS", Settings.jobs),
        log_level=os.getenv("MOTZKIN_LOG_LEVEL", Settings.log_level).upper(),
        log_dir=os.getenv("MOTZKIN_LOG_DIR") or None,
        prime_cap=_env_int("MOTZKIN_PRIME_CAP", Settings.prime_cap),
    )


def setup_logging(level: str = "INFO", log_dir: str | None = None):
    """Log to stderr (stdout carries json/csv) and, when log_dir is set, to <log_dir>/motzkin.log."""
    handlers: list[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if log_dir:
        os.makedirs(log_dir, exist_ok=True)
        handlers.append(logging.FileHandler(os.path.join(log_dir, "motzkin.log")))
    logging.basicConfig(level=getattr(logging, level.upper(), logging.INFO), format=LOG_FORMAT,
                        handlers=handlers, force=True)
