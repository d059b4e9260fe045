"""
Application settings and configuration management.
"""

import os
from pathlib import Path
from typing import Any, Dict, Optional

import psutil
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()


def _default_threads() -> int:
    cores = psutil.cpu_count(logical=False) or os.cpu_count() or 1
    return max(1, int(cores))


def _threads_from_env(raw: Optional[str], default: int) -> int:
    """Parse a BANDGATE_THREADS value, falling back to ``default`` when unset or not an integer."""
    if raw is None or not raw.strip():
        return default
    try:
        return max(1, int(raw))
    except ValueError:
        return default


class Settings:
    """Application settings class."""

    # Base paths
    PROJECT_ROOT = Path(__file__).parent.parent.parent.parent
    SRC_ROOT = PROJECT_ROOT / "src"

    # Output settings
    OUTPUT_ROOT: Path = Path(os.getenv("BANDGATE_OUTPUT_DIR", "outputs"))

    # Logging settings
    LOG_LEVEL: str = os.getenv("LOG_LEVEL", "INFO")
    LOG_FILE_PATH: str = os.getenv("LOG_FILE_PATH", "")
    LOG_FORMAT: str = os.getenv("LOG_FORMAT", "console")

    # Worker pool cap for fold and seed fan-out
    THREADS: int = _threads_from_env(os.getenv("BANDGATE_THREADS"), _default_threads())

    @classmethod
    def get_absolute_path(cls, relative_path: str) -> Path:
        """Convert relative path to absolute path from project root."""
        return cls.PROJECT_ROOT / relative_path

    @classmethod
    def ensure_directory(cls, path: Path) -> None:
        """Ensure directory exists."""
        path.mkdir(parents=True, exist_ok=True)

    @classmethod
    def get_config_dict(cls) -> Dict[str, Any]:
        """Get all settings as a dictionary."""
        return {
            key: getattr(cls, key)
            for key in dir(cls)
            if not key.startswith('_') and not callable(getattr(cls, key))
        }

    @staticmethod
    def thread_cap() -> int:
        """Current worker cap, re-reading BANDGATE_THREADS so tests and CLI runs can override it."""
        return _threads_from_env(os.getenv("BANDGATE_THREADS"), Settings.THREADS)


# Global settings instance
settings = Settings()
