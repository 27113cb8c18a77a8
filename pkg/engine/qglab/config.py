"""Process settings."""
from pathlib import Path
from pydantic import field_validator
from pydantic_settings import BaseSettings
from functools import lru_cache

# Project root: engine/qglab/config.py -> parent.parent = engine, parent.parent.parent = project root
_PROJECT_ROOT = Path(__file__).resolve().parent.parent.parent
_ENV_FILE = _PROJECT_ROOT / ".env"

# Load .env into os.environ so QGLAB_* overrides reach every process that imports us.
try:
    from dotenv import load_dotenv
    if _ENV_FILE.exists():
        load_dotenv(_ENV_FILE)
except Exception:
    pass


class Settings(BaseSettings):
    # scipy.fft workers; -1 uses every core
    threads: int = 1
    log_level: str = "INFO"
    log_json: bool = False
    # Relative output_dir values in run configs resolve against this
    output_root: str = "runs"

    @field_validator("threads")
    @classmethod
    def _check_threads(cls, value: int) -> int:
        if value == 0 or value < -1:
            raise ValueError(f"QGLAB_THREADS must be positive or -1, got {value}")
        return value

    class Config:
        env_prefix = "QGLAB_"
        env_file = str(_ENV_FILE) if _ENV_FILE.exists() else ".env"
        extra = "ignore"


@lru_cache
def get_settings() -> Settings:
    return Settings()
