import logging
import os
from functools import lru_cache

from dotenv import load_dotenv
from pydantic import BaseModel, Field, ValidationError

from sc_forge.constants import BFS_STATE_CAP, LEDGER_URL
from sc_forge.errors import InputError

# Load environment variables
load_dotenv()


class Settings(BaseModel):
    threads: int = Field(default=1, ge=1)
    log_level: str = "WARNING"
    ledger_url: str = LEDGER_URL
    bfs_cap: int = Field(default=BFS_STATE_CAP, ge=1)


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Settings resolved from the environment (and .env)"""
    try:
        return Settings(
            threads=int(os.getenv("SC_FORGE_THREADS", "1")),
            log_level=os.getenv("SC_FORGE_LOG_LEVEL", "WARNING").upper(),
            ledger_url=os.getenv("SC_FORGE_LEDGER_URL", LEDGER_URL),
            bfs_cap=int(os.getenv("SC_FORGE_BFS_CAP", str(BFS_STATE_CAP))),
        )
    except (ValueError, ValidationError) as exc:
        raise InputError(f"bad SC_FORGE_* setting: {exc}") from exc


def configure_logging(level: str | None = None) -> None:
    logging.basicConfig(
        level=(level or get_settings().log_level).upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
