# common/config.py
from __future__ import annotations
import logging
import os
from pathlib import Path
from typing import Literal, Optional, get_args

from dotenv import load_dotenv
from pydantic import BaseModel, Field, field_validator

logger = logging.getLogger("common.config")

load_dotenv()


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return default
    try:
        return int(raw)
    except ValueError:
        logger.warning("ignoring non-integer %s=%r, using %d", name, raw, default)
        return default


CLOSURE_CAP = _env_int("GLOBACT_CLOSURE_CAP", 2_000_000)
RING_SOFT_CAP = _env_int("GLOBACT_RING_SOFT_CAP", 64)
CAP_STEPS = _env_int("GLOBACT_CAP_STEPS", 1_000_000)
SWEEP_LIMIT = _env_int("GLOBACT_SWEEP_LIMIT", 500_000)
OUT_DIR = Path(os.getenv("GLOBACT_OUT_DIR", "out"))

Command = Literal["pi0", "pi1", "verify", "homotopy", "validate-action"]
ActionName = Literal["um", "eum", "gl", "sl", "e"]
ACTIONS = get_args(ActionName)


class RunConfig(BaseModel):
    """
    Everything one CLI run needs. Explicit flags win over the GLOBACT_* environment.
    """
    command: Command
    ring: str
    n: int = 3
    cap_closure: int = Field(default_factory=lambda: CLOSURE_CAP)
    cap_steps: int = Field(default_factory=lambda: CAP_STEPS)
    cap_window: Optional[int] = None
    format: Literal["text", "json"] = "text"
    seed: int = 0
    out: Optional[Path] = None
    cross_check: bool = False
    timing: bool = False
    path_a: Optional[Path] = None
    path_b: Optional[Path] = None
    action: ActionName = "um"
    log_level: Optional[str] = None

    @field_validator("ring")
    @classmethod
    def _ring_parses(cls, v: str) -> str:
        from algebra.rings import make_ring

        make_ring(v)  # RingSpecError is a ValueError
        return v.strip()

    @field_validator("n")
    @classmethod
    def _n_at_least_three(cls, v: int) -> int:
        if v < 3:
            raise ValueError(f"n must be >= 3, got {v}")
        return v

    @field_validator("cap_closure", "cap_steps", "cap_window")
    @classmethod
    def _caps_positive(cls, v: Optional[int]) -> Optional[int]:
        if v is not None and v <= 0:
            raise ValueError("caps must be positive")
        return v

    @field_validator("log_level")
    @classmethod
    def _known_level(cls, v: Optional[str]) -> Optional[str]:
        if v is None:
            return v
        up = v.upper()
        if up not in {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}:
            raise ValueError(f"unknown log level {v!r}")
        return up

    def echo(self) -> dict:
        return self.model_dump(mode="json", exclude={"out", "log_level", "timing"})
