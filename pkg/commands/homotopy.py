# commands/homotopy.py
from __future__ import annotations
import json
import logging
from pathlib import Path as FilePath
from typing import Optional

from algebra.action import PointedAction
from algebra.paths import Path, stably_homotopic
from algebra.rings import FiniteRing
from algebra.unimodular import build_um_action
from commands.base import EXIT_UNDECIDED, BaseCommand, ConfigError, Outcome
from common.config import RunConfig

logger = logging.getLogger("commands.homotopy")


def load_path(file: Optional[FilePath], pointed: PointedAction) -> Path:
    """A path file is a JSON list of row vectors (the window)."""
    if file is None:
        raise ConfigError("homotopy needs --path-a and --path-b")
    try:
        raw = json.loads(FilePath(file).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read path file {file}: {exc}") from exc
    if not isinstance(raw, list) or not raw:
        raise ConfigError(f"{file}: expected a non-empty JSON list of rows")
    for row in raw:
        if not isinstance(row, list) or not all(isinstance(c, int) and not isinstance(c, bool) for c in row):
            raise ConfigError(f"{file}: rows must be lists of integers, got {row!r}")
    points = tuple(tuple(row) for row in raw)
    path = Path(points)
    if not path.validate(pointed.action):
        raise ConfigError(f"{file}: not a path in {pointed.action.name}")
    return path


class HomotopyCommand(BaseCommand):
    name = "homotopy"

    def run(self, config: RunConfig, ring: FiniteRing) -> Outcome:
        pointed = build_um_action(config.n, ring, config.cap_closure)
        a = load_path(config.path_a, pointed)
        b = load_path(config.path_b, pointed)
        result = stably_homotopic(a, b, pointed.action, max_steps=config.cap_steps, max_window=config.cap_window)
        payload = {"verdict": result.verdict, "explored": result.explored}
        if result.trace is not None:
            payload["trace"] = result.trace.to_json()
        code = EXIT_UNDECIDED if result.verdict == "undecided" else 0
        return Outcome(f"{result.verdict} after {result.explored} expansions", payload, code)
