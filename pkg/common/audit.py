# common/audit.py
from __future__ import annotations
import os, json, time, logging
from pathlib import Path
from typing import Any, Dict, Optional

from common.config import OUT_DIR

# --- Logger ---
logger = logging.getLogger("common.audit")

# --- Storage ---
def _safe_mkdir(p: Path) -> None:
    try:
        p.mkdir(parents=True, exist_ok=True)
    except Exception:
        pass

def _ts() -> int:
    return int(time.time())

def _jsonable(obj: Any) -> Any:
    try:
        if hasattr(obj, "model_dump"):
            return obj.model_dump(mode="json")
        if isinstance(obj, dict):
            return {str(k): _jsonable(v) for k, v in obj.items()}
        if isinstance(obj, (list, tuple, set, frozenset)):
            return [_jsonable(v) for v in obj]
        if isinstance(obj, (str, int, float, bool)) or obj is None:
            return obj
        if hasattr(obj, "tolist"):
            return obj.tolist()
    except Exception:
        pass
    return str(obj)

def setup_logging(default_level: str = "INFO", level: Optional[str] = None) -> None:
    """Ensure at least one handler; don't override app config if present."""
    root = logging.getLogger()
    if not root.handlers:
        h = logging.StreamHandler()
        fmt = logging.Formatter("%(asctime)s %(levelname)s %(name)s: %(message)s")
        h.setFormatter(fmt)
        root.addHandler(h)
    try:
        name = level or os.getenv("LOG_LEVEL", default_level)
        root.setLevel(getattr(logging, name.upper(), logging.INFO))
    except Exception:
        root.setLevel(logging.INFO)

def log_event(kind: str, *, source: Optional[str] = None, **fields: Any) -> None:
    """One JSON object per line; a logging failure never breaks a computation."""
    try:
        event: Dict[str, Any] = {"kind": kind}
        if source:
            event["source"] = source
        event.update({k: _jsonable(v) for k, v in fields.items()})
        logger.info(json.dumps(event, ensure_ascii=False))
    except Exception:
        pass

# --- File save ---
def save_report(command: str, payload: Dict[str, Any], path: Optional[Path] = None) -> Optional[Path]:
    """
    Write a pretty JSON report. Without an explicit path it lands in
    out/<command>/<timestamp>-<command>.json. Returns the path or None when the
    disk is not writable.
    """
    if path is None:
        base = OUT_DIR / command
        _safe_mkdir(base)
        path = base / f"{_ts()}-{command}.json"
    else:
        _safe_mkdir(path.parent)
    try:
        with open(path, "w", encoding="utf-8") as f:
            json.dump(payload, f, ensure_ascii=False, indent=2, sort_keys=True)
            f.write("\n")
    except Exception:
        logger.warning("could not write report to %s", path)
        return None
    log_event("REPORT_SAVED", command=command, path=str(path))
    return path
