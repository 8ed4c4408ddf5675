# commands/base.py
# Shared runner for the CLI verbs: config echo, timing, exit-code mapping,
# text or JSON rendering and the optional report file.

from __future__ import annotations

import logging
import sys
import time
from typing import Any, Dict, List, Optional, TextIO, Tuple

from pydantic import ValidationError

from algebra.errors import (CapExceeded, EndpointMismatch, GlobactError, InternalInconsistency, MixedRingError,
                            RingSpecError)
from algebra.rings import FiniteRing, make_ring
from common.audit import log_event, save_report, setup_logging
from common.config import RunConfig
from common.report import CheckResult, Report, SkippedCheck

logger = logging.getLogger("commands.base")

EXIT_PASS = 0
EXIT_CONFIG = 1
EXIT_CAP = 2
EXIT_UNDECIDED = 3
EXIT_MATH = 4

_STATUS = {EXIT_PASS: "pass", EXIT_CONFIG: "error", EXIT_CAP: "error", EXIT_UNDECIDED: "undecided",
           EXIT_MATH: "fail"}


class ConfigError(GlobactError, ValueError):
    """Bad input files or flag combinations found after RunConfig validation."""


class Outcome:
    """What a verb hands back: payload, checks, skipped checks, exit code, one summary line."""

    def __init__(self, summary: str, payload: Optional[Dict[str, Any]] = None, exit_code: int = EXIT_PASS,
                 checks: Optional[List[CheckResult]] = None, skipped: Optional[List[SkippedCheck]] = None):
        self.summary = summary
        self.payload = payload or {}
        self.exit_code = exit_code
        self.checks = checks or []
        self.skipped = skipped or []


class BaseCommand:
    name: str = ""

    def run(self, config: RunConfig, ring: FiniteRing) -> Outcome:
        raise NotImplementedError

    def execute(self, config: RunConfig, stream: Optional[TextIO] = None) -> int:
        stream = stream or sys.stdout
        setup_logging(level=config.log_level)
        started = time.perf_counter()
        try:
            ring = make_ring(config.ring)
            outcome = self.run(config, ring)
        except CapExceeded as exc:
            outcome = Outcome(f"cap overflow: {exc}", {"what": exc.what, "cap": exc.cap, "reached": exc.reached},
                              EXIT_CAP)
        except (RingSpecError, EndpointMismatch, MixedRingError, ConfigError, ValidationError) as exc:
            outcome = Outcome(f"config error: {exc}", {"error": str(exc)}, EXIT_CONFIG)
        except InternalInconsistency as exc:
            logger.error("internal inconsistency in %s: %s", self.name, exc)
            outcome = Outcome(f"inconsistency: {exc}", {"error": str(exc)}, EXIT_MATH)
        except GlobactError as exc:
            logger.error("%s failed: %s", self.name, exc)
            outcome = Outcome(f"check failed: {exc}", {"error": str(exc), "kind": type(exc).__name__}, EXIT_MATH)
        elapsed = time.perf_counter() - started
        report = Report(command=self.name, config=config.echo(), status=_STATUS[outcome.exit_code],
                        exit_code=outcome.exit_code, payload=outcome.payload, checks=outcome.checks,
                        skipped=outcome.skipped, wall_time=round(elapsed, 3) if config.timing else None)
        log_event("CHECK", source="commands.base", command=self.name, status=report.status,
                  exit_code=report.exit_code)
        self.emit(config, report, outcome.summary, stream)
        return outcome.exit_code

    def emit(self, config: RunConfig, report: Report, summary: str, stream: TextIO) -> None:
        if config.out is not None:
            save_report(self.name, report.to_dict(), path=config.out)
        if config.format == "json":
            if config.out is None:
                stream.write(report.to_json() + "\n")
            return
        stream.write(f"[{self.name}] {report.status.upper()}: {summary}\n")
        for c in report.checks:
            mark = "ok  " if c.passed else "FAIL"
            stream.write(f"  {mark} {c.name}" + (f" ({c.detail})" if c.detail else "") + "\n")
        for s in report.skipped:
            stream.write(f"  skip {s.name}: {s.reason}\n")


def config_error_exit(exc: ValidationError, command: str, fmt: str = "text",
                      stream: Optional[TextIO] = None) -> int:
    """RunConfig itself failed to validate, so there is no config to echo."""
    stream = stream or sys.stdout
    problems = [f"{'.'.join(str(p) for p in e['loc'])}: {e['msg']}" for e in exc.errors()]
    if fmt == "json":
        report = Report(command=command, status="error", exit_code=EXIT_CONFIG, payload={"errors": problems})
        stream.write(report.to_json() + "\n")
    else:
        stream.write(f"[{command}] ERROR: " + "; ".join(problems) + "\n")
    return EXIT_CONFIG


def status_line(checks: List[CheckResult]) -> Tuple[int, int]:
    passed = sum(1 for c in checks if c.passed)
    return passed, len(checks)
