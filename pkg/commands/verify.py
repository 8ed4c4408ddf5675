# commands/verify.py
from __future__ import annotations
import logging

from algebra.kstab import verify_sequence, verify_toy_sequence
from algebra.rings import FiniteRing
from commands.base import EXIT_MATH, BaseCommand, Outcome, status_line
from common.config import RunConfig

logger = logging.getLogger("commands.verify")


class VerifyCommand(BaseCommand):
    name = "verify"

    def run(self, config: RunConfig, ring: FiniteRing) -> Outcome:
        report = verify_sequence(config.n, ring, config.cap_closure, seed=config.seed)
        checks = list(report.checks)
        skipped = list(report.skipped)
        payload = {"sequence": report.model_dump(mode="json")}
        if config.cross_check:
            toy = verify_toy_sequence(max_window=config.cap_window)
            payload["toy"] = toy.model_dump(mode="json")
            checks += [c.model_copy(update={"name": f"toy: {c.name}"}) for c in toy.checks]
            skipped += [s.model_copy(update={"name": f"toy: {s.name}"}) for s in toy.skipped]
        passed, total = status_line(checks)
        code = 0 if passed == total else EXIT_MATH
        for c in checks:
            if not c.passed:
                logger.warning("verify finding: %s %s", c.name, c.witness)
        return Outcome(f"{passed}/{total} checks passed", payload, code, checks, skipped)
