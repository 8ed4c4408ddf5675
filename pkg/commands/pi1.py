# commands/pi1.py
from __future__ import annotations
import logging

from algebra.covering import pi1_algebraic, tables_isomorphic
from algebra.paths import pi1_by_search
from algebra.rings import FiniteRing
from algebra.unimodular import build_um_action, eum_component
from commands.base import EXIT_MATH, EXIT_UNDECIDED, BaseCommand, Outcome
from common.config import RunConfig
from common.report import CheckResult, SkippedCheck

logger = logging.getLogger("commands.pi1")


class Pi1Command(BaseCommand):
    name = "pi1"

    def run(self, config: RunConfig, ring: FiniteRing) -> Outcome:
        result = pi1_algebraic(config.n, ring, config.cap_closure)
        table_ok = not result.table_problems
        checks = [CheckResult(name="pi1 group table", passed=table_ok,
                              detail="; ".join(result.table_problems)
                              or f"|EP| = {result.ep_order}, |(EP)_2| = {result.ep2_order}")]
        payload = {
            "ep_order": result.ep_order,
            "ep2_order": result.ep2_order,
            "e_order": result.e_order,
            "orbit_size": result.orbit_size,
            "order": result.order,
            "table": [list(r) for r in result.group.table],
        }
        skipped = []
        code = 0 if table_ok else EXIT_MATH
        if config.cross_check:
            pointed = eum_component(build_um_action(config.n, ring, config.cap_closure))
            search = pi1_by_search(pointed, max_window=config.cap_window, max_steps=config.cap_steps)
            payload["search"] = {"verdict": search.verdict, "order": search.order,
                                 "loops_checked": search.loops_checked, "reason": search.reason}
            if search.verdict == "undecided":
                skipped.append(SkippedCheck(name="routes agree", reason=search.reason or "search undecided"))
                code = code or EXIT_UNDECIDED
            else:
                agree = tables_isomorphic(search.table, result.group.table)
                checks.append(CheckResult(name="routes agree", passed=agree,
                                          detail=f"search {search.order}, algebraic {result.order}"))
                if not agree:
                    code = EXIT_MATH
        summary = f"order {result.order} ({result.ep_order}/{result.ep2_order})"
        return Outcome(summary, payload, code, checks, skipped)
