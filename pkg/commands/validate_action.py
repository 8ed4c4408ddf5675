# commands/validate_action.py
from __future__ import annotations
import logging

from algebra.action import GlobalAction, group_action, validate
from algebra.matrices import elementary_group, general_linear, special_linear
from algebra.rings import FiniteRing
from algebra.unimodular import build_um_action, eum_component
from commands.base import EXIT_MATH, BaseCommand, Outcome
from common.config import RunConfig
from common.report import CheckResult

logger = logging.getLogger("commands.validate_action")


def build_action(config: RunConfig, ring: FiniteRing) -> GlobalAction:
    if config.action == "um":
        return build_um_action(config.n, ring, config.cap_closure).action
    if config.action == "eum":
        return eum_component(build_um_action(config.n, ring, config.cap_closure)).action
    if config.action == "gl":
        return group_action(general_linear(config.n, ring, config.cap_closure), name=f"GL{config.n}({ring.spec})")
    if config.action == "sl":
        return group_action(special_linear(config.n, ring, config.cap_closure), name=f"SL{config.n}({ring.spec})")
    return group_action(elementary_group(config.n, ring, config.cap_closure), name=f"E{config.n}({ring.spec})")


class ValidateActionCommand(BaseCommand):
    name = "validate-action"

    def run(self, config: RunConfig, ring: FiniteRing) -> Outcome:
        action = build_action(config, ring)
        violations = validate(action, seed=config.seed)
        checks = [CheckResult(name=f"global action axioms: {action.name}", passed=not violations,
                              detail=f"{len(action)} points, {len(action.indices)} indices")]
        payload = {
            "action": action.name,
            "carrier": len(action),
            "indices": len(action.indices),
            "violations": [{"axiom": v.axiom, "detail": v.detail} for v in violations[:50]],
            "violation_count": len(violations),
        }
        code = EXIT_MATH if violations else 0
        return Outcome(f"{len(violations)} violation(s) in {action.name}", payload, code, checks)
