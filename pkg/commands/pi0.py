# commands/pi0.py
from __future__ import annotations
import logging

from algebra.paths import pi0
from algebra.rings import FiniteRing
from algebra.unimodular import build_um_action, orbit_partition, um_count_formula
from commands.base import EXIT_MATH, BaseCommand, Outcome
from common.config import RunConfig
from common.report import CheckResult

logger = logging.getLogger("commands.pi0")


class Pi0Command(BaseCommand):
    name = "pi0"

    def run(self, config: RunConfig, ring: FiniteRing) -> Outcome:
        pointed = build_um_action(config.n, ring, config.cap_closure)
        comps = pi0(pointed.action, pointed.base)
        orbits = orbit_partition(config.n, ring, config.cap_closure)
        independent = sorted(len(o) for o in orbits) == sorted(comps.sizes)
        checks = [CheckResult(name="components = E_n orbits", passed=independent,
                              detail=f"{len(comps.classes)} components, {len(orbits)} orbits")]
        expected = um_count_formula(config.n, ring)
        if expected is not None:
            checks.append(CheckResult(name="|Um_n| formula", passed=expected == len(pointed.action),
                                      detail=f"{len(pointed.action)} rows, formula {expected}"))
        payload = {
            "classes": len(comps.classes),
            "sizes": comps.sizes,
            "representatives": [list(c[0]) for c in comps.classes],
            "base_class": comps.base_class,
            "um_size": len(pointed.action),
        }
        code = 0 if all(c.passed for c in checks) else EXIT_MATH
        summary = f"{len(comps.classes)} class(es), sizes {comps.sizes}"
        return Outcome(summary, payload, code, checks)
