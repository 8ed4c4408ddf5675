# algebra/unimodular.py
from __future__ import annotations
import itertools
import logging
from collections import deque
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from sympy import factorint

from algebra.action import GlobalAction, LocalGroup, PointedAction
from algebra.errors import CapExceeded
from algebra.matrices import (Matrix, Point, base_row, elementary, elementary_generators, local_subgroup,
                              nilpotent_sets)
from algebra.paths import Path, pi0
from algebra.rings import FiniteRing, RingElem, RingKind
from common.config import CLOSURE_CAP

logger = logging.getLogger("algebra.unimodular")


@dataclass(frozen=True)
class UnimodularRow:
    """Row v of codes with a witness w, sum v_i w_i = 1."""
    ring: FiniteRing
    codes: Point
    witness: Point

    @property
    def entries(self) -> Tuple[RingElem, ...]:
        return tuple(RingElem(self.ring, c) for c in self.codes)


def _pairing(ring: FiniteRing, v: Sequence[int], w: Sequence[int]) -> int:
    acc = 0
    for a, b in zip(v, w):
        acc = ring.add(acc, ring.mul(a, b))
    return acc


def completion_witness(ring: FiniteRing, v: Sequence[int]) -> Optional[Point]:
    """Some w with v·w^t = 1, or None."""
    n = len(v)
    for i, c in enumerate(v):
        inv = ring.inv(c)
        if inv is not None:
            w = [0] * n
            w[i] = inv
            return tuple(w)
    for w in itertools.product(range(ring.size), repeat=n):
        if _pairing(ring, v, w) == 1:
            return tuple(w)
    return None


def is_unimodular(ring: FiniteRing, v: Sequence[int]) -> bool:
    return completion_witness(ring, v) is not None


def enumerate_um(n: int, ring: FiniteRing, cap: Optional[int] = None) -> List[UnimodularRow]:
    cap = cap or CLOSURE_CAP
    if ring.size ** n > cap:
        raise CapExceeded("row enumeration", cap, ring.size ** n)
    rows = []
    for v in itertools.product(range(ring.size), repeat=n):
        w = completion_witness(ring, v)
        if w is not None:
            rows.append(UnimodularRow(ring, tuple(v), w))
    # e first, then the remaining rows in code order
    e = base_row(n)
    rows.sort(key=lambda r: (r.codes != e, r.codes))
    return rows


def um_count_formula(n: int, ring: FiniteRing) -> Optional[int]:
    """q^n - 1 over fields, p^(kn) - p^((k-1)n) over Z/p^k; None when neither applies."""
    if ring.kind is RingKind.GF:
        return ring.size ** n - 1
    factors = factorint(ring.size)
    if ring.kind is RingKind.ZMOD and len(factors) == 1:
        (p, k), = factors.items()
        return p ** (k * n) - p ** ((k - 1) * n)
    return None


def build_um_action(n: int, ring: FiniteRing, cap: Optional[int] = None) -> PointedAction:
    """Um_n(R) with the local groups (E_n)_alpha acting by right multiplication."""
    rows = [r.codes for r in enumerate_um(n, ring, cap)]
    indices = nilpotent_sets(n)
    groups = {a: LocalGroup.from_matrices(local_subgroup(a, ring)) for a in indices}
    leq = [(a, b) for a in indices for b in indices if a.issubset(b)]
    action = GlobalAction(rows, indices, leq, groups, name=f"Um{n}({ring.spec})")
    return PointedAction(action, base_row(n))


def find_factorization(ring: FiniteRing, v: Point, w: Point) -> Optional[List[Matrix]]:
    """Elementary generators E_ij(r), r != 0, carrying v to w in as few steps as possible."""
    v, w = tuple(v), tuple(w)
    if v == w:
        return []
    n = len(v)
    steps = [elementary(n, i, j, r, ring)
             for i in range(1, n + 1) for j in range(1, n + 1) if i != j
             for r in range(1, ring.size)]
    parent: Dict[Point, Tuple[Optional[Point], Optional[Matrix]]] = {v: (None, None)}
    queue = deque([v])
    while queue:
        x = queue.popleft()
        for s in steps:
            y = s.act_row(x)
            if y in parent:
                continue
            parent[y] = (x, s)
            if y == w:
                out = []
                cur = y
                while parent[cur][0] is not None:
                    prev, m = parent[cur]
                    out.append(m)
                    cur = prev
                return list(reversed(out))
            queue.append(y)
    return None


def find_path(ring: FiniteRing, v: Point, w: Point) -> Optional[Path]:
    """Path v -> w through single elementary steps; None when w is not in v·E_n(R)."""
    factors = find_factorization(ring, v, w)
    if factors is None:
        return None
    points = [tuple(v)]
    for m in factors:
        points.append(m.act_row(points[-1]))
    return Path(tuple(points))


def eum_component(pointed: PointedAction) -> PointedAction:
    """Restriction to the path component of the base point."""
    comps = pi0(pointed.action, pointed.base)
    keep = comps.classes[comps.base_class]
    name = pointed.action.name.replace("Um", "EUm", 1)
    return PointedAction(pointed.action.restrict(keep, name=name), pointed.base)


def orbit_partition(n: int, ring: FiniteRing, cap: Optional[int] = None) -> List[Tuple[Point, ...]]:
    """Orbits of Um_n(R) under the group generated by all elementary matrices."""
    gens = elementary_generators(n, ring)
    rows = [r.codes for r in enumerate_um(n, ring, cap)]
    seen: Dict[Point, int] = {}
    orbits: List[Tuple[Point, ...]] = []
    for v in rows:
        if v in seen:
            continue
        k = len(orbits)
        seen[v] = k
        members = [v]
        queue = deque([v])
        while queue:
            x = queue.popleft()
            for g in gens:
                y = g.act_row(x)
                if y not in seen:
                    seen[y] = k
                    members.append(y)
                    queue.append(y)
        orbits.append(tuple(sorted(members)))
    return orbits
