# algebra/covering.py
from __future__ import annotations
import itertools
import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Hashable, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from algebra.action import GlobalAction, LocalGroup, PointedAction, find_pointed_isomorphism
from algebra.errors import GlobactError, InternalInconsistency, NotInSubgroup
from algebra.matrices import (Matrix, OrbitStabilizer, Point, SubgroupClosure, elementary_chain, elementary_group,
                              local_subgroup, mat_inverse, nilpotent_sets, stabilizer_of_e)
from algebra.paths import check_group_table
from algebra.rings import FiniteRing, make_ring
from common.audit import log_event
from common.config import SWEEP_LIMIT

logger = logging.getLogger("algebra.covering")


@dataclass
class LocalSystem:
    """Indices, their order relation and the local subgroups of an ambient group."""
    indices: Tuple[Hashable, ...]
    leq: frozenset
    groups: Dict[Hashable, SubgroupClosure]
    _inverses: Dict[bytes, Matrix] = field(default_factory=dict, repr=False)

    @property
    def maximal(self) -> Tuple[Hashable, ...]:
        return tuple(a for a in self.indices
                     if not any(b != a and (a, b) in self.leq for b in self.indices))

    def inverse(self, m: Matrix) -> Matrix:
        inv = self._inverses.get(m.key)
        if inv is None:
            inv = mat_inverse(m)
            self._inverses[m.key] = inv
        return inv

    def local_action_groups(self, act: Callable[[Any, Matrix], Any]) -> Dict[Hashable, LocalGroup]:
        return {a: LocalGroup.from_matrices(self.groups[a], act=act) for a in self.indices}


def matrix_system(n: int, ring: FiniteRing) -> LocalSystem:
    indices = nilpotent_sets(n)
    leq = frozenset((a, b) for a in indices for b in indices if a.issubset(b))
    return LocalSystem(indices, leq, {a: local_subgroup(a, ring) for a in indices})


# --- coset actions ---

class CosetAction:
    """
    Right cosets H g of a materialized group, labelled 0, 1, ... in the order of
    their first element. The local subgroups act by right multiplication.
    """

    def __init__(self, group: SubgroupClosure, sub: SubgroupClosure, system: LocalSystem, name: str = ""):
        if not sub.is_subgroup_of(group):
            raise NotInSubgroup("subgroup is not contained in the ambient group")
        self.group = group
        self.sub = sub
        self.system = system
        self.labels, self.reps = group.right_cosets(sub)
        groups = system.local_action_groups(self._act)
        self.action = GlobalAction(range(len(self.reps)), system.indices, system.leq, groups,
                                   name=name or f"{group.name}/{sub.name or len(sub)}")
        self.base = 0

    def _act(self, label: int, g: Matrix) -> int:
        return self.labels[self.group.index_of(self.reps[label] * g)]

    def label_of(self, g: Matrix) -> int:
        return self.labels[self.group.index_of(g)]

    @property
    def pointed(self) -> PointedAction:
        return PointedAction(self.action, self.base)

    def __len__(self) -> int:
        return len(self.reps)


def covering_map(upper: CosetAction, lower: CosetAction) -> Dict[int, int]:
    """H' g -> H g for H' inside H over the same ambient group."""
    if upper.group is not lower.group and upper.group.order != lower.group.order:
        raise GlobactError("coset actions over different groups")
    return {label: lower.label_of(rep) for label, rep in enumerate(upper.reps)}


# --- H2 ---

def _h2_generators(points: Iterable[Point], transporter: Callable[[Point], Tuple[Matrix, Matrix]],
                   act: Callable[[Point, Matrix], Point], system: LocalSystem) -> Iterator[Matrix]:
    """
    For every point q with transporter t (base·t = q), conjugates t·a·c^-1·t^-1
    where q·a = q·c, a and c from two maximal local groups. These generate H2
    up to conjugation by H.
    """
    maximal = system.maximal
    for q in points:
        t, tinv = transporter(q)
        reach: Dict[Hashable, Dict[Point, Matrix]] = {}
        for alpha in maximal:
            seen: Dict[Point, Matrix] = {}
            for a in system.groups[alpha].elements:
                r = act(q, a)
                if r == q:
                    if not a.is_identity():
                        yield t * a * tinv
                elif r not in seen:
                    seen[r] = a
            reach[alpha] = seen
        for alpha, beta in itertools.combinations(maximal, 2):
            ra, rb = reach[alpha], reach[beta]
            for r in ra.keys() & rb.keys():
                a, c = ra[r], rb[r]
                if a != c:
                    yield t * a * system.inverse(c) * tinv


def _close_h2(found: Iterable[Matrix], member: Callable[[Matrix], bool], sub_generators: Sequence[Matrix],
              ring: FiniteRing, n: int, cap: Optional[int], name: str) -> SubgroupClosure:
    out = SubgroupClosure(ring, n, cap=cap)
    for g in found:
        if not member(g):
            raise InternalInconsistency("an H2 generator fell outside H")
        if g not in out:
            out.extend([g])
    ambient = SubgroupClosure.from_elements(ring, n, [], sub_generators)
    closed = out.normal_closure_in(ambient, name=name)
    log_event("H2_DONE", source="algebra.covering", name=name, size=len(closed), generators=len(closed.generators))
    return closed


def sweep_work(group: SubgroupClosure, system: LocalSystem) -> int:
    sizes = [len(system.groups[a]) for a in system.maximal]
    return len(group) * sum(x * y for x in sizes for y in sizes)


def h2(sub: SubgroupClosure, group: SubgroupClosure, system: LocalSystem, method: str = "auto",
       sweep_limit: Optional[int] = None, name: str = "H2") -> SubgroupClosure:
    """
    Subgroup of sub generated by its elements x^-1 a b x, x in group, a and b in
    local subgroups. "sweep" runs x over the whole group; "transversal" runs
    over coset representatives and closes under conjugation by sub.
    """
    if not sub.is_subgroup_of(group):
        raise NotInSubgroup("H is not contained in G")
    if method == "auto":
        limit = SWEEP_LIMIT if sweep_limit is None else sweep_limit
        method = "sweep" if sweep_work(group, system) <= limit else "transversal"
    if method == "sweep":
        products = {}
        maximal = system.maximal
        for alpha, beta in itertools.product(maximal, maximal):
            for a in system.groups[alpha].elements:
                for b in system.groups[beta].elements:
                    ab = a * b
                    products.setdefault(ab.key, ab)
        found = []
        for x in group.elements:
            xinv = mat_inverse(x)
            for p in products.values():
                y = xinv * p * x
                if y in sub and not y.is_identity():
                    found.append(y)
        return _close_h2(found, sub.contains, sub.generators, sub.ring, sub.n, sub.cap, name)
    if method != "transversal":
        raise ValueError(f"unknown h2 method {method!r}")
    labels, reps = group.right_cosets(sub)
    inverses = [mat_inverse(t) for t in reps]

    def act(q: int, g: Matrix) -> int:
        return labels[group.index_of(reps[q] * g)]

    found = _h2_generators(range(len(reps)), lambda q: (reps[q], inverses[q]), act, system)
    return _close_h2(found, sub.contains, sub.generators, sub.ring, sub.n, sub.cap, name)


def h2_from_orbit(chain: OrbitStabilizer, system: LocalSystem, name: str = "EP2") -> SubgroupClosure:
    """(EP_n)_2 from the orbit of e: cosets of EP_n are the points of e·E_n."""
    ep = chain.stabilizer

    def transporter(q: Point) -> Tuple[Matrix, Matrix]:
        return chain.transporter(q)

    def act(q: Point, g: Matrix) -> Point:
        return g.act_row(q)

    found = _h2_generators(chain.orbit, transporter, act, system)
    return _close_h2(found, ep.contains, ep.generators, ep.ring, ep.n, ep.cap, name)


# --- coverings ---

@dataclass(frozen=True)
class CoveringResult:
    passed: bool
    witness: Optional[Hashable] = None
    defect: str = ""


def _star(action: GlobalAction, x: Hashable) -> Dict[Hashable, Tuple[Hashable, ...]]:
    return {a: action.orbit_of(x, a) for a in action.indices_at(x)}


def is_covering(p: Mapping[Hashable, Hashable], source: GlobalAction, target: GlobalAction) -> CoveringResult:
    """
    p must restrict to an isomorphism star(b) -> star(p(b)) at every b. The
    frames of a star are the local orbits through its centre.
    """
    fn = p.__getitem__ if isinstance(p, Mapping) else p
    if {fn(x) for x in source.carrier} != set(target.carrier):
        raise GlobactError("covering check needs a surjective map")
    for b in source.carrier:
        up = _star(source, b)
        down = _star(target, fn(b))
        up_points = set().union(*up.values())
        down_points = set().union(*down.values())
        image = {x: fn(x) for x in up_points}
        if len(set(image.values())) != len(up_points):
            return CoveringResult(False, b, "not injective on the star")
        if set(image.values()) != down_points:
            return CoveringResult(False, b, "star image differs from the target star")
        down_sets = [frozenset(o) for o in down.values()]
        for orbit in up.values():
            img = frozenset(image[x] for x in orbit)
            if not any(img <= d for d in down_sets):
                return CoveringResult(False, b, "a frame is not preserved")
        back = {y: x for x, y in image.items()}
        up_sets = [frozenset(o) for o in up.values()]
        for orbit in down.values():
            pre = frozenset(back[y] for y in orbit)
            if not any(pre <= u for u in up_sets):
                return CoveringResult(False, b, "the inverse does not preserve a frame")
    return CoveringResult(True)


@dataclass(frozen=True)
class UniversalCover:
    cover: CosetAction
    base_action: CosetAction
    projection: Dict[int, int]
    covering: CoveringResult
    fiber: Tuple[int, ...]


def universal_cover(n: int, ring: FiniteRing, cap: Optional[int] = None, method: str = "auto") -> UniversalCover:
    """E_n/(EP_n)_2 over E_n/EP_n; E_n is materialized, so desk scale only."""
    system = matrix_system(n, ring)
    e = elementary_group(n, ring, cap)
    ep = stabilizer_of_e(e)
    ep2 = h2(ep, e, system, method=method, name="EP2")
    cover = CosetAction(e, ep2, system, name=f"E{n}/EP2")
    base = CosetAction(e, ep, system, name=f"E{n}/EP")
    proj = covering_map(cover, base)
    result = is_covering(proj, cover.action, base.action)
    fiber = tuple(k for k, v in proj.items() if v == base.base)
    return UniversalCover(cover, base, proj, result, fiber)


def lift_path(word: Sequence[Hashable], source: GlobalAction, p: Mapping[Hashable, Hashable],
              start: Hashable) -> Optional[Tuple[Hashable, ...]]:
    """Lift a stutter-free path of the target through p, one star at a time."""
    if p[start] != word[0]:
        raise GlobactError("start point does not lie over the first point")
    out = [start]
    for y in word[1:]:
        x = out[-1]
        up = {z for a in source.indices_at(x) for z in source.orbit_of(x, a)}
        over = [z for z in up if p[z] == y]
        if len(over) != 1:
            return None
        out.append(over[0])
    return tuple(out)


def universal_cover_uniqueness(cover: CosetAction, other: PointedAction) -> Optional[Dict[int, Hashable]]:
    """Pointed isomorphism between two simply connected covers of one base, None if none is found."""
    return find_pointed_isomorphism(cover.action, cover.base, other.action, other.base)


# --- quotient groups ---

@dataclass(frozen=True)
class GroupTable:
    representatives: Tuple[Matrix, ...]
    table: Tuple[Tuple[int, ...], ...]

    @property
    def order(self) -> int:
        return len(self.table)

    def to_json(self) -> Dict[str, Any]:
        return {"order": self.order, "table": [list(r) for r in self.table],
                "representatives": [m.to_list() for m in self.representatives]}


def quotient_group(group: SubgroupClosure, normal: SubgroupClosure) -> GroupTable:
    if not normal.is_subgroup_of(group):
        raise NotInSubgroup("quotient by a non-subgroup")
    if not normal.is_normal_in(group):
        raise InternalInconsistency("subgroup is not normal, quotient is undefined")
    labels, reps = group.right_cosets(normal)
    table = tuple(tuple(labels[group.index_of(a * b)] for b in reps) for a in reps)
    return GroupTable(tuple(reps), table)


def _element_orders(table: Sequence[Sequence[int]]) -> List[int]:
    out = []
    for g in range(len(table)):
        k, x = 1, g
        while x != 0:
            x = table[x][g]
            k += 1
        out.append(k)
    return sorted(out)


def tables_isomorphic(t1: Sequence[Sequence[int]], t2: Sequence[Sequence[int]]) -> bool:
    """Exact for orders up to 8 (identity is class 0 in both); invariant comparison beyond."""
    m = len(t1)
    if m != len(t2):
        return False
    if _element_orders(t1) != _element_orders(t2):
        return False
    if m > 8:
        ab1 = all(t1[a][b] == t1[b][a] for a in range(m) for b in range(m))
        ab2 = all(t2[a][b] == t2[b][a] for a in range(m) for b in range(m))
        return ab1 == ab2
    for perm in itertools.permutations(range(1, m)):
        f = (0,) + perm
        if all(f[t1[a][b]] == t2[f[a]][f[b]] for a in range(m) for b in range(m)):
            return True
    return False


@dataclass(frozen=True)
class Pi1Result:
    ep_order: int
    ep2_order: int
    e_order: int
    orbit_size: int
    group: GroupTable
    table_problems: Tuple[str, ...] = ()

    @property
    def order(self) -> int:
        return self.group.order


def pi1_algebraic(n: int, ring: FiniteRing, cap: Optional[int] = None) -> Pi1Result:
    """EP_n/(EP_n)_2 without listing E_n."""
    chain = elementary_chain(n, ring, cap)
    system = matrix_system(n, ring)
    ep = chain.stabilizer
    ep2 = h2_from_orbit(chain, system)
    group = quotient_group(ep, ep2)
    problems = tuple(check_group_table(group.table))
    if problems:
        logger.warning("pi1 table fails the group axioms: %s", "; ".join(problems))
    return Pi1Result(len(ep), len(ep2), chain.order, len(chain.orbit), group, problems)


# --- a coset action with nontrivial pi1 ---

TOY_RANK = 5


def _toy_vector(ring: FiniteRing, bits: Sequence[int]) -> Matrix:
    data = np.eye(TOY_RANK + 1, dtype=np.int64)
    data[0, 1:] = list(bits)
    return Matrix(ring, data)


@dataclass(frozen=True)
class ToySystem:
    group: SubgroupClosure
    sub: SubgroupClosure
    system: LocalSystem


def toy_coset_system() -> ToySystem:
    """
    F_2^5 (unipotent 6x6 matrices with one free row) whose local subgroups are
    the coordinate subspaces of dimension at most 2, and H = <(1,1,1,1,1)>.
    Every product of two local elements lies in a plane that meets H trivially,
    so H2 = 1 and pi1(G/H) has order 2.
    """
    ring = make_ring("GF:2")
    unit = [_toy_vector(ring, [1 if k == i else 0 for k in range(TOY_RANK)]) for i in range(TOY_RANK)]
    group = SubgroupClosure(ring, TOY_RANK + 1, unit, name="F2^5")
    subsets = [s for k in range(3) for s in itertools.combinations(range(TOY_RANK), k)]
    groups = {s: SubgroupClosure(ring, TOY_RANK + 1, [unit[i] for i in s]) for s in subsets}
    leq = frozenset((a, b) for a in subsets for b in subsets if set(a) <= set(b))
    sub = SubgroupClosure(ring, TOY_RANK + 1, [_toy_vector(ring, [1] * TOY_RANK)], name="H")
    return ToySystem(group, sub, LocalSystem(tuple(subsets), leq, groups))
