# algebra/action.py
from __future__ import annotations
import itertools
import logging
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Hashable, Iterable, List, Mapping, Optional, Sequence, Tuple

from algebra.matrices import Matrix, SubgroupClosure, local_subgroup, nilpotent_sets

logger = logging.getLogger("algebra.action")

Point = Hashable
Index = Hashable


@dataclass(frozen=True)
class LocalGroup:
    """A finite group acting on the right: act(x, g) = x·g."""
    elements: Tuple[Any, ...]
    act: Callable[[Point, Any], Point]
    multiply: Callable[[Any, Any], Any]
    identity: Any
    generators: Tuple[Any, ...] = ()

    @property
    def order(self) -> int:
        return len(self.elements)

    def orbit_generators(self) -> Tuple[Any, ...]:
        return self.generators or self.elements

    @classmethod
    def from_matrices(cls, group: SubgroupClosure,
                      act: Optional[Callable[[Point, Matrix], Point]] = None) -> "LocalGroup":
        return cls(
            elements=tuple(group.elements),
            act=act or _row_act,
            multiply=_mat_product,
            identity=group.elements[0],
            generators=tuple(group.generators),
        )

    @classmethod
    def trivial(cls) -> "LocalGroup":
        return cls(elements=(0,), act=_fixed, multiply=_add_mod2, identity=0)

    @classmethod
    def swap(cls, a: Point, b: Point) -> "LocalGroup":
        """Z/2 exchanging a and b."""
        def act(x: Point, g: int) -> Point:
            if g == 0:
                return x
            return b if x == a else a if x == b else x
        return cls(elements=(0, 1), act=act, multiply=_add_mod2, identity=0, generators=(1,))


def _row_act(x: Point, g: Matrix) -> Point:
    return g.act_row(x)


def _mat_product(a: Matrix, b: Matrix) -> Matrix:
    return a * b


def _fixed(x: Point, g: Any) -> Point:
    return x


def _add_mod2(a: int, b: int) -> int:
    return (a + b) % 2


@dataclass(frozen=True)
class Violation:
    axiom: str
    detail: str
    witness: Dict[str, Any] = field(default_factory=dict)


class GlobalAction:
    """
    Finite global action: carrier, indices with a reflexive relation, and for
    every index a local set with a local group acting on it. Structure maps
    default to the identity on group elements.
    """

    def __init__(self, carrier: Iterable[Point], indices: Sequence[Index],
                 leq: Iterable[Tuple[Index, Index]], groups: Mapping[Index, LocalGroup],
                 local_sets: Optional[Mapping[Index, Iterable[Point]]] = None,
                 structure: Optional[Mapping[Tuple[Index, Index], Callable[[Any], Any]]] = None,
                 name: str = ""):
        self.carrier: Tuple[Point, ...] = tuple(carrier)
        self.indices: Tuple[Index, ...] = tuple(indices)
        self.leq = frozenset(leq)
        self.groups = dict(groups)
        self.name = name
        self._order = {x: k for k, x in enumerate(self.carrier)}
        local_sets = local_sets or {}
        self.local_sets: Dict[Index, frozenset] = {
            a: frozenset(local_sets[a]) if a in local_sets else frozenset(self.carrier) for a in self.indices
        }
        self.structure = dict(structure or {})
        self._orbit_id: Dict[Index, Dict[Point, int]] = {}
        self._orbits: Dict[Index, List[Tuple[Point, ...]]] = {}
        self._signature: Dict[Point, Tuple[int, ...]] = {}
        self._neighbors: Dict[Point, Tuple[Point, ...]] = {}

    def __len__(self) -> int:
        return len(self.carrier)

    def __contains__(self, x: object) -> bool:
        return x in self._order

    def __repr__(self) -> str:
        return f"GlobalAction({self.name or '?'}, points={len(self.carrier)}, indices={len(self.indices)})"

    def position(self, x: Point) -> int:
        return self._order[x]

    @property
    def is_single_domain(self) -> bool:
        full = frozenset(self.carrier)
        return all(s == full for s in self.local_sets.values())

    def theta(self, alpha: Index, beta: Index) -> Callable[[Any], Any]:
        return self.structure.get((alpha, beta), _identity_map)

    def indices_at(self, x: Point) -> List[Index]:
        return [a for a in self.indices if x in self.local_sets[a]]

    # --- orbits ---
    def _compute_orbits(self, alpha: Index) -> None:
        group = self.groups[alpha]
        gens = group.orbit_generators()
        ids: Dict[Point, int] = {}
        orbits: List[Tuple[Point, ...]] = []
        for x in self.carrier:
            if x not in self.local_sets[alpha] or x in ids:
                continue
            k = len(orbits)
            ids[x] = k
            seen = [x]
            queue = deque([x])
            while queue:
                y = queue.popleft()
                for g in gens:
                    z = group.act(y, g)
                    if z not in ids:
                        ids[z] = k
                        seen.append(z)
                        queue.append(z)
            orbits.append(tuple(sorted(seen, key=self._sort_key)))
        self._orbit_id[alpha] = ids
        self._orbits[alpha] = orbits

    def _sort_key(self, x: Point) -> int:
        return self._order.get(x, len(self._order))

    def orbits(self, alpha: Index) -> List[Tuple[Point, ...]]:
        if alpha not in self._orbits:
            self._compute_orbits(alpha)
        return self._orbits[alpha]

    def orbit_id(self, x: Point, alpha: Index) -> int:
        if alpha not in self._orbit_id:
            self._compute_orbits(alpha)
        return self._orbit_id[alpha].get(x, -1)

    def orbit_of(self, x: Point, alpha: Index) -> Tuple[Point, ...]:
        k = self.orbit_id(x, alpha)
        if k < 0:
            raise KeyError(f"{x!r} is not in the local set of {alpha!r}")
        return self._orbits[alpha][k]

    def signature(self, x: Point) -> Tuple[int, ...]:
        """Orbit id of x for every index, -1 outside the local set."""
        sig = self._signature.get(x)
        if sig is None:
            sig = tuple(self.orbit_id(x, a) for a in self.indices)
            self._signature[x] = sig
        return sig

    def same_local_orbit(self, points: Sequence[Point]) -> bool:
        sigs = [self.signature(p) for p in points]
        for column in zip(*sigs):
            first = column[0]
            if first >= 0 and all(c == first for c in column):
                return True
        return False

    def adjacent(self, x: Point, y: Point) -> bool:
        return x == y or self.same_local_orbit((x, y))

    def neighbors(self, x: Point) -> Tuple[Point, ...]:
        """Points one local move away from x, in carrier order, x excluded."""
        out = self._neighbors.get(x)
        if out is None:
            found = set()
            for a in self.indices_at(x):
                found.update(self.orbit_of(x, a))
            found.discard(x)
            out = tuple(sorted(found, key=self._sort_key))
            self._neighbors[x] = out
        return out

    # --- derived actions ---
    def restrict(self, points: Iterable[Point], name: str = "") -> "GlobalAction":
        """Sub-action on a union of local orbits."""
        keep = frozenset(points)
        carrier = [x for x in self.carrier if x in keep]
        return GlobalAction(
            carrier, self.indices, self.leq, self.groups,
            local_sets={a: self.local_sets[a] & keep for a in self.indices},
            structure=self.structure, name=name or f"{self.name}|{len(carrier)}",
        )


def _identity_map(g: Any) -> Any:
    return g


@dataclass(frozen=True)
class PointedAction:
    action: GlobalAction
    base: Point

    def __post_init__(self):
        if self.base not in self.action:
            raise ValueError(f"base point {self.base!r} not in carrier")


# --- validation ---

def validate(action: GlobalAction, sample_limit: int = 200_000, seed: int = 0) -> List[Violation]:
    """Every failing axiom with a witness; empty when the action is sound."""
    out: List[Violation] = []
    rng = random.Random(seed)
    carrier = frozenset(action.carrier)
    for a in action.indices:
        if (a, a) not in action.leq:
            out.append(Violation("reflexive", f"{a!r} <= {a!r} missing", {"index": repr(a)}))
    known = set(action.indices)
    for a, b in action.leq:
        if a not in known or b not in known:
            out.append(Violation("relation", "relation mentions an unknown index", {"pair": repr((a, b))}))
    for a in action.indices:
        xs = action.local_sets[a]
        if not xs <= carrier:
            out.append(Violation("local-set", f"local set of {a!r} leaves the carrier", {"index": repr(a)}))
            continue
        group = action.groups[a]
        for x in xs:
            if group.act(x, group.identity) != x:
                out.append(Violation("identity", f"identity of {a!r} moves a point", {"point": repr(x)}))
                break
            bad = next((g for g in group.elements if group.act(x, g) not in xs), None)
            if bad is not None:
                out.append(Violation("closure", f"{a!r} leaves its local set", {"point": repr(x)}))
                break
        triples = len(xs) * group.order ** 2
        if triples <= sample_limit:
            it = ((x, g, h) for x in xs for g in group.elements for h in group.elements)
        else:
            pts = sorted(xs, key=action._sort_key)
            it = ((rng.choice(pts), rng.choice(group.elements), rng.choice(group.elements))
                  for _ in range(sample_limit))
        for x, g, h in it:
            if group.act(x, group.multiply(g, h)) != group.act(group.act(x, g), h):
                out.append(Violation("composition", f"x·(gh) != (x·g)·h in {a!r}", {"point": repr(x)}))
                break
    for a, b in sorted(action.leq, key=repr):
        if a == b or a not in known or b not in known:
            continue
        common = action.local_sets[a] & action.local_sets[b]
        ga, gb = action.groups[a], action.groups[b]
        theta = action.theta(a, b)
        broken = None
        for x in common:
            for g in ga.elements:
                y = ga.act(x, g)
                if y not in common:
                    broken = ("invariance", x)
                    break
                if gb.act(x, theta(g)) != y:
                    broken = ("morphism", x)
                    break
            if broken:
                break
        if broken:
            out.append(Violation("compatibility", f"{broken[0]} fails for {a!r} <= {b!r}",
                                 {"point": repr(broken[1]), "pair": repr((a, b))}))
    return out


def is_frame(action: GlobalAction, points: Sequence[Point], alpha: Index) -> bool:
    if not points:
        return False
    xs = action.local_sets.get(alpha)
    if xs is None or any(p not in xs for p in points):
        return False
    k = action.orbit_id(points[0], alpha)
    return all(action.orbit_id(p, alpha) == k for p in points)


def _as_callable(f: Any) -> Callable[[Point], Point]:
    if isinstance(f, Mapping):
        return f.__getitem__
    return f


def morphism_defect(f: Any, a: GlobalAction, b: GlobalAction) -> Optional[Dict[str, Any]]:
    """
    None when f preserves frames. Checked orbit by orbit: the image of each
    local orbit must sit in a single local orbit of the target.
    """
    fn = _as_callable(f)
    for alpha in a.indices:
        for orbit in a.orbits(alpha):
            image = {fn(x) for x in orbit}
            if len(image) == 1 or b.same_local_orbit(tuple(image)):
                continue
            return {"index": repr(alpha), "orbit": [repr(x) for x in orbit[:8]]}
    return None


def is_morphism(f: Any, a: GlobalAction, b: GlobalAction) -> bool:
    return morphism_defect(f, a, b) is None


def is_isomorphism(f: Any, a: GlobalAction, b: GlobalAction) -> bool:
    fn = _as_callable(f)
    image = {x: fn(x) for x in a.carrier}
    if len(set(image.values())) != len(a.carrier) or set(image.values()) != set(b.carrier):
        return False
    back = {y: x for x, y in image.items()}
    return is_morphism(image, a, b) and is_morphism(back, b, a)


def star(action: GlobalAction, x: Point) -> GlobalAction:
    if x not in action:
        raise KeyError(f"{x!r} not in carrier")
    idx = action.indices_at(x)
    local = {a: action.orbit_of(x, a) for a in idx}
    carrier = set().union(*local.values())
    ordered = sorted(carrier, key=action._sort_key)
    return GlobalAction(
        ordered, idx, [(a, b) for a, b in action.leq if a in local and b in local],
        {a: action.groups[a] for a in idx}, local_sets=local,
        structure={k: v for k, v in action.structure.items() if k[0] in local and k[1] in local},
        name=f"star({x!r})",
    )


def product(a: GlobalAction, b: GlobalAction) -> GlobalAction:
    indices = [(i, j) for i in a.indices for j in b.indices]
    leq = [((i, j), (k, l)) for (i, k) in a.leq for (j, l) in b.leq]
    groups: Dict[Index, LocalGroup] = {}
    for i, j in indices:
        ga, gb = a.groups[i], b.groups[j]
        groups[(i, j)] = LocalGroup(
            elements=tuple(itertools.product(ga.elements, gb.elements)),
            act=lambda x, g, ga=ga, gb=gb: (ga.act(x[0], g[0]), gb.act(x[1], g[1])),
            multiply=lambda g, h, ga=ga, gb=gb: (ga.multiply(g[0], h[0]), gb.multiply(g[1], h[1])),
            identity=(ga.identity, gb.identity),
            generators=tuple([(g, gb.identity) for g in ga.orbit_generators()]
                             + [(ga.identity, h) for h in gb.orbit_generators()]),
        )
    local = {(i, j): frozenset(itertools.product(a.local_sets[i], b.local_sets[j])) for i, j in indices}
    structure = {}
    for (i, k) in a.leq:
        for (j, l) in b.leq:
            ta, tb = a.theta(i, k), b.theta(j, l)
            structure[((i, j), (k, l))] = lambda g, ta=ta, tb=tb: (ta(g[0]), tb(g[1]))
    return GlobalAction(itertools.product(a.carrier, b.carrier), indices, leq, groups,
                        local_sets=local, structure=structure, name=f"{a.name}x{b.name}")


def line(lo: int, hi: int) -> GlobalAction:
    """Window [lo, hi] of the line: swaps {k, k+1} plus the global index '*' with the trivial group."""
    if hi < lo:
        raise ValueError(f"empty window [{lo}, {hi}]")
    carrier = list(range(lo, hi + 1))
    swaps = list(range(lo, hi))
    indices: List[Index] = ["*"] + swaps
    leq = [(i, i) for i in indices] + [("*", k) for k in swaps]
    groups: Dict[Index, LocalGroup] = {"*": LocalGroup.trivial()}
    local: Dict[Index, Iterable[Point]] = {"*": carrier}
    for k in swaps:
        groups[k] = LocalGroup.swap(k, k + 1)
        local[k] = (k, k + 1)
    return GlobalAction(carrier, indices, leq, groups, local_sets=local, name=f"L[{lo},{hi}]")


def group_action(group: SubgroupClosure, name: str = "") -> GlobalAction:
    """Matrix group acting on itself by right multiplication through its local subgroups."""
    indices = nilpotent_sets(group.n)
    groups = {a: LocalGroup.from_matrices(local_subgroup(a, group.ring), act=_mat_product) for a in indices}
    leq = [(a, b) for a in indices for b in indices if a.issubset(b)]
    return GlobalAction(group.elements, indices, leq, groups, name=name or group.name)


def find_pointed_isomorphism(a: GlobalAction, a0: Point, b: GlobalAction, b0: Point
                             ) -> Optional[Dict[Point, Point]]:
    """
    Equivariant matching grown from a0 -> b0. Both actions must share their
    indices and local groups; returns the bijection or None.
    """
    if set(a.indices) != set(b.indices) or len(a) != len(b):
        return None
    f: Dict[Point, Point] = {a0: b0}
    queue = deque([a0])
    while queue:
        x = queue.popleft()
        y = f[x]
        for alpha in a.indices_at(x):
            ga, gb = a.groups[alpha], b.groups[alpha]
            for g in ga.orbit_generators():
                x2 = ga.act(x, g)
                y2 = gb.act(y, g)
                if x2 in f:
                    if f[x2] != y2:
                        return None
                else:
                    f[x2] = y2
                    queue.append(x2)
    if len(f) != len(a) or not is_isomorphism(f, a, b):
        return None
    return f
