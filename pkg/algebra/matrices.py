# algebra/matrices.py
from __future__ import annotations
import itertools
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Dict, FrozenSet, Hashable, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from algebra.errors import CapExceeded, MixedRingError, NotInSubgroup
from algebra.rings import FiniteRing, RingElem
from common.audit import log_event
from common.config import CLOSURE_CAP

logger = logging.getLogger("algebra.matrices")

Point = Tuple[int, ...]
Scalar = Union[RingElem, int]

_PROGRESS_EVERY = 100_000


# --- Matrix ---

class Matrix:
    """
    Square matrix of ring codes. Immutable; equality and hashing go through the
    byte encoding of the entry array.
    """
    __slots__ = ("ring", "n", "data", "key")

    def __init__(self, ring: FiniteRing, data: np.ndarray):
        arr = np.asarray(data, dtype=_dtype(ring))
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError(f"square matrix expected, got shape {arr.shape}")
        arr.setflags(write=False)
        self.ring = ring
        self.n = arr.shape[0]
        self.data = arr
        self.key = arr.tobytes()

    @classmethod
    def from_rows(cls, ring: FiniteRing, rows: Sequence[Sequence[Scalar]]) -> "Matrix":
        return cls(ring, np.array([[_code(ring, x) for x in row] for row in rows]))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Matrix) and self.ring == other.ring and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __mul__(self, other: "Matrix") -> "Matrix":
        return mat_mul(self, other)

    def __repr__(self) -> str:
        return f"Matrix({self.ring.spec}, {self.to_list()})"

    def entry(self, i: int, j: int) -> RingElem:
        """1-based entry (i, j)."""
        return RingElem(self.ring, int(self.data[i - 1, j - 1]))

    def row(self, i: int) -> Point:
        return tuple(int(x) for x in self.data[i - 1])

    def to_list(self) -> List[List[int]]:
        return [[int(x) for x in row] for row in self.data]

    def is_identity(self) -> bool:
        return self.key == identity(self.n, self.ring).key

    def det(self) -> RingElem:
        return RingElem(self.ring, _det_codes(self.ring, self.to_list()))

    def inverse(self) -> Optional["Matrix"]:
        return mat_inverse(self)

    def transpose(self) -> "Matrix":
        return Matrix(self.ring, self.data.T)

    def act_row(self, v: Point) -> Point:
        """Right action on a row vector of codes: v·self."""
        ring = self.ring
        if ring.is_modular:
            out = (np.asarray(v, dtype=np.int64) @ self.data.astype(np.int64)) % ring.size
            return tuple(int(x) for x in out)
        prod = ring.mul_table[np.asarray(v)[:, None], self.data]
        acc = prod[0]
        for i in range(1, self.n):
            acc = ring.add_table[acc, prod[i]]
        return tuple(int(x) for x in acc)


def _dtype(ring: FiniteRing):
    return np.int16 if ring.size < 2 ** 15 else np.int32


def _code(ring: FiniteRing, x: Scalar) -> int:
    if isinstance(x, RingElem):
        if x.ring != ring:
            raise MixedRingError(f"{x.ring.spec} entry in a {ring.spec} matrix")
        return x.code
    return int(x)


def _check_same(a: Matrix, b: Matrix) -> None:
    if a.ring != b.ring or a.n != b.n:
        raise MixedRingError(f"{a.ring.spec}/{a.n} vs {b.ring.spec}/{b.n}")


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    _check_same(a, b)
    ring = a.ring
    if ring.is_modular:
        return Matrix(ring, (a.data.astype(np.int64) @ b.data.astype(np.int64)) % ring.size)
    # prod[i, j, k] = a_ij * b_jk, folded over j with the addition table
    prod = ring.mul_table[a.data[:, :, None], b.data[None, :, :]]
    acc = prod[:, 0, :]
    for j in range(1, a.n):
        acc = ring.add_table[acc, prod[:, j, :]]
    return Matrix(ring, acc)


def identity(n: int, ring: FiniteRing) -> Matrix:
    return _identity(n, ring)


@lru_cache(maxsize=None)
def _identity(n: int, ring: FiniteRing) -> Matrix:
    if n < 1:
        raise ValueError("dimension must be >= 1")
    return Matrix(ring, np.eye(n, dtype=np.int64))


def elementary(n: int, i: int, j: int, r: Scalar, ring: Optional[FiniteRing] = None) -> Matrix:
    """E_ij(r) = I + r e_ij, 1-based."""
    if i == j:
        raise ValueError("elementary matrix needs i != j")
    if not (1 <= i <= n and 1 <= j <= n):
        raise ValueError(f"indices ({i},{j}) out of range for n={n}")
    if ring is None:
        if not isinstance(r, RingElem):
            raise ValueError("ring required for integer coefficients")
        ring = r.ring
    data = np.eye(n, dtype=np.int64)
    data[i - 1, j - 1] = _code(ring, r)
    return Matrix(ring, data)


def diagonal(ring: FiniteRing, values: Sequence[Scalar]) -> Matrix:
    return Matrix(ring, np.diag([_code(ring, v) for v in values]))


def permutation_matrix(ring: FiniteRing, perm: Sequence[int]) -> Matrix:
    """M_pi with e_i M_pi = e_{i pi}; perm[i-1] is the image of i."""
    n = len(perm)
    data = np.zeros((n, n), dtype=np.int64)
    for i, image in enumerate(perm):
        data[i, image - 1] = 1
    return Matrix(ring, data)


def _det_codes(ring: FiniteRing, rows: List[List[int]]) -> int:
    n = len(rows)
    if n == 0:
        return 1
    if n == 1:
        return rows[0][0]
    if n == 2:
        return ring.sub(ring.mul(rows[0][0], rows[1][1]), ring.mul(rows[0][1], rows[1][0]))
    if n <= 4:
        total = 0
        for j in range(n):
            if rows[0][j] == 0:
                continue
            minor = [r[:j] + r[j + 1:] for r in rows[1:]]
            term = ring.mul(rows[0][j], _det_codes(ring, minor))
            total = ring.add(total, term) if j % 2 == 0 else ring.sub(total, term)
        return total
    coeffs = _charpoly_codes(ring, rows)
    return coeffs[n] if n % 2 == 0 else ring.neg(coeffs[n])


def _dot(ring: FiniteRing, u: Sequence[int], v: Sequence[int]) -> int:
    acc = 0
    for x, y in zip(u, v):
        acc = ring.add(acc, ring.mul(x, y))
    return acc


def _charpoly_codes(ring: FiniteRing, rows: List[List[int]]) -> List[int]:
    # division-free (Berkowitz); pivots may be zero divisors
    n = len(rows)
    if n == 0:
        return [1]
    a = rows[0][0]
    top = rows[0][1:]
    col = [r[0] for r in rows[1:]]
    rest = [r[1:] for r in rows[1:]]
    scal = []
    d = col
    for _ in range(n - 1):
        scal.append(ring.neg(_dot(ring, top, d)))
        d = [_dot(ring, row, d) for row in rest]
    toeplitz = [1, ring.neg(a)] + scal
    sub = _charpoly_codes(ring, rest)
    out = []
    for i in range(n + 1):
        acc = 0
        for j in range(min(i, n - 1) + 1):
            acc = ring.add(acc, ring.mul(toeplitz[i - j], sub[j]))
        out.append(acc)
    return out


def det(m: Matrix) -> RingElem:
    return m.det()


def mat_inverse(m: Matrix) -> Optional[Matrix]:
    """Adjugate times det^-1; None when det is not a unit."""
    ring = m.ring
    rows = m.to_list()
    dinv = ring.inv(_det_codes(ring, rows))
    if dinv is None:
        return None
    n = m.n
    if n == 1:
        return Matrix(ring, np.array([[dinv]]))
    out = np.zeros((n, n), dtype=np.int64)
    for i in range(n):
        for j in range(n):
            minor = [r[:j] + r[j + 1:] for k, r in enumerate(rows) if k != i]
            c = _det_codes(ring, minor)
            if (i + j) % 2:
                c = ring.neg(c)
            out[j, i] = ring.mul(c, dinv)
    return Matrix(ring, out)


def commutator(a: Matrix, b: Matrix) -> Matrix:
    """a b a^-1 b^-1."""
    return a * b * mat_inverse(a) * mat_inverse(b)


def block_rd(sigma: Matrix) -> Matrix:
    """Right-diagonal block tau of sigma = [[1, 0], [v, tau]]."""
    e = tuple([1] + [0] * (sigma.n - 1))
    if sigma.row(1) != e:
        raise NotInSubgroup("matrix does not fix e, so it has no block form")
    return Matrix(sigma.ring, sigma.data[1:, 1:])


def column_part(sigma: Matrix) -> Point:
    """The column v of sigma = [[1, 0], [v, tau]]."""
    block_rd(sigma)
    return tuple(int(x) for x in sigma.data[1:, 0])


def embed_rd(tau: Matrix) -> Matrix:
    """diag(1, tau)."""
    data = np.eye(tau.n + 1, dtype=np.int64)
    data[1:, 1:] = tau.data
    return Matrix(tau.ring, data)


def e_column(ring: FiniteRing, v: Sequence[int]) -> Matrix:
    """[[1, 0], [v, I]]."""
    data = np.eye(len(v) + 1, dtype=np.int64)
    data[1:, 0] = list(v)
    return Matrix(ring, data)


def base_row(n: int) -> Point:
    return tuple([1] + [0] * (n - 1))


# --- nilpotent index sets ---

@dataclass(frozen=True, order=True)
class NilpotentSet:
    """A strict partial order on {1..n} given by its pairs (i, j), i before j."""
    n: int
    pairs: Tuple[Tuple[int, int], ...]

    @classmethod
    def make(cls, n: int, pairs: Iterable[Tuple[int, int]]) -> "NilpotentSet":
        ps = tuple(sorted(set((int(i), int(j)) for i, j in pairs)))
        if not is_nilpotent_set(ps, n):
            raise ValueError(f"{ps} is not a nilpotent subset of J_{n}")
        return cls(n, ps)

    @property
    def pair_set(self) -> FrozenSet[Tuple[int, int]]:
        return frozenset(self.pairs)

    def __len__(self) -> int:
        return len(self.pairs)

    def __contains__(self, pair: object) -> bool:
        return pair in self.pair_set

    def issubset(self, other: "NilpotentSet") -> bool:
        return self.pair_set <= other.pair_set

    def intersect(self, other: "NilpotentSet") -> "NilpotentSet":
        return intersect(self, other)

    def __str__(self) -> str:
        return "{" + ",".join(f"{i}{j}" for i, j in self.pairs) + "}"


def is_nilpotent_set(pairs: Iterable[Tuple[int, int]], n: Optional[int] = None) -> bool:
    ps = set(pairs)
    for i, j in ps:
        if i == j or (j, i) in ps:
            return False
        if n is not None and not (1 <= i <= n and 1 <= j <= n):
            return False
    for (i, j), (k, l) in itertools.product(ps, ps):
        if j == k and (i, l) not in ps:
            return False
    return True


def intersect(alpha: NilpotentSet, beta: NilpotentSet) -> NilpotentSet:
    if alpha.n != beta.n:
        raise MixedRingError("nilpotent sets of different dimensions")
    return NilpotentSet(alpha.n, tuple(sorted(alpha.pair_set & beta.pair_set)))


def max_delta(n: int) -> NilpotentSet:
    return NilpotentSet(n, tuple((i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)))


def sn_on_index(perm: Sequence[int], alpha: NilpotentSet) -> NilpotentSet:
    return NilpotentSet(alpha.n, tuple(sorted((perm[i - 1], perm[j - 1]) for i, j in alpha.pairs)))


def sn_conjugate(perm: Sequence[int], m: Matrix) -> Matrix:
    """M_{pi^-1} m M_pi."""
    p = permutation_matrix(m.ring, perm)
    return mat_inverse(p) * m * p


@lru_cache(maxsize=None)
def nilpotent_sets(n: int) -> Tuple[NilpotentSet, ...]:
    """Phi_n ordered by size then pairs. Every member sits inside some permuted delta."""
    if n < 1:
        raise ValueError("n must be positive")
    delta = max_delta(n)
    found = set()
    for perm in itertools.permutations(range(1, n + 1)):
        top = sn_on_index(perm, delta).pairs
        for k in range(len(top) + 1):
            for sub in itertools.combinations(top, k):
                if is_nilpotent_set(sub):
                    found.add(tuple(sorted(sub)))
    return tuple(sorted((NilpotentSet(n, ps) for ps in found), key=lambda a: (len(a), a.pairs)))


@lru_cache(maxsize=None)
def maximal_nilpotent_sets(n: int) -> Tuple[NilpotentSet, ...]:
    delta = max_delta(n)
    return tuple(sorted({sn_on_index(p, delta) for p in itertools.permutations(range(1, n + 1))}))


# --- subgroups ---

class SubgroupClosure:
    """
    Finite matrix group kept as an explicit element list (BFS order from the
    identity) plus the generators that produced it.
    """

    def __init__(self, ring: FiniteRing, n: int, generators: Iterable[Matrix] = (),
                 cap: Optional[int] = None, name: str = ""):
        self.ring = ring
        self.n = n
        self.cap = cap or CLOSURE_CAP
        self.name = name
        self.generators: List[Matrix] = []
        one = identity(n, ring)
        self.elements: List[Matrix] = [one]
        self._index: Dict[bytes, int] = {one.key: 0}
        self.extend(generators)
        if name:
            log_event("CLOSURE_DONE", source="algebra.matrices", name=name, ring=ring.spec, n=n,
                      size=len(self.elements), generators=len(self.generators))

    @classmethod
    def from_elements(cls, ring: FiniteRing, n: int, elements: Iterable[Matrix],
                      generators: Sequence[Matrix], name: str = "") -> "SubgroupClosure":
        """Wrap an element set already known to be a group."""
        g = cls(ring, n, name="")
        g.name = name
        for m in elements:
            if m.key not in g._index:
                g._index[m.key] = len(g.elements)
                g.elements.append(m)
        g.generators = list(generators)
        return g

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator[Matrix]:
        return iter(self.elements)

    def __contains__(self, m: object) -> bool:
        return isinstance(m, Matrix) and m.key in self._index

    def contains(self, m: Matrix) -> bool:
        return m in self

    def index_of(self, m: Matrix) -> int:
        return self._index[m.key]

    @property
    def order(self) -> int:
        return len(self.elements)

    def _add(self, m: Matrix) -> None:
        self._index[m.key] = len(self.elements)
        self.elements.append(m)
        size = len(self.elements)
        if size > self.cap:
            raise CapExceeded(f"closure {self.name or ''}".strip(), self.cap, size)
        if size % _PROGRESS_EVERY == 0:
            log_event("CLOSURE_PROGRESS", source="algebra.matrices", name=self.name, size=size)

    def extend(self, new_generators: Iterable[Matrix]) -> bool:
        """Add generators and close again; True when the group grew."""
        grew = False
        for g in new_generators:
            if g.ring != self.ring or g.n != self.n:
                raise MixedRingError("generator from another ring or dimension")
            if g in self:
                continue
            self.generators.append(g)
            grew = True
            frontier: List[Matrix] = []
            for x in list(self.elements):
                y = x * g
                if y.key not in self._index:
                    self._add(y)
                    frontier.append(y)
            while frontier:
                nxt: List[Matrix] = []
                for x in frontier:
                    for s in self.generators:
                        y = x * s
                        if y.key not in self._index:
                            self._add(y)
                            nxt.append(y)
                frontier = nxt
        return grew

    def is_subgroup_of(self, other: "SubgroupClosure") -> bool:
        return all(g in other for g in self.generators)

    def is_normal_in(self, group: "SubgroupClosure") -> bool:
        for g in group.generators:
            gi = mat_inverse(g)
            if any(gi * s * g not in self for s in self.generators):
                return False
        return True

    def normal_closure_in(self, group: "SubgroupClosure", name: str = "") -> "SubgroupClosure":
        """Smallest subgroup normalized by group that contains self."""
        out = SubgroupClosure(self.ring, self.n, self.generators, cap=self.cap)
        conj = [(mat_inverse(g), g) for g in group.generators]
        i = 0
        while i < len(out.generators):
            s = out.generators[i]
            for gi, g in conj:
                c = gi * s * g
                if c not in out:
                    out.extend([c])
            i += 1
        out.name = name
        return out

    def right_cosets(self, sub: "SubgroupClosure") -> Tuple[List[int], List[Matrix]]:
        """
        Label every element by its right coset sub*g. Labels follow the BFS
        position of the first (minimal) representative.
        """
        labels = [-1] * len(self.elements)
        reps: List[Matrix] = []
        for pos, g in enumerate(self.elements):
            if labels[pos] >= 0:
                continue
            label = len(reps)
            reps.append(g)
            for h in sub.elements:
                labels[self._index[(h * g).key]] = label
        return labels, reps


def closure(generators: Iterable[Matrix], ring: Optional[FiniteRing] = None, n: Optional[int] = None,
            cap: Optional[int] = None, name: str = "") -> SubgroupClosure:
    gens = list(generators)
    if not gens and (ring is None or n is None):
        raise ValueError("ring and n are required for the trivial group")
    ring = ring or gens[0].ring
    n = n or gens[0].n
    return SubgroupClosure(ring, n, gens, cap=cap, name=name)


def elementary_generators(n: int, ring: FiniteRing) -> List[Matrix]:
    return [elementary(n, i, j, g, ring)
            for i in range(1, n + 1) for j in range(1, n + 1) if i != j
            for g in ring.additive_generators()]


def unit_diagonals(n: int, ring: FiniteRing) -> List[Matrix]:
    """diag(u, 1, ..., 1) for every unit u != 1."""
    return [diagonal(ring, [u.code] + [1] * (n - 1)) for u in ring.units() if u.code != 1]


def elementary_group(n: int, ring: FiniteRing, cap: Optional[int] = None) -> SubgroupClosure:
    return SubgroupClosure(ring, n, elementary_generators(n, ring), cap=cap, name=f"E{n}")


def general_linear(n: int, ring: FiniteRing, cap: Optional[int] = None) -> SubgroupClosure:
    return SubgroupClosure(ring, n, elementary_generators(n, ring) + unit_diagonals(n, ring),
                           cap=cap, name=f"GL{n}")


def special_linear(n: int, ring: FiniteRing, cap: Optional[int] = None) -> SubgroupClosure:
    """Determinant-one part of general_linear."""
    gl = general_linear(n, ring, cap)
    gens = elementary_generators(n, ring) + [
        diagonal(ring, [u.code, ring.inv(u.code)] + [1] * (n - 2)) for u in ring.units() if u.code != 1]
    return SubgroupClosure.from_elements(ring, n, (m for m in gl.elements if m.det().code == 1), gens,
                                         name=f"SL{n}")


def special_linear_order(n: int, q: int) -> int:
    """|SL_n(F_q)|."""
    order = 1
    for i in range(n):
        order *= q ** n - q ** i
    return order // (q - 1)


@lru_cache(maxsize=None)
def local_subgroup(alpha: NilpotentSet, ring: FiniteRing) -> SubgroupClosure:
    """(E_n)_alpha = {I + sum r_ij e_ij : (i, j) in alpha}, listed directly."""
    n = alpha.n
    gens = [elementary(n, i, j, g, ring) for i, j in alpha.pairs for g in ring.additive_generators()]
    elements = []
    for values in itertools.product(range(ring.size), repeat=len(alpha)):
        data = np.eye(n, dtype=np.int64)
        for (i, j), r in zip(alpha.pairs, values):
            data[i - 1, j - 1] = r
        elements.append(Matrix(ring, data))
    return SubgroupClosure.from_elements(ring, n, elements, gens, name=f"local{alpha}")


def stabilizer_of_e(group: SubgroupClosure, name: str = "EP") -> SubgroupClosure:
    e = base_row(group.n)
    out = SubgroupClosure(group.ring, group.n, cap=group.cap)
    for g in group.elements:
        if g.row(1) == e and g not in out:
            out.extend([g])
    out.name = name
    log_event("CLOSURE_DONE", source="algebra.matrices", name=name, ring=group.ring.spec,
              n=group.n, size=len(out), generators=len(out.generators))
    return out


class OrbitStabilizer:
    """
    Orbit of a row vector under a generated group, with a transversal and the
    stabilizer built from Schreier generators. Membership in the whole group is
    decided by sifting through the transversal, so the group itself is never
    listed.
    """

    def __init__(self, generators: Sequence[Matrix], base: Point, cap: Optional[int] = None,
                 name: str = ""):
        if not generators:
            raise ValueError("at least one generator required")
        self.ring = generators[0].ring
        self.n = generators[0].n
        self.base = tuple(base)
        self.generators = list(generators)
        self.name = name
        one = identity(self.n, self.ring)
        inverses = [mat_inverse(s) for s in self.generators]
        self.orbit: List[Point] = [self.base]
        self._pos: Dict[Point, int] = {self.base: 0}
        self.transversal: List[Matrix] = [one]
        self.transversal_inv: List[Matrix] = [one]
        i = 0
        while i < len(self.orbit):
            q = self.orbit[i]
            for s, si in zip(self.generators, inverses):
                r = s.act_row(q)
                if r not in self._pos:
                    self._pos[r] = len(self.orbit)
                    self.orbit.append(r)
                    self.transversal.append(self.transversal[i] * s)
                    self.transversal_inv.append(si * self.transversal_inv[i])
            i += 1
        self.stabilizer = SubgroupClosure(self.ring, self.n, cap=cap)
        for i, q in enumerate(self.orbit):
            for s in self.generators:
                j = self._pos[s.act_row(q)]
                sg = self.transversal[i] * s * self.transversal_inv[j]
                if sg not in self.stabilizer:
                    self.stabilizer.extend([sg])
        self.stabilizer.name = f"{name}-stab" if name else "stab"
        log_event("CLOSURE_DONE", source="algebra.matrices", name=self.stabilizer.name,
                  ring=self.ring.spec, n=self.n, size=len(self.stabilizer),
                  orbit=len(self.orbit), order=self.order)

    @property
    def order(self) -> int:
        return len(self.orbit) * len(self.stabilizer)

    def position(self, point: Point) -> Optional[int]:
        return self._pos.get(tuple(point))

    def contains(self, g: Matrix) -> bool:
        j = self._pos.get(g.act_row(self.base))
        if j is None:
            return False
        return g * self.transversal_inv[j] in self.stabilizer

    def __contains__(self, g: object) -> bool:
        return isinstance(g, Matrix) and self.contains(g)

    def transporter(self, point: Point) -> Optional[Tuple[Matrix, Matrix]]:
        """(t, t^-1) with base·t = point."""
        j = self._pos.get(tuple(point))
        if j is None:
            return None
        return self.transversal[j], self.transversal_inv[j]


def elementary_chain(n: int, ring: FiniteRing, cap: Optional[int] = None) -> OrbitStabilizer:
    """E_n(R) through the orbit of e; its stabilizer is EP_n(R)."""
    return OrbitStabilizer(elementary_generators(n, ring), base_row(n), cap=cap, name=f"E{n}")
