# algebra/steinberg.py
from __future__ import annotations
import itertools
import logging
import random
from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Set, Tuple

from algebra.errors import MixedRingError, NotInSubgroup
from algebra.matrices import (Matrix, NilpotentSet, elementary, identity, is_nilpotent_set, local_subgroup,
                              nilpotent_sets)
from algebra.rings import FiniteRing, RingElem

logger = logging.getLogger("algebra.steinberg")


@dataclass(frozen=True)
class Letter:
    i: int
    j: int
    r: RingElem
    exp: int = 1

    def __post_init__(self):
        if self.i == self.j:
            raise ValueError("Steinberg letter needs i != j")
        if self.exp not in (1, -1):
            raise ValueError("exponent must be +1 or -1")

    def normalized(self) -> "Letter":
        """X_ij(r)^-1 = X_ij(-r)."""
        if self.exp == 1:
            return self
        return Letter(self.i, self.j, -self.r, 1)

    def to_json(self) -> List[int]:
        return [self.i, self.j, self.r.code, self.exp]

    def __str__(self) -> str:
        tail = "" if self.exp == 1 else "^-1"
        return f"X{self.i}{self.j}({self.r}){tail}"


class SteinbergWord:
    """
    Word in the generators X_ij(r), kept freely reduced: exponents folded into
    the coefficient, neighbours at the same position merged, X_ij(0) dropped.
    """
    __slots__ = ("letters",)

    def __init__(self, letters: Iterable[Letter] = ()):
        stack: List[Letter] = []
        for raw in letters:
            x = raw.normalized()
            if stack and (stack[-1].i, stack[-1].j) == (x.i, x.j):
                if stack[-1].r.ring != x.r.ring:
                    raise MixedRingError("letters from different rings")
                merged = stack.pop().r + x.r
                if merged.code != 0:
                    stack.append(Letter(x.i, x.j, merged))
            elif x.r.code != 0:
                stack.append(x)
        self.letters: Tuple[Letter, ...] = tuple(stack)

    @classmethod
    def of(cls, ring: FiniteRing, spec: Sequence[Sequence[int]]) -> "SteinbergWord":
        """From (i, j, r) or (i, j, r, exp) tuples; r given as a code or integer."""
        letters = []
        for item in spec:
            i, j, r = item[0], item[1], item[2]
            exp = item[3] if len(item) > 3 else 1
            elem = r if isinstance(r, RingElem) else ring.element(int(r) % ring.size)
            letters.append(Letter(int(i), int(j), elem, int(exp)))
        return cls(letters)

    def __iter__(self) -> Iterator[Letter]:
        return iter(self.letters)

    def __len__(self) -> int:
        return len(self.letters)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, SteinbergWord) and other.letters == self.letters

    def __hash__(self) -> int:
        return hash(self.letters)

    def __mul__(self, other: "SteinbergWord") -> "SteinbergWord":
        return SteinbergWord(self.letters + other.letters)

    def inverse(self) -> "SteinbergWord":
        return SteinbergWord(Letter(x.i, x.j, -x.r) for x in reversed(self.letters))

    @property
    def positions(self) -> Set[Tuple[int, int]]:
        return {(x.i, x.j) for x in self.letters}

    def to_json(self) -> List[List[int]]:
        return [x.to_json() for x in self.letters]

    def __repr__(self) -> str:
        return "SteinbergWord(" + " ".join(str(x) for x in self.letters) + ")"


def commutator_word(u: SteinbergWord, v: SteinbergWord) -> SteinbergWord:
    """u v u^-1 v^-1."""
    return u * v * u.inverse() * v.inverse()


def theta(word: SteinbergWord, ring: FiniteRing, n: int) -> Matrix:
    out = identity(n, ring)
    for x in word:
        if not (1 <= x.i <= n and 1 <= x.j <= n):
            raise ValueError(f"letter {x} outside dimension {n}")
        if x.r.ring != ring:
            raise MixedRingError(f"letter over {x.r.ring.spec}, expected {ring.spec}")
        out = out * elementary(n, x.i, x.j, x.r, ring)
    return out


def k2_witness(word: SteinbergWord, ring: FiniteRing, n: int) -> bool:
    return theta(word, ring, n).is_identity()


def _transitive_closure(pairs: Iterable[Tuple[int, int]]) -> Set[Tuple[int, int]]:
    closed = set(pairs)
    changed = True
    while changed:
        changed = False
        for (i, j), (k, l) in itertools.product(list(closed), list(closed)):
            if j == k and (i, l) not in closed:
                closed.add((i, l))
                changed = True
    return closed


def is_local(word: SteinbergWord, n: int) -> Optional[NilpotentSet]:
    """Smallest nilpotent set holding every letter position, None if there is none."""
    closed = _transitive_closure(word.positions)
    if not is_nilpotent_set(closed, n):
        return None
    return NilpotentSet(n, tuple(sorted(closed)))


def _topological_order(alpha: NilpotentSet) -> List[int]:
    preds: Dict[int, Set[int]] = {k: set() for k in range(1, alpha.n + 1)}
    for i, j in alpha.pairs:
        preds[j].add(i)
    order: List[int] = []
    left = set(preds)
    while left:
        k = min(x for x in left if not (preds[x] & left))
        order.append(k)
        left.remove(k)
    return order


def in_local_subgroup(alpha: NilpotentSet, m: Matrix) -> bool:
    for i in range(1, m.n + 1):
        for j in range(1, m.n + 1):
            c = int(m.data[i - 1, j - 1])
            if i == j and c != 1:
                return False
            if i != j and c != 0 and (i, j) not in alpha:
                return False
    return True


def local_matrix_to_word(alpha: NilpotentSet, m: Matrix) -> SteinbergWord:
    """
    Word with letters in alpha and theta-image m. Rows are cleared in reverse
    topological order of alpha, so the letters of a row never interact.
    """
    if m.n != alpha.n or not in_local_subgroup(alpha, m):
        raise NotInSubgroup(f"matrix is not in the local subgroup of {alpha}")
    succ: Dict[int, List[int]] = {}
    for i, j in alpha.pairs:
        succ.setdefault(i, []).append(j)
    letters = []
    for i in reversed(_topological_order(alpha)):
        for j in sorted(succ.get(i, [])):
            c = int(m.data[i - 1, j - 1])
            if c:
                letters.append(Letter(i, j, m.ring.element(c)))
    return SteinbergWord(letters)


def local_normal_form(word: SteinbergWord, ring: FiniteRing, n: int) -> SteinbergWord:
    alpha = is_local(word, n)
    if alpha is None:
        raise NotInSubgroup("letter positions are not contained in one nilpotent set")
    return local_matrix_to_word(alpha, theta(word, ring, n))


def canonical_local_word(m: Matrix) -> Optional[SteinbergWord]:
    """Normal form over the closure of m's off-diagonal support, None if m is not local."""
    support = {(i + 1, j + 1) for i in range(m.n) for j in range(m.n) if i != j and m.data[i, j] != 0}
    closed = _transitive_closure(support)
    if not is_nilpotent_set(closed, m.n):
        return None
    alpha = NilpotentSet(m.n, tuple(sorted(closed)))
    if not in_local_subgroup(alpha, m):
        return None
    return local_matrix_to_word(alpha, m)


def relation_words(ring: FiniteRing, n: int, sample: Optional[int] = None, seed: int = 0
                   ) -> List[SteinbergWord]:
    """
    Defining relators, each with theta-image I: [X_ij(r), X_jk(s)] X_ik(rs)^-1
    for distinct i, j, k and [X_ij(r), X_kl(s)] for j != k, i != l.
    """
    out: List[SteinbergWord] = []
    elems = ring.elements()
    idx = [(i, j) for i in range(1, n + 1) for j in range(1, n + 1) if i != j]
    for (i, j), (k, l) in itertools.product(idx, idx):
        for r, s in itertools.product(elems, elems):
            if r.code == 0 or s.code == 0:
                continue
            a = SteinbergWord([Letter(i, j, r)])
            b = SteinbergWord([Letter(k, l, s)])
            if j == k and i != l:
                out.append(commutator_word(a, b) * SteinbergWord([Letter(i, l, r * s, -1)]))
            elif j != k and i != l and (i, j) != (k, l):
                out.append(commutator_word(a, b))
    if sample is not None and sample < len(out):
        out = random.Random(seed).sample(out, sample)
    return out


@dataclass(frozen=True)
class StarCoveringCheck:
    passed: bool
    matrices: int
    words: int
    detail: str = ""


def star_covering_check(n: int, ring: FiniteRing) -> StarCoveringCheck:
    """
    theta restricted to the union of local Steinberg subgroups (as normal-form
    words) against the union of the local elementary subgroups: a bijection
    that respects every local subgroup and every intersection.
    """
    words: Dict[SteinbergWord, Matrix] = {}
    matrices: Set[Matrix] = set()
    for alpha in nilpotent_sets(n):
        for m in local_subgroup(alpha, ring):
            matrices.add(m)
            w = local_matrix_to_word(alpha, m)
            if theta(w, ring, n) != m:
                return StarCoveringCheck(False, len(matrices), len(words), f"theta mismatch in {alpha}")
            canon = canonical_local_word(m)
            if canon is None or theta(canon, ring, n) != m:
                return StarCoveringCheck(False, len(matrices), len(words), f"no canonical word in {alpha}")
            sub = is_local(canon, n)
            if sub is None or not sub.issubset(alpha):
                return StarCoveringCheck(False, len(matrices), len(words), f"support escapes {alpha}")
            seen = words.setdefault(canon, m)
            if seen != m:
                return StarCoveringCheck(False, len(matrices), len(words), "two matrices share a word")
    ok = len(words) == len(matrices)
    return StarCoveringCheck(ok, len(matrices), len(words), "" if ok else "counts differ")
