# algebra/rings.py
from __future__ import annotations
import logging
import random
import re
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np
from sympy import isprime

from algebra.errors import MixedRingError, RingSpecError
from common.audit import log_event
from common.config import RING_SOFT_CAP

logger = logging.getLogger("algebra.rings")

_ZMOD_RE = re.compile(r"^Zmod:(\d+)$")
_GF_RE = re.compile(r"^GF:(\d+)$")
_GFPOLY_RE = re.compile(r"^GFpoly:(\d+):(\d+(?:,\d+)+)$")


class RingKind(str, Enum):
    ZMOD = "Zmod"
    GF = "GF"
    GFPOLY = "GFpoly"


class FiniteRing:
    """
    Finite commutative ring with every element encoded as an integer code in
    [0, size). Code 0 is zero and code 1 is one for every kind. For quotients
    F_p[x]/(f) the code of c0 + c1 x + ... is c0 + c1 p + c2 p^2 + ...

    Arithmetic runs through precomputed numpy tables, so rings are meant to be
    small (see GLOBACT_RING_SOFT_CAP).
    """

    def __init__(self, kind: RingKind, modulus: int, poly: Tuple[int, ...] = ()):
        self.kind = kind
        self.modulus = modulus
        self.poly = tuple(poly)
        self.degree = len(self.poly) - 1 if self.poly else 1
        self.size = modulus ** self.degree
        if kind is RingKind.GFPOLY:
            self.spec = f"GFpoly:{modulus}:" + ",".join(str(c) for c in self.poly)
        else:
            self.spec = f"{kind.value}:{modulus}"
        self._build_tables()

    # --- tables ---
    def _build_tables(self) -> None:
        q = self.size
        if self.kind is RingKind.GFPOLY:
            p, d = self.modulus, self.degree
            codes = np.arange(q)
            coeffs = np.stack([(codes // p ** i) % p for i in range(d)], axis=1)
            powers = p ** np.arange(d)
            self.add_table = (((coeffs[:, None, :] + coeffs[None, :, :]) % p) @ powers).astype(np.int64)
            prod = np.zeros((q, q, 2 * d - 1), dtype=np.int64)
            for i in range(d):
                for j in range(d):
                    prod[:, :, i + j] += coeffs[:, None, i] * coeffs[None, :, j]
            # x^d = -(c0 + c1 x + ... + c_{d-1} x^{d-1})
            for k in range(2 * d - 2, d - 1, -1):
                top = prod[:, :, k].copy()
                prod[:, :, k] = 0
                for i in range(d):
                    prod[:, :, k - d + i] -= top * self.poly[i]
            self.mul_table = ((prod[:, :, :d] % p) @ powers).astype(np.int64)
            self.neg_table = (((-coeffs) % p) @ powers).astype(np.int64)
            self._coeffs = coeffs
        else:
            r = np.arange(q, dtype=np.int64)
            self.add_table = (r[:, None] + r[None, :]) % q
            self.mul_table = (r[:, None] * r[None, :]) % q
            self.neg_table = (-r) % q
        hits = self.mul_table == 1
        has = hits.any(axis=1)
        self.inv_table = np.where(has, hits.argmax(axis=1), -1).astype(np.int64)

    # --- identity ---
    def __eq__(self, other: object) -> bool:
        return isinstance(other, FiniteRing) and other.spec == self.spec

    def __hash__(self) -> int:
        return hash(self.spec)

    def __repr__(self) -> str:
        return f"FiniteRing({self.spec!r})"

    def __len__(self) -> int:
        return self.size

    @property
    def is_modular(self) -> bool:
        """True when codes multiply as plain residues mod size."""
        return self.kind is not RingKind.GFPOLY

    # --- elements ---
    def element(self, code: int) -> "RingElem":
        if not 0 <= int(code) < self.size:
            raise ValueError(f"code {code} outside {self.spec}")
        return RingElem(self, int(code))

    def from_int(self, n: int) -> "RingElem":
        """n·1."""
        if self.kind is RingKind.GFPOLY:
            return RingElem(self, n % self.modulus)
        return RingElem(self, n % self.size)

    def from_coeffs(self, coeffs: Sequence[int]) -> "RingElem":
        if self.kind is not RingKind.GFPOLY:
            raise ValueError("coefficient vectors only for polynomial quotients")
        if len(coeffs) > self.degree:
            raise ValueError(f"expected at most {self.degree} coefficients")
        p = self.modulus
        return RingElem(self, sum((int(c) % p) * p ** i for i, c in enumerate(coeffs)))

    def coeffs(self, code: int) -> Tuple[int, ...]:
        if self.kind is RingKind.GFPOLY:
            return tuple(int(c) for c in self._coeffs[code])
        return (int(code),)

    @property
    def zero(self) -> "RingElem":
        return RingElem(self, 0)

    @property
    def one(self) -> "RingElem":
        return RingElem(self, 1)

    def elements(self) -> List["RingElem"]:
        return [RingElem(self, c) for c in range(self.size)]

    def __iter__(self) -> Iterator["RingElem"]:
        return iter(self.elements())

    def units(self) -> List["RingElem"]:
        return [RingElem(self, int(c)) for c in np.flatnonzero(self.inv_table >= 0)]

    def additive_generators(self) -> List[int]:
        """Codes generating (R, +): 1 for residue rings, the monomials x^i otherwise."""
        if self.kind is RingKind.GFPOLY:
            return [self.modulus ** i for i in range(self.degree)]
        return [1]

    # --- code arithmetic ---
    def add(self, a: int, b: int) -> int:
        return int(self.add_table[a, b])

    def mul(self, a: int, b: int) -> int:
        return int(self.mul_table[a, b])

    def neg(self, a: int) -> int:
        return int(self.neg_table[a])

    def sub(self, a: int, b: int) -> int:
        return int(self.add_table[a, self.neg_table[b]])

    def inv(self, a: int) -> Optional[int]:
        b = int(self.inv_table[a])
        return None if b < 0 else b

    def is_unit(self, a: int) -> bool:
        return self.inv_table[a] >= 0

    def format_code(self, code: int) -> str:
        if self.kind is not RingKind.GFPOLY:
            return str(code)
        terms = []
        for i, c in reversed(list(enumerate(self.coeffs(code)))):
            if c == 0:
                continue
            mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            if not mono:
                terms.append(str(c))
            else:
                terms.append(mono if c == 1 else f"{c}{mono}")
        return "+".join(terms) or "0"


@dataclass(frozen=True, slots=True)
class RingElem:
    ring: FiniteRing
    code: int

    def _other(self, other: Union["RingElem", int]) -> int:
        if isinstance(other, int):
            return self.ring.from_int(other).code
        if other.ring != self.ring:
            raise MixedRingError(f"{self.ring.spec} vs {other.ring.spec}")
        return other.code

    def __add__(self, other: Union["RingElem", int]) -> "RingElem":
        return RingElem(self.ring, self.ring.add(self.code, self._other(other)))

    __radd__ = __add__

    def __mul__(self, other: Union["RingElem", int]) -> "RingElem":
        return RingElem(self.ring, self.ring.mul(self.code, self._other(other)))

    __rmul__ = __mul__

    def __neg__(self) -> "RingElem":
        return RingElem(self.ring, self.ring.neg(self.code))

    def __sub__(self, other: Union["RingElem", int]) -> "RingElem":
        return RingElem(self.ring, self.ring.sub(self.code, self._other(other)))

    def __rsub__(self, other: int) -> "RingElem":
        return RingElem(self.ring, self.ring.sub(self._other(other), self.code))

    def is_unit(self) -> bool:
        return self.ring.is_unit(self.code)

    def inverse(self) -> Optional["RingElem"]:
        b = self.ring.inv(self.code)
        return None if b is None else RingElem(self.ring, b)

    @property
    def value(self) -> Union[int, Tuple[int, ...]]:
        """Residue for Zmod/GF, coefficient vector (c0, c1, ...) for quotients."""
        if self.ring.kind is RingKind.GFPOLY:
            return self.ring.coeffs(self.code)
        return self.code

    def __repr__(self) -> str:
        return f"{self.ring.format_code(self.code)} in {self.ring.spec}"

    def __str__(self) -> str:
        return self.ring.format_code(self.code)


def make_ring(spec: str) -> FiniteRing:
    """
    Parse Zmod:<m>, GF:<p> or GFpoly:<p>:<c0,...,ck>. For GFpoly the list is the
    full coefficient vector of the modulus from the constant term up, so its
    last entry is the leading coefficient and must be 1.
    """
    spec = (spec or "").strip()
    if m := _ZMOD_RE.match(spec):
        modulus = int(m.group(1))
        if modulus < 2:
            raise RingSpecError(f"zero ring requested: {spec!r}")
        ring = FiniteRing(RingKind.ZMOD, modulus)
    elif m := _GF_RE.match(spec):
        p = int(m.group(1))
        if not isprime(p):
            raise RingSpecError(f"GF needs a prime, got {p}")
        ring = FiniteRing(RingKind.GF, p)
    elif m := _GFPOLY_RE.match(spec):
        p = int(m.group(1))
        if not isprime(p):
            raise RingSpecError(f"GFpoly needs a prime, got {p}")
        coeffs = tuple(int(c) for c in m.group(2).split(","))
        if any(c >= p for c in coeffs):
            raise RingSpecError(f"coefficients must lie in [0, {p}): {coeffs}")
        if coeffs[-1] != 1:
            raise RingSpecError(f"quotient polynomial must be monic: {coeffs}")
        ring = FiniteRing(RingKind.GFPOLY, p, coeffs)
    else:
        raise RingSpecError(f"malformed ring spec {spec!r}")
    if ring.size > RING_SOFT_CAP:
        logger.warning("ring %s has %d elements (soft cap %d)", ring.spec, ring.size, RING_SOFT_CAP)
        log_event("RING_SIZE_WARNING", source="algebra.rings", ring=ring.spec, size=ring.size, soft_cap=RING_SOFT_CAP)
    return ring


def arith(op: str, a: RingElem, b: Optional[RingElem] = None) -> RingElem:
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "neg":
        return -a
    if op == "sub":
        return a - b
    raise ValueError(f"unknown op {op!r}")


def try_invert(a: RingElem) -> Optional[RingElem]:
    return a.inverse()


def enumerate_elements(ring: FiniteRing) -> List[RingElem]:
    return ring.elements()


def check_axioms(ring: FiniteRing, sample: Optional[int] = None, seed: int = 0) -> List[str]:
    """
    Commutative ring axioms on the tables. Exhaustive for rings up to 64
    elements unless a sample size is given; sampled triples otherwise.
    """
    A, M = ring.add_table, ring.mul_table
    q = ring.size
    problems: List[str] = []
    if sample is None and q <= 64:
        a = np.arange(q)[:, None, None]
        b = np.arange(q)[None, :, None]
        c = np.arange(q)[None, None, :]
    else:
        rng = random.Random(seed)
        k = sample or 2000
        a, b, c = (np.array([rng.randrange(q) for _ in range(k)]) for _ in range(3))
    if not np.array_equal(A, A.T):
        problems.append("addition not commutative")
    if not np.array_equal(M, M.T):
        problems.append("multiplication not commutative")
    if not np.all(A[A[a, b], c] == A[a, A[b, c]]):
        problems.append("addition not associative")
    if not np.all(M[M[a, b], c] == M[a, M[b, c]]):
        problems.append("multiplication not associative")
    if not np.all(M[a, A[b, c]] == A[M[a, b], M[a, c]]):
        problems.append("distributivity fails")
    r = np.arange(q)
    if not np.array_equal(A[0], r):
        problems.append("0 is not an additive identity")
    if not np.array_equal(M[1], r):
        problems.append("1 is not a multiplicative identity")
    if not np.all(A[r, ring.neg_table] == 0):
        problems.append("negation is not an additive inverse")
    if q < 2:
        problems.append("zero ring")
    return problems
