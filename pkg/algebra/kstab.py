# algebra/kstab.py
from __future__ import annotations
import logging
import random
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Set, Tuple

from algebra.covering import (LocalSystem, CosetAction, covering_map, h2, h2_from_orbit, is_covering, lift_path,
                              ToySystem, matrix_system, quotient_group, tables_isomorphic, toy_coset_system)
from algebra.errors import GlobactError, InternalInconsistency, NotInSubgroup
from algebra.matrices import (Matrix, OrbitStabilizer, Point, SubgroupClosure, base_row, block_rd, column_part,
                              diagonal, e_column, elementary_chain, elementary_generators, embed_rd, identity,
                              mat_inverse, unit_diagonals)
from algebra.action import PointedAction
from algebra.paths import pi0, pi1_by_search, Pi0Result
from algebra.rings import FiniteRing, RingElem
from algebra.steinberg import SteinbergWord, k2_witness, relation_words, theta
from algebra.unimodular import build_um_action, enumerate_um, find_factorization
from common.audit import log_event
from common.report import CheckResult, SequenceReport, SkippedCheck

logger = logging.getLogger("algebra.kstab")


# --- K1 ---

@dataclass(frozen=True)
class K1Class:
    label: int
    representative: Matrix
    det: RingElem


@dataclass
class K1Data:
    """GL_n(R)/E_n(R) with E_n handled through its orbit-stabilizer chain."""
    n: int
    ring: FiniteRing
    chain: OrbitStabilizer
    classes: List[K1Class]
    gl_order: int
    normal: bool
    table: Optional[Tuple[Tuple[int, ...], ...]] = None
    _inverse_reps: List[Matrix] = field(default_factory=list, repr=False)

    @property
    def e_order(self) -> int:
        return self.chain.order

    @property
    def coset_count_matches(self) -> bool:
        return len(self.classes) * self.e_order == self.gl_order

    def class_of(self, sigma: Matrix) -> K1Class:
        if not self._inverse_reps:
            self._inverse_reps = [mat_inverse(c.representative) for c in self.classes]
        for c, rinv in zip(self.classes, self._inverse_reps):
            if self.chain.contains(sigma * rinv):
                return c
        raise InternalInconsistency("matrix outside every K1 class")

    @property
    def base(self) -> K1Class:
        return self.classes[0]


def gl_order(n: int, ring: FiniteRing) -> int:
    """|GL_n(R)| = prod over k <= n of |Um_k(R)|·|R|^(k-1) (GL_k is transitive on Um_k)."""
    order = len(ring.units())
    for k in range(2, n + 1):
        order *= len(enumerate_um(k, ring)) * ring.size ** (k - 1)
    return order


def k1(n: int, ring: FiniteRing, cap: Optional[int] = None) -> K1Data:
    """
    Classes of GL_n/E_n. GL_n is generated by E_n and the unit diagonals, so once
    E_n is normal every class contains some diag(u, 1, ..., 1).
    """
    chain = elementary_chain(n, ring, cap)
    gens = elementary_generators(n, ring)
    diags = unit_diagonals(n, ring)
    normal = all(chain.contains(mat_inverse(d) * s * d) for d in diags for s in gens)
    classes: List[K1Class] = []
    inv_reps: List[Matrix] = []
    for u in ring.units():
        d = diagonal(ring, [u.code] + [1] * (n - 1))
        if any(chain.contains(d * r) for r in inv_reps):
            continue
        classes.append(K1Class(len(classes), d, d.det()))
        inv_reps.append(mat_inverse(d))
    data = K1Data(n, ring, chain, classes, gl_order(n, ring), normal)
    if normal:
        data.table = tuple(tuple(data.class_of(a.representative * b.representative).label for b in classes)
                           for a in classes)
    log_event("CHECK", source="algebra.kstab", what="k1", ring=ring.spec, n=n, classes=len(classes),
              e_order=data.e_order, gl_order=data.gl_order, normal=normal)
    return data


def det_class(data: K1Data, sigma: Matrix) -> RingElem:
    return data.class_of(sigma).det


# --- K0s ---

@dataclass(frozen=True)
class K0sClass:
    """Stable class of a projective module; over finite rings stably free means free."""
    rank: int
    basis: Optional[Tuple[Point, ...]] = None

    def is_base(self, level: int) -> bool:
        return self.rank == level


def alpha(c: K1Class, components: Pi0Result) -> int:
    """[sigma] -> class of e·sigma in pi0(Um_n)."""
    return components.class_of(c.representative.row(1))


def beta(ring: FiniteRing, v: Point) -> K0sClass:
    """
    Kernel of w -> w·v^t with an explicit basis: if e·s = v then the kernel is
    spanned by rows 2..n of (s^-1)^t.
    """
    n = len(v)
    factors = find_factorization(ring, base_row(n), v)
    if factors is None:
        raise GlobactError(f"{v} is not in the elementary orbit of e")
    s = identity(n, ring)
    for m in factors:
        s = s * m
    basis = mat_inverse(s).transpose()
    rows = tuple(basis.row(i) for i in range(2, n + 1))
    for b in rows:
        acc = 0
        for x, y in zip(b, v):
            acc = ring.add(acc, ring.mul(x, y))
        if acc != 0:
            raise InternalInconsistency(f"kernel vector {b} does not annihilate {v}")
    return K0sClass(n - 1, rows)


def gamma(c: K0sClass) -> K0sClass:
    """[P] -> [P + R]."""
    return K0sClass(c.rank + 1)


# --- the sequence context ---

class SequenceContext:
    """Every group and class map the arrows of the sequence need, built once."""

    def __init__(self, n: int, ring: FiniteRing, cap: Optional[int] = None):
        self.n = n
        self.ring = ring
        self.system: LocalSystem = matrix_system(n, ring)
        self.k1n = k1(n, ring, cap)
        self.chain = self.k1n.chain
        self.ep: SubgroupClosure = self.chain.stabilizer
        self.ep2: SubgroupClosure = h2_from_orbit(self.chain, self.system)
        if not self.ep2.is_normal_in(self.ep):
            raise InternalInconsistency("(EP)_2 is not normal in EP")
        self.pi1_labels, self.pi1_reps = self.ep.right_cosets(self.ep2)
        self.um: PointedAction = build_um_action(n, ring, cap)
        self.pi0: Pi0Result = pi0(self.um.action, self.um.base)
        self.k1low = k1(n - 1, ring, cap)
        low = self.k1low
        # (K1,n-1)_2: classes whose diagonal embedding lies in (EP)_2
        self.low2: Set[int] = {c.label for c in low.classes if embed_rd(c.representative) in self.ep2}
        self.quotient_of: Dict[int, int] = {}
        self.quotient_reps: List[int] = []
        for c in low.classes:
            for q, r in enumerate(self.quotient_reps):
                rep = low.classes[r].representative
                if low.class_of(c.representative * mat_inverse(rep)).label in self.low2:
                    self.quotient_of[c.label] = q
                    break
            else:
                self.quotient_of[c.label] = len(self.quotient_reps)
                self.quotient_reps.append(c.label)

    # arrows
    def pi1_class(self, sigma: Matrix) -> int:
        return self.pi1_labels[self.ep.index_of(sigma)]

    def mu(self, sigma: Matrix) -> int:
        if sigma not in self.ep:
            raise NotInSubgroup("mu needs an element of EP")
        return self.quotient_of[self.k1low.class_of(block_rd(sigma)).label]

    def lambda_(self, t: int) -> K1Class:
        rep = self.k1low.classes[self.quotient_reps[t]].representative
        return self.k1n.class_of(embed_rd(rep))

    def eta(self, word: SteinbergWord) -> int:
        if not k2_witness(word, self.ring, self.n):
            raise NotInSubgroup("eta needs a word with theta-image I")
        return self.pi1_class(theta(word, self.ring, self.n))

    def delta(self, word: SteinbergWord) -> SteinbergWord:
        if theta(word, self.ring, self.n) not in self.ep2:
            raise NotInSubgroup("word is not in the (K2)_2 part")
        return word

    def alpha(self, c: K1Class) -> int:
        return alpha(c, self.pi0)

    def beta(self, v: Point) -> K0sClass:
        return beta(self.ring, v)


def _random_e(ctx: SequenceContext, rng: random.Random, length: int = 8) -> Matrix:
    gens = ctx.chain.generators
    out = identity(ctx.n, ctx.ring)
    for _ in range(length):
        out = out * rng.choice(gens)
    return out


def verify_sequence(n: int, ring: FiniteRing, cap: Optional[int] = None, seed: int = 0,
                    words: int = 40) -> SequenceReport:
    """Composites and exactness of the sequence from K2 down to K0s, each with a witness."""
    ctx = SequenceContext(n, ring, cap)
    rng = random.Random(seed)
    report = SequenceReport(ring=ring.spec, n=n)
    base_k1 = ctx.k1n.base.label
    base_pi0 = ctx.pi0.base_class
    base_q = ctx.quotient_of[ctx.k1low.base.label]

    witnesses = relation_words(ring, n, sample=words, seed=seed)
    report.composites.append(_check("eta.delta", all(ctx.eta(ctx.delta(w)) == 0 for w in witnesses),
                                    f"{len(witnesses)} relator words", {"words": len(witnesses)}))
    mu_eta = [ctx.mu(theta(w, ring, n)) for w in witnesses]
    report.composites.append(_check("mu.eta", all(t == base_q for t in mu_eta), f"{len(witnesses)} words"))
    lm = [ctx.lambda_(ctx.mu(s)).label for s in ctx.pi1_reps]
    report.composites.append(_check("lambda.mu", all(x == base_k1 for x in lm),
                                    f"{len(ctx.pi1_reps)} pi1 classes", {"images": lm}))
    al = [ctx.alpha(ctx.lambda_(t)) for t in range(len(ctx.quotient_reps))]
    report.composites.append(_check("alpha.lambda", all(x == base_pi0 for x in al),
                                    f"{len(al)} quotient classes", {"images": al}))
    ba = [ctx.beta(c.representative.row(1)) for c in ctx.k1n.classes]
    report.composites.append(_check("beta.alpha", all(k.is_base(n - 1) for k in ba),
                                    f"{len(ba)} K1 classes",
                                    {"bases": [[list(r) for r in k.basis] for k in ba]}))
    gb = [gamma(ctx.beta(c[0])) for c in ctx.pi0.classes]
    report.composites.append(_check("gamma.beta", all(k.is_base(n) for k in gb), f"{len(gb)} pi0 classes"))

    # exactness at pi1: every coset in ker mu is e_column(v)·diag(1, tau), both factors in (EP)_2
    factor_ok, bad = True, None
    for label, sigma in enumerate(ctx.pi1_reps):
        if ctx.mu(sigma) != base_q:
            continue
        col = e_column(ring, column_part(sigma))
        diag_part = embed_rd(block_rd(sigma))
        if col * diag_part != sigma or col not in ctx.ep2 or diag_part not in ctx.ep2:
            factor_ok, bad = False, label
            break
    report.exactness.append(_check("pi1", factor_ok, "ker mu inside im eta",
                                   {"failing_class": bad, "classes": len(ctx.pi1_reps)}))

    images = {ctx.mu(s) for s in ctx.ep.elements}
    ker_lambda = {t for t in range(len(ctx.quotient_reps)) if ctx.lambda_(t).label == base_k1}
    report.exactness.append(_check("K1,n-1/(K1,n-1)_2", ker_lambda == images,
                                   "ker lambda = im mu", {"ker": sorted(ker_lambda), "im": sorted(images)}))
    ker_alpha = {c.label for c in ctx.k1n.classes if ctx.alpha(c) == base_pi0}
    im_lambda = {ctx.lambda_(t).label for t in range(len(ctx.quotient_reps))}
    report.exactness.append(_check("K1,n", ker_alpha == im_lambda, "ker alpha = im lambda",
                                   {"ker": sorted(ker_alpha), "im": sorted(im_lambda),
                                    "k1_size": len(ctx.k1n.classes)}))
    ker_beta = {k for k, c in enumerate(ctx.pi0.classes) if ctx.beta(c[0]).is_base(n - 1)}
    im_alpha = {ctx.alpha(c) for c in ctx.k1n.classes}
    report.exactness.append(_check("pi0", ker_beta == im_alpha, "ker beta = im alpha",
                                   {"ker": sorted(ker_beta), "im": sorted(im_alpha)}))

    # supporting facts
    low_gens = elementary_generators(n - 1, ring)
    report.extras.append(_check("E_{n-1} inside (EP)_2", all(embed_rd(g) in ctx.ep2 for g in low_gens),
                                f"{len(low_gens)} generators"))
    mu_const = all(ctx.mu(s) == ctx.mu(ctx.pi1_reps[ctx.pi1_labels[k]]) for k, s in enumerate(ctx.ep.elements))
    report.extras.append(_check("mu constant on (EP)_2 cosets", mu_const, f"{len(ctx.ep)} elements"))
    ker_low = {c.label for c in ctx.k1low.classes if ctx.k1n.class_of(embed_rd(c.representative)).label == base_k1}
    normal_ok = ctx.low2 <= ker_low
    for a in ctx.low2:
        for b in ker_low:
            ra = ctx.k1low.classes[a].representative
            rb = ctx.k1low.classes[b].representative
            if ctx.k1low.class_of(rb * ra * mat_inverse(rb)).label not in ctx.low2:
                normal_ok = False
    report.extras.append(_check("(K1,n-1)_2 normal in ker(K1,n-1 -> K1,n)", normal_ok,
                                f"{len(ctx.low2)} x {len(ker_low)} conjugations"))
    report.extras.append(_check("E_n normal in GL_n", ctx.k1n.normal, "generator conjugation"))
    report.extras.append(_check("|K1|·|E_n| = |GL_n|", ctx.k1n.coset_count_matches,
                                f"{len(ctx.k1n.classes)}·{ctx.k1n.e_order} vs {ctx.k1n.gl_order}"))
    det_ok = True
    for c in ctx.k1n.classes:
        for _ in range(5):
            if (c.representative * _random_e(ctx, rng)).det() != c.det:
                det_ok = False
    report.extras.append(_check("det constant on K1 classes", det_ok, "5 samples per class"))
    alpha_ok = all(
        ctx.pi0.class_of((c.representative * _random_e(ctx, rng)).row(1)) == ctx.alpha(c)
        for c in ctx.k1n.classes for _ in range(5))
    report.extras.append(_check("alpha independent of representative", alpha_ok, "5 samples per class"))
    report.extras.append(_check("pi1 vanishes", len(ctx.pi1_reps) == 1,
                                f"|EP| = {len(ctx.ep)}, |(EP)_2| = {len(ctx.ep2)}"))
    report.skipped.append(SkippedCheck(
        name="K2,n exactness",
        reason="K2 elements are carried as relator witnesses; no word-problem decision is attempted"))
    report.sizes = {
        "E": ctx.chain.order, "EP": len(ctx.ep), "EP2": len(ctx.ep2), "pi1": len(ctx.pi1_reps),
        "K1": len(ctx.k1n.classes), "K1_low": len(ctx.k1low.classes), "Um": len(ctx.um.action),
        "pi0": len(ctx.pi0.classes), "GL": ctx.k1n.gl_order,
    }
    log_event("CHECK", source="algebra.kstab", what="sequence", ring=ring.spec, n=n, passed=report.passed)
    return report


def _cover_sequence(report: SequenceReport, toy: ToySystem, h2_sub: SubgroupClosure, cover_sub: SubgroupClosure,
                    lower: CosetAction, tag: str) -> None:
    """
    Exactness of pi1(E) -> pi1(B) -> fiber -> pi0(E) -> pi0(B) for the cover
    E = G/K over B = G/H, with H2 <= K <= H. pi1(B) is H/H2 and pi1(E) is K/K2.
    """
    upper = CosetAction(toy.group, cover_sub, toy.system, name=f"G/{tag}")
    proj = covering_map(upper, lower)
    labels, reps = toy.sub.right_cosets(h2_sub)
    k2 = h2(cover_sub, toy.group, toy.system)
    im_eta = sorted({labels[toy.sub.index_of(k)] for k in cover_sub.elements})
    mu = [upper.label_of(r) for r in reps]
    ker_mu = [c for c, end in enumerate(mu) if end == upper.base]
    report.exactness.append(_check(f"pi1 [{tag}]", ker_mu == im_eta, "ker mu = im eta",
                                   {"ker": ker_mu, "im": im_eta, "K2": len(k2)}))
    fiber = sorted(k for k, v in proj.items() if v == lower.base)
    comps = pi0(upper.action, upper.base)
    ker_lambda = [f for f in fiber if comps.class_of(f) == comps.base_class]
    im_mu = sorted(set(mu))
    report.exactness.append(_check(f"fiber [{tag}]", ker_lambda == im_mu, "ker lambda = im mu",
                                   {"ker": ker_lambda, "im": im_mu}))
    low = pi0(lower.action, lower.base)
    ker_alpha = sorted(k for k, c in enumerate(comps.classes) if low.class_of(proj[c[0]]) == low.base_class)
    im_lambda = sorted({comps.class_of(f) for f in fiber})
    report.exactness.append(_check(f"pi0 [{tag}]", ker_alpha == im_lambda, "ker alpha = im lambda",
                                   {"ker": ker_alpha, "im": im_lambda}))


def verify_toy_sequence(max_loop_length: int = 3, max_window: Optional[int] = None) -> SequenceReport:
    """
    The coset action with nontrivial pi1. The covering sequence is checked for
    the universal cover G/H2 (mu injective) and for the identity cover G/H
    (ker mu is all of pi1); the search route must agree with the algebra and
    loop lifting must map pi1 bijectively onto the fiber.
    """
    toy = toy_coset_system()
    report = SequenceReport(ring="toy:F2^5", n=5)
    h2_sub = h2(toy.sub, toy.group, toy.system, method="transversal")
    h2_sweep = h2(toy.sub, toy.group, toy.system, method="sweep")
    report.extras.append(_check("H2 sweep = transversal", len(h2_sub) == len(h2_sweep), f"|H2| = {len(h2_sub)}"))
    group = quotient_group(toy.sub, h2_sub)
    report.extras.append(_check("pi1 nontrivial", group.order > 1, f"order {group.order}"))
    lower = CosetAction(toy.group, toy.sub, toy.system, name="G/H")
    upper = CosetAction(toy.group, h2_sub, toy.system, name="G/H2")
    proj = covering_map(upper, lower)
    cov = is_covering(proj, upper.action, lower.action)
    report.extras.append(_check("G/H2 -> G/H is a covering", cov.passed, cov.defect,
                                {"witness": cov.witness}))
    fiber = {k for k, v in proj.items() if v == lower.base}
    report.extras.append(_check("fiber size = |pi1|", len(fiber) == group.order, f"{len(fiber)} points"))
    _cover_sequence(report, toy, h2_sub, h2_sub, lower, "H2")
    _cover_sequence(report, toy, h2_sub, toy.sub, lower, "H")
    report.sizes = {"G": len(toy.group), "H": len(toy.sub), "H2": len(h2_sub), "pi1": group.order,
                    "G/H": len(lower), "G/H2": len(upper)}
    search = pi1_by_search(lower.pointed, max_loop_length=max_loop_length, max_window=max_window)
    if search.verdict != "ok":
        report.skipped.append(SkippedCheck(name="search route", reason=search.reason or "undecided"))
        return report
    report.extras.append(_check("search and algebra agree", tables_isomorphic(search.table, group.table),
                                f"search order {search.order}, algebraic order {group.order}"))
    ends = []
    for rep in search.representatives:
        lifted = lift_path(rep.points, upper.action, proj, upper.base)
        ends.append(None if lifted is None else lifted[-1])
    bijective = None not in ends and len(set(ends)) == len(ends) and set(ends) == fiber
    report.extras.append(_check("loop lifting onto fiber", bijective and ends[0] == upper.base,
                                "loop lifting maps pi1 bijectively onto the fiber",
                                {"ends": ends, "fiber": sorted(fiber)}))
    return report


def _check(name: str, passed: bool, detail: str = "", witness: Optional[dict] = None) -> CheckResult:
    if not passed:
        logger.warning("check failed: %s (%s)", name, detail)
    return CheckResult(name=name, passed=bool(passed), detail=detail, witness=witness or {})
