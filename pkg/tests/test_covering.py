import random

import pytest

from algebra.action import group_action, is_isomorphism, is_morphism, validate
from algebra.covering import (CosetAction, covering_map, h2, is_covering, lift_path, matrix_system, pi1_algebraic,
                              quotient_group, tables_isomorphic, toy_coset_system, universal_cover,
                              universal_cover_uniqueness)
from algebra.errors import NotInSubgroup
from algebra.matrices import SubgroupClosure, elementary, elementary_group, stabilizer_of_e
from algebra.paths import pi1_by_search
from algebra.rings import make_ring
from algebra.steinberg import star_covering_check
from algebra.unimodular import build_um_action, eum_component


@pytest.fixture(scope="module")
def f2():
    return make_ring("GF:2")


@pytest.fixture(scope="module")
def e3(f2):
    return elementary_group(3, f2)


@pytest.fixture(scope="module")
def system(f2):
    return matrix_system(3, f2)


@pytest.fixture(scope="module")
def toy():
    return toy_coset_system()


def test_h2_of_ep_is_everything(e3, system):
    ep = stabilizer_of_e(e3)
    for method in ("sweep", "transversal"):
        assert len(h2(ep, e3, system, method=method)) == 24


def test_h2_rejects_foreign_subgroups(f2, system):
    small = SubgroupClosure(f2, 3, [elementary(3, 1, 2, 1, f2)])
    with pytest.raises(NotInSubgroup):
        h2(elementary_group(3, f2), small, system)


def test_h2_unknown_method(e3, system):
    with pytest.raises(ValueError):
        h2(stabilizer_of_e(e3), e3, system, method="guess")


def _random_subgroup(rng, pool, f2, k):
    gens = rng.sample(list(pool), k)
    return SubgroupClosure(f2, 3, gens)


def test_covering_criterion_on_random_pairs(f2, e3, system):
    rng = random.Random(11)
    agreed = 0
    seen_both = set()
    for _ in range(50):
        h = _random_subgroup(rng, e3.elements[1:], f2, rng.randint(1, 2))
        k = _random_subgroup(rng, h.elements, f2, rng.randint(0, 1)) if len(h) > 1 else h
        h2_sub = h2(h, e3, system)
        upper = CosetAction(e3, k, system)
        lower = CosetAction(e3, h, system)
        result = is_covering(covering_map(upper, lower), upper.action, lower.action)
        criterion = h2_sub.is_subgroup_of(k)
        assert result.passed == criterion, (len(h), len(k), len(h2_sub), result.defect)
        seen_both.add(criterion)
        agreed += 1
    assert agreed == 50
    assert seen_both == {True, False}


def test_h2_methods_agree_on_random_subgroups(f2, e3, system):
    rng = random.Random(5)
    for _ in range(8):
        h = _random_subgroup(rng, e3.elements[1:], f2, 2)
        a = h2(h, e3, system, method="sweep")
        b = h2(h, e3, system, method="transversal")
        assert set(a.elements) == set(b.elements)


def test_universal_cover_over_f2(f2):
    cover = universal_cover(3, f2)
    assert cover.covering.passed
    assert len(cover.fiber) == 1
    assert len(cover.cover) == 7
    eum = eum_component(build_um_action(3, f2))
    assert universal_cover_uniqueness(cover.cover, eum) is not None


def test_pi1_algebraic_f2(f2):
    result = pi1_algebraic(3, f2)
    assert (result.ep_order, result.ep2_order, result.order) == (24, 24, 1)
    assert result.e_order == 168 and result.orbit_size == 7


@pytest.mark.slow
@pytest.mark.parametrize("spec,ep", [("GF:3", None), ("Zmod:4", 768), ("Zmod:6", 5184),
                                     ("GFpoly:2:0,0,1", None)])
def test_pi1_vanishes(spec, ep):
    result = pi1_algebraic(3, make_ring(spec))
    assert result.order == 1
    assert result.ep_order == result.ep2_order
    if ep is not None:
        assert result.ep_order == ep


def test_dual_route_over_f2(f2):
    algebraic = pi1_algebraic(3, f2)
    search = pi1_by_search(eum_component(build_um_action(3, f2)))
    assert search.verdict == "ok"
    assert tables_isomorphic(search.table, algebraic.group.table)


def test_toy_has_order_two_pi1(toy):
    assert len(toy.group) == 32
    assert len(toy.system.indices) == 16
    assert len(toy.system.maximal) == 10
    h2_sub = h2(toy.sub, toy.group, toy.system, method="transversal")
    assert len(h2_sub) == 1
    assert len(h2(toy.sub, toy.group, toy.system, method="sweep")) == 1
    group = quotient_group(toy.sub, h2_sub)
    assert group.order == 2
    assert group.table == ((0, 1), (1, 0))


def test_toy_dual_route(toy):
    lower = CosetAction(toy.group, toy.sub, toy.system)
    search = pi1_by_search(lower.pointed)
    assert search.verdict == "ok"
    assert search.order == 2
    algebraic = quotient_group(toy.sub, h2(toy.sub, toy.group, toy.system))
    assert tables_isomorphic(search.table, algebraic.table)


def test_short_loops_on_toy_are_undecided(toy):
    lower = CosetAction(toy.group, toy.sub, toy.system)
    for window in (None, 4, 6):
        result = pi1_by_search(lower.pointed, max_loop_length=2, max_window=window)
        assert result.verdict == "undecided"
        assert result.order == 0


def test_toy_lifts(toy):
    trivial = SubgroupClosure(toy.group.ring, toy.group.n)
    upper = CosetAction(toy.group, trivial, toy.system)
    lower = CosetAction(toy.group, toy.sub, toy.system)
    proj = covering_map(upper, lower)
    assert is_covering(proj, upper.action, lower.action).passed
    search = pi1_by_search(lower.pointed)
    ends = {lift_path(rep.points, upper.action, proj, upper.base)[-1] for rep in search.representatives}
    assert ends == {k for k, v in proj.items() if v == lower.base}


def test_quotient_table_helpers():
    z2 = ((0, 1), (1, 0))
    assert tables_isomorphic(z2, z2)
    z4 = tuple(tuple((a + b) % 4 for b in range(4)) for a in range(4))
    v4 = tuple(tuple(a ^ b for b in range(4)) for a in range(4))
    assert not tables_isomorphic(z4, v4)
    assert not tables_isomorphic(z2, z4)


def test_steinberg_star_check(f2):
    assert star_covering_check(3, f2).passed


def test_coset_action_ignores_representatives(e3, system):
    ep = stabilizer_of_e(e3)
    cosets = CosetAction(e3, ep, system)
    assert validate(cosets.action) == []
    for g in e3.elements:
        label = cosets.label_of(g)
        assert all(cosets.label_of(h * g) == label for h in ep.elements)
        for alpha in system.indices:
            local = cosets.action.groups[alpha]
            for x in local.elements:
                assert local.act(label, x) == cosets.label_of(g * x)


def test_coset_projection_and_orbit_map_compose(f2, e3, system):
    ep = stabilizer_of_e(e3)
    cosets = CosetAction(e3, ep, system)
    um = build_um_action(3, f2).action
    source = group_action(e3)
    to_cosets = {g: cosets.label_of(g) for g in e3.elements}
    to_rows = {label: rep.row(1) for label, rep in enumerate(cosets.reps)}
    assert is_morphism(to_cosets, source, cosets.action)
    assert is_morphism(to_rows, cosets.action, um)
    assert is_isomorphism(to_rows, cosets.action, um)
    composite = {g: to_rows[c] for g, c in to_cosets.items()}
    assert is_morphism(composite, source, um)
    assert all(composite[g] == g.row(1) for g in e3.elements)


def test_composite_of_coverings_is_a_covering(f2, e3, system):
    rng = random.Random(23)
    for _ in range(10):
        top = _random_subgroup(rng, e3.elements[1:], f2, 2)
        top2 = h2(top, e3, system)
        mid = SubgroupClosure(f2, 3, list(top2.generators) + [rng.choice(top.elements)])
        low = h2(mid, e3, system)
        a, b, c = (CosetAction(e3, s, system) for s in (low, mid, top))
        p, q = covering_map(a, b), covering_map(b, c)
        assert is_covering(p, a.action, b.action).passed
        assert is_covering(q, b.action, c.action).passed
        composite = {x: q[y] for x, y in p.items()}
        assert is_covering(composite, a.action, c.action).passed


def test_two_sheeted_toy_cover_composes_with_identity(toy):
    trivial = SubgroupClosure(toy.group.ring, toy.group.n)
    upper = CosetAction(toy.group, trivial, toy.system)
    lower = CosetAction(toy.group, toy.sub, toy.system)
    p = covering_map(upper, lower)
    q = covering_map(lower, lower)
    assert q == {k: k for k in range(len(lower))}
    composite = {x: q[y] for x, y in p.items()}
    assert is_covering(composite, upper.action, lower.action).passed
    assert len(upper) == 2 * len(lower)


def test_pi1_algebraic_table_passes_group_axioms(f2):
    assert pi1_algebraic(3, f2).table_problems == ()
