import pytest

from algebra.action import (GlobalAction, LocalGroup, PointedAction, find_pointed_isomorphism, group_action,
                            is_frame, is_isomorphism, is_morphism, line, product, star, validate)
from algebra.matrices import NilpotentSet, base_row, elementary_group
from algebra.rings import make_ring
from algebra.unimodular import build_um_action


@pytest.fixture(scope="module")
def um3():
    return build_um_action(3, make_ring("GF:2"))


def _two_swaps(a_local, b_local):
    """Indices a <= b on {0, 1, 2} with one swap each."""
    return GlobalAction(
        [0, 1, 2], ["a", "b"], [("a", "a"), ("b", "b"), ("a", "b")],
        {"a": LocalGroup.swap(*a_local), "b": LocalGroup.swap(*b_local)},
        local_sets={"a": a_local, "b": b_local}, name="two-swaps",
    )


def test_line_is_valid():
    assert validate(line(0, 4)) == []
    window = line(0, 1)
    swaps = [i for i in window.indices if i != "*"]
    assert swaps == [0]
    assert window.groups[0].act(0, 1) == 1


def test_compatibility_violation_is_reported():
    broken = _two_swaps((0, 1), (1, 2))
    violations = validate(broken)
    assert [v.axiom for v in violations] == ["compatibility"]
    assert "invariance" in violations[0].detail


def test_reflexivity_violation():
    act = GlobalAction([0], ["a"], [], {"a": LocalGroup.trivial()})
    assert [v.axiom for v in validate(act)] == ["reflexive"]


def test_um_action_is_valid(um3):
    assert validate(um3.action) == []
    assert um3.action.is_single_domain
    assert len(um3.action) == 7


def test_frames(um3):
    act = um3.action
    e = base_row(3)
    a12 = NilpotentSet(3, ((1, 2),))
    assert is_frame(act, [e], NilpotentSet(3, ()))
    assert is_frame(act, [e, (1, 1, 0)], a12)
    assert not is_frame(act, [e, (0, 1, 0)], NilpotentSet(3, ()))
    assert not is_frame(act, [], a12)


def test_morphisms(um3):
    act = um3.action
    e = base_row(3)
    assert is_morphism(lambda x: e, act, act)
    assert is_isomorphism(lambda x: x, act, act)
    # e and (0,1,0) share no local orbit: every local matrix keeps a 1 in front
    f = {x: x for x in act.carrier}
    f[(1, 1, 0)], f[(0, 1, 0)] = (0, 1, 0), (1, 1, 0)
    assert not act.adjacent(e, (0, 1, 0))
    assert not is_morphism(f, act, act)
    assert not is_isomorphism(f, act, act)


def test_star_of_isolated_point():
    act = GlobalAction([0, 1], ["t"], [("t", "t")], {"t": LocalGroup.trivial()})
    s = star(act, 0)
    assert s.carrier == (0,)


def test_star_is_union_of_local_orbits(um3):
    s = star(um3.action, base_row(3))
    assert set(s.carrier) == set(um3.action.neighbors(base_row(3))) | {base_row(3)}
    assert validate(s) == []


def test_product_with_line():
    p = product(line(0, 1), line(0, 1))
    assert len(p) == 4
    assert validate(p) == []


def test_group_action_and_pointed_isomorphism():
    f2 = make_ring("GF:2")
    g = group_action(elementary_group(3, f2))
    assert len(g) == 168
    one = g.carrier[0]
    iso = find_pointed_isomorphism(g, one, g, one)
    assert iso is not None and iso[one] == one


def test_pointed_action_needs_base(um3):
    with pytest.raises(ValueError):
        PointedAction(um3.action, (0, 0, 0))
