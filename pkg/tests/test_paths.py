import random

import pytest

from algebra.action import GlobalAction, LocalGroup, PointedAction
from algebra.errors import EndpointMismatch
from algebra.matrices import base_row
from algebra.paths import (HomotopyTrace, Path, compose, edge_loops, elementary_neighbors, enumerate_loops, in_point,
                           inverse, pi0, pi1_by_search, reduced, stably_homotopic, ter_point, translate)
from algebra.rings import make_ring
from algebra.unimodular import build_um_action, eum_component


@pytest.fixture(scope="module")
def um3():
    return build_um_action(3, make_ring("GF:2"))


def random_path(action, start, steps, rng):
    points = [start]
    for _ in range(steps):
        points.append(rng.choice(action.neighbors(points[-1])))
    return Path(tuple(points))


def cyclic_action(k):
    """Z/k acting on itself through one global index."""
    gens = LocalGroup(elements=tuple(range(k)), act=lambda x, g: (x + g) % k,
                      multiply=lambda g, h: (g + h) % k, identity=0, generators=(1,))
    return GlobalAction(range(k), ["*"], [("*", "*")], {"*": gens}, name=f"Z/{k}")


def test_window_is_canonical():
    w = Path(("a", "a", "b", "b"))
    assert w.points == ("a", "b")
    assert w.ld == 1 and w.ud == 2
    assert w.value_at(-10) == "a" and w.value_at(10) == "b"
    assert Path(("c", "c")).ld == 0


def test_endpoints(um3):
    e = base_row(3)
    w = Path((e, (1, 1, 0)))
    assert (in_point(w), ter_point(w)) == (e, (1, 1, 0))
    assert in_point(inverse(w)) == ter_point(w)
    c = Path.constant(e)
    assert in_point(c) == ter_point(c) == e


def test_compose_and_inverse():
    w = Path(("a", "b"))
    w2 = Path(("b", "c"))
    assert compose(w, w2).points == ("a", "b", "c")
    assert compose(w, Path.constant("b")) == w
    with pytest.raises(EndpointMismatch):
        compose(w, w)
    assert inverse(Path(("a", "b", "c"))).points == ("c", "b", "a")
    assert inverse(inverse(w)) == w
    assert inverse(Path.constant("a")) == Path.constant("a")
    assert translate(w, 3).ld == 3


def test_elementary_neighbors_patterns(um3):
    e = base_row(3)
    y = (1, 1, 0)
    w = Path((e, y))
    moves = elementary_neighbors(w, um3.action)
    assert w not in moves
    # (x,y,x) -> (x,x,x) collapses the back-and-forth path
    back = Path((e, y, e))
    assert Path.constant(e) in elementary_neighbors(back, um3.action)
    for m in moves:
        assert m.validate(um3.action)
        assert in_point(m) == e and ter_point(m) == y


def test_same_path_needs_no_moves(um3):
    w = Path((base_row(3), (1, 1, 0), (1, 1, 1)))
    result = stably_homotopic(w, w, um3.action)
    assert result.verdict == "yes"
    assert len(result.trace.paths) == 1


def test_right_unit(um3):
    w = Path((base_row(3), (1, 0, 1), (0, 0, 1)))
    assert stably_homotopic(w, compose(w, Path.constant(ter_point(w))), um3.action).verdict == "yes"


def test_loops_contract_over_f2(um3):
    rng = random.Random(7)
    e = base_row(3)
    for _ in range(100):
        w = random_path(um3.action, e, rng.randint(1, 5), rng)
        loop = compose(w, inverse(w))
        result = stably_homotopic(loop, Path.constant(e), um3.action)
        assert result.verdict == "yes"
        assert result.trace.verify(um3.action)
        assert reduced(result.trace.paths[0]) == reduced(loop)
        assert reduced(result.trace.paths[-1]) == (e,)


def test_step_cap_gives_undecided(um3):
    e = base_row(3)
    w = Path((e, (1, 1, 0), (0, 1, 0), (0, 1, 1)))
    result = stably_homotopic(compose(w, inverse(w)), Path.constant(e), um3.action, max_steps=1)
    assert result.verdict == "undecided"


def test_endpoints_must_agree(um3):
    e = base_row(3)
    with pytest.raises(EndpointMismatch):
        stably_homotopic(Path((e, (1, 1, 0))), Path.constant(e), um3.action)


def test_trace_reverse_and_join(um3):
    e = base_row(3)
    loop = Path((e, (1, 1, 0), e))
    trace = stably_homotopic(loop, Path.constant(e), um3.action).trace
    assert trace.reversed().reversed() == trace
    joined = trace.then(trace.reversed())
    assert joined.verify(um3.action)
    with pytest.raises(EndpointMismatch):
        trace.then(trace)
    assert isinstance(joined, HomotopyTrace)


def test_pi0_of_um3(um3):
    comps = pi0(um3.action, um3.base)
    assert len(comps.classes) == 1
    assert comps.sizes == [7]
    assert comps.base_class == 0


def test_pi0_of_trivial_action():
    act = GlobalAction([0, 1, 2], ["t"], [("t", "t")], {"t": LocalGroup.trivial()})
    assert pi0(act).sizes == [1, 1, 1]


def test_loop_enumeration(um3):
    e = base_row(3)
    loops = enumerate_loops(um3.action, e, 2)
    assert loops[0] == (e,)
    assert all(l[0] == e and l[-1] == e for l in loops)
    assert len(loops) == 1 + len(um3.action.neighbors(e))


def test_pi1_search_trivial_over_f2(um3):
    result = pi1_by_search(eum_component(um3))
    assert result.verdict == "ok"
    assert result.order == 1


def test_pi1_search_cyclic_action():
    act = cyclic_action(5)
    result = pi1_by_search(PointedAction(act, 0))
    assert result.verdict == "ok"
    assert result.order == 1


def test_elementary_moves_come_in_reverse_pairs(um3):
    rng = random.Random(13)
    e = base_row(3)
    for _ in range(60):
        w = random_path(um3.action, e, rng.randint(0, 4), rng)
        for m in elementary_neighbors(w, um3.action):
            assert w in elementary_neighbors(m, um3.action), (w, m)


def test_compose_is_associative(um3):
    rng = random.Random(17)
    e = base_row(3)
    for _ in range(50):
        a = random_path(um3.action, e, rng.randint(0, 3), rng)
        b = random_path(um3.action, ter_point(a), rng.randint(0, 3), rng)
        c = random_path(um3.action, ter_point(b), rng.randint(0, 3), rng)
        assert compose(compose(a, b), c) == compose(a, compose(b, c))


def test_stable_homotopy_is_transitive(um3):
    e = base_row(3)
    w = Path((e, (1, 1, 0), (0, 1, 0)))
    back = Path(((0, 1, 0), (0, 1, 1), (0, 1, 0)))
    a = compose(compose(w, inverse(w)), w)
    c = compose(w, back)
    first = stably_homotopic(a, w, um3.action)
    second = stably_homotopic(w, c, um3.action)
    assert first.verdict == second.verdict == "yes"
    joined = first.trace.then(second.trace)
    assert joined.verify(um3.action)
    assert reduced(joined.paths[0]) == reduced(a) and reduced(joined.paths[-1]) == reduced(c)
    assert stably_homotopic(a, c, um3.action).verdict == "yes"


def test_edge_loops_are_loops_at_base(um3):
    action = eum_component(um3).action
    e = base_row(3)
    loops = edge_loops(action, e)
    assert loops
    for word in loops:
        assert word[0] == word[-1] == e
        assert Path(word).validate(action)
    assert edge_loops(cyclic_action(1), 0) == []
