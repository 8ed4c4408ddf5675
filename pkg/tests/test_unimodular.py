import pytest

from algebra.errors import CapExceeded
from algebra.matrices import base_row
from algebra.paths import in_point, pi0, ter_point
from algebra.rings import make_ring
from algebra.unimodular import (build_um_action, completion_witness, enumerate_um, eum_component,
                                find_factorization, find_path, is_unimodular, orbit_partition, um_count_formula)


@pytest.mark.parametrize("spec,count", [("GF:2", 7), ("Zmod:4", 56), ("Zmod:6", 182), ("GF:3", 26),
                                        ("GFpoly:2:0,0,1", 56)])
def test_um_counts(spec, count):
    ring = make_ring(spec)
    rows = enumerate_um(3, ring)
    assert len(rows) == count
    assert rows[0].codes == base_row(3)
    expected = um_count_formula(3, ring)
    if expected is not None:
        assert expected == count


def test_formula_not_claimed_for_products():
    assert um_count_formula(3, make_ring("Zmod:6")) is None
    assert um_count_formula(3, make_ring("Zmod:8")) == 8 ** 3 - 4 ** 3


def test_witnesses():
    z4 = make_ring("Zmod:4")
    assert completion_witness(z4, base_row(3)) == base_row(3)
    for row in enumerate_um(3, z4):
        assert sum(a * b for a, b in zip(row.codes, row.witness)) % 4 == 1
    assert not is_unimodular(z4, (2, 0, 2))
    assert not is_unimodular(z4, (0, 0, 0))


def test_zero_divisor_rows_need_combined_witness():
    z6 = make_ring("Zmod:6")
    w = completion_witness(z6, (2, 3, 0))
    assert w is not None
    assert (2 * w[0] + 3 * w[1]) % 6 == 1


def test_cap_on_enumeration():
    with pytest.raises(CapExceeded):
        enumerate_um(3, make_ring("Zmod:6"), cap=100)


def test_find_path_over_f2():
    f2 = make_ring("GF:2")
    e = base_row(3)
    p = find_path(f2, e, (0, 1, 1))
    assert in_point(p) == e and ter_point(p) == (0, 1, 1)
    act = build_um_action(3, f2).action
    assert p.validate(act)
    assert find_path(f2, e, e).is_constant


def test_factorization_carries_row():
    z4 = make_ring("Zmod:4")
    v, w = base_row(3), (3, 2, 1)
    factors = find_factorization(z4, v, w)
    x = v
    for m in factors:
        x = m.act_row(x)
    assert x == w


@pytest.mark.parametrize("spec,sizes", [("GF:2", [7]), ("GF:3", [26]), ("Zmod:4", [56])])
def test_components_are_orbits(spec, sizes):
    ring = make_ring(spec)
    pointed = build_um_action(3, ring)
    comps = pi0(pointed.action, pointed.base)
    assert comps.sizes == sizes
    assert sorted(len(o) for o in orbit_partition(3, ring)) == sizes


def test_eum_component_is_everything_for_semilocal_rings():
    pointed = build_um_action(3, make_ring("Zmod:4"))
    eum = eum_component(pointed)
    assert len(eum.action) == 56
    assert eum.action.name.startswith("EUm")
