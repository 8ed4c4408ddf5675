import pytest

from algebra.errors import MixedRingError, RingSpecError
from algebra.rings import arith, check_axioms, enumerate_elements, make_ring, try_invert


@pytest.mark.parametrize("spec,size", [("Zmod:4", 4), ("Zmod:6", 6), ("GF:2", 2), ("GF:3", 3),
                                       ("GFpoly:2:1,1,1", 4), ("GFpoly:2:0,0,1", 4)])
def test_make_ring_sizes(spec, size):
    ring = make_ring(spec)
    assert ring.size == size
    assert ring.spec == spec


@pytest.mark.parametrize("spec", ["Zmod:1", "Zmod:0", "GF:4", "GF:x", "Zmod", "GFpoly:2:1,1,0",
                                  "GFpoly:4:1,1", "GFpoly:2:1,2,1", ""])
def test_make_ring_rejects(spec):
    with pytest.raises(RingSpecError):
        make_ring(spec)


def test_ring_spec_error_is_value_error():
    with pytest.raises(ValueError):
        make_ring("Zmod:-3")


def test_zmod4_arithmetic():
    r = make_ring("Zmod:4")
    assert arith("add", r.element(3), r.element(3)).code == 2
    assert arith("mul", r.element(2), r.element(2)).code == 0
    assert arith("neg", r.element(1)).code == 3


def test_inverses():
    z4, z6 = make_ring("Zmod:4"), make_ring("Zmod:6")
    assert try_invert(z4.element(3)).code == 3
    assert try_invert(z4.element(2)) is None
    assert try_invert(z6.element(5)).code == 5
    assert [u.code for u in z6.units()] == [1, 5]


def test_enumeration_order():
    assert [e.code for e in enumerate_elements(make_ring("Zmod:4"))] == [0, 1, 2, 3]
    assert [e.code for e in enumerate_elements(make_ring("GF:2"))] == [0, 1]


def test_f4_is_a_field():
    f4 = make_ring("GFpoly:2:1,1,1")
    assert len(f4.units()) == 3
    x = f4.from_coeffs([0, 1])
    # x^2 = x + 1
    assert (x * x).value == (1, 1)


def test_dual_numbers_have_nilpotent_x():
    d = make_ring("GFpoly:2:0,0,1")
    x = d.from_coeffs([0, 1])
    assert (x * x).code == 0
    assert len(d.units()) == 2
    assert str(x + 1) == "x+1"


@pytest.mark.parametrize("spec", ["Zmod:4", "Zmod:6", "GF:3", "GFpoly:2:1,1,1", "GFpoly:3:0,0,1"])
def test_axioms_hold(spec):
    assert check_axioms(make_ring(spec)) == []


def test_sampled_axioms():
    assert check_axioms(make_ring("Zmod:12"), sample=200, seed=3) == []


def test_mixed_rings_refused():
    with pytest.raises(MixedRingError):
        make_ring("Zmod:4").one + make_ring("GF:2").one


def test_integer_operands_coerce():
    r = make_ring("Zmod:6")
    assert (r.element(4) + 3).code == 1
    assert (2 * r.element(5)).code == 4
