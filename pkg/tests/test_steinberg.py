import random

import pytest

from algebra.errors import NotInSubgroup
from algebra.matrices import NilpotentSet, elementary, local_subgroup, max_delta, nilpotent_sets
from algebra.rings import make_ring
from algebra.steinberg import (Letter, SteinbergWord, canonical_local_word, commutator_word, is_local, k2_witness,
                               local_matrix_to_word, local_normal_form, relation_words, star_covering_check,
                               theta)


@pytest.fixture(scope="module")
def f2():
    return make_ring("GF:2")


def test_word_reduction(f2):
    w = SteinbergWord.of(f2, [(1, 2, 1), (1, 2, 1)])
    assert len(w) == 0
    z4 = make_ring("Zmod:4")
    v = SteinbergWord.of(z4, [(1, 2, 1), (1, 2, 1, -1), (2, 3, 2)])
    assert v.to_json() == [[2, 3, 2, 1]]
    assert (v * v.inverse()) == SteinbergWord()


def test_letter_validation(f2):
    with pytest.raises(ValueError):
        Letter(1, 1, f2.one)
    with pytest.raises(ValueError):
        Letter(1, 2, f2.one, 2)


def test_theta_of_single_letter(f2):
    w = SteinbergWord.of(f2, [(1, 2, 1)])
    assert theta(w, f2, 3) == elementary(3, 1, 2, 1, f2)
    assert theta(SteinbergWord(), f2, 3).is_identity()


def test_is_local(f2):
    w = SteinbergWord.of(f2, [(1, 2, 1), (2, 3, 1)])
    alpha = is_local(w, 3)
    assert alpha is not None and (1, 3) in alpha
    assert is_local(SteinbergWord.of(f2, [(1, 2, 1), (2, 1, 1)]), 3) is None


@pytest.mark.parametrize("spec,count", [("GF:2", 8), ("GF:3", 27)])
def test_local_round_trip(spec, count):
    ring = make_ring(spec)
    delta = max_delta(3)
    group = local_subgroup(delta, ring)
    assert len(group) == count
    words = set()
    for m in group:
        w = local_matrix_to_word(delta, m)
        assert theta(w, ring, 3) == m
        words.add(w)
    assert len(words) == count


def test_round_trip_on_every_local_subgroup(f2):
    for alpha in nilpotent_sets(3):
        for m in local_subgroup(alpha, f2):
            assert theta(local_matrix_to_word(alpha, m), f2, 3) == m


def test_outside_local_subgroup_is_rejected(f2):
    with pytest.raises(NotInSubgroup):
        local_matrix_to_word(NilpotentSet(3, ((1, 2),)), elementary(3, 2, 1, 1, f2))


def test_normal_form_is_canonical():
    f3 = make_ring("GF:3")
    rng = random.Random(1)
    pairs = max_delta(3).pairs
    for _ in range(30):
        spec = [(*rng.choice(pairs), rng.randrange(1, 3)) for _ in range(6)]
        w = SteinbergWord.of(f3, spec)
        nf = local_normal_form(w, f3, 3)
        assert theta(nf, f3, 3) == theta(w, f3, 3)
        assert canonical_local_word(theta(w, f3, 3)) is not None


@pytest.mark.parametrize("spec", ["GF:2", "Zmod:4"])
def test_relators_are_k2_witnesses(spec):
    ring = make_ring(spec)
    words = relation_words(ring, 3)
    assert words
    assert all(k2_witness(w, ring, 3) for w in words)
    assert len(relation_words(ring, 3, sample=10, seed=2)) == 10


def test_commutator_word(f2):
    a = SteinbergWord.of(f2, [(1, 2, 1)])
    b = SteinbergWord.of(f2, [(2, 3, 1)])
    assert theta(commutator_word(a, b), f2, 3) == elementary(3, 1, 3, 1, f2)


@pytest.mark.parametrize("spec", ["GF:2", "GF:3"])
def test_star_covering(spec):
    check = star_covering_check(3, make_ring(spec))
    assert check.passed, check.detail
    assert check.matrices == check.words
