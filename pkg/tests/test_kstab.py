import pytest

from algebra.errors import NotInSubgroup
from algebra.kstab import (K0sClass, SequenceContext, alpha, beta, det_class, gamma, gl_order, k1, verify_sequence,
                           verify_toy_sequence)
from algebra.matrices import base_row, diagonal, elementary, embed_rd, identity
from algebra.paths import pi0
from algebra.rings import make_ring
from algebra.steinberg import SteinbergWord
from algebra.unimodular import build_um_action


@pytest.fixture(scope="module")
def f2():
    return make_ring("GF:2")


@pytest.fixture(scope="module")
def f2_context(f2):
    return SequenceContext(3, f2)


@pytest.mark.parametrize("spec,order", [("GF:2", 168), ("Zmod:4", 86016), ("GF:3", 11232)])
def test_gl_order_formula(spec, order):
    assert gl_order(3, make_ring(spec)) == order


def test_k1_over_f2_is_trivial(f2):
    data = k1(3, f2)
    assert len(data.classes) == 1
    assert data.base.representative.is_identity()
    assert data.normal and data.coset_count_matches
    assert data.table == ((0,),)


def test_k1_in_dimension_two(f2):
    data = k1(2, make_ring("GF:3"))
    assert len(data.classes) == 2
    assert data.coset_count_matches


@pytest.mark.slow
def test_k1_over_z4():
    z4 = make_ring("Zmod:4")
    data = k1(3, z4)
    assert len(data.classes) == 2
    assert data.e_order == 43008
    assert 2 * 43008 == data.gl_order == 86016
    d3 = diagonal(z4, [1, 1, 3])
    assert data.class_of(d3).label == 1
    assert det_class(data, d3).code == 3
    assert data.table == ((0, 1), (1, 0))


def test_alpha_sends_base_to_base(f2):
    pointed = build_um_action(3, f2)
    comps = pi0(pointed.action, pointed.base)
    data = k1(3, f2)
    assert alpha(data.base, comps) == comps.base_class


def test_beta_kernel_basis(f2):
    kernel = beta(f2, base_row(3))
    assert kernel.rank == 2
    assert set(kernel.basis) == {(0, 1, 0), (0, 0, 1)}
    for v in [(1, 1, 0), (0, 1, 1), (1, 1, 1)]:
        k = beta(f2, v)
        assert k.rank == 2
        for b in k.basis:
            assert sum(x * y for x, y in zip(b, v)) % 2 == 0


def test_gamma_adds_a_free_summand():
    assert gamma(K0sClass(2)).rank == 3


def test_mu_lambda_on_f2(f2_context, f2):
    ctx = f2_context
    assert ctx.mu(identity(3, f2)) == ctx.quotient_of[ctx.k1low.base.label]
    assert ctx.lambda_(0).label == ctx.k1n.base.label
    with pytest.raises(NotInSubgroup):
        ctx.mu(elementary(3, 1, 2, 1, f2))


def test_eta_needs_k2_words(f2_context, f2):
    with pytest.raises(NotInSubgroup):
        f2_context.eta(SteinbergWord.of(f2, [(1, 2, 1)]))
    word = SteinbergWord.of(f2, [(1, 2, 1), (2, 3, 1), (1, 2, 1), (2, 3, 1), (1, 3, 1)])
    assert f2_context.eta(word) == 0
    assert f2_context.delta(word) == word


def test_sequence_over_f2(f2):
    report = verify_sequence(3, f2)
    assert report.passed, [c.name for c in report.failures()]
    assert len(report.composites) == 6
    assert [c.name for c in report.exactness] == ["pi1", "K1,n-1/(K1,n-1)_2", "K1,n", "pi0"]
    assert report.sizes["pi1"] == 1
    assert report.sizes["K1"] == 1
    assert report.skipped


@pytest.mark.slow
@pytest.mark.parametrize("spec", ["Zmod:4", "GF:3", "GFpoly:2:0,0,1", "Zmod:6"])
def test_sequence_on_desk_rings(spec):
    report = verify_sequence(3, make_ring(spec))
    assert report.passed, [(c.name, c.witness) for c in report.failures()]


@pytest.mark.slow
def test_k1_node_over_z4():
    report = verify_sequence(3, make_ring("Zmod:4"))
    assert report.sizes["K1"] == 2
    node = next(c for c in report.exactness if c.name == "K1,n")
    assert node.witness["ker"] == node.witness["im"] == [0, 1]


def test_toy_sequence():
    report = verify_toy_sequence()
    assert report.passed, [c.name for c in report.failures()]
    assert report.sizes["pi1"] == 2
    assert [c.name for c in report.exactness] == ["pi1 [H2]", "fiber [H2]", "pi0 [H2]",
                                                 "pi1 [H]", "fiber [H]", "pi0 [H]"]
    node = {c.name: c.witness for c in report.exactness}
    assert node["pi1 [H2]"]["ker"] == [0]
    assert node["pi1 [H]"]["ker"] == node["pi1 [H]"]["im"] == [0, 1]
    assert len(node["fiber [H2]"]["ker"]) == 2
    assert any(c.name == "loop lifting onto fiber" and c.passed for c in report.extras)


def test_embedding_of_lower_classes(f2_context, f2):
    tau = elementary(2, 1, 2, 1, f2)
    assert embed_rd(tau) in f2_context.ep2
