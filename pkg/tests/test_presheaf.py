import pytest

from dendroidal.barcobar import check_coassociativity, check_structure_maps, check_structure_naturality
from dendroidal.exactalg import ChainComplex, ChainMap, homology
from dendroidal.presheaf import (
    ASS,
    COM,
    ConstantPresheaf,
    Presheaf,
    check_functoriality,
    check_naturality,
    cone_sequence,
    constant_presheaf,
    label_fixed_ranks,
    nerve,
    parse_presheaf,
    random_test_presheaf,
    representable_A,
    representable_Omega_restricted,
    segal_core,
)
from dendroidal.trees import Morphism, Tree, all_morphisms, enumerate_trees, parse_term

C3 = Tree.corolla(3)
CHERRY = parse_term("((1 2) 3)")


def rank(m, t):
    return m.value(t).total_rank()


# -- nerves --------------------------------------------------------------------


def test_nerve_ranks():
    nass, ncom = nerve(ASS), nerve(COM)
    assert rank(nass, C3) == 6
    assert rank(nass, CHERRY) == 4
    for n in (2, 3, 4):
        for t in enumerate_trees(n):
            assert rank(ncom, t) == 1


def test_nerve_ass_rank_is_product_over_vertices():
    from math import factorial

    nass = nerve(ASS)
    for t in enumerate_trees(4):
        expected = 1
        for v in t.vertices:
            expected *= factorial(t.valence(v))
        assert rank(nass, t) == expected


@pytest.mark.parametrize("n", [2, 3, 4])
def test_nerve_functoriality(n):
    assert check_functoriality(nerve(ASS), n)
    assert check_functoriality(nerve(COM), n)


@pytest.mark.parametrize("n", [3, 4])
def test_theta_naturality_exhaustive(n):
    for op in (ASS, COM):
        rep = check_structure_naturality(nerve(op), n)
        assert rep.ok, rep.failure
        assert rep.checked > 0


def test_theta_associativity_on_two_edge_trees():
    for op in (ASS, COM):
        rep = check_coassociativity(nerve(op), 4)
        assert rep.ok and rep.sign == 1
        assert rep.checked == 15


@pytest.mark.parametrize("n", [3, 4])
def test_theta_is_isomorphism(n):
    nass = nerve(ASS)
    assert check_structure_maps(nass, n, quasi_iso=True).ok
    for t in enumerate_trees(n):
        for e in t.inner_edges:
            th = nass.theta(t, e)
            targets = [k for img in th.images.values() for k in img]
            assert len(targets) == len(set(targets)) == th.target.total_rank() == th.source.total_rank()
            assert all(list(img.values()) == [1] for img in th.images.values())


# -- representables --------------------------------------------------------------


def test_representable_A_ranks():
    rep = representable_A(C3)
    assert label_fixed_ranks(C3)[C3] == 1
    assert rank(rep, C3) == 6
    assert rank(rep, Tree.corolla(2)) == 0
    for t in enumerate_trees(3)[1:]:
        assert rank(rep, t) == 0


def test_representable_A_label_fixed_table():
    table = label_fixed_ranks(CHERRY)
    assert table == {t: (1 if t in (C3, CHERRY) else 0) for t in enumerate_trees(3)}


def test_representable_Omega_faces():
    assert [r for _, r in representable_Omega_restricted(C3).faces] == [C3]
    rep = representable_Omega_restricted(CHERRY)
    faces = sorted(r.term() for _, r in rep.faces)
    assert faces == ["((1 2) 3)", "(1 2)", "(1 2)"]
    for t in enumerate_trees(4):
        corollas = [r for _, r in representable_Omega_restricted(t).faces if not r.edges]
        assert len(corollas) == len(t.vertices)


def test_segal_core():
    c2 = Tree.corolla(2)
    core, full, inc = segal_core(c2, 1, c2)
    assert sorted(r.term() for _, r in core.faces) == ["(1 2)", "(1 2)"]
    assert rank(core, CHERRY) == 0 and rank(full, CHERRY) == 2
    assert rank(core, c2) == 4
    assert check_naturality(inc, 2) and check_naturality(inc, 3)
    for t in enumerate_trees(2) + enumerate_trees(3):
        imgs = [k for img in inc.at(t).images.values() for k in img]
        assert len(imgs) == len(set(imgs)) == core.value(t).total_rank()


def test_constant_presheaf():
    z = constant_presheaf()
    for t in enumerate_trees(3):
        assert z.value(t).ranks() == {0: 1}
    assert all(z.restrict(f).images == {"1": {"1": 1}} for f in all_morphisms(3))
    assert check_functoriality(z, 3)


# -- random family -----------------------------------------------------------------


def test_random_budget_zero_is_zero():
    m = random_test_presheaf(7, (3,), 0)
    assert all(m.value(t).total_rank() == 0 for t in enumerate_trees(3))


def test_single_summand_is_representable():
    from dendroidal.presheaf import RepTensor

    m = RepTensor(C3, ChainComplex.unit())
    rep = representable_A(C3)
    for t in enumerate_trees(3):
        assert rank(m, t) == rank(rep, t)


@pytest.mark.parametrize("seed", range(100))
def test_random_presheaf_functorial(seed):
    leaves = (2, 3) if seed % 2 else (3,)
    m = random_test_presheaf(seed, leaves, 3)
    for n in leaves:
        rep = check_functoriality(m, n)
        assert rep.ok, rep.failure


def test_random_presheaf_is_deterministic():
    a, b = random_test_presheaf(11, (3,), 3), random_test_presheaf(11, (3,), 3)
    for t in enumerate_trees(3):
        assert a.value(t).basis == b.value(t).basis
        assert a.value(t).boundary == b.value(t).boundary


class Corrupted(Presheaf):
    """Constant Z except one restriction along a nontrivial inclusion is doubled."""

    descriptor = "corrupted"

    def __init__(self, bad):
        super().__init__()
        self.bad = bad

    def _value(self, t):
        return ChainComplex.unit()

    def _restrict_images(self, f):
        return {"1": {"1": 2 if f == self.bad else 1}}


def test_corrupted_restriction_is_caught():
    bad = Morphism.inclusion(C3, CHERRY)
    rep = check_functoriality(Corrupted(bad), 3)
    assert not rep.ok
    assert "composition" in rep.failure


def test_cone_sequence_is_natural():
    from dendroidal.presheaf import RepTensor, yoneda_map

    c = ChainComplex.unit()
    p, q = RepTensor(CHERRY, c), RepTensor(CHERRY, c)
    f = yoneda_map(Morphism.identity(CHERRY), p, q, 2)
    cone, inc, proj = cone_sequence(f)
    assert check_functoriality(cone, 3)
    assert check_naturality(inc, 3) and check_naturality(proj, 3)
    h = homology(cone.value(CHERRY))
    assert h.table() == {0: (0, (2, 2))}


def test_parse_descriptors():
    assert rank(parse_presheaf("nass"), C3) == 6
    assert rank(parse_presheaf("ncom"), CHERRY) == 1
    assert rank(parse_presheaf("repA:((1 2) 3)"), CHERRY) == 2  # swap of leaves 1, 2
    assert isinstance(parse_presheaf("const:Z"), ConstantPresheaf)
    assert parse_presheaf("repOmega:(1 2)").faces
    with pytest.raises(ValueError):
        parse_presheaf("bogus")
    with pytest.raises(ValueError):
        parse_presheaf("random:x")
