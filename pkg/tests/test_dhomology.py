from math import factorial

import pytest

from dendroidal.dhomology import (
    build_dc,
    category_pair_complex,
    category_pair_homology,
    dc_groupoid,
    dc_map,
    dendroidal_homology,
    les_rank_check,
    operadic_poset,
    operadic_poset_homology,
    partition_complex_homology,
    partition_poset_homology,
)
from dendroidal.exactalg import ChainComplex, ContractViolation, homology, is_quasi_iso
from dendroidal.presheaf import (
    ASS,
    COM,
    NaturalMap,
    Presheaf,
    RepTensor,
    SumPresheaf,
    cone_sequence,
    nerve,
    random_test_presheaf,
    representable_A,
    representable_Omega_restricted,
    segal_core,
    yoneda_map,
)
from dendroidal.trees import Morphism, Tree, enumerate_trees, parse_term


def table(m, n):
    return dendroidal_homology(m, n).table()


# -- the complex itself ----------------------------------------------------------


def test_dc_com_three_leaves():
    dc = build_dc(nerve(COM), 3)
    assert dc.generator_counts() == {(-1, 0): 1, (0, 0): 3}
    mat = dc.total().matrix(0)
    assert mat.rows == 1 and mat.cols == 3
    assert len({abs(v) for v in mat.entries[0]}) == 1 and abs(mat.entries[0][0]) == 1


def test_dc_ass_three_leaves():
    dc = build_dc(nerve(ASS), 3)
    assert dc.generator_counts() == {(-1, 0): 6, (0, 0): 12}


def test_dc_representable_two_leaves():
    dc = build_dc(representable_A(Tree.corolla(2)), 2)
    assert dc.generator_counts() == {(-1, 0): 2}
    assert table(representable_A(Tree.corolla(2)), 2) == {-1: (2, ())}


def test_dc_row_p_has_p_plus_one_edges():
    dc = build_dc(nerve(ASS), 4)
    for g in dc.generators:
        assert len(g.tree.edges) == g.p + 1
        assert g.edge_enum == g.tree.inner_edges


@pytest.mark.parametrize("desc", ["nass", "ncom", "random"])
def test_simplicial_identities(desc):
    m = random_test_presheaf(3, (4,), 3) if desc == "random" else {"nass": nerve(ASS), "ncom": nerve(COM)}[desc]
    assert build_dc(m, 4).check_simplicial_identities() == []


def test_coinvariant_basis_matches_skeleton():
    """The honest groupoid quotient has one copy of M(T) per labelled tree."""
    for m in (nerve(ASS), nerve(COM), representable_A(parse_term("((1 2) 3)"))):
        dc = build_dc(m, 3)
        for p in (-1, 0):
            act = dc_groupoid(m, 3, p)
            free, torsion = act.quotient_invariants()
            assert torsion == ()
            expected = sum(n for (pp, _), n in dc.generator_counts().items() if pp == p)
            assert len(act.coinvariant_basis()) == free == expected


def test_non_functorial_presheaf_is_rejected():
    class BadBoundary(Presheaf):
        descriptor = "bad"

        def _value(self, t):
            if t.edges:
                return ChainComplex({0: ["a"], 1: ["b"]}, {"b": {"a": 1}})
            return ChainComplex({0: ["a"], 1: ["b"]})

        def _restrict_images(self, f):
            return {"a": {"a": 1}, "b": {"b": 1}}

    with pytest.raises(ContractViolation):
        build_dc(BadBoundary(), 3)


# -- homology ----------------------------------------------------------------------


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_nerve_ass_concentrated(n):
    assert table(nerve(ASS), n) == {n - 3: (factorial(n), ())}


def test_nerve_com_three_leaves():
    assert table(nerve(COM), 3) == {0: (2, ())}


def test_nerve_com_four_leaves():
    assert table(nerve(COM), 4) == {1: (6, ())}


@pytest.mark.parametrize("r", list(enumerate_trees(3)) + [parse_term("((1 2) (3 4))"), Tree.corolla(4)], ids=lambda t: t.term())
def test_representable_homology(r):
    n = r.leaves
    expected = {-1: (factorial(n), ())} if not r.edges else {}
    assert table(representable_A(r), n) == expected


@pytest.mark.parametrize("t", [t for n in (2, 3, 4) for t in enumerate_trees(n)], ids=lambda t: t.term())
def test_omega_representable_homology(t):
    rep = representable_Omega_restricted(t)
    for n in range(2, t.leaves + 1):
        count = sum(factorial(n) for v in t.vertices if t.valence(v) == n)
        assert table(rep, n) == ({-1: (count, ())} if count else {})


def test_quasi_iso_invariance():
    base = nerve(ASS)
    c = ChainComplex.unit()
    r = parse_term("((1 2) 3)")
    p, q = RepTensor(r, c), RepTensor(r, c)
    acyclic, _, _ = cone_sequence(yoneda_map(Morphism.identity(r), p, q))
    m = SumPresheaf([base, acyclic])
    assert table(m, 3) == table(base, 3)


# -- category-pair oracle ----------------------------------------------------------------


@pytest.mark.parametrize("n", [3, 4])
def test_category_pair_matches_nerve_ass(n):
    assert category_pair_homology(nerve(ASS), n) == dendroidal_homology(nerve(ASS), n)


def test_category_pair_two_leaves():
    m = random_test_presheaf(5, (2,), 3)
    c = category_pair_complex(m, 2)
    assert c.ranks() == {k - 1: v for k, v in m.value(Tree.corolla(2)).ranks().items()}
    assert category_pair_homology(m, 2) == homology(m.value(Tree.corolla(2)).shift(-1))


@pytest.mark.parametrize("seed", range(25))
def test_category_pair_matches_random(seed):
    m = random_test_presheaf(seed, (3,), 3)
    assert category_pair_homology(m, 3).table() == dendroidal_homology(m, 3).table()


@pytest.mark.parametrize("seed", range(4))
def test_category_pair_matches_random_four_leaves(seed):
    m = random_test_presheaf(seed, (4,), 2)
    assert category_pair_homology(m, 4).table() == dendroidal_homology(m, 4).table()


# -- partition posets ----------------------------------------------------------------


def test_partition_complex_classical():
    assert partition_complex_homology(3).table() == {0: (2, ())}
    assert partition_complex_homology(4).table() == {1: (6, ())}


def test_com_operadic_poset():
    # strict part of C_l/A; above degree 0 its homology is DH
    for n in (4, 5):
        h = partition_poset_homology(COM, n)
        dh = dendroidal_homology(nerve(COM), n)
        for g in h.groups:
            if g.degree >= 1:
                assert (g.betti, g.torsion) == (dh.betti(g.degree), dh.torsion(g.degree))
    assert partition_poset_homology(COM, 4).betti(1) == 6


def test_ass_operadic_poset_three_leaves():
    pos = operadic_poset(ASS, 3)
    assert len(pos.top) == 12
    nv = nerve(ASS)
    c3 = Tree.corolla(3)
    bottoms = {}
    for t, x in pos.top:
        y = nv.restrict_inclusion(c3, t, x)
        bottoms.setdefault(y, []).append((t, x))
    assert len(bottoms) == 6
    assert all(len(v) == 2 for v in bottoms.values())


def test_ass_operadic_poset_four_leaves():
    h = operadic_poset_homology(ASS, 4)
    assert h.betti(1) == dendroidal_homology(nerve(ASS), 4).betti(1) == 24


# -- long exact sequences -----------------------------------------------------------------


def split_sequence(a, b):
    total = SumPresheaf([a, b])
    inc = NaturalMap(a, total, lambda t: {k: {(0, k): 1} for k in a.value(t).degree_of})
    proj = NaturalMap(total, b, lambda t: {(1, k): {k: 1} for k in b.value(t).degree_of})
    return inc, proj


def test_les_split_sequence():
    inc, proj = split_sequence(nerve(ASS), random_test_presheaf(2, (3,), 3))
    rep = les_rank_check(inc, proj, 3)
    assert rep.ok
    assert rep.euler[1] == rep.euler[0] + rep.euler[2]


@pytest.mark.parametrize("seed", range(6))
def test_les_cone_sequence(seed):
    import random

    rng = random.Random(seed)
    trees = enumerate_trees(3)
    r = rng.choice(trees)
    u = Morphism.inclusion(r, rng.choice([t for t in trees if r.edges <= t.edges]))
    c = ChainComplex({0: ["a"], 1: ["b"]}, {"b": {"a": rng.choice([1, 2, 3])}})
    f = yoneda_map(u, RepTensor(r, c), RepTensor(u.target, c), rng.choice([1, 2, -1]))
    cone, inc, proj = cone_sequence(f)
    assert les_rank_check(inc, proj, 3).ok


def test_les_detects_non_exact_input():
    a = nerve(COM)
    inc = NaturalMap(a, a, lambda t: {k: {k: 1} for k in a.value(t).degree_of})
    assert not les_rank_check(inc, inc, 3).ok


@pytest.mark.parametrize(
    "s,a,r",
    [(Tree.corolla(2), 1, Tree.corolla(2)), (Tree.corolla(2), 2, Tree.corolla(2)), (Tree.corolla(3), 2, Tree.corolla(2)), (Tree.corolla(2), 1, Tree.corolla(3))],
    ids=str,
)
def test_segal_core_inclusion_is_dh_iso(s, a, r):
    core, full, inc = segal_core(s, a, r)
    for n in range(2, s.leaves + r.leaves):
        assert is_quasi_iso(dc_map(inc, n))
