"""Acceptance criteria 1-10.

Each criterion is one test; the outcome of every criterion is printed as a
single ``criterion N: PASS`` / ``FAIL`` line at the end of the session (see
``conftest.py``).
"""

import random
from math import factorial

from dendroidal.barcobar import (
    Bar,
    CoBar,
    check_coassociativity,
    check_structure_maps,
    check_structure_naturality,
)
from dendroidal.dhomology import (
    build_dc,
    category_pair_homology,
    dc_map,
    dendroidal_homology,
    les_rank_check,
    partition_complex_homology,
)
from dendroidal.duality import (
    TwistingCocycle,
    all_pass,
    check_homotopy,
    check_literal_homotopy,
    correspondence,
    triangle_identities,
    universal_cocycle,
    verify_duality,
)
from dendroidal.exactalg import ChainComplex, is_quasi_iso
from dendroidal.presheaf import (
    ASS,
    COM,
    RepTensor,
    SumPresheaf,
    check_functoriality,
    cone_sequence,
    constant_presheaf,
    nerve,
    random_test_presheaf,
    representable_A,
    representable_Omega_restricted,
    segal_core,
    yoneda_map,
)
from dendroidal.trees import Morphism, Tree, all_morphisms, enumerate_trees

TREES = [t for n in (2, 3, 4) for t in enumerate_trees(n)]


def dh(m, n):
    return dendroidal_homology(m, n).table()


def nerves():
    return [("nass", nerve(ASS)), ("ncom", nerve(COM))]


# 1 ---------------------------------------------------------------------------


def test_criterion_01_nerve_ass():
    for n in (2, 3, 4, 5):
        assert dh(nerve(ASS), n) == {n - 3: (factorial(n), ())}, n


# 2 ---------------------------------------------------------------------------


def test_criterion_02_representables_A():
    assert len(TREES) == 31
    for r in TREES:
        n = r.leaves
        expected = {-1: (factorial(n), ())} if r.is_corolla else {}
        assert dh(representable_A(r), n) == expected, r.term()


# 3 ---------------------------------------------------------------------------


def test_criterion_03_representables_Omega():
    for t in TREES:
        rep = representable_Omega_restricted(t)
        total = 0
        for n in range(2, t.leaves + 1):
            count = sum(factorial(n) for v in t.vertices if t.valence(v) == n)
            table = dh(rep, n)
            assert table == ({-1: (count, ())} if count else {}), (t.term(), n)
            total += count
        assert total == sum(factorial(len(t.inputs(v))) for v in t.vertices)


# 4 ---------------------------------------------------------------------------


def test_criterion_04_nerve_com():
    for n in (3, 4):
        table = dh(nerve(COM), n)
        assert table == {n - 3: (factorial(n - 1), ())}
        assert partition_complex_homology(n).table() == table


# 5 ---------------------------------------------------------------------------


def test_criterion_05_category_pair():
    cases = [(m, n) for _, m in nerves() for n in (2, 3, 4)]
    cases += [(representable_A(r), r.leaves) for r in TREES]
    cases += [(representable_Omega_restricted(t), n) for t in TREES for n in range(2, t.leaves + 1)]
    cases += [(random_test_presheaf(seed, (3,), 3), 3) for seed in range(25)]
    for m, n in cases:
        assert category_pair_homology(m, n).table() == dh(m, n), (m.descriptor, n)


# 6 ---------------------------------------------------------------------------


def _check_dc(m, leaves):
    for n in leaves:
        dc = build_dc(m, n, check=True)
        assert dc.check_simplicial_identities() == [], (m.descriptor, n)


def test_criterion_06_differentials():
    builtins = [m for _, m in nerves()] + [constant_presheaf()]
    builtins += [representable_A(r) for r in TREES] + [representable_Omega_restricted(t) for t in TREES]
    for m in builtins:
        _check_dc(m, (2, 3, 4))
    for _, m in nerves():
        b, c = Bar(m), CoBar(Bar(m))
        for s in TREES:
            b.double(s).check()
            c.double(s).check()
    for seed in range(100):
        m = random_test_presheaf(seed, (2, 3, 4), 2)
        _check_dc(m, (2, 3, 4))
        b, c = Bar(m), CoBar(Bar(m))
        for s in TREES:
            b.double(s).check()
            if s.leaves <= 3:
                c.double(s).check()
        assert check_functoriality(m, 3)


# 7 ---------------------------------------------------------------------------


def test_criterion_07_structure_maps():
    for _, m in nerves():
        for x in (Bar(m), CoBar(Bar(m))):
            rep = check_structure_maps(x, 4, quasi_iso=True)
            assert rep.ok, rep.failure
            rep = check_structure_naturality(x, 4)
            assert rep.ok, rep.failure
            rep = check_coassociativity(x, 4)
            assert rep.ok and rep.sign == 1, rep


# 8 ---------------------------------------------------------------------------


def _rescaled(tau, factor):
    comps = {
        s: {k: {x: factor(s) * v for x, v in img.items() if factor(s) * v} for k, img in c.items()}
        for s, c in tau.components.items()
    }
    return TwistingCocycle(tau.y, tau.m, tau.leaves, comps)


def _perturbed(tau, seed):
    """Add one generator-level change, symmetrized over relabelling isomorphisms."""
    rng = random.Random(seed)
    m, y, n = tau.m, tau.y, tau.leaves
    comps = {s: {k: dict(v) for k, v in c.items()} for s, c in tau.components.items()}
    s = rng.choice(sorted((t for t in comps if comps[t]), key=lambda t: t.sort_key()))
    k = rng.choice(sorted(comps[s], key=repr))
    deg = y.value(s).degree_of[k] - 1 - len(s.edges)
    xs = sorted((x for x, d in m.value(s).degree_of.items() if d == deg), key=repr)
    if not xs:
        return tau
    x, c = rng.choice(xs), rng.choice([1, -1, 2])
    for g in all_morphisms(n):
        if not g.is_iso or g.target != s:
            continue
        back = m.restrict(g)
        for k2, img in y.corestrict(g).images.items():
            coeff = img.get(k, 0)
            if not coeff:
                continue
            acc = comps.setdefault(g.source, {}).setdefault(k2, {})
            for x2, v in back.images.get(x, {}).items():
                acc[x2] = acc.get(x2, 0) + coeff * c * v
            comps[g.source][k2] = {a: v for a, v in acc.items() if v}
    return TwistingCocycle(y, m, n, comps)


def test_criterion_08_twisting_and_triangles():
    generated = []
    for desc, m in nerves() + [(f"random:{s}", random_test_presheaf(s, (3,), 3)) for s in range(10)]:
        tau = universal_cocycle(m, 3)
        generated += [tau, _rescaled(tau, lambda s: 2), _rescaled(tau, lambda s: -1)]
        generated += [_rescaled(tau, lambda s, w=w: w[len(s.edges)]) for w in ((1, 2), (2, 1), (0, 1))]
        generated += [_perturbed(tau, seed) for seed in range(3)]
    mc_seen = {True: 0, False: 0}
    for tau in generated:
        rep = correspondence(tau)
        assert rep.consistent, rep
        mc_seen[rep.maurer_cartan] += 1
    assert mc_seen[True] and mc_seen[False]

    instances = [m for _, m in nerves()] + [random_test_presheaf(s, (2, 3), 3) for s in range(10)]
    for m in instances:
        for n in (2, 3):
            tb, tc = triangle_identities(m, n)
            assert tb.ok and tc.ok, (m.descriptor, n, tb.failure, tc.failure)


# 9 ---------------------------------------------------------------------------


def test_criterion_09_duality():
    instances = [(m, n) for _, m in nerves() for n in (2, 3, 4)]
    instances += [(representable_A(r), r.leaves) for r in TREES if r.leaves <= 3]
    instances += [(representable_Omega_restricted(t), n) for t in TREES if t.leaves <= 3 for n in range(2, t.leaves + 1)]
    instances += [(random_test_presheaf(s, (3,), 3), 3) for s in range(25)]
    literal_failures = []
    for m, n in instances:
        certs = verify_duality(m, n, homotopy=True)
        assert all_pass(certs), [c for c in certs if c["status"] != "pass"][:1]
        cb = CoBar(Bar(m))
        for r in enumerate_trees(n):
            for x in (cb, Bar(cb)):
                assert check_homotopy(x, r).ok
                lit = check_literal_homotopy(x, r)
                assert lit.positive_ok, lit.failure
                if not lit.zero_ok:
                    literal_failures.append(lit.failure)
    # the printed pair asks for d h = Id on the p = 0 column as well
    assert not literal_failures, f"{len(literal_failures)} towers violate the p = 0 identity, first: {literal_failures[0]}"


# 10 --------------------------------------------------------------------------


def test_criterion_10_exactness():
    unit = ChainComplex.unit()
    for _, base in nerves():
        for r in [t for t in TREES if t.leaves <= 3]:
            acyclic, _, _ = cone_sequence(yoneda_map(Morphism.identity(r), RepTensor(r, unit), RepTensor(r, unit)))
            total = SumPresheaf([base, acyclic])
            for n in (2, 3):
                assert dh(total, n) == dh(base, n)

    rng = random.Random(10)
    for n in (2, 3, 4):
        trees = enumerate_trees(n)
        for _ in range(4):
            r = rng.choice(trees)
            u = Morphism.inclusion(r, rng.choice([t for t in trees if r.edges <= t.edges]))
            c = ChainComplex({0: ["a"], 1: ["b"]}, {"b": {"a": rng.choice([1, 2, 3])}})
            f = yoneda_map(u, RepTensor(r, c), RepTensor(u.target, c), rng.choice([1, 2, -1]))
            _, inc, proj = cone_sequence(f)
            rep = les_rank_check(inc, proj, n)
            assert rep.ok, rep.details
            assert rep.euler[1] == rep.euler[0] + rep.euler[2]

    c2, c3 = Tree.corolla(2), Tree.corolla(3)
    for s, a, r in [(c2, 1, c2), (c2, 2, c2), (c3, 1, c2), (c3, 3, c2), (c2, 1, c3), (c2, 2, c3)]:
        _, _, inc = segal_core(s, a, r)
        for n in range(2, s.leaves + r.leaves):
            assert is_quasi_iso(dc_map(inc, n)), (s.term(), a, r.term(), n)
