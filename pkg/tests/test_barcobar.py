import json
import pathlib

import pytest
from hypothesis import given, settings, strategies as st

from dendroidal.barcobar import (
    Bar,
    CoBar,
    ConstantCopresheaf,
    InvariantView,
    bar_corestrict,
    bar_corestrict_invariant,
    bar_delta,
    bar_map,
    check_coassociativity,
    check_structure_maps,
    check_structure_naturality,
    cobar_map,
    cobar_theta,
    coassociativity,
    describe_bar,
    describe_cobar,
    export_complex,
    import_complex,
)
from dendroidal.dhomology import build_dc, relative_category_homology
from dendroidal.exactalg import ContractViolation, homology, is_quasi_iso
from dendroidal.presheaf import (
    ASS,
    COM,
    NaturalMap,
    check_functoriality,
    check_naturality,
    nerve,
    random_test_presheaf,
    representable_A,
)
from dendroidal.trees import (
    Morphism,
    Tree,
    all_morphisms,
    degraft,
    enumerate_trees,
    extensions,
    graft,
    morphisms,
    parse_term,
)

GOLDEN = pathlib.Path(__file__).parent / "golden" / "structure_maps_l3.json"

trees3 = list(enumerate_trees(3))
trees4 = list(enumerate_trees(4))


def nass_bar():
    return Bar(nerve(ASS))


# -- differentials -------------------------------------------------------------------


@pytest.mark.parametrize("desc", ["nass", "ncom", "random"])
def test_bar_double_complex_identities(desc):
    m = {"nass": nerve(ASS), "ncom": nerve(COM)}.get(desc) or random_test_presheaf(8, (3, 4), 3)
    b = Bar(m)
    for n in (3, 4):
        for s in enumerate_trees(n):
            b.double(s).check()
            b.value(s).check()


def test_cobar_double_complex_identities():
    for y in (Bar(nerve(ASS)), Bar(random_test_presheaf(2, (4,), 2)), ConstantCopresheaf()):
        c = CoBar(y)
        for s in trees4:
            c.double(s).check()
            c.value(s).check()


def test_bar_degrees():
    b = nass_bar()
    s = parse_term("((1 2) 3)")
    for (t, x), n in b.value(s).degree_of.items():
        assert n == len(t.edges - s.edges) + len(s.edges) + 0 + 1


# -- functoriality ---------------------------------------------------------------------


def test_bar_functoriality_four_leaves():
    rep = check_functoriality(nass_bar(), 4)
    assert rep.ok, rep.failure


def test_cobar_functoriality_four_leaves():
    rep = check_functoriality(CoBar(Bar(nerve(COM))), 4)
    assert rep.ok, rep.failure


@pytest.mark.parametrize("seed", range(5))
def test_bar_cobar_functoriality_random(seed):
    m = random_test_presheaf(seed, (3,), 3)
    assert check_functoriality(Bar(m), 3)
    assert check_functoriality(CoBar(Bar(m)), 3)


def test_corestrict_identity_and_vanishing():
    b = nass_bar()
    c3, cherry = Tree.corolla(3), parse_term("((1 2) 3)")
    for s in trees3:
        f = b.corestrict(Morphism.identity(s))
        assert all(img == {k: 1} for k, img in f.images.items())
    gamma = Morphism.inclusion(c3, cherry)
    other = parse_term("(1 (2 3))")
    for x in nerve(ASS).value(other).degree_of:
        assert bar_corestrict(b, gamma, {(other, x): 1}) == {}


def test_codim_two_pushforward_is_composite():
    b = Bar(random_test_presheaf(6, (4,), 3))
    c4 = Tree.corolla(4)
    for top in [t for t in trees4 if len(t.edges) == 2]:
        e1, e2 = top.inner_edges
        for first in (e1, e2):
            mid = Tree(4, frozenset({first}))
            g1, g2 = Morphism.inclusion(c4, mid), Morphism.inclusion(mid, top)
            lhs = b.corestrict(g2.after(g1))
            rhs = b.corestrict(g2).after(b.corestrict(g1))
            assert lhs.images == rhs.images


def test_bar_and_cobar_of_natural_maps():
    m = random_test_presheaf(3, (3,), 3)
    ident = NaturalMap(m, m, lambda t: {k: {k: 2} for k in m.value(t).degree_of})
    b = Bar(m)
    bf = bar_map(ident, b, b)
    assert check_naturality(bf, 3)
    c = CoBar(b)
    assert check_naturality(cobar_map(bf, c, c), 3)


# -- comparison with the dendroidal complex -----------------------------------------------


@pytest.mark.parametrize("n", [2, 3, 4])
@pytest.mark.parametrize("which", ["nass", "random"])
def test_corolla_value_is_shifted_dc(n, which):
    m = nerve(ASS) if which == "nass" else random_test_presheaf(n, (n,), 3)
    dh = build_dc(m, n).total()
    dc = Bar(m, suspend=False).value(Tree.corolla(n))
    assert dc.basis == {k + 1: v for k, v in dh.basis.items()}
    assert dc.boundary == dh.boundary
    bar = Bar(m).value(Tree.corolla(n))
    assert bar.basis == {k + 2: v for k, v in dh.basis.items()}


@pytest.mark.parametrize("r", trees3, ids=lambda t: t.term())
def test_bar_of_representable(r):
    m = representable_A(r)
    for s in trees3:
        isos = [f for f in morphisms(s, r, relabel=True) if f.is_iso]
        expected = {len(s.edges): (len(isos), ())} if isos else {}
        assert homology(Bar(m, suspend=False).value(s)).table() == expected
        shifted = {k + 1: v for k, v in expected.items()}
        assert homology(Bar(m).value(s)).table() == shifted


@pytest.mark.parametrize("seed", range(10))
def test_relative_category_oracle(seed):
    m = random_test_presheaf(seed, (3,), 3)
    for s in trees3:
        assert homology(Bar(m, suspend=False).value(s)) == relative_category_homology(m, s)


# -- structure maps ------------------------------------------------------------------


def test_delta_iso_on_smallest_grafting():
    b = nass_bar()
    c2 = Tree.corolla(2)
    u = graft(c2, 1, c2)
    d = bar_delta(b, u, frozenset({1, 2}))
    targets = [k for img in d.images.values() for k in img]
    assert len(targets) == len(set(targets)) == d.source.total_rank() == d.target.total_rank()
    assert all(abs(v) == 1 for img in d.images.values() for v in img.values())
    assert is_quasi_iso(d)


@pytest.mark.parametrize("op", [ASS, COM], ids=["ass", "com"])
def test_delta_chain_map_and_quasi_iso(op):
    b = Bar(nerve(op))
    for n in (3, 4):
        rep = check_structure_maps(b, n, quasi_iso=True)
        assert rep.ok, rep.failure


def test_delta_natural():
    rep = check_structure_naturality(nass_bar(), 4)
    assert rep.ok, rep.failure
    assert rep.checked > 1000


def test_delta_coassociative():
    rep = check_coassociativity(nass_bar(), 4)
    assert rep.ok and rep.sign == 1
    c2 = Tree.corolla(2)
    u = graft(graft(c2, 1, c2), 1, c2)
    assert coassociativity(nass_bar(), u, *u.inner_edges) == 1


def test_delta_sign_is_load_bearing():
    from dendroidal.barcobar import bar_delta_sign_literal

    def perturbed(d, e, es, er, ds, dr, n1):
        return bar_delta_sign_literal(d, e, es, er, ds, dr, n1) + es

    rep = check_structure_maps(Bar(nerve(ASS), delta_sign=perturbed), 4)
    assert not rep.ok


def test_delta_needs_operad_structure():
    b = Bar(random_test_presheaf(1, (3,), 2))
    with pytest.raises(ContractViolation):
        b.delta(parse_term("((1 2) 3)"), frozenset({1, 2}))


@pytest.mark.parametrize("op", [ASS, COM], ids=["ass", "com"])
def test_cobar_theta_chain_map(op):
    c = CoBar(Bar(nerve(op)))
    for n in (3, 4):
        rep = check_structure_maps(c, n, quasi_iso=True)
        assert rep.ok, rep.failure


def test_cobar_theta_natural_and_associative():
    c = CoBar(Bar(nerve(ASS)))
    assert check_structure_naturality(c, 4).ok
    rep = check_coassociativity(c, 4)
    assert rep.ok and rep.sign == 1


def test_cobar_theta_smallest_grafting():
    c = CoBar(Bar(nerve(ASS)))
    u = parse_term("((1 2) 3)")
    th = cobar_theta(c, u, frozenset({1, 2}))
    th.check()
    assert is_quasi_iso(th)


def test_cobar_of_bar_of_representable_two_leaves():
    c2 = Tree.corolla(2)
    m = representable_A(c2)
    assert homology(CoBar(Bar(m)).value(c2)) == homology(m.value(c2))


# -- extension bijection --------------------------------------------------------------


small = [t for n in (2, 3, 4) for t in enumerate_trees(n)]


def test_extension_bijection_up_to_five_leaves():
    count = 0
    for s in small:
        for r in small:
            if s.leaves + r.leaves - 1 > 5:
                continue
            for a in range(1, s.leaves + 1):
                u = graft(s, a, r)
                dg = degraft(u, frozenset(range(a, a + r.leaves)))
                pairs = set()
                for t in extensions(u):
                    ts, tr = dg.split_tree(t)
                    assert ts in extensions(dg.s) and tr in extensions(dg.r)
                    assert len(t.edges - u.edges) == len(ts.edges - dg.s.edges) + len(tr.edges - dg.r.edges)
                    assert dg.join_tree(ts, tr) == t
                    pairs.add((ts, tr))
                assert len(pairs) == len(extensions(u)) == len(extensions(dg.s)) * len(extensions(dg.r))
                count += 1
    assert count > 100


# -- invariant side ---------------------------------------------------------------------


def _clean(fam):
    return {o: c for o, c in fam.items() if c}


@pytest.mark.parametrize("which", ["bar", "cobar"])
@pytest.mark.parametrize("desc", ["nass", "random"])
def test_rho_intertwines_differentials(which, desc):
    m = nerve(ASS) if desc == "nass" else random_test_presheaf(4, (3,), 3)
    x = Bar(m) if which == "bar" else CoBar(Bar(m))
    for s in trees3:
        view = InvariantView(x, s)
        dc = x.double(s)
        for k in x.value(s).degree_of:
            fam = view.rho({k: 1})
            assert view.action.is_invariant(fam)
            assert view.integral(fam) == {k: 1}
            assert view.rho(dict(dc.dh.get(k, {}))) == _clean(view.ext(fam))
            assert view.rho(dict(dc.dv.get(k, {}))) == _clean(view.internal(fam))


def test_rho_intertwines_corestriction():
    b = Bar(random_test_presheaf(4, (3,), 3))
    views = {s: InvariantView(b, s) for s in trees3}
    for g in all_morphisms(3):
        f = b.corestrict(g)
        for k in b.value(g.source).degree_of:
            lhs = bar_corestrict_invariant(views[g.source], views[g.target], g, views[g.source].rho({k: 1}))
            assert _clean(lhs) == views[g.target].rho(f.images.get(k, {}))


# -- export and golden table -----------------------------------------------------------


def test_export_round_trip():
    b = nass_bar()
    for s in trees3:
        c = b.value(s)
        dump = json.loads(json.dumps(export_complex(c, describe_bar(s))))
        back = import_complex(dump)
        assert back.ranks() == c.ranks()
        assert homology(back) == homology(c)
        g = dump["generators"][0]
        assert set(g) == {"id", "degree", "S", "T", "d", "e", "coeff", "sign"}
    cb = CoBar(b)
    s = parse_term("((1 2) 3)")
    dump = export_complex(cb.value(s), describe_cobar(s))
    assert homology(import_complex(dump)) == homology(cb.value(s))


def _matrix_table(cm):
    src = {k: i for i, k in enumerate(k for n in cm.source.degrees for k in cm.source.basis[n])}
    tgt = {k: i for i, k in enumerate(k for n in cm.target.degrees for k in cm.target.basis[n])}
    return sorted([tgt[t], src[k], v] for k, img in cm.images.items() for t, v in img.items())


def structure_table():
    out = {}
    for desc, op in (("nass", ASS), ("ncom", COM)):
        b = Bar(nerve(op))
        c = CoBar(b)
        for u in trees3:
            for e in u.inner_edges:
                key = f"{desc}|{u.term()}|{sorted(e)}"
                out["delta|" + key] = _matrix_table(b.delta(u, e))
                out["theta|" + key] = _matrix_table(c.theta(u, e))
    return out


def test_golden_structure_maps():
    golden = json.loads(GOLDEN.read_text())
    assert structure_table() == golden
