"""Dendroidal chains, dendroidal homology and the independent oracles.

For a presheaf ``M`` and a leaf count ``l``, the complex ``DC(M)`` has in
bidegree ``(p, q)`` one generator per labelled tree ``T`` with ``p + 1`` inner
edges (enumerated in canonical order) and basis element ``x`` of ``M(T)_q``.
The corolla row ``p = -1`` is the augmentation ``M(C_l)``.  Isomorphism
classes of ``(T, alpha, e)`` are exactly the labelled trees, with ``alpha`` the
labelling and ``e`` sorted; :func:`dc_groupoid` exhibits this explicitly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping, Sequence

from .exactalg import (
    ChainComplex,
    ChainMap,
    ContractViolation,
    DoubleComplex,
    GradedMap,
    HomologyResult,
    homology,
    induced_rank,
    lc_add,
)
from .groupoids import Arrow, GroupoidAction
from .presheaf import NaturalMap, Nerve, Presheaf, SetOperad, nerve
from .trees import (
    Morphism,
    Tree,
    apply_perm,
    comma_poset,
    compose_perms,
    enumerate_trees,
    extensions,
    identity_perm,
    strict_part,
)


@dataclass(frozen=True)
class DCGenerator:
    tree: Tree
    edge_enum: tuple
    coeff: Hashable
    sign: int = 1

    @property
    def p(self) -> int:
        return len(self.edge_enum) - 1


@dataclass
class DCComplex:
    leaves: int
    presheaf: Presheaf
    double: DoubleComplex
    rows: dict  # p -> trees with p+1 inner edges

    @property
    def generators(self) -> list[DCGenerator]:
        out = []
        for (p, q), ks in sorted(self.double.basis.items()):
            for t, x in ks:
                out.append(DCGenerator(t, t.inner_edges, x))
        return out

    def generator_counts(self) -> dict:
        return {pq: len(ks) for pq, ks in sorted(self.double.basis.items())}

    def total(self) -> ChainComplex:
        return self.double.total_complex(0, check=False)

    def face(self, i: int, p: int) -> dict:
        """``d_i`` on row ``p`` as ``{key: lincomb}``: contract the ``i``-th edge."""
        out = {}
        for t in self.rows.get(p, ()):
            e = t.inner_edges[i]
            s = t.contract(e)
            r = self.presheaf.restrict(Morphism.inclusion(s, t))
            for x, img in r.images.items():
                out[(t, x)] = {(s, y): v for y, v in img.items()}
            for x in self.presheaf.value(t).degree_of:
                out.setdefault((t, x), {})
        return out

    def check_simplicial_identities(self) -> list:
        """``d_i d_j = d_{j-1} d_i`` for ``i < j``; returns violations."""
        bad = []
        top = max(self.rows) if self.rows else -1
        for p in range(1, top + 1):
            faces = {i: self.face(i, p) for i in range(p + 1)}
            lower = {i: self.face(i, p - 1) for i in range(p)}
            for j in range(1, p + 1):
                for i in range(j):
                    for k in faces[j]:
                        a = _apply(lower[i], faces[j][k])
                        b = _apply(lower[j - 1], faces[i][k])
                        if a != b:
                            bad.append((p, i, j, k))
        return bad


def _apply(m: Mapping, chain: Mapping) -> dict:
    out: dict = {}
    for k, v in chain.items():
        lc_add(out, m.get(k, {}), v)
    return out


def build_dc(m: Presheaf, leaves: int, check: bool = True) -> DCComplex:
    trees = enumerate_trees(leaves)
    rows: dict = {}
    for t in trees:
        rows.setdefault(len(t.edges) - 1, []).append(t)
    basis: dict = {}
    dh: dict = {}
    dv: dict = {}
    for p, ts in rows.items():
        sgn_int = (-1) ** (p + 1)
        for t in ts:
            c = m.value(t)
            for q, ks in c.basis.items():
                basis.setdefault((p, q), []).extend((t, x) for x in ks)
            for x, b in c.boundary.items():
                dv[(t, x)] = {(t, y): sgn_int * v for y, v in b.items()}
            if p >= 0:
                for i, e in enumerate(t.inner_edges):
                    s = t.contract(e)
                    r = m.restrict(Morphism.inclusion(s, t))
                    for x, img in r.images.items():
                        acc = dh.setdefault((t, x), {})
                        lc_add(acc, {(s, y): (-1) ** i * v for y, v in img.items()})
    return DCComplex(leaves, m, DoubleComplex(basis, dh, dv, check=check), rows)


def dendroidal_homology(m: Presheaf, leaves: int) -> HomologyResult:
    return homology(build_dc(m, leaves, check=False).total())


def dc_map(f: NaturalMap, leaves: int, source: DCComplex | None = None, target: DCComplex | None = None) -> ChainMap:
    """``DC(F)``: apply ``F_T`` to the coefficient of every generator."""
    source = source or build_dc(f.source, leaves, check=False)
    target = target or build_dc(f.target, leaves, check=False)
    imgs = {}
    for t in enumerate_trees(leaves):
        for x, img in f.at(t).images.items():
            imgs[(t, x)] = {(t, y): v for y, v in img.items()}
    return ChainMap(source.total(), target.total(), imgs, check=False)


# -- explicit coinvariant groupoid ------------------------------------------


def dc_groupoid(m: Presheaf, leaves: int, p: int) -> GroupoidAction:
    """The groupoid of ``(T, alpha, e)`` acting on ``M(T)`` with the sign on ``e``.

    Objects are ``(T, alpha, e)`` with ``T`` labelled, ``alpha`` a leaf
    bijection and ``e`` any enumeration of the inner edges.  Arrows are
    relabelling isomorphisms and adjacent transpositions of ``e``.  The
    restriction along an isomorphism must act by a signed basis bijection.
    """
    ident = identity_perm(leaves)
    objs = {}
    for t in enumerate_trees(leaves):
        if len(t.edges) != p + 1:
            continue
        basis = list(m.value(t).degree_of)
        for alpha in itertools.permutations(ident):
            for e in itertools.permutations(t.inner_edges):
                objs[(t, alpha, e)] = basis
    arrows = []
    for (t, alpha, e), basis in objs.items():
        for i in range(leaves - 1):
            theta = list(ident)
            theta[i], theta[i + 1] = theta[i + 1], theta[i]
            theta = tuple(theta)
            t2 = t.relabel(theta)
            iso_back = Morphism(t2, t, theta)  # t2 -> t has perm theta (an involution)
            r = m.restrict(iso_back)
            action = {}
            for x in basis:
                img = r.images.get(x, {})
                if len(img) != 1 or abs(next(iter(img.values()))) != 1:
                    raise ContractViolation("isomorphism does not act by a signed basis bijection")
                (y, v), = img.items()
                action[x] = (v, y)
            e2 = tuple(apply_perm(theta, c) for c in e)
            arrows.append(Arrow((t, alpha, e), (t2, compose_perms(theta, alpha), e2), action))
        for j in range(len(e) - 1):
            e2 = e[:j] + (e[j + 1], e[j]) + e[j + 2 :]
            arrows.append(Arrow((t, alpha, e), (t, alpha, e2), {x: (-1, x) for x in basis}))

    def order(obj):
        t, alpha, e = obj
        return (alpha != ident, e != t.inner_edges, t.sort_key(), alpha, tuple(tuple(sorted(c)) for c in e))

    return GroupoidAction(objs, arrows, order)


# -- category-pair oracle ----------------------------------------------------


def _chains_from(poset_elems: Sequence[Tree], start: Tree) -> list[tuple]:
    """Strictly increasing chains starting at ``start``."""
    above = {t: [u for u in poset_elems if t.edges < u.edges] for t in poset_elems}
    out = []
    stack = [(start,)]
    while stack:
        ch = stack.pop()
        out.append(ch)
        for u in above[ch[-1]]:
            stack.append(ch + (u,))
    return out


def relative_chain_complex(m: Presheaf, elements: Sequence[Tree], start: Tree, shift: int = 0) -> ChainComplex:
    """Relative chains of ``(start/A, start//A)`` with coefficients in ``M``.

    A relative chain is ``start = T_0 < ... < T_n`` with coefficient in
    ``M(T_n)`` and degree ``n + |x| + shift``; faces dropping ``T_0`` vanish in
    the quotient, dropping the top restricts.
    """
    chains = _chains_from(elements, start)
    basis: dict = {}
    bd: dict = {}
    for ch in chains:
        n = len(ch) - 1
        c = m.value(ch[-1])
        for q, ks in c.basis.items():
            basis.setdefault(n + q + shift, []).extend((ch, x) for x in ks)
        for x in c.degree_of:
            img: dict = {}
            for j in range(1, n + 1):
                sub = ch[:j] + ch[j + 1 :]
                if j < n:
                    img[(sub, x)] = img.get((sub, x), 0) + (-1) ** j
                else:
                    r = m.restrict(Morphism.inclusion(ch[-2], ch[-1]))
                    lc_add(img, {(sub, y): (-1) ** j * v for y, v in r.images.get(x, {}).items()})
            lc_add(img, {(ch, y): (-1) ** n * v for y, v in c.boundary.get(x, {}).items()})
            img = {k: v for k, v in img.items() if v}
            if img:
                bd[(ch, x)] = img
    return ChainComplex(basis, bd, check=False)


def category_pair_complex(m: Presheaf, leaves: int) -> ChainComplex:
    """Relative chains of ``(C_l/A, C_l//A)``, degree shifted by -1."""
    poset = comma_poset(leaves)
    return relative_chain_complex(m, poset.elements, poset.minimum, -1)


def relative_category_homology(m: Presheaf, s: Tree) -> HomologyResult:
    """``H_*(S/A, S//A; M)``, shifted by ``|E(S)|`` to match the totalisation of ``DC(M)(S)``."""
    return homology(relative_chain_complex(m, extensions(s), s, len(s.edges)))


def category_pair_homology(m: Presheaf, leaves: int) -> HomologyResult:
    """``H_{*+1}(C_l/A, C_l//A; M)`` reported in dendroidal degrees."""
    return homology(category_pair_complex(m, leaves))


# -- poset oracles -----------------------------------------------------------


def order_complex(elements: Sequence[Hashable], less: callable, reduced: bool = False) -> ChainComplex:
    """Simplicial chains of the nerve of a finite poset (strict chains)."""
    elements = list(elements)
    up = {a: [b for b in elements if less(a, b)] for a in elements}
    chains = []
    stack = [(a,) for a in elements]
    while stack:
        ch = stack.pop()
        chains.append(ch)
        for b in up[ch[-1]]:
            stack.append(ch + (b,))
    basis: dict = {}
    bd: dict = {}
    for ch in chains:
        n = len(ch) - 1
        basis.setdefault(n, []).append(ch)
        if n > 0:
            bd[ch] = {}
            for j in range(n + 1):
                sub = ch[:j] + ch[j + 1 :]
                bd[ch][sub] = bd[ch].get(sub, 0) + (-1) ** j
        elif reduced:
            bd[ch] = {(): 1}
    if reduced and chains:
        basis[-1] = [()]
    return ChainComplex(basis, bd, check=False)


def set_partitions(n: int) -> list[frozenset]:
    """All partitions of ``{1..n}`` as frozensets of frozenset blocks."""
    out = []

    def rec(i, blocks):
        if i > n:
            out.append(frozenset(frozenset(b) for b in blocks))
            return
        for b in blocks:
            b.add(i)
            rec(i + 1, blocks)
            b.remove(i)
        blocks.append({i})
        rec(i + 1, blocks)
        blocks.pop()

    rec(1, [])
    return out


def _refines(a: frozenset, b: frozenset) -> bool:
    return a != b and all(any(x <= y for y in b) for x in a)


def partition_complex_homology(n: int) -> HomologyResult:
    """Reduced homology of the order complex of the proper part of the partition lattice."""
    parts = [p for p in set_partitions(n) if 1 < len(p) < n]
    return homology(order_complex(parts, _refines, reduced=True))


@dataclass
class OperadicPoset:
    leaves: int
    elements: list
    top: list

    def less(self, a, b) -> bool:
        return self._less(a, b)


def operadic_poset(p: SetOperad | Nerve, leaves: int) -> OperadicPoset:
    """Category of elements of ``N(P)`` over ``C_l//A``: pairs ``(T, x)`` ordered by restriction."""
    nv = p if isinstance(p, Nerve) else nerve(p)
    trees = strict_part(comma_poset(leaves)).elements
    elems = [(t, x) for t in trees for x in nv.value(t).basis.get(0, ())]
    restr = {}
    for s in trees:
        for t in trees:
            if s.edges < t.edges:
                for x in nv.value(t).basis.get(0, ()):
                    restr[(s, t, x)] = nv.restrict_inclusion(s, t, x)

    def less(a, b):
        (s, y), (t, x) = a, b
        return s.edges < t.edges and restr[(s, t, x)] == y

    maxdeg = max((len(t.edges) for t in trees), default=0)
    pos = OperadicPoset(leaves, elems, [e for e in elems if len(e[0].edges) == maxdeg])
    pos._less = less
    return pos


def operadic_poset_homology(p: SetOperad | Nerve, leaves: int) -> HomologyResult:
    pos = operadic_poset(p, leaves)
    return homology(order_complex(pos.elements, pos.less))


def partition_poset_homology(p: SetOperad | Nerve, leaves: int) -> HomologyResult:
    """Homology of the operadic poset; for ``Com`` it is the tree model of the partition complex."""
    return operadic_poset_homology(p, leaves)


# -- exact sequences ---------------------------------------------------------


@dataclass
class LESReport:
    ok: bool
    details: list = field(default_factory=list)
    euler: tuple = ()

    def __bool__(self):
        return self.ok


def les_rank_check(i: NaturalMap, j: NaturalMap, leaves: int) -> LESReport:
    """Rank-exactness of the long exact sequence induced by ``0 -> A -> B -> C -> 0``."""
    details = []
    for t in enumerate_trees(leaves):
        a, b, c = i.source.value(t), i.target.value(t), j.target.value(t)
        comp = j.at(t).after(i.at(t))
        if not comp.is_zero():
            return LESReport(False, [f"j o i != 0 at {t}"])
        for n in set(a.basis) | set(b.basis) | set(c.basis):
            if b.rank(n) != a.rank(n) + c.rank(n):
                return LESReport(False, [f"ranks do not add at {t}, degree {n}"])
    da, db, dc_ = (build_dc(x, leaves, check=False) for x in (i.source, i.target, j.target))
    fi = dc_map(i, leaves, da, db)
    fj = dc_map(j, leaves, db, dc_)
    ha, hb, hc = homology(da.total()), homology(db.total()), homology(dc_.total())
    degs = set()
    for h in (ha, hb, hc):
        degs.update(g.degree for g in h.groups)
    ok = True
    for n in sorted(degs):
        ri, rj = induced_rank(fi, n), induced_rank(fj, n)
        ri_prev = induced_rank(fi, n - 1)
        exact_b = hb.betti(n) == ri + rj
        exact_ca = ha.betti(n - 1) == (hc.betti(n) - rj) + ri_prev
        details.append({"degree": n, "rank_i": ri, "rank_j": rj, "exact_B": exact_b, "exact_C_A": exact_ca})
        ok = ok and exact_b and exact_ca
    chi = (ha.euler_characteristic(), hb.euler_characteristic(), hc.euler_characteristic())
    ok = ok and chi[1] == chi[0] + chi[2]
    return LESReport(ok, details, chi)
