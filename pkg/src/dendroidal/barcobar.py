"""Bar and cobar constructions on presheaves and copresheaves over A.

Everything is computed on coinvariant representatives.  A bar generator at
``S`` is ``(T, x)``: an extension ``S <= T`` (labels fixed), the inner edges of
``S`` and of ``T - S`` enumerated in canonical order, and a basis element ``x``
of ``M(T)`` (suspended).  A cobar generator at ``R`` is ``(S, y)`` with
``R <= S`` and ``y`` in ``Y(S)`` (desuspended).  Every formula that reorders an
enumeration multiplies by the sign of the sorting permutation.

Suspension conventions: ``|sx| = |x| + 1`` with ``d(sx) = -s(dx)`` and
``|s^-1 y| = |y| - 1`` with ``d(s^-1 y) = -s^-1(dy)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping

from .exactalg import (
    ChainComplex,
    ChainMap,
    ContractViolation,
    DoubleComplex,
    QuasiIsoCertificate,
    is_quasi_iso,
    lc_add,
    lc_scale,
    tensor,
    tensor_map,
)
from .presheaf import Copresheaf, NaturalMap, Presheaf
from .trees import (
    Morphism,
    Tree,
    addable_edges,
    degraft,
    edge_sequence_sign,
    enumerate_trees,
    extensions,
    invert_perm,
    permutation_sign,
    sort_edges,
    split_morphism,
)


def _sorted_diff(t: Tree, s: Tree) -> tuple:
    return sort_edges(t.edges - s.edges)


def _map_side(dg, cs, side):
    if side == "s":
        return [frozenset(dg.lower[i] for i in c) for c in cs]
    return [frozenset(dg.upper[i] for i in c) for c in cs]


# -- bar ---------------------------------------------------------------------


def bar_delta_sign_literal(d, e, e_s, e_r, d_s, d_r, n1) -> int:
    """Koszul exponent ``1 + d + e + e_S d_R + (e_R + d_R) n_1 + n_1 - 1``."""
    return 1 + d + e + e_s * d_r + (e_r + d_r) * n1 + n1 - 1


def bar_delta_sign_tw(d, e, e_s, e_r, d_s, d_r, n1) -> int:
    """The second description: ``1 + d_S + e_S + d_R + e_R + e_S d_R`` then the shift and twist."""
    return (1 + d_s + e_s + d_r + e_r + e_s * d_r) + (n1 - 1) + n1 * (d_r + e_r)


class Bar(Copresheaf):
    """``Bar(M)``: a copresheaf of total complexes.

    With ``suspend=False`` the plain double complex ``DC(M)(S)`` is totalised
    in degree ``p + q + |x|`` instead.
    """

    def __init__(self, m: Presheaf, suspend: bool = True, delta_sign: Callable = bar_delta_sign_literal):
        super().__init__()
        self.m = m
        self.suspend = suspend
        self.delta_sign = delta_sign
        self.descriptor = f"Bar({m.descriptor})"
        self._double: dict = {}
        self._delta: dict = {}

    def leaf_counts(self):
        return self.m.leaf_counts()

    def generator_degree(self, s: Tree, key) -> int:
        t, x = key
        return len(t.edges) + self.m.value(t).degree_of[x] + (1 if self.suspend else 0)

    def double(self, s: Tree) -> DoubleComplex:
        dc = self._double.get(s)
        if dc is not None:
            return dc
        q = len(s.edges)
        basis: dict = {}
        dh: dict = {}
        dv: dict = {}
        shift = 1 if self.suspend else 0
        for t in extensions(s):
            e = _sorted_diff(t, s)
            p = len(e)
            c = self.m.value(t)
            for deg, ks in c.basis.items():
                basis.setdefault((p, deg + shift), []).extend((t, x) for x in ks)
            sgn_int = (-1) ** (q + p) * (-1 if self.suspend else 1)
            for x, b in c.boundary.items():
                dv[(t, x)] = {(t, y): sgn_int * v for y, v in b.items()}
            for i, ei in enumerate(e):
                u = t.contract(ei)
                r = self.m.restrict(Morphism.inclusion(u, t))
                sg = (-1) ** (q + i)
                for x, img in r.images.items():
                    lc_add(dh.setdefault((t, x), {}), {(u, y): sg * v for y, v in img.items()})
        dc = DoubleComplex(basis, dh, dv, check=False)
        self._double[s] = dc
        return dc

    def _value(self, s):
        return self.double(s).total_complex(len(s.edges), check=False)

    def ext(self, s: Tree) -> dict:
        return self.double(s).dh

    # functoriality

    def _corestrict_images(self, f: Morphism) -> dict:
        iso, inc = f.factor()
        a = self._iso_images(iso)
        if inc.is_identity:
            return a
        b = self._inclusion_images(inc.source, inc.target)
        out = {}
        for k, img in a.items():
            acc: dict = {}
            for k2, v in img.items():
                lc_add(acc, b.get(k2, {}), v)
            if acc:
                out[k] = acc
        return out

    def _iso_images(self, f: Morphism) -> dict:
        s, s2 = f.source, f.target
        inv = invert_perm(f.perm)
        ds = edge_sequence_sign([f.edge_image(c) for c in s.inner_edges])
        out = {}
        for t in extensions(s):
            t2 = t.relabel(f.perm)
            es = edge_sequence_sign([f.edge_image(c) for c in _sorted_diff(t, s)])
            r = self.m.restrict(Morphism(t2, t, inv))
            for x, img in r.images.items():
                out[(t, x)] = {(t2, y): ds * es * v for y, v in img.items()}
        return out

    def _inclusion_images(self, s: Tree, s2: Tree) -> dict:
        out = {}
        d = list(s.inner_edges)
        for t in extensions(s):
            if not s2.edges <= t.edges:
                continue
            e = _sorted_diff(t, s)
            e1 = [c for c in e if c in s2.edges]
            e2 = [c for c in e if c not in s2.edges]
            sg = edge_sequence_sign(e1 + e2) * edge_sequence_sign(d + e1)
            for x in self.m.value(t).degree_of:
                out[(t, x)] = {(t, x): sg}
        return out

    # cooperad structure

    def delta(self, u: Tree, edge: frozenset) -> ChainMap:
        """``Delta : Bar(M)(u) -> Bar(M)(s) (x) Bar(M)(r)`` for the cut of ``u`` at ``edge``."""
        edge = frozenset(edge)
        key = (u, edge)
        if key in self._delta:
            return self._delta[key]
        if not hasattr(self.m, "theta"):
            raise ContractViolation(f"{self.m.descriptor} carries no operad structure")
        dg = degraft(u, edge)
        src = self.value(u)
        tgt = tensor(self.value(dg.s), self.value(dg.r))
        d = list(u.inner_edges)
        d_s = [c for c in d if not c <= edge]
        d_r = [c for c in d if c < edge]
        sg_d = edge_sequence_sign([edge] + d_s + d_r)
        sg_d *= edge_sequence_sign(_map_side(dg, d_s, "s")) * edge_sequence_sign(_map_side(dg, d_r, "r"))
        shift = 1 if self.suspend else 0
        imgs: dict = {}
        for t in extensions(u):
            e = _sorted_diff(t, u)
            e_s = [c for c in e if not c <= edge]
            e_r = [c for c in e if c < edge]
            sg = sg_d * edge_sequence_sign(e_s + e_r)
            sg *= edge_sequence_sign(_map_side(dg, e_s, "s")) * edge_sequence_sign(_map_side(dg, e_r, "r"))
            t_s, t_r = dg.split_tree(t)
            th = self.m.theta(t, edge)
            ms = self.m.value(t_s)
            for x, img in th.images.items():
                acc = imgs.setdefault((t, x), {})
                for (x1, x2), v in img.items():
                    n1 = ms.degree_of[x1] + shift
                    ex = self.delta_sign(len(d), len(e), len(e_s), len(e_r), len(d_s), len(d_r), n1)
                    k = ((t_s, x1), (t_r, x2))
                    acc[k] = acc.get(k, 0) + (-1) ** ex * sg * v
        m = ChainMap(src, tgt, {k: v for k, v in imgs.items() if v}, check=False)
        self._delta[key] = m
        return m


def bar(m: Presheaf, **kw) -> Bar:
    return Bar(m, **kw)


def bar_corestrict(b: Bar, gamma: Morphism, element: Mapping) -> dict:
    return b.corestrict(gamma)(element)


def bar_delta(b: Bar, u: Tree, edge: frozenset) -> ChainMap:
    return b.delta(u, edge)


def bar_map(f: NaturalMap, source: Bar, target: Bar) -> NaturalMap:
    """``Bar(F)``: apply ``F_T`` to the coefficient."""

    def comp(s):
        imgs = {}
        for t in extensions(s):
            for x, img in f.at(t).images.items():
                imgs[(t, x)] = {(t, y): v for y, v in img.items()}
        return imgs

    return NaturalMap(source, target, comp)


# -- cobar -------------------------------------------------------------------


def cobar_theta_sign_literal(d_s, e_s, d_r, e_r) -> int:
    """``(d_S + e_S)(d_R + e_R) + d_R e_S``."""
    return (d_s + e_s) * (d_r + e_r) + d_r * e_s


class CoBar(Presheaf):
    """``coBar(Y)``: a presheaf of total complexes."""

    def __init__(self, y: Copresheaf, theta_sign: Callable = cobar_theta_sign_literal):
        super().__init__()
        self.y = y
        self.theta_sign = theta_sign
        self.descriptor = f"coBar({y.descriptor})"
        self._double: dict = {}
        self._theta: dict = {}

    def leaf_counts(self):
        return self.y.leaf_counts()

    def double(self, r: Tree) -> DoubleComplex:
        """Bidegree ``(-q, n)`` with ``n = |y| - 1``; both differentials lower the total degree."""
        dc = self._double.get(r)
        if dc is not None:
            return dc
        nb = len(r.edges)
        basis: dict = {}
        dh: dict = {}
        dv: dict = {}
        for s in extensions(r):
            d = list(_sorted_diff(s, r))
            q = len(d)
            c = self.y.value(s)
            for deg, ks in c.basis.items():
                basis.setdefault((-q, deg - 1), []).extend((s, y) for y in ks)
            sgn_int = -((-1) ** (nb + q))
            for y, b in c.boundary.items():
                dv[(s, y)] = {(s, z): sgn_int * v for z, v in b.items()}
            for f in addable_edges(s):
                s2 = Tree(s.leaves, s.edges | {f})
                sg = edge_sequence_sign(d + [f])
                push = self.y.corestrict(Morphism.inclusion(s, s2))
                for y in c.degree_of:
                    img = push.images.get(y)
                    if img:
                        lc_add(dh.setdefault((s, y), {}), {(s2, z): sg * v for z, v in img.items()})
        dc = DoubleComplex(basis, dh, dv, check=False)
        self._double[r] = dc
        return dc

    def _value(self, r):
        return self.double(r).total_complex(-len(r.edges), check=False)

    def ext(self, r: Tree) -> dict:
        return self.double(r).dh

    def _restrict_images(self, f: Morphism) -> dict:
        # f : R' -> R factors as R' --iso--> R'' <= R; f^* = iso^* o inc^*
        iso, inc = f.factor()
        b = self._inclusion_images(inc.source, inc.target)
        if iso.is_identity:
            return b
        a = self._iso_images(iso)
        out = {}
        for k, img in b.items():
            acc: dict = {}
            for k2, v in img.items():
                lc_add(acc, a.get(k2, {}), v)
            if acc:
                out[k] = acc
        return out

    def _inclusion_images(self, r2: Tree, r: Tree) -> dict:
        """``coBar(R) -> coBar(R2)`` for ``R2 <= R``."""
        b = list(r.inner_edges)
        b1 = [c for c in b if c in r2.edges]
        b2 = [c for c in b if c not in r2.edges]
        sg0 = edge_sequence_sign(b1 + b2)
        out = {}
        for s in extensions(r):
            d = list(_sorted_diff(s, r))
            sg = sg0 * edge_sequence_sign(b2 + d)
            for y in self.y.value(s).degree_of:
                out[(s, y)] = {(s, y): sg}
        return out

    def _iso_images(self, f: Morphism) -> dict:
        """``coBar(R'') -> coBar(R')`` for an isomorphism ``f : R' -> R''``."""
        r1, r2 = f.source, f.target
        inv = invert_perm(f.perm)
        sb = edge_sequence_sign([frozenset(inv[i - 1] for i in c) for c in r2.inner_edges])
        out = {}
        for s in extensions(r2):
            s1 = s.relabel(inv)
            sd = edge_sequence_sign([frozenset(inv[i - 1] for i in c) for c in _sorted_diff(s, r2)])
            push = self.y.corestrict(Morphism(s, s1, inv))
            for y, img in push.images.items():
                out[(s, y)] = {(s1, z): sb * sd * v for z, v in img.items()}
        return out

    # operad structure

    def theta(self, u: Tree, edge: frozenset) -> ChainMap:
        """``coBar(Y)(u) -> coBar(Y)(s) (x) coBar(Y)(r)`` for the cut of ``u`` at ``edge``."""
        edge = frozenset(edge)
        key = (u, edge)
        if key in self._theta:
            return self._theta[key]
        if not hasattr(self.y, "delta"):
            raise ContractViolation(f"{self.y.descriptor} carries no cooperad structure")
        dg = degraft(u, edge)
        src = self.value(u)
        tgt = tensor(self.value(dg.s), self.value(dg.r))
        b = list(u.inner_edges)
        d_s = [c for c in b if not c <= edge]
        d_r = [c for c in b if c < edge]
        sg_b = edge_sequence_sign([edge] + d_s + d_r)
        sg_b *= edge_sequence_sign(_map_side(dg, d_s, "s")) * edge_sequence_sign(_map_side(dg, d_r, "r"))
        imgs: dict = {}
        for t in extensions(u):
            e = list(_sorted_diff(t, u))
            e_s = [c for c in e if not c <= edge]
            e_r = [c for c in e if c < edge]
            sg = sg_b * edge_sequence_sign(e_s + e_r)
            sg *= edge_sequence_sign(_map_side(dg, e_s, "s")) * edge_sequence_sign(_map_side(dg, e_r, "r"))
            sg *= (-1) ** self.theta_sign(len(d_s), len(e_s), len(d_r), len(e_r))
            t_s, t_r = dg.split_tree(t)
            dl = self.y.delta(t, edge)
            ys = self.y.value(t_s)
            for y, img in dl.images.items():
                acc = imgs.setdefault((t, y), {})
                for (y1, y2), v in img.items():
                    n1 = ys.degree_of[y1]
                    tw = n1 + (n1 - 1) * (len(d_r) + len(e_r))
                    k = ((t_s, y1), (t_r, y2))
                    acc[k] = acc.get(k, 0) + (-1) ** tw * sg * v
        m = ChainMap(src, tgt, {k: v for k, v in imgs.items() if v}, check=False)
        self._theta[key] = m
        return m


def cobar(y: Copresheaf, **kw) -> CoBar:
    return CoBar(y, **kw)


def cobar_theta(c: CoBar, u: Tree, edge: frozenset) -> ChainMap:
    return c.theta(u, edge)


def cobar_map(f: NaturalMap, source: CoBar, target: CoBar) -> NaturalMap:
    """``coBar(G)``: apply ``G_S`` to the coefficient."""

    def comp(r):
        imgs = {}
        for s in extensions(r):
            for y, img in f.at(s).images.items():
                imgs[(s, y)] = {(s, z): v for z, v in img.items()}
        return imgs

    return NaturalMap(source, target, comp)


# -- structure checks --------------------------------------------------------


def _structure(x, u: Tree, edge) -> ChainMap:
    return x.delta(u, edge) if isinstance(x, Copresheaf) else x.theta(u, edge)


def _transport(x, f: Morphism) -> ChainMap:
    return x.corestrict(f) if isinstance(x, Copresheaf) else x.restrict(f)


@dataclass
class StructureReport:
    ok: bool
    checked: int
    sign: int | None = None
    failure: str | None = None


def _compare_up_to_sign(lhs: dict, rhs: dict) -> int | None:
    """``+1`` or ``-1`` if ``lhs == sign * rhs``, else ``None``."""
    if lhs == rhs:
        return 1
    if lhs == {k: {t: -v for t, v in img.items()} for k, img in rhs.items()}:
        return -1
    return None


def coassociativity(x, u: Tree, e1: frozenset, e2: frozenset) -> int | None:
    """Compare the two ways of cutting ``u`` at two inner edges.

    Works for ``Bar`` (via ``delta``) and ``CoBar`` (via ``theta``).  Returns the
    global sign relating the two composites (``None`` when they are not
    proportional).  For nested edges the composites are compared after
    reassociation, for disjoint edges after the Koszul swap of the two upper
    factors.
    """
    e1, e2 = frozenset(e1), frozenset(e2)
    if e2 < e1:
        e1, e2 = e2, e1
    if e1 < e2:
        # outer cut at e2, then the inner edge inside the upper part
        inner, outer = e1, e2
        d_out = degraft(u, outer)
        first = _structure(x, u, outer)
        second = tensor_map(ChainMap.identity(x.value(d_out.s)), _structure(x, d_out.r, d_out.split_edge(inner)[1]))
        lhs = second.after(first)
        d_in = degraft(u, inner)
        first2 = _structure(x, u, inner)
        second2 = tensor_map(_structure(x, d_in.s, d_in.split_edge(outer)[1]), ChainMap.identity(x.value(d_in.r)))
        rhs = second2.after(first2)
        # reassociate ((a, b), c) -> (a, (b, c))
        rhs_images = {
            k: {(a, (b, c)): v for ((a, b), c), v in img.items()} for k, img in rhs.images.items()
        }
        return _compare_up_to_sign(lhs.images, rhs_images)
    d1, d2 = degraft(u, e1), degraft(u, e2)
    lhs = tensor_map(_structure(x, d1.s, d1.split_edge(e2)[1]), ChainMap.identity(x.value(d1.r))).after(
        _structure(x, u, e1)
    )
    rhs = tensor_map(_structure(x, d2.s, d2.split_edge(e1)[1]), ChainMap.identity(x.value(d2.r))).after(
        _structure(x, u, e2)
    )
    lhs_images = {}
    for k, img in lhs.images.items():
        acc = {}
        for ((a, b), c), v in img.items():
            sg = (-1) ** (x.value(d1.r).degree_of[c] * x.value(d2.r).degree_of[b])
            acc[((a, c), b)] = sg * v
        lhs_images[k] = acc
    return _compare_up_to_sign(lhs_images, rhs.images)


def check_coassociativity(x, n: int) -> StructureReport:
    """All pairs of cut edges on all trees with ``n`` leaves; the sign must be uniform per kind."""
    checked = 0
    signs: dict = {}
    for u in enumerate_trees(n):
        es = u.inner_edges
        for i, a in enumerate(es):
            for b in es[i + 1:]:
                kind = "nested" if (a < b or b < a) else "disjoint"
                sg = coassociativity(x, u, a, b)
                if sg is None:
                    return StructureReport(False, checked, None, f"{u.term()} at {sorted(a)}, {sorted(b)}")
                if signs.setdefault(kind, sg) != sg:
                    return StructureReport(False, checked, None, f"non-uniform {kind} sign at {u.term()}")
                checked += 1
    sign = signs.get("nested", signs.get("disjoint"))
    return StructureReport(True, checked, sign)


def check_structure_naturality(x, n: int) -> StructureReport:
    """``Delta`` (or ``theta``) commutes with every morphism, split at the cut edge."""
    from .trees import all_morphisms

    covariant = isinstance(x, Copresheaf)
    checked = 0
    for f in all_morphisms(n):
        for edge in f.source.inner_edges:
            e2, fs, fr = split_morphism(f, edge)
            if covariant:
                lhs = _structure(x, f.target, e2).after(x.corestrict(f))
                rhs = tensor_map(x.corestrict(fs), x.corestrict(fr)).after(_structure(x, f.source, edge))
            else:
                lhs = _structure(x, f.source, edge).after(x.restrict(f))
                rhs = tensor_map(x.restrict(fs), x.restrict(fr)).after(_structure(x, f.target, e2))
            if lhs.images != rhs.images:
                return StructureReport(False, checked, None, f"naturality fails at {f} cut {sorted(edge)}")
            checked += 1
    return StructureReport(True, checked)


def check_structure_maps(x, n: int, quasi_iso: bool = False) -> StructureReport:
    """Chain-map property (and optionally quasi-isomorphism) at every cut of every tree."""
    checked = 0
    for u in enumerate_trees(n):
        for edge in u.inner_edges:
            m = _structure(x, u, edge)
            try:
                m.check()
            except ContractViolation as err:
                return StructureReport(False, checked, None, f"{u.term()} cut {sorted(edge)}: {err}")
            if quasi_iso and not is_quasi_iso(m):
                return StructureReport(False, checked, None, f"{u.term()} cut {sorted(edge)}: not a quasi-isomorphism")
            checked += 1
    return StructureReport(True, checked)


# -- invariant-side views ------------------------------------------------------


def _signed(images: Mapping) -> dict:
    out = {}
    for k, img in images.items():
        if len(img) != 1 or abs(next(iter(img.values()))) != 1:
            raise ContractViolation("isomorphisms must act by signed basis bijections")
        (t, v), = img.items()
        out[k] = (v, t)
    return out


class InvariantView:
    """The full groupoid of towers over a base tree, with ``rho`` and the invariant-side formulas.

    Objects are ``(perm, T, d, e)``: a morphism ``alpha = (perm, T)`` out of the
    base and arbitrary enumerations ``d`` (inner edges of the base) and ``e``
    (inner edges of ``T`` off the image of ``alpha``).  ``x`` is a :class:`Bar`
    (families valued in ``M(T)``) or a :class:`CoBar` (valued in ``Y(T)``).
    """

    def __init__(self, x, base: Tree):
        import itertools

        from .groupoids import Arrow, GroupoidAction
        from .trees import apply_perm, compose_perms

        self.x = x
        self.base = base
        self.is_bar = isinstance(x, Bar)
        self.inner = x.m if self.is_bar else x.y
        n = base.leaves
        perms = list(itertools.permutations(range(1, n + 1)))
        objects = {}
        for t in enumerate_trees(n):
            keys = tuple(self.inner.value(t).degree_of)
            for p in perms:
                img = {apply_perm(p, c) for c in base.edges}
                if not img <= t.edges:
                    continue
                rest = sort_edges(t.edges - img)
                for d in itertools.permutations(base.inner_edges):
                    for e in itertools.permutations(rest):
                        objects[(p, t, d, e)] = keys
        arrows = []
        for (p, t, d, e) in objects:
            ident = {k: (1, k) for k in objects[(p, t, d, e)]}
            for i in range(len(d) - 1):
                d2 = d[:i] + (d[i + 1], d[i]) + d[i + 2:]
                arrows.append(Arrow((p, t, d, e), (p, t, d2, e), {k: (-1, k2) for k, (_, k2) in ident.items()}))
            for i in range(len(e) - 1):
                e2 = e[:i] + (e[i + 1], e[i]) + e[i + 2:]
                arrows.append(Arrow((p, t, d, e), (p, t, d, e2), {k: (-1, k2) for k, (_, k2) in ident.items()}))
            for pi in perms:
                if pi == tuple(range(1, n + 1)):
                    continue
                t2 = t.relabel(pi)
                tgt = (compose_perms(pi, p), t2, d, tuple(apply_perm(pi, c) for c in e))
                theta = Morphism(t, t2, pi)
                if self.is_bar:
                    act = self.inner.restrict(theta.inverse()).images
                else:
                    act = self.inner.corestrict(theta).images
                arrows.append(Arrow((p, t, d, e), tgt, _signed(act)))
        self.objects = objects
        self.action = GroupoidAction(objects, arrows, order=lambda o: (o[1].sort_key(), o[0], o[2], o[3]))

    def standard(self, t: Tree) -> tuple:
        n = self.base.leaves
        return (tuple(range(1, n + 1)), t, tuple(self.base.inner_edges), _sorted_diff(t, self.base))

    def rho(self, chain: Mapping) -> dict:
        """Coinvariant chain ``{(T, x): c}`` -> invariant family ``{object: chain}``."""
        out: dict = {}
        for (t, k), v in chain.items():
            lc_add(out, self.action.project(self.standard(t), {k: v}), 1)
        return self.action.rho({kk: v for kk, v in out.items() if v})

    def integral(self, family: Mapping) -> dict:
        """Inverse of :meth:`rho`, back in the ``(T, x)`` basis."""
        if not hasattr(self, "_std_of"):
            self._std_of = {}
            ident = tuple(range(1, self.base.leaves + 1))
            for obj in self.objects:
                if obj[0] == ident and obj == self.standard(obj[1]):
                    self._std_of[self.action.rep[obj]] = obj
        out: dict = {}
        for (rep, k), v in self.action.orbit_integral(family).items():
            std = self._std_of[rep]
            for kk, w in _apply_family_transport(self.action, rep, std, {k: v}).items():
                out[(std[1], kk)] = out.get((std[1], kk), 0) + w
        return {k: v for k, v in out.items() if v}

    def ext(self, family: Mapping) -> dict:
        """Invariant-side external differential."""
        out: dict = {}
        for obj in self.objects:
            p, t, d, e = obj
            acc: dict = {}
            if self.is_bar:
                for g in addable_edges(t):
                    t2 = Tree(t.leaves, t.edges | {g})
                    src = family.get((p, t2, d, (g,) + e), {})
                    if src:
                        lc_add(acc, self.inner.restrict(Morphism.inclusion(t, t2))(src), (-1) ** len(d))
            else:
                q = len(e)
                for j, ej in enumerate(e):
                    t2 = t.contract(ej)
                    src = family.get((p, t2, d, e[:j] + e[j + 1:]), {})
                    if src:
                        lc_add(acc, self.inner.corestrict(Morphism.inclusion(t2, t))(src), (-1) ** (q - 1 - j))
            if acc:
                out[obj] = acc
        return out

    def internal(self, family: Mapping) -> dict:
        """Invariant-side internal differential, including the (de)suspension sign."""
        out: dict = {}
        for obj, chain in family.items():
            p, t, d, e = obj
            img = self.inner.value(t).d(chain)
            if img:
                out[obj] = lc_scale(img, -((-1) ** (len(d) + len(e))))
        return out


def _apply_family_transport(action, src, dst, chain):
    from .groupoids import _apply, _compose, _invert

    g = _compose(action.from_rep[dst], _invert(action.from_rep[src]))
    return _apply(g, chain)


def bar_corestrict_invariant(view_src: InvariantView, view_dst: InvariantView, gamma: Morphism, family: Mapping) -> dict:
    """``(gamma_* w)_{alpha, d|e} = (-1)^tau w_{alpha gamma, d'|d'' e}``."""
    from .trees import apply_perm, compose_perms, invert_perm as inv

    out = {}
    ginv = inv(gamma.perm)
    image = {gamma.edge_image(c) for c in gamma.source.edges}
    for obj in view_dst.objects:
        p, t, d, e = obj
        d1 = [c for c in d if c in image]
        d2 = [c for c in d if c not in image]
        pos = {c: i for i, c in enumerate(d)}
        sign = permutation_sign([pos[c] for c in d1 + d2])
        src = (
            compose_perms(p, gamma.perm),
            t,
            tuple(apply_perm(ginv, c) for c in d1),
            tuple(apply_perm(p, c) for c in d2) + e,
        )
        val = family.get(src, {})
        if val:
            out[obj] = lc_scale(val, sign)
    return out


# -- simple copresheaves -----------------------------------------------------


class ConstantCopresheaf(Copresheaf):
    def __init__(self, c: ChainComplex | None = None, descriptor: str = "coconst:Z"):
        super().__init__()
        self.c = c if c is not None else ChainComplex.unit()
        self.descriptor = descriptor

    def _value(self, t):
        return self.c

    def _corestrict_images(self, f):
        return {k: {k: 1} for k in self.c.degree_of}


# -- export ------------------------------------------------------------------


def export_complex(c: ChainComplex, describe: Callable) -> dict:
    """Generators with descriptors and boundary matrices in coordinate form."""
    gens = []
    index = {}
    for n in c.degrees:
        for k in c.basis[n]:
            index[k] = len(gens)
            gens.append({"id": len(gens), "degree": n, **describe(k)})
    entries = []
    for k, b in c.boundary.items():
        for t, v in sorted(b.items(), key=lambda kv: index[kv[0]]):
            entries.append([index[t], index[k], v])
    entries.sort()
    return {"generators": gens, "boundary": entries}


def import_complex(dump: Mapping) -> ChainComplex:
    basis: dict = {}
    for g in dump["generators"]:
        basis.setdefault(g["degree"], []).append(g["id"])
    bd: dict = {}
    for row, col, v in dump["boundary"]:
        bd.setdefault(col, {})[row] = v
    return ChainComplex(basis, bd)


def _edge_list(cs) -> list:
    return [sorted(c) for c in cs]


def describe_bar(s: Tree):
    def f(key):
        t, x = key
        return {
            "S": s.term(),
            "T": t.term(),
            "d": _edge_list(s.inner_edges),
            "e": _edge_list(_sorted_diff(t, s)),
            "coeff": repr(x),
            "sign": 1,
        }

    return f


def describe_cobar(r: Tree):
    def f(key):
        s, y = key
        return {
            "S": r.term(),
            "T": s.term(),
            "d": _edge_list(r.inner_edges),
            "e": _edge_list(_sorted_diff(s, r)),
            "coeff": repr(y),
            "sign": 1,
        }

    return f
