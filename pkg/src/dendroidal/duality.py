"""Twisting cocycles, the bar-cobar adjunction and the duality theorem.

Conventions (coinvariant side throughout):

* a generator of ``coBar(Bar(M))(R)`` is ``(S, (T, x))`` with ``R <= S <= T``
  and ``x`` in ``M(T)``;
* a generator of ``Bar(coBar(Y))(R)`` is ``(S, (T, y))`` with ``R <= S <= T``
  and ``y`` in ``Y(T)``.

In both cases ``b`` (resp. ``d``) is the sorted list of inner edges of ``R``
(resp. of ``S`` not in ``R``).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Mapping

from .barcobar import Bar, CoBar, bar_map, cobar_map
from .exactalg import (
    ChainMap,
    ContractViolation,
    GradedMap,
    HomologyResult,
    is_quasi_iso,
    lc_add,
)
from .presheaf import Copresheaf, NaturalMap, Presheaf, check_naturality
from .trees import (
    Morphism,
    Tree,
    addable_edges,
    all_morphisms,
    cluster_key,
    edge_sequence_sign,
    enumerate_trees,
    extensions,
    sort_edges,
)


def _diff(t: Tree, s: Tree) -> list:
    return list(sort_edges(t.edges - s.edges))


class MaurerCartanError(ContractViolation):
    def __init__(self, tree, y, defect):
        super().__init__(f"Maurer-Cartan fails at {tree.term()} on {y!r}: defect {defect}")
        self.tree = tree
        self.y = y
        self.defect = defect


# -- unit and counit ---------------------------------------------------------


def counit(m: Presheaf, cobar_bar: CoBar | None = None) -> NaturalMap:
    """``eps : coBar(Bar(M)) -> M``; towers with a non-trivial bar extension go to zero."""
    cb = cobar_bar if cobar_bar is not None else CoBar(Bar(m))

    def comp(r):
        b = list(r.inner_edges)
        imgs = {}
        for key in cb.value(r).degree_of:
            s, (t, x) = key
            if t != s:
                continue
            sg = edge_sequence_sign(b + _diff(s, r))
            if s == r:
                imgs[key] = {x: sg}
            else:
                res = m.restrict(Morphism.inclusion(r, s)).images.get(x, {})
                imgs[key] = {z: sg * v for z, v in res.items()}
        return imgs

    return NaturalMap(cb, m, comp)


def unit(y: Copresheaf, bar_cobar: Bar | None = None) -> NaturalMap:
    """``eta : Y -> Bar(coBar(Y))``, ``y -> sum over S <= T of (T, (T, alpha_* y))``."""
    bc = bar_cobar if bar_cobar is not None else Bar(CoBar(y))

    def comp(s):
        d = list(s.inner_edges)
        imgs: dict = {}
        for t in extensions(s):
            sg = edge_sequence_sign(d + _diff(t, s))
            push = y.corestrict(Morphism.inclusion(s, t))
            for k in y.value(s).degree_of:
                acc = imgs.setdefault(k, {})
                for z, v in push.images.get(k, {}).items():
                    acc[(t, (t, z))] = sg * v
        return imgs

    return NaturalMap(y, bc, comp)


def section(m: Presheaf, r: Tree, cobar_bar: CoBar | None = None) -> GradedMap:
    """The non-natural graded section ``sigma_R(x) = (R, (R, x))`` of ``eps_R``."""
    cb = cobar_bar if cobar_bar is not None else CoBar(Bar(m))
    src = m.value(r)
    return GradedMap(src, cb.value(r), {x: {(r, (r, x)): 1} for x in src.degree_of}, 0)


# -- twisting cocycles -------------------------------------------------------


@dataclass
class TwistingCocycle:
    """``tau_S : Y(S) -> M(S)`` of degree ``-1 - |E(S)|``, for every tree with ``n`` leaves.

    ``components[S]`` maps a basis key of ``Y(S)`` to a linear combination in
    ``M(S)``; the inner edges of ``S`` are enumerated in sorted order.
    """

    y: Copresheaf
    m: Presheaf
    leaves: int
    components: dict = field(default_factory=dict)

    def at(self, s: Tree, key) -> dict:
        return self.components.get(s, {}).get(key, {})

    def graded(self, s: Tree) -> GradedMap:
        return GradedMap(self.y.value(s), self.m.value(s), self.components.get(s, {}), -1 - len(s.edges))

    def maurer_cartan_defect(self) -> tuple | None:
        """First ``(S, y, defect)`` violating

        ``sum_f sign(b f) f^* tau_{S+f}(f_* y) = d_M tau_S(y) + (-1)^b tau_S(d_Y y)``.
        """
        for s in enumerate_trees(self.leaves):
            b = list(s.inner_edges)
            ys = self.y.value(s)
            ms = self.m.value(s)
            for k in ys.degree_of:
                lhs: dict = {}
                for f in addable_edges(s):
                    s2 = Tree(s.leaves, s.edges | {f})
                    inc = Morphism.inclusion(s, s2)
                    pushed = self.y.corestrict(inc).images.get(k, {})
                    inner: dict = {}
                    for z, v in pushed.items():
                        lc_add(inner, self.at(s2, z), v)
                    back = self.m.restrict(inc)
                    lc_add(lhs, back(inner), edge_sequence_sign(b + [f]))
                rhs = ms.d(self.at(s, k))
                dy: dict = {}
                for z, v in ys.boundary.get(k, {}).items():
                    lc_add(dy, self.at(s, z), v)
                lc_add(rhs, dy, (-1) ** len(b))
                lc_add(lhs, rhs, -1)
                if lhs:
                    return s, k, lhs
        return None

    def satisfies_maurer_cartan(self) -> bool:
        return self.maurer_cartan_defect() is None

    def equivariance_defect(self) -> tuple | None:
        """First ``(f, y)`` with ``tau_S(y) != f^* tau_S'(f_* y)`` for an isomorphism ``f : S -> S'``.

        The Maurer-Cartan equation only sees inclusions; compatibility with
        relabellings is a separate condition on the family.
        """
        for f in all_morphisms(self.leaves):
            if not f.is_iso:
                continue
            push = self.y.corestrict(f)
            back = self.m.restrict(f)
            for k in self.y.value(f.source).degree_of:
                moved: dict = {}
                for z, v in push.images.get(k, {}).items():
                    lc_add(moved, self.at(f.target, z), v)
                if back(moved) != {x: v for x, v in self.at(f.source, k).items() if v}:
                    return f, k
        return None

    def is_equivariant(self) -> bool:
        return self.equivariance_defect() is None

    def require(self) -> None:
        bad = self.maurer_cartan_defect()
        if bad is not None:
            raise MaurerCartanError(*bad)
        iso = self.equivariance_defect()
        if iso is not None:
            raise ContractViolation(f"twisting family is not compatible with {iso[0]} on {iso[1]!r}")


def universal_cocycle(m: Presheaf, leaves: int, bar: Bar | None = None) -> TwistingCocycle:
    """``tau(T, x) = x`` when the bar extension is trivial, else ``0``.

    Its ``phi`` is the counit and its ``psi`` the identity of ``Bar(M)``.
    """
    b = bar if bar is not None else Bar(m)
    comps = {}
    for s in enumerate_trees(leaves):
        comps[s] = {(t, x): {x: 1} for (t, x) in b.value(s).degree_of if t == s}
    return TwistingCocycle(b, m, leaves, comps)


def phi_from_twisting(tau: TwistingCocycle, cobar_y: CoBar | None = None, check: bool = True) -> NaturalMap:
    """``phi_R(S, y) = sign(b d) beta^* tau_S(y)``."""
    if check:
        tau.require()
    cb = cobar_y if cobar_y is not None else CoBar(tau.y)

    def comp(r):
        b = list(r.inner_edges)
        imgs = {}
        for key in cb.value(r).degree_of:
            s, k = key
            val = tau.at(s, k)
            if not val:
                continue
            sg = edge_sequence_sign(b + _diff(s, r))
            imgs[key] = {z: sg * v for z, v in tau.m.restrict(Morphism.inclusion(r, s))(val).items()}
        return imgs

    return NaturalMap(cb, tau.m, comp)


def psi_from_twisting(tau: TwistingCocycle, bar_m: Bar | None = None, check: bool = True) -> NaturalMap:
    """``psi_S(y) = sum over S <= T of sign(d e) (T, tau_T(alpha_* y))``."""
    if check:
        tau.require()
    bm = bar_m if bar_m is not None else Bar(tau.m)

    def comp(s):
        d = list(s.inner_edges)
        imgs: dict = {}
        for t in extensions(s):
            sg = edge_sequence_sign(d + _diff(t, s))
            push = tau.y.corestrict(Morphism.inclusion(s, t))
            for k in tau.y.value(s).degree_of:
                acc = imgs.setdefault(k, {})
                for z, v in push.images.get(k, {}).items():
                    for x, w in tau.at(t, z).items():
                        kk = (t, x)
                        acc[kk] = acc.get(kk, 0) + sg * v * w
        return {k: {a: v for a, v in img.items() if v} for k, img in imgs.items()}

    return NaturalMap(tau.y, bm, comp)


def twisting_from_phi(phi: NaturalMap, leaves: int) -> TwistingCocycle:
    """``tau_S(y) = phi_S(S, y)``."""
    cb = phi.source
    comps = {}
    for s in enumerate_trees(leaves):
        imgs = phi.at(s).images
        comps[s] = {k: dict(imgs[(s, k)]) for k in cb.y.value(s).degree_of if imgs.get((s, k))}
    return TwistingCocycle(cb.y, phi.target, leaves, comps)


def twisting_from_psi(psi: NaturalMap, leaves: int) -> TwistingCocycle:
    """``tau_S(y)`` is the trivial-extension component of ``psi_S(y)``."""
    bm = psi.target
    comps = {}
    for s in enumerate_trees(leaves):
        out = {}
        for k, img in psi.at(s).images.items():
            part = {x: v for (t, x), v in img.items() if t == s}
            if part:
                out[k] = part
        comps[s] = out
    return TwistingCocycle(psi.source, bm.m, leaves, comps)


def _naturally_chain(nm: NaturalMap, n: int) -> bool:
    return check_naturality(nm, n).ok


@dataclass
class CorrespondenceReport:
    maurer_cartan: bool
    equivariant: bool
    phi_chain: bool
    psi_chain: bool
    round_trip: bool

    @property
    def consistent(self) -> bool:
        """Valid twisting family iff natural chain map ``phi`` iff natural chain map ``psi``."""
        valid = self.maurer_cartan and self.equivariant
        return valid == self.phi_chain == self.psi_chain and self.round_trip


def correspondence(tau: TwistingCocycle) -> CorrespondenceReport:
    """Compute the three conditions independently and the two round trips."""
    n = tau.leaves
    phi = phi_from_twisting(tau, check=False)
    psi = psi_from_twisting(tau, check=False)
    rt = (
        twisting_from_phi(phi, n).components == _clean(tau.components)
        and twisting_from_psi(psi, n).components == _clean(tau.components)
    )
    return CorrespondenceReport(
        tau.satisfies_maurer_cartan(),
        tau.is_equivariant(),
        _naturally_chain(phi, n),
        _naturally_chain(psi, n),
        rt,
    )


def _clean(components: Mapping) -> dict:
    return {s: {k: dict(v) for k, v in c.items() if v} for s, c in components.items()}


# -- triangle identities -----------------------------------------------------


@dataclass
class TriangleReport:
    ok: bool
    checked: int
    failure: dict | None = None


def _identity_check(composite: NaturalMap, n: int, label: str) -> TriangleReport:
    checked = 0
    for t in enumerate_trees(n):
        c = composite.at(t)
        for k in c.source.degree_of:
            img = c.images.get(k, {})
            if img != {k: 1}:
                return TriangleReport(False, checked, {"identity": label, "tree": t.term(), "generator": repr(k), "image": repr(img)})
            checked += 1
    return TriangleReport(True, checked)


def compose_natural(g: NaturalMap, f: NaturalMap) -> NaturalMap:
    """``g o f``."""
    return NaturalMap(f.source, g.target, lambda t: g.at(t).after(f.at(t)).images)


def triangle_cobar(y: Copresheaf, n: int, counit_fn: Callable = counit) -> TriangleReport:
    """``eps_{coBar Y} o coBar(eta_Y) = id`` on ``coBar(Y)``."""
    c = CoBar(y)
    bc = Bar(c)
    cbc = CoBar(bc)
    eta = unit(y, bc)
    first = cobar_map(eta, c, cbc)
    eps = counit_fn(c, cbc)
    return _identity_check(compose_natural(eps, first), n, "eps o coBar(eta)")


def triangle_bar(m: Presheaf, n: int, counit_fn: Callable = counit) -> TriangleReport:
    """``Bar(eps_M) o eta_{Bar M} = id`` on ``Bar(M)``."""
    b = Bar(m)
    cb = CoBar(b)
    bcb = Bar(cb)
    eta = unit(b, bcb)
    eps = counit_fn(m, cb)
    second = bar_map(eps, bcb, b)
    return _identity_check(compose_natural(second, eta), n, "Bar(eps) o eta")


def triangle_identities(m: Presheaf, n: int, y: Copresheaf | None = None) -> tuple:
    """Both identities; ``y`` defaults to ``Bar(M)``."""
    return triangle_bar(m, n), triangle_cobar(y if y is not None else Bar(m), n)


# -- contracting homotopy ----------------------------------------------------


@dataclass
class HomotopyReport:
    ok: bool
    checked: int
    failure: dict | None = None


def _pivot(r: Tree, t: Tree):
    extra = t.edges - r.edges
    return min(extra, key=cluster_key) if extra else None


def homotopy_bar_cobar(bc: Bar, r: Tree) -> dict:
    """``h`` on ``Bar(coBar(Y))(R)``: move the smallest edge of ``T - R`` from ``d`` into ``e``."""
    ext = bc.ext(r)
    h = {}
    for key in bc.value(r).degree_of:
        s, (t, z) = key
        m = _pivot(r, t)
        if m is None or m in s.edges:
            continue
        up = (Tree(s.leaves, s.edges | {m}), (t, z))
        h[key] = {up: ext[up][key]}
    return h


def homotopy_cobar_bar(cb: CoBar, r: Tree) -> dict:
    """``h`` on ``coBar(Bar(M))(R)``: move the smallest edge of ``T - R`` from ``d`` into ``f``."""
    ext = cb.ext(r)
    h = {}
    for key in cb.value(r).degree_of:
        s, (t, x) = key
        m = _pivot(r, t)
        if m is None or m not in s.edges:
            continue
        down = (Tree(s.leaves, s.edges - {m}), (t, x))
        h[key] = {down: ext[down][key]}
    return h


def _apply(op: Mapping, chain: Mapping) -> dict:
    out: dict = {}
    for k, v in chain.items():
        lc_add(out, op.get(k, {}), v)
    return out


def check_homotopy(x, r: Tree) -> HomotopyReport:
    """``h d + d h = Id`` off the ``C_{0,0}`` part, for the external differential.

    ``x`` is ``Bar(coBar(Y))`` or ``coBar(Bar(M))``.  On ``C_{0,0}`` (no extension
    at all) both sides vanish.
    """
    h = homotopy_bar_cobar(x, r) if isinstance(x, Bar) else homotopy_cobar_bar(x, r)
    ext = x.ext(r)
    checked = 0
    for key in x.value(r).degree_of:
        t = key[1][0]
        lhs = _apply(h, ext.get(key, {}))
        lc_add(lhs, _apply(ext, h.get(key, {})))
        want = {} if t == r else {key: 1}
        if lhs != want:
            return HomotopyReport(False, checked, {"tree": r.term(), "generator": repr(key), "got": repr(lhs)})
        checked += 1
    return HomotopyReport(True, checked)


def literal_homotopy_obstruction(x, r: Tree) -> dict | None:
    """Exhibit that ``h d = d h + (-1)^p Id`` (``p > 0``) with ``d h = Id`` (``p = 0``) has no solution.

    Uses a tower with exactly one extension edge: ``d`` restricted to that tower
    is an isomorphism ``C_{1,0} -> C_{0,1}`` (a sign), so ``d h = Id`` forces
    ``h = d^{-1}`` there and then ``h d = +Id`` on ``C_{1,0}``.
    """
    ext = x.ext(r)
    for key in x.value(r).degree_of:
        s, (t, _) = key
        if len(t.edges - r.edges) != 1:
            continue
        # the end of the tower where the edge sits in the bar extension
        top = (s == t) if isinstance(x, Bar) else (s == r)
        if not top:
            continue
        img = ext.get(key, {})
        if len(img) != 1:
            continue
        (low, c), = img.items()
        # forced h on the other end: h(low) = c * key (c = +-1)
        hd = c * c
        return {"tree": r.term(), "generator": repr(key), "h_d": hd, "required": -1}
    return None


def _bar_part(x, r: Tree, key) -> int:
    """The index ``p`` that the external differential lowers: edges on the bar side of the tower."""
    s, (t, _) = key
    return len(s.edges - r.edges) if isinstance(x, Bar) else len(t.edges - s.edges)


@dataclass
class LiteralHomotopyReport:
    positive_ok: bool
    zero_ok: bool
    checked: int
    failure: dict | None = None

    @property
    def ok(self) -> bool:
        return self.positive_ok and self.zero_ok


def check_literal_homotopy(x, r: Tree) -> LiteralHomotopyReport:
    """Test the printed pair ``h d = d h + (-1)^p Id`` (``p > 0``) and ``d h = Id`` (``p = 0``).

    Uses ``h' = (-1)^(p+1) h`` built from the fixed-pivot homotopy, which is the
    rescaling that makes the ``p > 0`` identity exact.  Towers without any
    extension edge (the ``C_{0,0}`` part) are excluded.  By
    :func:`literal_homotopy_obstruction` no ``h`` at all satisfies both.
    """
    h0 = homotopy_bar_cobar(x, r) if isinstance(x, Bar) else homotopy_cobar_bar(x, r)
    h = {k: {t: (-1) ** (_bar_part(x, r, k) + 1) * v for t, v in img.items()} for k, img in h0.items()}
    ext = x.ext(r)
    positive_ok = zero_ok = True
    failure = None
    checked = 0
    for key in x.value(r).degree_of:
        if key[1][0] == r:
            continue
        p = _bar_part(x, r, key)
        dh = _apply(ext, h.get(key, {}))
        if p > 0:
            lhs = _apply(h, ext.get(key, {}))
            rhs = dict(dh)
            lc_add(rhs, {key: (-1) ** p})
            good = lhs == rhs
            positive_ok = positive_ok and good
        else:
            good = dh == {key: 1}
            zero_ok = zero_ok and good
        if not good and failure is None:
            failure = {"tree": r.term(), "generator": repr(key), "p": p}
        checked += 1
    return LiteralHomotopyReport(positive_ok, zero_ok, checked, failure)


# -- duality certificates ----------------------------------------------------


def certificate(check: str, desc: str, leaves: int, tree: Tree, ok: bool, cone: HomologyResult | None = None, witness=None) -> dict:
    out = {
        "check": check,
        "presheaf": desc,
        "leaves": leaves,
        "tree": tree.term(),
        "status": "pass" if ok else "fail",
        "cone_homology": cone.to_json() if cone is not None else [],
    }
    if witness is not None:
        out["witness"] = witness
    return out


def verify_duality(m: Presheaf, n: int, homotopy: bool = True) -> list:
    """Certificates for ``eps`` on ``M`` and ``eta`` on ``Y = Bar(M)`` at every tree with ``n`` leaves."""
    desc = m.descriptor
    b = Bar(m)
    cb = CoBar(b)
    eps = counit(m, cb)
    bcb = Bar(cb)
    eta = unit(b, bcb)
    certs = []
    for r in enumerate_trees(n):
        ce = is_quasi_iso(eps.at(r))
        certs.append(certificate("counit", desc, n, r, ce.ok, ce.cone_homology, None if ce.ok else repr(ce.witness())))
        cu = is_quasi_iso(eta.at(r))
        certs.append(certificate("unit", f"Bar({desc})", n, r, cu.ok, cu.cone_homology, None if cu.ok else repr(cu.witness())))
        if homotopy:
            h1 = check_homotopy(cb, r)
            certs.append(certificate("homotopy", desc, n, r, h1.ok, witness=h1.failure))
            h2 = check_homotopy(bcb, r)
            certs.append(certificate("homotopy", f"Bar({desc})", n, r, h2.ok, witness=h2.failure))
            sec = eps.at(r).after(section(m, r, cb))
            ok = all(sec.images.get(k, {}) == {k: 1} for k in m.value(r).degree_of)
            certs.append(certificate("section", desc, n, r, ok))
    return certs


def verify_triangles(m: Presheaf, n: int) -> list:
    tb, tc = triangle_identities(m, n)
    certs = []
    for name, rep in (("triangle", tb), ("triangle", tc)):
        tree = Tree.corolla(n)
        certs.append(certificate(name, m.descriptor, n, tree, rep.ok, witness=rep.failure))
    return certs


def all_pass(certs) -> bool:
    return all(c["status"] == "pass" for c in certs)


def dumps(certs) -> str:
    return json.dumps(certs, indent=2, sort_keys=True)
