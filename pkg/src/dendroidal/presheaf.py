"""Presheaves and copresheaves on A with values in chain complexes.

A presheaf assigns a :class:`ChainComplex` to every labelled tree and a chain
map ``M(T) -> M(S)`` to every morphism ``S -> T``.  Values and maps are
memoised.  Built-in families: nerves of set operads, representables, the
restricted Omega-representables and their Segal cores, constants, and a seeded
random family built from representables and mapping cones.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Mapping, Sequence

from .exactalg import (
    ChainComplex,
    ChainMap,
    ContractViolation,
    lc_add,
    mapping_cone,
    tensor,
    tensor_map,
)
from .trees import (
    Morphism,
    Tree,
    TreeError,
    all_morphisms,
    compose_perms,
    degraft,
    enumerate_trees,
    graft,
    identity_perm,
    invert_perm,
    morphisms,
    parse_term,
)


# -- base classes ------------------------------------------------------------


class Presheaf:
    """Contravariant functor from A to chain complexes."""

    descriptor = "presheaf"

    def __init__(self):
        self._values: dict = {}
        self._maps: dict = {}

    def value(self, t: Tree) -> ChainComplex:
        c = self._values.get(t)
        if c is None:
            c = self._value(t)
            self._values[t] = c
        return c

    def restrict(self, f: Morphism) -> ChainMap:
        """``f^* : M(f.target) -> M(f.source)``."""
        m = self._maps.get(f)
        if m is None:
            imgs = self._restrict_images(f)
            m = ChainMap(self.value(f.target), self.value(f.source), imgs, check=False)
            self._maps[f] = m
        return m

    def leaf_counts(self) -> Iterable[int] | None:
        """Leaf counts where the presheaf may be nonzero (``None``: all)."""
        return None

    def _value(self, t: Tree) -> ChainComplex:
        raise NotImplementedError

    def _restrict_images(self, f: Morphism) -> dict:
        raise NotImplementedError

    def __repr__(self):
        return f"<{type(self).__name__} {self.descriptor}>"


class Copresheaf:
    """Covariant functor from A to chain complexes."""

    descriptor = "copresheaf"

    def __init__(self):
        self._values: dict = {}
        self._maps: dict = {}

    def value(self, t: Tree) -> ChainComplex:
        c = self._values.get(t)
        if c is None:
            c = self._value(t)
            self._values[t] = c
        return c

    def corestrict(self, f: Morphism) -> ChainMap:
        """``f_* : Y(f.source) -> Y(f.target)``."""
        m = self._maps.get(f)
        if m is None:
            imgs = self._corestrict_images(f)
            m = ChainMap(self.value(f.source), self.value(f.target), imgs, check=False)
            self._maps[f] = m
        return m

    def leaf_counts(self):
        return None

    def _value(self, t: Tree) -> ChainComplex:
        raise NotImplementedError

    def _corestrict_images(self, f: Morphism) -> dict:
        raise NotImplementedError

    def __repr__(self):
        return f"<{type(self).__name__} {self.descriptor}>"


class NaturalMap:
    """Natural transformation between two presheaves (or two copresheaves)."""

    def __init__(self, source, target, component: Callable[[Tree], Mapping]):
        self.source = source
        self.target = target
        self._component = component
        self._cache: dict = {}

    def at(self, t: Tree) -> ChainMap:
        m = self._cache.get(t)
        if m is None:
            m = ChainMap(self.source.value(t), self.target.value(t), self._component(t), check=False)
            self._cache[t] = m
        return m


# -- set operads and nerves --------------------------------------------------


class SetOperad:
    """Reduced symmetric operad in sets, acting on named inputs.

    A decoration of a vertex is an element of ``P(inputs)``; names are any
    hashables (tree edges in practice).
    """

    name = "P"

    def decorations(self, names: Sequence[Hashable]) -> list:
        raise NotImplementedError

    def compose(self, outer, name, inner):
        raise NotImplementedError

    def rename(self, dec, mapping: Mapping):
        raise NotImplementedError


class AssOperad(SetOperad):
    """Associative operad: a decoration is a linear order of the inputs."""

    name = "Ass"

    def decorations(self, names):
        return [tuple(p) for p in itertools.permutations(sorted(names, key=_name_key))]

    def compose(self, outer, name, inner):
        i = outer.index(name)
        return outer[:i] + tuple(inner) + outer[i + 1 :]

    def rename(self, dec, mapping):
        return tuple(mapping[n] for n in dec)


class ComOperad(SetOperad):
    """Commutative operad: one point in every arity."""

    name = "Com"

    def decorations(self, names):
        return ["*"]

    def compose(self, outer, name, inner):
        return "*"

    def rename(self, dec, mapping):
        return "*"


def _name_key(c):
    return tuple(sorted(c)) if isinstance(c, frozenset) else (c,)


ASS = AssOperad()
COM = ComOperad()


class Nerve(Presheaf):
    """``N(P)(T)``: one decoration per vertex; free abelian in degree 0."""

    def __init__(self, operad: SetOperad, descriptor: str | None = None):
        super().__init__()
        self.operad = operad
        self.descriptor = descriptor or f"nerve:{operad.name}"
        self._theta: dict = {}

    def _value(self, t):
        per_vertex = [self.operad.decorations(t.inputs(v)) for v in t.vertices]
        return ChainComplex({0: list(itertools.product(*per_vertex))}, check=False)

    def restrict_inclusion(self, s: Tree, t: Tree, x: tuple) -> tuple:
        dec = dict(zip(t.vertices, x))
        contracted = t.edges - s.edges

        def expand(v):
            d = dec[v]
            for c in t.inputs(v):
                if c in contracted:
                    d = self.operad.compose(d, c, expand(c))
            return d

        return tuple(expand(v) for v in s.vertices)

    def restrict_iso(self, f: Morphism, x: tuple) -> tuple:
        # f : S -> T iso; vertex v of S corresponds to f(v) of T
        inv = invert_perm(f.perm)
        dec = dict(zip(f.target.vertices, x))
        out = []
        for v in f.source.vertices:
            w = f.edge_image(v)
            mapping = {c: frozenset(inv[i - 1] for i in c) for c in f.target.inputs(w)}
            out.append(self.operad.rename(dec[w], mapping))
        return tuple(out)

    def _restrict_images(self, f):
        iso, inc = f.factor()
        imgs = {}
        for x in self.value(f.target).basis.get(0, ()):
            y = self.restrict_inclusion(inc.source, inc.target, x)
            imgs[x] = {self.restrict_iso(iso, y): 1}
        return imgs

    def theta(self, t: Tree, edge: frozenset) -> ChainMap:
        """Structure map ``N(P)(t) -> N(P)(s) (x) N(P)(r)`` for the cut at ``edge``."""
        key = (t, frozenset(edge))
        m = self._theta.get(key)
        if m is not None:
            return m
        dg = degraft(t, edge)
        src = self.value(t)
        tgt = tensor(self.value(dg.s), self.value(dg.r))
        s_of = {}
        r_of = {}
        for v in t.vertices:
            if v == dg.edge:
                r_of[dg.r.root] = v
            elif v <= dg.edge:
                r_of[frozenset(dg.upper[i] for i in v)] = v
            else:
                s_of[frozenset(dg.lower[i] for i in v)] = v
        imgs = {}
        for x in src.basis.get(0, ()):
            dec = dict(zip(t.vertices, x))
            xs, xr = [], []
            for w in dg.s.vertices:
                v = s_of[w]
                mapping = {c: _split_name(dg, c) for c in t.inputs(v)}
                xs.append(self.operad.rename(dec[v], mapping))
            for w in dg.r.vertices:
                v = r_of[w]
                mapping = {c: frozenset(dg.upper[i] for i in c) for c in t.inputs(v)}
                xr.append(self.operad.rename(dec[v], mapping))
            imgs[x] = {(tuple(xs), tuple(xr)): 1}
        m = ChainMap(src, tgt, imgs, check=False)
        self._theta[key] = m
        return m

    def theta_graft(self, s: Tree, a: int, r: Tree) -> ChainMap:
        t = graft(s, a, r)
        return self.theta(t, frozenset(range(a, a + r.leaves)))


def _split_name(dg, c: frozenset) -> frozenset:
    if c == dg.edge:
        return frozenset([dg.a])
    return frozenset(dg.lower[i] for i in c)


def nerve(p: SetOperad) -> Nerve:
    desc = {"Ass": "nass", "Com": "ncom"}.get(p.name)
    return Nerve(p, desc)


# -- representables ----------------------------------------------------------


def _hom_perms(t: Tree, r: Tree) -> list:
    return [m.perm for m in morphisms(t, r, relabel=True)]


class RepresentableA(Presheaf):
    """``Z[A(-, R)]``: free on all morphisms into ``R``, restriction by precomposition."""

    def __init__(self, r: Tree):
        super().__init__()
        self.r = r
        self.descriptor = f"repA:{r.term()}"

    def leaf_counts(self):
        return (self.r.leaves,)

    def _value(self, t):
        if t.leaves != self.r.leaves:
            return ChainComplex.zero()
        return ChainComplex({0: _hom_perms(t, self.r)}, check=False)

    def _restrict_images(self, f):
        return {g: {compose_perms(g, f.perm): 1} for g in self.value(f.target).basis.get(0, ())}


def representable_A(r: Tree) -> RepresentableA:
    return RepresentableA(r)


def label_fixed_ranks(r: Tree) -> dict:
    """Number of leaf-label-preserving morphisms ``t -> r`` for every ``t``."""
    return {t: len(morphisms(t, r)) for t in enumerate_trees(r.leaves)}


def connected_vertex_sets(t: Tree) -> list[frozenset]:
    """Nonempty connected sets of vertices (the external faces of ``t``)."""
    adj = {v: set() for v in t.vertices}
    for v in t.vertices:
        for c in t.inputs(v):
            if c in t.edges:
                adj[v].add(c)
                adj[c].add(v)
    found = set()
    frontier = [frozenset([v]) for v in t.vertices]
    while frontier:
        nxt = []
        for w in frontier:
            if w in found:
                continue
            found.add(w)
            for v in w:
                for u in adj[v] - w:
                    nxt.append(w | {u})
        frontier = nxt
    return sorted(found, key=lambda w: (len(w), sorted(tuple(sorted(v)) for v in w)))


def face_tree(t: Tree, w: frozenset) -> Tree:
    """The external face spanned by the vertex set ``w``, with leaves relabelled by minimum label."""
    ins = [c for v in w for c in t.inputs(v) if c not in w]
    ins.sort(key=min)
    index = {c: i for i, c in enumerate(ins, 1)}
    top = max(w, key=len)
    edges = []
    for v in w:
        if v == top:
            continue
        edges.append(frozenset(index[c] for c in ins if c <= v))
    return Tree(len(ins), frozenset(edges))


class RepresentableOmega(Presheaf):
    """Restriction to A of the Omega-representable on ``t``: a sum over external faces."""

    def __init__(self, t: Tree, keep: Callable[[frozenset], bool] | None = None, descriptor=None):
        super().__init__()
        self.t = t
        self.faces = [(w, face_tree(t, w)) for w in connected_vertex_sets(t) if keep is None or keep(w)]
        self.descriptor = descriptor or f"repOmega:{t.term()}"

    def leaf_counts(self):
        return tuple(sorted({r.leaves for _, r in self.faces}))

    def _value(self, s):
        keys = []
        for w, r in self.faces:
            if r.leaves == s.leaves:
                keys.extend((w, p) for p in _hom_perms(s, r))
        return ChainComplex({0: keys}, check=False)

    def _restrict_images(self, f):
        return {(w, g): {(w, compose_perms(g, f.perm)): 1} for (w, g) in self.value(f.target).basis.get(0, ())}


def representable_Omega_restricted(t: Tree) -> RepresentableOmega:
    return RepresentableOmega(t)


def segal_core(s: Tree, a: int, r: Tree) -> tuple[RepresentableOmega, RepresentableOmega, NaturalMap]:
    """Segal core of ``s o_a r`` with its inclusion into the full Omega-representable."""
    t = graft(s, a, r)
    block = frozenset(range(a, a + r.leaves))

    def keep(w):
        return all(not v <= block for v in w) or all(v <= block for v in w)

    core = RepresentableOmega(t, keep, descriptor=f"segal:{s.term()},{a},{r.term()}")
    full = RepresentableOmega(t)
    inc = NaturalMap(core, full, lambda u: {k: {k: 1} for k in core.value(u).degree_of})
    return core, full, inc


# -- constants, sums, tensors, cones -----------------------------------------


class ConstantPresheaf(Presheaf):
    def __init__(self, c: ChainComplex, descriptor: str = "const"):
        super().__init__()
        self.c = c
        self.descriptor = descriptor

    def _value(self, t):
        return self.c

    def _restrict_images(self, f):
        return {k: {k: 1} for k in self.c.degree_of}


def constant_presheaf(c: ChainComplex | None = None) -> ConstantPresheaf:
    if c is None:
        return ConstantPresheaf(ChainComplex.unit(), "const:Z")
    return ConstantPresheaf(c)


class RepTensor(Presheaf):
    """``Z[A(-, R)] (x) C`` for a fixed complex ``C``."""

    def __init__(self, r: Tree, c: ChainComplex, tag: Hashable = None):
        super().__init__()
        self.r = r
        self.c = c
        self.tag = tag
        self.descriptor = f"repA:{r.term()}*C"

    def leaf_counts(self):
        return (self.r.leaves,)

    def _value(self, t):
        if t.leaves != self.r.leaves:
            return ChainComplex.zero()
        return tensor(ChainComplex({0: _hom_perms(t, self.r)}, check=False), self.c)

    def _restrict_images(self, f):
        return {(g, c): {(compose_perms(g, f.perm), c): 1} for (g, c) in self.value(f.target).degree_of}


class SumPresheaf(Presheaf):
    def __init__(self, parts: Sequence[Presheaf], descriptor: str = "sum"):
        super().__init__()
        self.parts = list(parts)
        self.descriptor = descriptor

    def leaf_counts(self):
        out = set()
        for p in self.parts:
            lc = p.leaf_counts()
            if lc is None:
                return None
            out.update(lc)
        return tuple(sorted(out))

    def _value(self, t):
        basis: dict = {}
        bd: dict = {}
        for i, p in enumerate(self.parts):
            c = p.value(t)
            for n, ks in c.basis.items():
                basis.setdefault(n, []).extend((i, k) for k in ks)
            for k, b in c.boundary.items():
                bd[(i, k)] = {(i, x): v for x, v in b.items()}
        return ChainComplex(basis, bd, check=False)

    def _restrict_images(self, f):
        imgs = {}
        for i, p in enumerate(self.parts):
            for k, img in p.restrict(f).images.items():
                imgs[(i, k)] = {(i, x): v for x, v in img.items()}
        return imgs


def sum_map(source: SumPresheaf, target: SumPresheaf, blocks: Mapping[tuple, NaturalMap]) -> NaturalMap:
    """Natural map between sums given by blocks ``(i, j) -> (part i -> part j)``."""

    def comp(t):
        imgs: dict = {}
        for (i, j), nm in blocks.items():
            for k, img in nm.at(t).images.items():
                lc_add(imgs.setdefault((i, k), {}), {(j, x): v for x, v in img.items()})
        return imgs

    return NaturalMap(source, target, comp)


class ConePresheaf(Presheaf):
    """Objectwise mapping cone of a natural map ``F : P -> Q``."""

    def __init__(self, f: NaturalMap, descriptor: str = "cone"):
        super().__init__()
        self.f = f
        self.descriptor = descriptor

    def leaf_counts(self):
        a, b = self.f.source.leaf_counts(), self.f.target.leaf_counts()
        if a is None or b is None:
            return None
        return tuple(sorted(set(a) | set(b)))

    def _value(self, t):
        return mapping_cone(self.f.at(t), check=False)

    def _restrict_images(self, g):
        imgs = {}
        for k, img in self.f.target.restrict(g).images.items():
            imgs[("t", k)] = {("t", x): v for x, v in img.items()}
        for k, img in self.f.source.restrict(g).images.items():
            imgs[("s", k)] = {("s", x): v for x, v in img.items()}
        return imgs


def cone_sequence(f: NaturalMap) -> tuple[ConePresheaf, NaturalMap, NaturalMap]:
    """``0 -> Q -> cone(F) -> P[1] -> 0`` (the last term as a shifted presheaf)."""
    cone = ConePresheaf(f)
    shifted = ShiftedPresheaf(f.source, 1)
    inc = NaturalMap(f.target, cone, lambda t: {k: {("t", k): 1} for k in f.target.value(t).degree_of})
    proj = NaturalMap(
        cone,
        shifted,
        lambda t: {("s", k): {k: 1} for k in f.source.value(t).degree_of},
    )
    return cone, inc, proj


class ShiftedPresheaf(Presheaf):
    """``P[s]``; the boundary picks up the sign ``(-1)^s``."""

    def __init__(self, p: Presheaf, s: int):
        super().__init__()
        self.p = p
        self.s = s
        self.descriptor = f"{p.descriptor}[{s}]"

    def leaf_counts(self):
        return self.p.leaf_counts()

    def _value(self, t):
        c = self.p.value(t)
        sgn = (-1) ** self.s
        return ChainComplex(
            {n + self.s: ks for n, ks in c.basis.items()},
            {k: {x: sgn * v for x, v in b.items()} for k, b in c.boundary.items()},
            check=False,
        )

    def _restrict_images(self, f):
        return self.p.restrict(f).images


# -- natural maps from Yoneda ------------------------------------------------


def yoneda_map(u: Morphism, source: RepTensor, target: RepTensor, k: int = 1) -> NaturalMap:
    """``(g, c) -> k (u o g, c)`` for ``u : R -> R'``; both sides share the complex ``C``."""
    if source.c is not target.c:
        raise ValueError("yoneda_map needs a shared complex")

    def comp(t):
        return {(g, c): {(compose_perms(u.perm, g), c): k} for (g, c) in source.value(t).degree_of}

    return NaturalMap(source, target, comp)


# -- random presheaves -------------------------------------------------------


def random_complex(rng: random.Random, max_rank: int = 2, degrees: Sequence[int] = (0, 1, 2)) -> ChainComplex:
    """Sum of elementary complexes followed by a random unimodular change of basis."""
    lo, hi = min(degrees), max(degrees)
    cols: dict = {n: [] for n in range(lo, hi + 1)}  # degree -> list of boundary columns (dict index->coef)
    counter = itertools.count()
    names: dict = {n: [] for n in range(lo, hi + 1)}
    pieces = rng.randint(1, max_rank + 1)
    bd: dict = {}
    for _ in range(pieces):
        kind = rng.random()
        n = rng.randint(lo, hi)
        if kind < 0.45 or n == lo:
            names[n].append(f"z{next(counter)}")
        else:
            top, bot = f"z{next(counter)}", f"z{next(counter)}"
            names[n].append(top)
            names[n - 1].append(bot)
            bd[top] = {bot: rng.choice([1, 1, 2, 3, -1])}
    # change of basis: new_i = old_i + c old_j within one degree
    mats = {n: {k: ({k: 1}) for k in names[n]} for n in names}  # new key -> old comb
    for _ in range(3):
        n = rng.randint(lo, hi)
        ks = names[n]
        if len(ks) < 2:
            continue
        i, j = rng.sample(range(len(ks)), 2)
        c = rng.choice([1, -1, 2])
        lc_add(mats[n][ks[i]], mats[n][ks[j]], c)
    # express boundaries in the new basis: need inverse of the basis change
    inv = {n: _invert_unimodular(mats[n], names[n]) for n in names}
    new_bd = {}
    for n in names:
        for k in names[n]:
            img_old: dict = {}
            for o, v in mats[n][k].items():
                lc_add(img_old, bd.get(o, {}), v)
            img_new: dict = {}
            for o, v in img_old.items():
                lc_add(img_new, inv[n - 1][o], v)
            if img_new:
                new_bd[k] = img_new
    return ChainComplex({n: ks for n, ks in names.items()}, new_bd)


def _invert_unimodular(m: Mapping, keys: Sequence) -> dict:
    """Old basis vector -> combination of new ones for an upper-unitriangular-like change."""
    from fractions import Fraction

    n = len(keys)
    idx = {k: i for i, k in enumerate(keys)}
    a = [[Fraction(0)] * n for _ in range(n)]
    for new, comb in m.items():
        for old, v in comb.items():
            a[idx[old]][idx[new]] = Fraction(v)
    # solve a * X = I
    aug = [row + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(a)]
    for c in range(n):
        p = next(r for r in range(c, n) if aug[r][c] != 0)
        aug[c], aug[p] = aug[p], aug[c]
        pv = aug[c][c]
        aug[c] = [x / pv for x in aug[c]]
        for r in range(n):
            if r != c and aug[r][c] != 0:
                f = aug[r][c]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[c])]
    out = {}
    for old in keys:
        j = idx[old]
        comb = {}
        for i, new in enumerate(keys):
            v = aug[i][n + j]
            if v:
                if v.denominator != 1:
                    raise ContractViolation("basis change is not unimodular")
                comb[new] = int(v)
        out[old] = comb
    return out


def random_test_presheaf(seed: int, leaves: Sequence[int] = (3,), budget: int = 3) -> Presheaf:
    """Deterministic random presheaf: representables tensored with random complexes plus a cone."""
    rng = random.Random(seed)
    desc = f"random:{seed}"
    if budget <= 0:
        return SumPresheaf([], desc)
    leaves = list(leaves)
    parts: list = []
    n_direct = rng.randint(1, max(1, budget - 1))
    for _ in range(n_direct):
        n = rng.choice(leaves)
        r = rng.choice(enumerate_trees(n))
        parts.append(RepTensor(r, random_complex(rng)))
    if budget >= 2:
        n = rng.choice(leaves)
        trees = enumerate_trees(n)
        shared = random_complex(rng, max_rank=1)
        r1 = rng.choice(trees)
        uppers = [m for m in all_morphisms(n) if m.source == r1]
        u = rng.choice(uppers)
        p = RepTensor(r1, shared)
        q = RepTensor(u.target, shared)
        parts.append(ConePresheaf(yoneda_map(u, p, q, rng.choice([1, 1, 2, -1])), "cone"))
    return SumPresheaf(parts, desc)


# -- checks ------------------------------------------------------------------


@dataclass
class FunctorialityReport:
    ok: bool
    checked: int
    failure: str | None = None

    def __bool__(self):
        return self.ok


def check_functoriality(m: Presheaf | Copresheaf, n: int, pairs: bool = True) -> FunctorialityReport:
    """Identity, chain-map and composition laws on all (composable pairs of) morphisms."""
    covariant = isinstance(m, Copresheaf)
    act = m.corestrict if covariant else m.restrict
    mors = all_morphisms(n)
    checked = 0
    for f in mors:
        g = act(f)
        try:
            g.check()
        except ContractViolation as err:
            return FunctorialityReport(False, checked, f"{f}: {err}")
        if f.is_identity and any(g.images.get(k, {}) != {k: 1} for k in g.source.degree_of):
            return FunctorialityReport(False, checked, f"{f}: identity not preserved")
        checked += 1
    if pairs:
        by_source: dict = {}
        for f in mors:
            by_source.setdefault(f.source, []).append(f)
        for f in mors:
            for g in by_source.get(f.target, ()):
                gf = g.after(f)
                lhs = act(gf)
                rhs = act(g).after(act(f)) if covariant else act(f).after(act(g))
                if lhs.images != rhs.images:
                    return FunctorialityReport(False, checked, f"composition fails for {f} then {g}")
                checked += 1
    return FunctorialityReport(True, checked)


def check_naturality(nm: NaturalMap, n: int) -> FunctorialityReport:
    covariant = isinstance(nm.source, Copresheaf)
    checked = 0
    for f in all_morphisms(n):
        if covariant:
            lhs = nm.target.corestrict(f).after(nm.at(f.source))
            rhs = nm.at(f.target).after(nm.source.corestrict(f))
        else:
            lhs = nm.at(f.source).after(nm.source.restrict(f))
            rhs = nm.target.restrict(f).after(nm.at(f.target))
        if lhs.images != rhs.images:
            return FunctorialityReport(False, checked, f"naturality fails at {f}")
        checked += 1
    for t in enumerate_trees(n):
        try:
            nm.at(t).check()
        except ContractViolation as err:
            return FunctorialityReport(False, checked, f"component at {t} is not a chain map: {err}")
    return FunctorialityReport(True, checked)


# -- descriptors -------------------------------------------------------------


def parse_presheaf(desc: str, leaves: Sequence[int] | None = None, budget: int = 3) -> Presheaf:
    desc = desc.strip()
    if desc == "nass":
        return nerve(ASS)
    if desc == "ncom":
        return nerve(COM)
    if desc == "const:Z":
        return constant_presheaf()
    if desc.startswith("repA:"):
        return representable_A(parse_term(desc[5:]))
    if desc.startswith("repOmega:"):
        return representable_Omega_restricted(parse_term(desc[9:]))
    if desc.startswith("random:"):
        try:
            seed = int(desc[7:])
        except ValueError:
            raise ValueError(f"bad seed in {desc!r}") from None
        return random_test_presheaf(seed, tuple(leaves or (3,)), budget)
    raise ValueError(f"unknown presheaf descriptor {desc!r}")
