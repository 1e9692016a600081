"""Leaf-labelled open reduced trees and the tree category A.

A tree with leaves ``1..n`` is stored as the set of its inner edges, each inner
edge being the set of leaf labels above it (a *cluster*).  The root edge is the
full leaf set and the leaf edges are singletons; neither is stored.  This
encoding makes every leaf-fixing automorphism trivial and gives at most one
label-preserving morphism between two trees.

A morphism ``S -> T`` of A is a root-preserving map inducing a bijection on
leaves, i.e. an isomorphism followed by a contraction of inner edges of ``T``.
With labelled trees it is determined by its leaf bijection ``perm``, subject to
``perm(E(S)) <= E(T)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Iterator, Sequence

Cluster = frozenset

DEFAULT_MAX_LEAVES = 7


class TreeError(ValueError):
    """Malformed tree data or an operation outside its domain."""


class SizeLimitError(ValueError):
    """Leaf count outside the configured bounds."""


def cluster_key(c: Iterable[int]) -> tuple[int, ...]:
    """Canonical edge order: lexicographic on the sorted leaf labels."""
    return tuple(sorted(c))


def sort_edges(edges: Iterable[frozenset]) -> tuple[frozenset, ...]:
    return tuple(sorted(edges, key=cluster_key))


def permutation_sign(seq: Sequence) -> int:
    """Sign of the permutation sorting ``seq`` (items must be distinct and comparable)."""
    n = len(seq)
    order = sorted(range(n), key=lambda i: seq[i])
    seen = [False] * n
    sign = 1
    for i in range(n):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = order[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def edge_sequence_sign(edges: Sequence[frozenset]) -> int:
    """Sign relating an enumeration of edges to the canonical (sorted) one."""
    return permutation_sign([cluster_key(e) for e in edges])


def check_leaves(n: int, max_leaves: int = DEFAULT_MAX_LEAVES) -> None:
    if not isinstance(n, int) or n < 2 or n > max_leaves:
        raise SizeLimitError(f"leaf count {n!r} outside [2, {max_leaves}]")


@dataclass(frozen=True)
class Tree:
    """Leaf-labelled open reduced tree (every vertex has at least two inputs)."""

    leaves: int
    edges: frozenset

    def __post_init__(self):
        if self.leaves < 2:
            raise TreeError("trees need at least two leaves")
        full = frozenset(range(1, self.leaves + 1))
        edges = frozenset(frozenset(e) for e in self.edges)
        object.__setattr__(self, "edges", edges)
        for e in edges:
            if not e <= full:
                raise TreeError(f"edge {sorted(e)} has labels outside 1..{self.leaves}")
            if not 2 <= len(e) < self.leaves:
                raise TreeError(f"edge {sorted(e)} is not an inner edge")
        for a, b in itertools.combinations(edges, 2):
            if a & b and not (a <= b or b <= a):
                raise TreeError(f"edges {sorted(a)} and {sorted(b)} overlap")

    @classmethod
    def corolla(cls, n: int) -> "Tree":
        return cls(n, frozenset())

    @classmethod
    def from_term(cls, term: str) -> "Tree":
        return parse_term(term)

    @cached_property
    def root(self) -> frozenset:
        return frozenset(range(1, self.leaves + 1))

    @cached_property
    def inner_edges(self) -> tuple[frozenset, ...]:
        """Inner edges in canonical order."""
        return sort_edges(self.edges)

    @cached_property
    def vertices(self) -> tuple[frozenset, ...]:
        """Vertices, each named by its output edge; the root vertex comes first."""
        return (self.root,) + self.inner_edges

    @cached_property
    def _inputs(self) -> dict:
        table = {}
        for v in self.vertices:
            below = [e for e in self.edges if e < v]
            maximal = [e for e in below if not any(e < f for f in below)]
            covered = frozenset().union(*maximal) if maximal else frozenset()
            ins = maximal + [frozenset([i]) for i in v - covered]
            table[v] = sort_edges(ins)
        return table

    def inputs(self, v: frozenset) -> tuple[frozenset, ...]:
        """Input edges of vertex ``v`` (inner edges or leaf singletons), sorted."""
        return self._inputs[v]

    def valence(self, v: frozenset) -> int:
        return len(self._inputs[v])

    @property
    def is_corolla(self) -> bool:
        return not self.edges

    def contract(self, e: frozenset) -> "Tree":
        e = frozenset(e)
        if e not in self.edges:
            raise TreeError(f"{sorted(e)} is not an inner edge of {self.term()}")
        return Tree(self.leaves, self.edges - {e})

    def relabel(self, perm: Sequence[int]) -> "Tree":
        return Tree(self.leaves, frozenset(apply_perm(perm, e) for e in self.edges))

    def term(self) -> str:
        return _term(self, self.root)

    def sort_key(self):
        return (len(self.edges), tuple(cluster_key(e) for e in self.inner_edges))

    def __lt__(self, other: "Tree"):
        return (self.leaves, self.sort_key()) < (other.leaves, other.sort_key())

    def __repr__(self):
        return f"Tree({self.term()})"


def _term(t: Tree, v: frozenset) -> str:
    parts = []
    for c in sorted(t.inputs(v), key=min):
        parts.append(str(next(iter(c))) if len(c) == 1 else _term(t, c))
    return "(" + " ".join(parts) + ")"


def parse_term(term: str) -> Tree:
    """Parse a nested-parenthesis term such as ``((1 2) 3)``."""
    tokens = term.replace("(", " ( ").replace(")", " ) ").split()
    pos = 0
    edges = []

    def node() -> frozenset:
        nonlocal pos
        if pos >= len(tokens):
            raise TreeError(f"unexpected end of term {term!r}")
        tok = tokens[pos]
        pos += 1
        if tok == "(":
            kids = []
            while pos < len(tokens) and tokens[pos] != ")":
                kids.append(node())
            if pos >= len(tokens):
                raise TreeError(f"unbalanced term {term!r}")
            pos += 1
            if len(kids) < 2:
                raise TreeError(f"vertex with fewer than two inputs in {term!r}")
            out = frozenset().union(*kids)
            if sum(len(k) for k in kids) != len(out):
                raise TreeError(f"repeated leaf label in {term!r}")
            edges.append(out)
            return out
        if tok == ")":
            raise TreeError(f"unbalanced term {term!r}")
        try:
            return frozenset([int(tok)])
        except ValueError:
            raise TreeError(f"bad token {tok!r} in {term!r}") from None

    root = node()
    if pos != len(tokens):
        raise TreeError(f"trailing input in {term!r}")
    n = len(root)
    if root != frozenset(range(1, n + 1)):
        raise TreeError(f"leaf labels of {term!r} are not 1..{n}")
    return Tree(n, frozenset(e for e in edges if e != root))


def apply_perm(perm: Sequence[int], c: Iterable[int]) -> frozenset:
    return frozenset(perm[i - 1] for i in c)


def compose_perms(g: Sequence[int], f: Sequence[int]) -> tuple[int, ...]:
    """``g o f`` as leaf maps."""
    return tuple(g[f[i] - 1] for i in range(len(f)))


def invert_perm(p: Sequence[int]) -> tuple[int, ...]:
    inv = [0] * len(p)
    for i, j in enumerate(p, 1):
        inv[j - 1] = i
    return tuple(inv)


def identity_perm(n: int) -> tuple[int, ...]:
    return tuple(range(1, n + 1))


@dataclass(frozen=True)
class Morphism:
    """A morphism of A between labelled trees, given by its leaf bijection."""

    source: Tree
    target: Tree
    perm: tuple

    def __post_init__(self):
        object.__setattr__(self, "perm", tuple(self.perm))
        n = self.source.leaves
        if self.target.leaves != n or sorted(self.perm) != list(range(1, n + 1)):
            raise TreeError("a morphism of A must induce a bijection on leaves")
        for e in self.source.edges:
            if apply_perm(self.perm, e) not in self.target.edges:
                raise TreeError(
                    f"edge {sorted(e)} of {self.source.term()} has no image in {self.target.term()}"
                )

    @classmethod
    def identity(cls, t: Tree) -> "Morphism":
        return cls(t, t, identity_perm(t.leaves))

    @classmethod
    def inclusion(cls, s: Tree, t: Tree) -> "Morphism":
        return cls(s, t, identity_perm(s.leaves))

    def edge_image(self, e: frozenset) -> frozenset:
        """Image of any edge (root, inner or leaf) given as its leaf set."""
        return apply_perm(self.perm, e)

    @property
    def codim(self) -> int:
        return len(self.target.edges) - len(self.source.edges)

    @property
    def is_identity(self) -> bool:
        return self.source == self.target and self.perm == identity_perm(self.source.leaves)

    @property
    def is_iso(self) -> bool:
        return self.codim == 0

    @property
    def is_inclusion(self) -> bool:
        return self.perm == identity_perm(self.source.leaves)

    def contracted_edges(self) -> frozenset:
        """Inner edges of the target not in the image of the source."""
        return self.target.edges - {self.edge_image(e) for e in self.source.edges}

    def after(self, f: "Morphism") -> "Morphism":
        """Composite ``self o f``."""
        if f.target != self.source:
            raise TreeError("morphisms are not composable")
        return Morphism(f.source, self.target, compose_perms(self.perm, f.perm))

    def inverse(self) -> "Morphism":
        if not self.is_iso:
            raise TreeError("only isomorphisms are invertible")
        return Morphism(self.target, self.source, invert_perm(self.perm))

    def factor(self) -> tuple["Morphism", "Morphism"]:
        """Split as ``inclusion o iso``; returns ``(iso, inclusion)``."""
        mid = self.source.relabel(self.perm)
        return Morphism(self.source, mid, self.perm), Morphism.inclusion(mid, self.target)

    def __repr__(self):
        return f"Morphism({self.source.term()} -> {self.target.term()}, {self.perm})"


def morphisms(s: Tree, t: Tree, relabel: bool = False) -> list[Morphism]:
    """Morphisms ``s -> t`` in A.

    With ``relabel=False`` only the leaf-label-preserving one (if any) is
    returned; with ``relabel=True`` every morphism is listed.
    """
    if s.leaves != t.leaves:
        return []
    if not relabel:
        return [Morphism.inclusion(s, t)] if s.edges <= t.edges else []
    return [
        Morphism(s, t, p)
        for p in itertools.permutations(range(1, s.leaves + 1))
        if all(apply_perm(p, e) in t.edges for e in s.edges)
    ]


def contract_edge(t: Tree, e: frozenset) -> tuple[Tree, Morphism]:
    """The inner face contracting ``e`` and its face map into ``t``."""
    s = t.contract(e)
    return s, Morphism.inclusion(s, t)


# -- enumeration -------------------------------------------------------------


def _set_partitions(items: tuple) -> Iterator[list[tuple]]:
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [(first,) + part[i]] + part[i + 1 :]
        yield [(first,)] + part


def _laminar(leafset: tuple) -> Iterator[frozenset]:
    """All edge sets of trees on ``leafset`` (the full set itself excluded)."""
    for part in _set_partitions(leafset):
        if len(part) < 2:
            continue
        options = []
        for block in part:
            if len(block) == 1:
                options.append([frozenset()])
            else:
                options.append([sub | {frozenset(block)} for sub in _laminar(block)])
        for combo in itertools.product(*options):
            yield frozenset().union(*combo)


@lru_cache(maxsize=None)
def _enumerate(n: int) -> tuple[Tree, ...]:
    return tuple(sorted(Tree(n, edges) for edges in _laminar(tuple(range(1, n + 1)))))


def enumerate_trees(n: int, max_leaves: int = DEFAULT_MAX_LEAVES) -> tuple[Tree, ...]:
    """One labelled tree per isomorphism class of leaf-labelled trees with ``n`` leaves."""
    check_leaves(n, max_leaves)
    return _enumerate(n)


@lru_cache(maxsize=None)
def extensions(s: Tree) -> tuple[Tree, ...]:
    """Labelled trees ``T`` with ``E(S) <= E(T)``; one per iso class of extension of ``s``."""
    return tuple(t for t in _enumerate(s.leaves) if s.edges <= t.edges)


@lru_cache(maxsize=None)
def addable_edges(t: Tree) -> tuple[frozenset, ...]:
    """Clusters ``f`` such that ``E(t) + {f}`` is again a tree (codimension one extensions)."""
    n = t.leaves
    out = []
    for k in range(2, n):
        for c in itertools.combinations(range(1, n + 1), k):
            f = frozenset(c)
            if f in t.edges:
                continue
            if all(not (f & e) or f <= e or e <= f for e in t.edges):
                out.append(f)
    return sort_edges(out)


# -- raw presentations and canonical forms -----------------------------------


@dataclass(frozen=True)
class RawTree:
    """A tree presented with arbitrary vertex and edge ids.

    ``incidence`` maps each vertex id to ``(output edge id, input edge ids)``;
    ``leaf_label`` maps each leaf edge id to its label in ``1..n``.
    """

    root_edge: object
    incidence: dict
    leaf_label: dict


def canonicalize(raw: RawTree | Tree) -> tuple[Tree, dict]:
    """Canonical labelled tree of a presentation and the edge map ``raw -> canonical``."""
    if isinstance(raw, Tree):
        edges = {e: e for e in raw.edges}
        edges.update({raw.root: raw.root})
        edges.update({frozenset([i]): frozenset([i]) for i in range(1, raw.leaves + 1)})
        return raw, edges
    producer = {}
    for v, (out, ins) in raw.incidence.items():
        if out in producer:
            raise TreeError(f"edge {out!r} is the output of two vertices")
        if len(ins) < 2:
            raise TreeError(f"vertex {v!r} has fewer than two inputs")
        producer[out] = tuple(ins)
    labels = dict(raw.leaf_label)
    n = len(labels)
    if sorted(labels.values()) != list(range(1, n + 1)):
        raise TreeError("leaf labels must be a bijection onto 1..n")
    edge_map: dict = {}
    used: set = set()

    def walk(e, depth):
        if depth > len(raw.incidence) + 1:
            raise TreeError("incidence contains a cycle")
        if e in used:
            raise TreeError(f"edge {e!r} is used twice")
        used.add(e)
        if e in labels:
            if e in producer:
                raise TreeError(f"leaf {e!r} is the output of a vertex")
            c = frozenset([labels[e]])
        elif e in producer:
            c = frozenset().union(*(walk(x, depth + 1) for x in producer[e]))
        else:
            raise TreeError(f"edge {e!r} is neither a leaf nor a vertex output")
        edge_map[e] = c
        return c

    walk(raw.root_edge, 0)
    if len(used) != len(set(producer) | set(labels)):
        raise TreeError("presentation is not connected")
    root = edge_map[raw.root_edge]
    inner = frozenset(c for e, c in edge_map.items() if e in producer and e != raw.root_edge)
    return Tree(n, inner), edge_map


# -- grafting ----------------------------------------------------------------


def graft(s: Tree, a: int, r: Tree) -> Tree:
    """Graft ``r`` onto leaf ``a`` of ``s``.

    Leaves of ``s`` before ``a`` keep their labels, the leaves of ``r`` take the
    labels ``a .. a+|r|-1``, and the remaining leaves of ``s`` are shifted.
    """
    if not 1 <= a <= s.leaves:
        raise TreeError(f"{a} is not a leaf of {s.term()}")
    k = r.leaves
    smap = _graft_leaf_map(s.leaves, a, k)
    block = frozenset(range(a, a + k))
    edges = {frozenset().union(*(smap[i] for i in e)) for e in s.edges}
    edges |= {frozenset(i + a - 1 for i in e) for e in r.edges}
    edges.add(block)
    return Tree(s.leaves + k - 1, frozenset(edges))


def _graft_leaf_map(ns: int, a: int, k: int) -> dict:
    m = {}
    for i in range(1, ns + 1):
        if i < a:
            m[i] = frozenset([i])
        elif i == a:
            m[i] = frozenset(range(a, a + k))
        else:
            m[i] = frozenset([i + k - 1])
    return m


@dataclass(frozen=True)
class Degrafting:
    """Splitting of a tree at an inner edge into a lower part ``s`` and upper part ``r``.

    ``lower[i]`` is the leaf of ``s`` carrying leaf ``i`` of the tree (leaves in
    the cut edge all map to ``a``); ``upper[i]`` is the leaf of ``r`` for ``i``
    in the cut edge.
    """

    tree: Tree
    edge: frozenset
    s: Tree
    a: int
    r: Tree
    lower: dict
    upper: dict

    def split_edge(self, c: frozenset) -> tuple[str, frozenset | None]:
        """Where an edge of (an extension of) the tree lands after splitting."""
        if c == self.edge:
            return "a", None
        if c <= self.edge:
            return "r", frozenset(self.upper[i] for i in c)
        return "s", frozenset(self.lower[i] for i in c)

    def split_tree(self, t: Tree) -> tuple[Tree, Tree]:
        """Split an extension ``t`` of ``self.tree`` into ``(t_s, t_r)``."""
        if self.edge not in t.edges:
            raise TreeError("tree does not contain the cut edge")
        se, re_ = set(), set()
        for c in t.edges:
            side, img = self.split_edge(c)
            if side == "s":
                se.add(img)
            elif side == "r":
                re_.add(img)
        return Tree(self.s.leaves, frozenset(se)), Tree(self.r.leaves, frozenset(re_))

    def join_tree(self, t_s: Tree, t_r: Tree) -> Tree:
        """Inverse of :meth:`split_tree`."""
        inv_lower = {}
        for i, j in self.lower.items():
            inv_lower.setdefault(j, set()).add(i)
        inv_upper = {j: i for i, j in self.upper.items()}
        edges = {self.edge}
        for c in t_s.edges:
            edges.add(frozenset().union(*(inv_lower[j] for j in c)))
        for c in t_r.edges:
            edges.add(frozenset(inv_upper[j] for j in c))
        return Tree(self.tree.leaves, frozenset(edges))


def degraft(t: Tree, edge: frozenset) -> Degrafting:
    """Cut ``t`` at the inner edge ``edge``.

    The upper part keeps the leaves in ``edge`` in their order; the lower part
    has ``edge`` collapsed to the leaf at the position of its smallest label.
    When ``edge`` is an interval, ``graft(s, a, r) == t`` exactly.
    """
    edge = frozenset(edge)
    if edge not in t.edges:
        raise TreeError(f"{sorted(edge)} is not an inner edge of {t.term()}")
    inside = sorted(edge)
    upper = {i: k for k, i in enumerate(inside, 1)}
    low_points = sorted((set(range(1, t.leaves + 1)) - edge) | {inside[0]})
    pos = {i: k for k, i in enumerate(low_points, 1)}
    a = pos[inside[0]]
    lower = {i: (a if i in edge else pos[i]) for i in range(1, t.leaves + 1)}
    s_edges = frozenset(
        frozenset(lower[i] for i in c) for c in t.edges if not c <= edge
    )
    r_edges = frozenset(frozenset(upper[i] for i in c) for c in t.edges if c < edge)
    return Degrafting(t, edge, Tree(len(low_points), s_edges), a, Tree(len(inside), r_edges), lower, upper)


def graft_iso(s: Tree, a: int, r: Tree, t: Tree, edge: frozenset) -> Morphism:
    """The isomorphism ``graft(s, a, r) -> t`` matching ``degraft(t, edge)``."""
    dg = degraft(t, edge)
    if (dg.s, dg.a, dg.r) != (s, a, r):
        raise TreeError("tree is not this grafting")
    g = graft(s, a, r)
    k = r.leaves
    inv_lower = {}
    for i, j in dg.lower.items():
        if i not in edge:
            inv_lower[j] = i
    inv_upper = {j: i for i, j in dg.upper.items()}
    perm = []
    for i in range(1, g.leaves + 1):
        if i < a:
            perm.append(inv_lower[i])
        elif i < a + k:
            perm.append(inv_upper[i - a + 1])
        else:
            perm.append(inv_lower[i - k + 1])
    return Morphism(g, t, tuple(perm))


def graft_morphism(beta: Morphism, a: int, gamma: Morphism) -> Morphism:
    """``beta o_a gamma : S o_a R -> S' o_{beta(a)} R'``."""
    s, r = beta.source, gamma.source
    s2, r2 = beta.target, gamma.target
    a2 = beta.perm[a - 1]
    src = graft(s, a, r)
    tgt = graft(s2, a2, r2)
    k, k2 = r.leaves, r2.leaves
    perm = []
    for i in range(1, src.leaves + 1):
        if i < a:
            j = beta.perm[i - 1]
        elif i < a + k:
            perm.append(a2 + gamma.perm[i - a] - 1)
            continue
        else:
            j = beta.perm[i - k]
        perm.append(j if j < a2 else j + k2 - 1)
    return Morphism(src, tgt, tuple(perm))


def split_morphism(f: Morphism, edge: frozenset) -> tuple:
    """Split ``f : U -> U'`` at an inner edge of ``U``.

    Returns ``(edge', f_s, f_r)`` with ``edge'`` the image edge and ``f_s``,
    ``f_r`` the induced morphisms between the lower and upper parts.
    """
    edge = frozenset(edge)
    e2 = f.edge_image(edge)
    d1, d2 = degraft(f.source, edge), degraft(f.target, e2)
    ps = [0] * d1.s.leaves
    pr = [0] * d1.r.leaves
    for i in range(1, f.source.leaves + 1):
        j = f.perm[i - 1]
        ps[d1.lower[i] - 1] = d2.lower[j]
        if i in edge:
            pr[d1.upper[i] - 1] = d2.upper[j]
    return e2, Morphism(d1.s, d2.s, tuple(ps)), Morphism(d1.r, d2.r, tuple(pr))


# -- posets ------------------------------------------------------------------


@dataclass(frozen=True)
class TreePoset:
    """Skeletal model of ``C_n / A``: labelled trees ordered by edge inclusion."""

    leaves: int
    elements: tuple

    @cached_property
    def hasse_edges(self) -> tuple:
        return tuple(
            (s, t)
            for s in self.elements
            for t in self.elements
            if s.edges < t.edges and len(t.edges) == len(s.edges) + 1
        )

    def leq(self, s: Tree, t: Tree) -> bool:
        return s.edges <= t.edges

    @property
    def minimum(self) -> Tree | None:
        c = Tree.corolla(self.leaves)
        return c if c in self.elements else None

    def levels(self) -> dict:
        out: dict = {}
        for t in self.elements:
            out.setdefault(len(t.edges), []).append(t)
        return out


def comma_poset(n: int, max_leaves: int = DEFAULT_MAX_LEAVES) -> TreePoset:
    return TreePoset(n, enumerate_trees(n, max_leaves))


def strict_part(p: TreePoset) -> TreePoset:
    """``C_n // A``: drop the corolla."""
    return TreePoset(p.leaves, tuple(t for t in p.elements if t.edges))


@lru_cache(maxsize=None)
def all_morphisms(n: int) -> tuple[Morphism, ...]:
    """Every morphism of A between labelled trees with ``n`` leaves."""
    out = []
    trees = _enumerate(n)
    for s in trees:
        for p in itertools.permutations(range(1, n + 1)):
            mid = s.relabel(p)
            for t in extensions(mid):
                out.append(Morphism(s, t, p))
    return tuple(out)
