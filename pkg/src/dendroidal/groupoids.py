"""Invariants and coinvariants of finite simple groupoid actions.

A groupoid acts on a family of free abelian groups ``A_x``.  Arrows are given
as signed basis bijections.  For a simple groupoid (at most one arrow between
two objects) the coinvariants and invariants are both free on one copy of
``A_x`` per connected component; we always use the smallest object of a
component as its representative, so no averaging is ever needed.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Callable, Hashable, Iterable, Mapping, Sequence

from .exactalg import ContractViolation, IntMatrix, lc_add, smith_normal_form


class NonSimpleGroupoid(ContractViolation):
    """Two different arrows connect the same pair of objects."""


class SelfSignOrbit(NonSimpleGroupoid):
    """A generator is sent to minus itself; the quotient would carry 2-torsion."""

    def __init__(self, obj, key):
        super().__init__(f"generator {key!r} of {obj!r} returns to itself with sign -1 (2-torsion)")
        self.obj = obj
        self.key = key


@dataclass(frozen=True)
class Arrow:
    source: Hashable
    target: Hashable
    action: Mapping  # key of A_source -> (sign, key of A_target)


def _apply(action: Mapping, chain: Mapping) -> dict:
    out: dict = {}
    for k, v in chain.items():
        s, t = action[k]
        out[t] = out.get(t, 0) + s * v
        if not out[t]:
            del out[t]
    return out


def _invert(action: Mapping) -> dict:
    return {t: (s, k) for k, (s, t) in action.items()}


def _compose(g: Mapping, f: Mapping) -> dict:
    """``g o f`` for signed bijections."""
    out = {}
    for k, (s, t) in f.items():
        s2, t2 = g[t]
        out[k] = (s * s2, t2)
    return out


class GroupoidAction:
    """Action of a finite groupoid, generated by ``arrows``, on free modules ``A_x``."""

    def __init__(
        self,
        objects: Mapping[Hashable, Sequence[Hashable]],
        arrows: Iterable[Arrow],
        order: Callable = repr,
    ):
        self.objects = {x: tuple(ks) for x, ks in objects.items()}
        self.arrows = list(arrows)
        self.order = order
        for a in self.arrows:
            src, tgt = self.objects.get(a.source), self.objects.get(a.target)
            if src is None or tgt is None:
                raise ValueError("arrow between unknown objects")
            if sorted(map(repr, a.action)) != sorted(map(repr, src)) or sorted(
                repr(t) for _, t in a.action.values()
            ) != sorted(map(repr, tgt)):
                raise ValueError(f"arrow {a.source!r} -> {a.target!r} is not a basis bijection")
        self._build()

    def _build(self) -> None:
        adj: dict = {x: [] for x in self.objects}
        for a in self.arrows:
            adj[a.source].append((a.target, a.action))
            adj[a.target].append((a.source, _invert(a.action)))
        self.rep: dict = {}
        self.from_rep: dict = {}  # x -> signed bijection A_rep -> A_x
        self.components: list = []
        for x0 in sorted(self.objects, key=self.order):
            if x0 in self.rep:
                continue
            comp = [x0]
            self.rep[x0] = x0
            self.from_rep[x0] = {k: (1, k) for k in self.objects[x0]}
            queue = deque([x0])
            while queue:
                u = queue.popleft()
                for v, g in adj[u]:
                    if v not in self.rep:
                        self.rep[v] = x0
                        self.from_rep[v] = _compose(g, self.from_rep[u])
                        comp.append(v)
                        queue.append(v)
            self.components.append(tuple(comp))
        for a in self.arrows:
            lhs = _compose(a.action, self.from_rep[a.source])
            rhs = self.from_rep[a.target]
            if lhs != rhs:
                self._diagnose(a, lhs, rhs)

    def _diagnose(self, a: Arrow, lhs: dict, rhs: dict):
        # lhs and rhs are two arrows rep -> target; their discrepancy is an automorphism
        rep = self.rep[a.target]
        auto = _compose(_invert(rhs), lhs)
        for k, (s, t) in auto.items():
            if t == k and s == -1:
                raise SelfSignOrbit(rep, k)
        raise NonSimpleGroupoid(f"two different arrows {rep!r} -> {a.target!r}")

    # -- coinvariants / invariants ------------------------------------------

    def coinvariant_basis(self) -> list:
        """Pairs ``(representative object, basis key)``."""
        return [(c[0], k) for c in self.components for k in self.objects[c[0]]]

    def project(self, x: Hashable, chain: Mapping) -> dict:
        """Image of ``chain`` in ``A_x`` under the quotient, in the coinvariant basis."""
        back = _invert(self.from_rep[x])
        rep = self.rep[x]
        return {(rep, k): v for k, v in _apply(back, chain).items()}

    def rho(self, element: Mapping) -> dict:
        """Coinvariants -> invariants: ``[x, a]`` goes to the family ``y -> g.a``."""
        family: dict = {}
        for (rep, k), v in element.items():
            if self.rep.get(rep) != rep:
                raise ValueError(f"{rep!r} is not a representative")
            for y in self._component_of(rep):
                lc_add(family.setdefault(y, {}), _apply(self.from_rep[y], {k: v}))
        return {y: a for y, a in family.items() if a}

    def _component_of(self, rep):
        for c in self.components:
            if c[0] == rep:
                return c
        raise KeyError(rep)

    def is_invariant(self, family: Mapping) -> bool:
        for a in self.arrows:
            if _apply(a.action, family.get(a.source, {})) != dict(family.get(a.target, {})):
                return False
        return True

    def orbit_integral(self, family: Mapping) -> dict:
        """Inverse of :meth:`rho`: read each component off at its representative."""
        if not self.is_invariant(family):
            raise ContractViolation("family is not invariant")
        out: dict = {}
        for c in self.components:
            rep = c[0]
            for k, v in family.get(rep, {}).items():
                if v:
                    out[(rep, k)] = v
        return out

    def quotient_invariants(self) -> tuple[int, tuple]:
        """Free rank and torsion of the honest coinvariant quotient (used for diagnostics)."""
        gens = [(x, k) for x, ks in self.objects.items() for k in ks]
        idx = {g: i for i, g in enumerate(gens)}
        rels = []
        for a in self.arrows:
            for k, (s, t) in a.action.items():
                row = [0] * len(gens)
                row[idx[(a.source, k)]] += 1
                row[idx[(a.target, t)]] -= s
                rels.append(row)
        if not rels:
            return len(gens), ()
        f = smith_normal_form(IntMatrix.from_rows(rels, len(gens))).factors
        return len(gens) - len(f), tuple(x for x in f if x > 1)


def coinvariants(action: GroupoidAction) -> tuple[list, Callable]:
    return action.coinvariant_basis(), action.project


def rho(action: GroupoidAction, element: Mapping) -> dict:
    return action.rho(element)


def orbit_integral(action: GroupoidAction, family: Mapping) -> dict:
    return action.orbit_integral(family)


def checked_action(objects, arrows, order=repr) -> GroupoidAction:
    """Build an action, falling back to a diagnostic quotient when it is not simple."""
    try:
        return GroupoidAction(objects, arrows, order)
    except SelfSignOrbit as err:
        probe = GroupoidAction.__new__(GroupoidAction)
        probe.objects = {x: tuple(ks) for x, ks in objects.items()}
        probe.arrows = list(arrows)
        free, torsion = probe.quotient_invariants()
        err.free_rank = free
        err.torsion = torsion
        raise
