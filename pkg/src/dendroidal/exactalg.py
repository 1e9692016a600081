"""Exact integral homological algebra.

Chain complexes are stored sparsely: every degree carries an ordered list of
hashable basis keys (unique across degrees) and the boundary sends each key to
a dict ``{key: coefficient}``.  Dense :class:`IntMatrix` views are produced on
demand.  All arithmetic uses Python integers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from math import gcd
from typing import Callable, Hashable, Iterable, Mapping, Sequence

LinComb = dict


class ContractViolation(ArithmeticError):
    """An algebraic identity that must hold (d^2 = 0, chain map, ...) failed."""


# -- linear combinations -----------------------------------------------------


def lc_add(acc: dict, other: Mapping, scale: int = 1) -> dict:
    """In-place ``acc += scale * other``; zero entries are dropped."""
    if not scale:
        return acc
    for k, v in other.items():
        nv = acc.get(k, 0) + scale * v
        if nv:
            acc[k] = nv
        else:
            acc.pop(k, None)
    return acc


def lc_scale(a: Mapping, scale: int) -> dict:
    if not scale:
        return {}
    return {k: scale * v for k, v in a.items()}


def lc_clean(a: Mapping) -> dict:
    return {k: v for k, v in a.items() if v}


# -- dense matrices and Smith normal form ------------------------------------


@dataclass
class IntMatrix:
    rows: int
    cols: int
    entries: list

    def __post_init__(self):
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise ValueError("matrix entries do not match its shape")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int | None = None) -> "IntMatrix":
        rows = [list(map(int, r)) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        return cls(len(rows), cols, rows)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(rows, cols, [[0] * cols for _ in range(rows)])

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        m = cls.zeros(n, n)
        for i in range(n):
            m.entries[i][i] = 1
        return m

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        cols_t = list(zip(*other.entries)) if other.rows else [()] * other.cols
        out = [[sum(a * b for a, b in zip(row, col)) for col in cols_t] for row in self.entries]
        if not other.rows:
            out = [[0] * other.cols for _ in range(self.rows)]
        return IntMatrix(self.rows, other.cols, out)

    def __eq__(self, other):
        return (
            isinstance(other, IntMatrix)
            and (self.rows, self.cols) == (other.rows, other.cols)
            and self.entries == other.entries
        )

    def is_zero(self) -> bool:
        return all(not x for r in self.entries for x in r)

    def transpose(self) -> "IntMatrix":
        return IntMatrix(self.cols, self.rows, [list(c) for c in zip(*self.entries)] if self.rows else [[] for _ in range(self.cols)])

    def det(self) -> int:
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        return _bareiss(self.entries, self.rows, self.cols, want_det=True)[1]


@dataclass
class SNFResult:
    factors: tuple
    U: IntMatrix | None = None
    V: IntMatrix | None = None

    @property
    def rank(self) -> int:
        return len(self.factors)


def smith_normal_form(m: IntMatrix, transforms: bool = False) -> SNFResult:
    """Invariant factors of ``m``; optionally unimodular ``U, V`` with ``U m V`` diagonal.

    Pivots are chosen as entries of smallest absolute value, which keeps entry
    growth modest on the sparse 0/+-1 matrices met in practice.
    """
    R, C = m.rows, m.cols
    A = [list(r) for r in m.entries]
    U = [[int(i == j) for j in range(R)] for i in range(R)] if transforms else None
    V = [[int(i == j) for j in range(C)] for i in range(C)] if transforms else None

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        if U is not None:
            U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        if V is not None:
            for row in V:
                row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):  # row dst += q * row src
        if q:
            rs, rd = A[src], A[dst]
            for k in range(C):
                if rs[k]:
                    rd[k] += q * rs[k]
            if U is not None:
                us, ud = U[src], U[dst]
                for k in range(R):
                    if us[k]:
                        ud[k] += q * us[k]

    def add_col(dst, src, q):  # col dst += q * col src
        if q:
            for row in A:
                if row[src]:
                    row[dst] += q * row[src]
            if V is not None:
                for row in V:
                    if row[src]:
                        row[dst] += q * row[src]

    factors = []
    t = 0
    while t < min(R, C):
        best = None
        for i in range(t, R):
            row = A[i]
            for j in range(t, C):
                x = row[j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
                    if best[0] == 1:
                        break
            if best and best[0] == 1:
                break
        if best is None:
            break
        swap_rows(t, best[1])
        swap_cols(t, best[2])
        while True:
            p = A[t][t]
            clean = True
            for i in range(t + 1, R):
                if A[i][t]:
                    add_row(i, t, -(A[i][t] // p))
                    if A[i][t]:
                        clean = False
            for j in range(t + 1, C):
                if A[t][j]:
                    add_col(j, t, -(A[t][j] // p))
                    if A[t][j]:
                        clean = False
            if not clean:
                cand = min(
                    [(abs(A[i][t]), i, t) for i in range(t, R) if A[i][t]]
                    + [(abs(A[t][j]), t, j) for j in range(t, C) if A[t][j]]
                )
                swap_rows(t, cand[1])
                swap_cols(t, cand[2])
                continue
            bad = None
            if abs(p) != 1:
                for i in range(t + 1, R):
                    row = A[i]
                    for j in range(t + 1, C):
                        if row[j] % p:
                            bad = i
                            break
                    if bad is not None:
                        break
            if bad is None:
                break
            add_row(t, bad, 1)
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            if U is not None:
                U[t] = [-x for x in U[t]]
        factors.append(A[t][t])
        t += 1
    res = SNFResult(tuple(factors))
    if transforms:
        res.U = IntMatrix(R, R, U)
        res.V = IntMatrix(C, C, V)
    return res


def _bareiss(rows: list, nrows: int, ncols: int, want_det: bool = False) -> tuple[int, int]:
    """Fraction-free elimination; returns ``(rank, det)`` (det only for square input)."""
    A = [list(r) for r in rows]
    rank = 0
    prev = 1
    sign = 1
    for c in range(ncols):
        piv = None
        for i in range(rank, nrows):
            if A[i][c]:
                if piv is None or abs(A[i][c]) < abs(A[piv][c]):
                    piv = i
        if piv is None:
            if want_det:
                return rank, 0
            continue
        if piv != rank:
            A[piv], A[rank] = A[rank], A[piv]
            sign = -sign
        p = A[rank][c]
        pr = A[rank]
        for i in range(rank + 1, nrows):
            ri = A[i]
            a = ri[c]
            for k in range(c + 1, ncols):
                ri[k] = (p * ri[k] - a * pr[k]) // prev
            ri[c] = 0
        prev = p
        rank += 1
        if rank == nrows:
            break
    det = sign * prev if (want_det and rank == nrows == ncols) else 0
    if want_det and nrows == 0:
        det = 1
    return rank, det


# -- sparse elimination ------------------------------------------------------


def _unit_eliminate(columns: Iterable[Mapping]) -> tuple[int, list[dict]]:
    """Eliminate +-1 pivots from a sparse matrix given by its columns.

    Returns the number of unit pivots removed and the remaining nonzero
    columns.  The invariant factors of the input are ``1`` repeated that many
    times followed by those of the remainder.
    """
    cols = {}
    rows: dict = {}
    for j, col in enumerate(columns):
        col = {k: v for k, v in col.items() if v}
        if col:
            cols[j] = col
            for r in col:
                rows.setdefault(r, set()).add(j)
    units = 0
    progress = True
    while progress and cols:
        progress = False
        for j in sorted(cols, key=lambda j: len(cols[j])):
            col = cols.get(j)
            if not col:
                continue
            piv = None
            for r, v in col.items():
                if v == 1 or v == -1:
                    if piv is None or len(rows[r]) < len(rows[piv]):
                        piv = r
            if piv is None:
                continue
            u = col[piv]
            for j2 in list(rows[piv]):
                if j2 == j:
                    continue
                c2 = cols[j2]
                q = -c2[piv] * u
                for r, v in col.items():
                    nv = c2.get(r, 0) + q * v
                    if nv:
                        if r not in c2:
                            rows[r].add(j2)
                        c2[r] = nv
                    else:
                        if r in c2:
                            del c2[r]
                            rows[r].discard(j2)
                if not c2:
                    del cols[j2]
            for r in col:
                rows[r].discard(j)
            del rows[piv]
            del cols[j]
            # the pivot row now only meets column j; the other entries of
            # column j are cleared by row operations, which affect no other column
            units += 1
            progress = True
    return units, list(cols.values())


def _dense_from_columns(columns: list[dict]) -> IntMatrix:
    keys = sorted({r for c in columns for r in c}, key=repr)
    idx = {k: i for i, k in enumerate(keys)}
    m = [[0] * len(columns) for _ in keys]
    for j, c in enumerate(columns):
        for r, v in c.items():
            m[idx[r]][j] = v
    return IntMatrix(len(keys), len(columns), m)


def sparse_invariant_factors(columns: Iterable[Mapping]) -> tuple[int, ...]:
    units, rest = _unit_eliminate(columns)
    tail = smith_normal_form(_dense_from_columns(rest)).factors if rest else ()
    return (1,) * units + tuple(tail)


def sparse_rank(columns: Iterable[Mapping]) -> int:
    units, rest = _unit_eliminate(columns)
    if not rest:
        return units
    m = _dense_from_columns(rest)
    return units + _bareiss(m.entries, m.rows, m.cols)[0]


# -- chain complexes ---------------------------------------------------------


class ChainComplex:
    """Bounded complex of finitely generated free abelian groups.

    ``basis`` maps degrees to ordered key lists; ``boundary`` maps keys to
    linear combinations of keys one degree lower (missing keys have zero
    boundary).
    """

    def __init__(
        self,
        basis: Mapping[int, Sequence[Hashable]],
        boundary: Mapping[Hashable, Mapping[Hashable, int]] | None = None,
        check: bool = True,
    ):
        self.basis = {n: tuple(ks) for n, ks in basis.items() if ks}
        self.degree_of = {}
        for n, ks in self.basis.items():
            for k in ks:
                if k in self.degree_of:
                    raise ValueError(f"basis key {k!r} appears twice")
                self.degree_of[k] = n
        self.boundary = {}
        for k, v in (boundary or {}).items():
            v = lc_clean(v)
            if v:
                self.boundary[k] = v
        if check:
            self.check()

    @classmethod
    def zero(cls) -> "ChainComplex":
        return cls({})

    @classmethod
    def unit(cls, key: Hashable = "1") -> "ChainComplex":
        return cls({0: [key]})

    def check(self) -> None:
        for k, img in self.boundary.items():
            n = self.degree_of.get(k)
            if n is None:
                raise ContractViolation(f"boundary given for unknown key {k!r}")
            for t in img:
                if self.degree_of.get(t) != n - 1:
                    raise ContractViolation(f"boundary of {k!r} leaves degree {n - 1}")
        for k in self.boundary:
            if self.d(self.boundary[k]):
                raise ContractViolation(f"d^2 != 0 on {k!r}")

    @property
    def degrees(self) -> list[int]:
        return sorted(self.basis)

    @property
    def lo(self) -> int | None:
        return min(self.basis) if self.basis else None

    @property
    def hi(self) -> int | None:
        return max(self.basis) if self.basis else None

    def rank(self, n: int) -> int:
        return len(self.basis.get(n, ()))

    def ranks(self) -> dict:
        return {n: len(ks) for n, ks in sorted(self.basis.items())}

    def total_rank(self) -> int:
        return sum(len(ks) for ks in self.basis.values())

    def euler_characteristic(self) -> int:
        return sum((-1) ** n * len(ks) for n, ks in self.basis.items())

    def d(self, chain: Mapping) -> dict:
        out: dict = {}
        for k, v in chain.items():
            b = self.boundary.get(k)
            if b:
                lc_add(out, b, v)
        return out

    def columns(self, n: int) -> list[dict]:
        return [self.boundary.get(k, {}) for k in self.basis.get(n, ())]

    def matrix(self, n: int) -> IntMatrix:
        """Boundary ``C_n -> C_{n-1}`` with rows and columns in basis order."""
        rows = self.basis.get(n - 1, ())
        idx = {k: i for i, k in enumerate(rows)}
        cols = self.basis.get(n, ())
        m = [[0] * len(cols) for _ in rows]
        for j, k in enumerate(cols):
            for t, v in self.boundary.get(k, {}).items():
                m[idx[t]][j] = v
        return IntMatrix(len(rows), len(cols), m)

    def shift(self, s: int, tag: Hashable = None) -> "ChainComplex":
        """Regrade by ``+s``; keys are kept unless ``tag`` wraps them."""
        wrap = (lambda k: (tag, k)) if tag is not None else (lambda k: k)
        return ChainComplex(
            {n + s: [wrap(k) for k in ks] for n, ks in self.basis.items()},
            {wrap(k): {wrap(t): v for t, v in b.items()} for k, b in self.boundary.items()},
            check=False,
        )

    def __repr__(self):
        return f"ChainComplex(ranks={self.ranks()})"


def direct_sum(parts: Sequence[ChainComplex], tags: Sequence[Hashable] | None = None) -> ChainComplex:
    tags = list(range(len(parts))) if tags is None else list(tags)
    basis: dict = {}
    bd: dict = {}
    for tag, c in zip(tags, parts):
        for n, ks in c.basis.items():
            basis.setdefault(n, []).extend((tag, k) for k in ks)
        for k, b in c.boundary.items():
            bd[(tag, k)] = {(tag, t): v for t, v in b.items()}
    return ChainComplex(basis, bd, check=False)


# -- maps --------------------------------------------------------------------


class GradedMap:
    """Homogeneous linear map of degree ``degree`` between complexes."""

    def __init__(self, source: ChainComplex, target: ChainComplex, images: Mapping | Callable, degree: int = 0):
        self.source = source
        self.target = target
        self.degree = degree
        if callable(images):
            images = {k: images(k) for k in source.degree_of}
        self.images = {k: lc_clean(v) for k, v in images.items() if v}
        for k, img in self.images.items():
            n = source.degree_of.get(k)
            if n is None:
                raise ContractViolation(f"image given for unknown key {k!r}")
            for t in img:
                if target.degree_of.get(t) != n + degree:
                    raise ContractViolation(f"image of {k!r} has wrong degree")

    def __call__(self, chain: Mapping) -> dict:
        out: dict = {}
        for k, v in chain.items():
            img = self.images.get(k)
            if img:
                lc_add(out, img, v)
        return out

    def on(self, key: Hashable) -> dict:
        return dict(self.images.get(key, {}))

    def matrix(self, n: int) -> IntMatrix:
        rows = self.target.basis.get(n + self.degree, ())
        idx = {k: i for i, k in enumerate(rows)}
        cols = self.source.basis.get(n, ())
        m = [[0] * len(cols) for _ in rows]
        for j, k in enumerate(cols):
            for t, v in self.images.get(k, {}).items():
                m[idx[t]][j] = v
        return IntMatrix(len(rows), len(cols), m)

    def after(self, other: "GradedMap") -> "GradedMap":
        """Composite ``self o other``."""
        return GradedMap(
            other.source,
            self.target,
            {k: self(img) for k, img in other.images.items()},
            self.degree + other.degree,
        )

    def __add__(self, other: "GradedMap") -> "GradedMap":
        imgs = {k: dict(v) for k, v in self.images.items()}
        for k, v in other.images.items():
            lc_add(imgs.setdefault(k, {}), v)
        return GradedMap(self.source, self.target, imgs, self.degree)

    def scaled(self, c: int) -> "GradedMap":
        return GradedMap(self.source, self.target, {k: lc_scale(v, c) for k, v in self.images.items()}, self.degree)

    def equals(self, other: "GradedMap") -> bool:
        return self.images == other.images

    def is_zero(self) -> bool:
        return not self.images


class ChainMap(GradedMap):
    """Degree-zero map commuting with the boundaries."""

    def __init__(self, source, target, images, check: bool = True):
        super().__init__(source, target, images, 0)
        if check:
            self.check()

    def check(self) -> None:
        for k in self.source.degree_of:
            lhs = self.target.d(self.images.get(k, {}))
            rhs = self(self.source.boundary.get(k, {}))
            if lhs != rhs:
                raise ContractViolation(f"not a chain map at {k!r}")

    @classmethod
    def identity(cls, c: ChainComplex) -> "ChainMap":
        return cls(c, c, {k: {k: 1} for k in c.degree_of}, check=False)

    @classmethod
    def zero(cls, s: ChainComplex, t: ChainComplex) -> "ChainMap":
        return cls(s, t, {}, check=False)

    def after(self, other: "GradedMap") -> "GradedMap":
        g = super().after(other)
        if isinstance(other, ChainMap):
            return ChainMap(g.source, g.target, g.images, check=False)
        return g


def commutator_defect(f: GradedMap) -> dict:
    """``d f - (-1)^{|f|} f d`` on each basis key; empty iff ``f`` is a chain map of its degree."""
    out = {}
    sgn = (-1) ** f.degree
    for k in f.source.degree_of:
        v = f.target.d(f.images.get(k, {}))
        lc_add(v, f(f.source.boundary.get(k, {})), -sgn)
        if v:
            out[k] = v
    return out


# -- homology ----------------------------------------------------------------


@dataclass(frozen=True)
class DegreeHomology:
    degree: int
    betti: int
    torsion: tuple = ()

    def to_dict(self) -> dict:
        return {"degree": self.degree, "betti": self.betti, "torsion": list(self.torsion)}


@dataclass(frozen=True)
class HomologyResult:
    groups: tuple

    def __getitem__(self, n: int) -> DegreeHomology:
        for g in self.groups:
            if g.degree == n:
                return g
        return DegreeHomology(n, 0, ())

    def betti(self, n: int) -> int:
        return self[n].betti

    def torsion(self, n: int) -> tuple:
        return self[n].torsion

    @property
    def nonzero(self) -> tuple:
        return tuple(g for g in self.groups if g.betti or g.torsion)

    def is_zero(self) -> bool:
        return not self.nonzero

    def euler_characteristic(self) -> int:
        return sum((-1) ** g.degree * g.betti for g in self.groups)

    def to_json(self) -> list:
        return [g.to_dict() for g in self.groups]

    def dumps(self) -> str:
        return json.dumps(self.to_json())

    def table(self) -> dict:
        return {g.degree: (g.betti, g.torsion) for g in self.nonzero}

    def __str__(self):
        parts = []
        for g in self.nonzero:
            s = [f"Z^{g.betti}"] if g.betti else []
            s += [f"Z/{t}" for t in g.torsion]
            parts.append(f"H_{g.degree} = " + " + ".join(s))
        return "; ".join(parts) if parts else "0"


def homology(c: ChainComplex, check: bool = False) -> HomologyResult:
    """Integral homology via Smith normal forms of the boundary matrices."""
    if check:
        c.check()
    if not c.basis:
        return HomologyResult(())
    lo, hi = c.lo, c.hi
    factors = {n: sparse_invariant_factors(c.columns(n)) for n in range(lo, hi + 2)}
    groups = []
    for n in range(lo, hi + 1):
        rk_out = len(factors[n])
        inc = factors[n + 1]
        betti = c.rank(n) - rk_out - len(inc)
        torsion = tuple(x for x in inc if x > 1)
        groups.append(DegreeHomology(n, betti, torsion))
    return HomologyResult(tuple(groups))


def boundary_rank(c: ChainComplex, n: int) -> int:
    return sparse_rank(c.columns(n))


def induced_rank(f: ChainMap, n: int) -> int:
    """Rank of ``H_n(f)`` over the rationals, computed without choosing cycles.

    Uses ``rk [[d_n, 0], [f_n, d'_{n+1}]] = rk d_n + rk d'_{n+1} + rk H_n(f)``.
    """
    s, t = f.source, f.target
    cols = []
    for k in s.basis.get(n, ()):
        col = {("s", r): v for r, v in s.boundary.get(k, {}).items()}
        col.update({("t", r): v for r, v in f.images.get(k, {}).items()})
        cols.append(col)
    for k in t.basis.get(n + 1, ()):
        cols.append({("t", r): v for r, v in t.boundary.get(k, {}).items()})
    return sparse_rank(cols) - boundary_rank(s, n) - boundary_rank(t, n + 1)


# -- constructions -----------------------------------------------------------


def tensor(c1: ChainComplex, c2: ChainComplex) -> ChainComplex:
    """``d(x (x) y) = dx (x) y + (-1)^{|x|} x (x) dy``; keys are pairs."""
    basis: dict = {}
    bd: dict = {}
    for n1, ks1 in c1.basis.items():
        for n2, ks2 in c2.basis.items():
            lst = basis.setdefault(n1 + n2, [])
            for x in ks1:
                dx = c1.boundary.get(x, {})
                for y in ks2:
                    lst.append((x, y))
                    img: dict = {}
                    for x2, v in dx.items():
                        img[(x2, y)] = v
                    sgn = (-1) ** n1
                    for y2, v in c2.boundary.get(y, {}).items():
                        img[(x, y2)] = img.get((x, y2), 0) + sgn * v
                    if img:
                        bd[(x, y)] = img
    return ChainComplex(basis, bd, check=False)


def tensor_map(f: GradedMap, g: GradedMap, source: ChainComplex | None = None, target: ChainComplex | None = None) -> GradedMap:
    """``(f (x) g)(x (x) y) = (-1)^{|g||x|} f(x) (x) g(y)``."""
    source = source or tensor(f.source, g.source)
    target = target or tensor(f.target, g.target)
    imgs = {}
    for (x, y) in source.degree_of:
        fx = f.images.get(x)
        gy = g.images.get(y)
        if not fx or not gy:
            continue
        sgn = (-1) ** (g.degree * f.source.degree_of[x])
        imgs[(x, y)] = {(a, b): sgn * u * v for a, u in fx.items() for b, v in gy.items()}
    if f.degree == 0 and g.degree == 0:
        return ChainMap(source, target, imgs, check=False)
    return GradedMap(source, target, imgs, f.degree + g.degree)


def mapping_cone(f: ChainMap, check: bool = True) -> ChainComplex:
    """``cone(f)_n = target_n + source_{n-1}`` with ``d(y, x) = (dy + f x, -dx)``."""
    s, t = f.source, f.target
    basis: dict = {}
    bd: dict = {}
    for n, ks in t.basis.items():
        basis.setdefault(n, []).extend(("t", k) for k in ks)
    for n, ks in s.basis.items():
        basis.setdefault(n + 1, []).extend(("s", k) for k in ks)
    for k, b in t.boundary.items():
        bd[("t", k)] = {("t", r): v for r, v in b.items()}
    for k in s.degree_of:
        img = {("t", r): v for r, v in f.images.get(k, {}).items()}
        for r, v in s.boundary.get(k, {}).items():
            img[("s", r)] = -v
        if img:
            bd[("s", k)] = img
    return ChainComplex(basis, bd, check=check)


@dataclass
class QuasiIsoCertificate:
    ok: bool
    cone_homology: HomologyResult

    def __bool__(self):
        return self.ok

    def witness(self) -> tuple:
        return self.cone_homology.nonzero


def is_quasi_iso(f: ChainMap) -> QuasiIsoCertificate:
    """Integral quasi-isomorphism test: the mapping cone must be acyclic."""
    h = homology(mapping_cone(f))
    return QuasiIsoCertificate(h.is_zero(), h)


# -- double complexes --------------------------------------------------------


class DoubleComplex:
    """Bigraded free module with anticommuting horizontal and vertical differentials.

    ``basis[(p, q)]`` lists keys; ``dh`` lowers ``p`` and ``dv`` lowers ``q``.
    """

    def __init__(self, basis: Mapping, dh: Mapping, dv: Mapping, check: bool = True):
        self.basis = {pq: tuple(ks) for pq, ks in basis.items() if ks}
        self.bidegree = {k: pq for pq, ks in self.basis.items() for k in ks}
        self.dh = {k: lc_clean(v) for k, v in dh.items() if lc_clean(v)}
        self.dv = {k: lc_clean(v) for k, v in dv.items() if lc_clean(v)}
        if check:
            self.check()

    def _apply(self, d: Mapping, chain: Mapping) -> dict:
        out: dict = {}
        for k, v in chain.items():
            if k in d:
                lc_add(out, d[k], v)
        return out

    def check(self) -> None:
        for name, d, shift in (("horizontal", self.dh, (1, 0)), ("vertical", self.dv, (0, 1))):
            for k, img in d.items():
                p, q = self.bidegree[k]
                for t in img:
                    if self.bidegree.get(t) != (p - shift[0], q - shift[1]):
                        raise ContractViolation(f"{name} differential of {k!r} has wrong bidegree")
                if self._apply(d, img):
                    raise ContractViolation(f"{name} differential squares to nonzero at {k!r}")
        for k in self.bidegree:
            a = self._apply(self.dh, self.dv.get(k, {}))
            lc_add(a, self._apply(self.dv, self.dh.get(k, {})))
            if a:
                raise ContractViolation(f"differentials do not anticommute at {k!r}")

    def total_complex(self, offset: int = 0, check: bool = True) -> ChainComplex:
        basis: dict = {}
        for (p, q), ks in sorted(self.basis.items()):
            basis.setdefault(p + q + offset, []).extend(ks)
        bd: dict = {}
        for k in self.bidegree:
            img = dict(self.dh.get(k, {}))
            lc_add(img, self.dv.get(k, {}))
            if img:
                bd[k] = img
        return ChainComplex(basis, bd, check=check)


def total_complex(d: DoubleComplex, offset: int = 0) -> ChainComplex:
    return d.total_complex(offset)
