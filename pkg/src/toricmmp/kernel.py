"""Exact rational geometry: linear algebra, cones, lattice points, polytopes, LP.

Everything here works over ``fractions.Fraction`` and Python integers.  Vectors
are plain tuples; ``Cone`` and ``LatticePolytope`` are frozen dataclasses whose
derived data (dual rays, facets, triangulations) is cached on first use.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, reduce
from itertools import combinations
from math import factorial, gcd
from typing import Iterable, Sequence

Vec = tuple


class GeometryError(ValueError):
    """Base class for invalid geometric input."""


class RankMismatch(GeometryError):
    pass


class UnboundedRegion(GeometryError):
    pass


# ---------------------------------------------------------------------------
# vectors and matrices


def ratvec(entries: Iterable) -> tuple[Fraction, ...]:
    return tuple(Fraction(x) for x in entries)


def dot(a: Sequence, b: Sequence):
    return sum(x * y for x, y in zip(a, b))


def lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b) if a and b else max(a, b)


def primitive(v: Sequence) -> tuple[int, ...]:
    """Scale a nonzero rational vector to the primitive integer vector on its ray."""
    fr = [Fraction(x) for x in v]
    den = reduce(lcm, (x.denominator for x in fr), 1)
    ints = [int(x * den) for x in fr]
    g = reduce(gcd, ints, 0)
    if g == 0:
        raise GeometryError("zero vector has no primitive direction")
    return tuple(x // g for x in ints)


def line_direction(v: Sequence) -> tuple[int, ...]:
    """Primitive vector with first nonzero entry positive (for lines, where sign is irrelevant)."""
    p = primitive(v)
    for x in p:
        if x:
            return p if x > 0 else tuple(-y for y in p)
    return p


def rref(rows: Sequence[Sequence], ncols: int | None = None) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
    m = [[Fraction(x) for x in r] for r in rows]
    if ncols is None:
        ncols = len(m[0]) if m else 0
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        pv = m[r][c]
        if pv != 1:
            m[r] = [x / pv for x in m[r]]
        pr = m[r]
        nz = [j for j in range(ncols) if pr[j] != 0]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                row = m[i]
                for j in nz:
                    row[j] -= f * pr[j]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows: Sequence[Sequence]) -> int:
    if not rows:
        return 0
    return len(rref(rows)[1])


def nullspace(rows: Sequence[Sequence], ncols: int) -> list[tuple[Fraction, ...]]:
    """Basis of {x : rows . x = 0}."""
    if not rows:
        return [tuple(Fraction(int(i == j)) for j in range(ncols)) for i in range(ncols)]
    red, piv = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for r, pc in enumerate(piv):
            x[pc] = -red[r][f]
        basis.append(tuple(x))
    return basis


def solve(rows: Sequence[Sequence], rhs: Sequence) -> tuple[Fraction, ...] | None:
    """Unique solution x of rows . x = rhs, or None if inconsistent or underdetermined."""
    n = len(rows[0])
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    red, piv = rref(aug, n + 1)
    if n in piv or len(piv) < n:
        return None
    x = [Fraction(0)] * n
    for r, pc in enumerate(piv):
        x[pc] = red[r][n]
    return tuple(x)


def det(rows: Sequence[Sequence]) -> Fraction:
    """Exact determinant (Bareiss for integer input, elimination otherwise)."""
    n = len(rows)
    if n == 0:
        return Fraction(1)
    if all(isinstance(x, int) for r in rows for x in r):
        return Fraction(_bareiss([list(r) for r in rows]))
    m = [[Fraction(x) for x in r] for r in rows]
    d = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if m[i][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            m[c], m[p] = m[p], m[c]
            d = -d
        d *= m[c][c]
        for i in range(c + 1, n):
            if m[i][c]:
                f = m[i][c] / m[c][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[c])]
    return d


def _bareiss(m: list[list[int]]) -> int:
    n = len(m)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            p = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if p is None:
                return 0
            m[k], m[p] = m[p], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def inverse(rows: Sequence[Sequence]) -> list[list[Fraction]]:
    n = len(rows)
    aug = [list(r) + [int(i == j) for j in range(n)] for i, r in enumerate(rows)]
    red, piv = rref(aug, 2 * n)
    if piv[:n] != list(range(n)) or len(piv) < n or piv[n - 1] >= n:
        raise GeometryError("singular matrix")
    return [row[n:] for row in red]


def lattice_index(vectors: Sequence[Sequence[int]]) -> int:
    """Index of the lattice spanned by independent integer vectors inside its saturation.

    Equals the gcd of the maximal minors.
    """
    k = len(vectors)
    if k == 0:
        return 1
    n = len(vectors[0])
    g = 0
    for cols in combinations(range(n), k):
        g = gcd(g, int(det([[v[c] for c in cols] for v in vectors])))
        if g == 1:
            return 1
    if g == 0:
        raise GeometryError("vectors are linearly dependent")
    return g


# ---------------------------------------------------------------------------
# exact linear programming


@dataclass(frozen=True)
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: tuple[Fraction, ...] | None = None
    value: Fraction | None = None


def linear_program(c: Sequence, a_eq: Sequence[Sequence], b_eq: Sequence) -> LPResult:
    """Minimize c.x subject to a_eq x = b_eq, x >= 0, exactly (two-phase simplex, Bland's rule)."""
    n = len(c)
    m = len(a_eq)
    tab: list[list[Fraction]] = []
    for i in range(m):
        row = [Fraction(x) for x in a_eq[i]]
        rhs = Fraction(b_eq[i])
        if rhs < 0:
            row = [-x for x in row]
            rhs = -rhs
        tab.append(row + [Fraction(int(j == i)) for j in range(m)] + [rhs])
    basis = [n + i for i in range(m)]
    width = n + m
    obj = [Fraction(0)] * (width + 1)
    for row in tab:
        for j in range(n):
            obj[j] -= row[j]
        obj[width] -= row[width]
    if not _run_simplex(tab, obj, basis, allowed=n + m):
        raise AssertionError("phase one cannot be unbounded")
    if obj[width] != 0:
        return LPResult("infeasible")
    # drive artificial variables out of the basis
    r = 0
    while r < len(tab):
        if basis[r] >= n:
            col = next((j for j in range(n) if tab[r][j] != 0), None)
            if col is None:
                del tab[r]
                del basis[r]
                continue
            _pivot(tab, obj, r, col)
            basis[r] = col
        r += 1
    obj = [Fraction(x) for x in c] + [Fraction(0)] * m + [Fraction(0)]
    for i, b in enumerate(basis):
        cb = obj[b]
        if cb:
            row = tab[i]
            for j in range(width + 1):
                if row[j]:
                    obj[j] -= cb * row[j]
    if not _run_simplex(tab, obj, basis, allowed=n):
        return LPResult("unbounded")
    x = [Fraction(0)] * n
    for i, b in enumerate(basis):
        if b < n:
            x[b] = tab[i][width]
    return LPResult("optimal", tuple(x), -obj[width])


def _pivot(tab, obj, r, col):
    pr = tab[r]
    pv = pr[col]
    if pv != 1:
        tab[r] = pr = [x / pv for x in pr]
    nz = [j for j, x in enumerate(pr) if x]
    for row in tab + [obj]:
        if row is pr:
            continue
        f = row[col]
        if f:
            for j in nz:
                row[j] -= f * pr[j]


def _run_simplex(tab, obj, basis, allowed: int) -> bool:
    width = len(obj) - 1
    while True:
        col = next((j for j in range(allowed) if obj[j] < 0), None)
        if col is None:
            return True
        best = None
        for i, row in enumerate(tab):
            if row[col] > 0:
                ratio = row[width] / row[col]
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            return False
        _pivot(tab, obj, best[1], col)
        basis[best[1]] = col


def strictly_feasible_covector(rows: Sequence[Sequence]) -> tuple[Fraction, ...] | None:
    """Find h with rows . h >= 1 for every row (h unrestricted), or None if impossible."""
    if not rows:
        return None
    k = len(rows[0])
    w = len(rows)
    a = [list(r) + [-x for x in r] + [-int(i == j) for j in range(w)] for i, r in enumerate(rows)]
    res = linear_program([0] * (2 * k + w), a, [1] * w)
    if res.status != "optimal":
        return None
    return tuple(res.x[i] - res.x[k + i] for i in range(k))


def in_cone_of(generators: Sequence[Sequence], target: Sequence) -> bool:
    """Exact test whether target is a nonnegative combination of the generators."""
    if not generators:
        return all(x == 0 for x in target)
    a = [[g[i] for g in generators] for i in range(len(target))]
    return linear_program([0] * len(generators), a, list(target)).status == "optimal"


# ---------------------------------------------------------------------------
# cones


def _cone_facets(gens: Sequence[Sequence]) -> tuple[list[tuple[Fraction, ...]], list[tuple[Fraction, ...]]]:
    """Dual description of cone(gens).

    Returns (pointed, lineality): the dual cone {m : <m,g> >= 0} equals
    cone(pointed) + span(lineality).  Each pointed vector is an inner facet
    normal lying in the row space of gens.
    """
    n = len(gens[0])
    lin = nullspace(gens, n)
    basis, _ = rref(gens, n)
    r = len(basis)
    if r == 0:
        return [], lin
    # coordinates y in the row space: m = sum y_i basis_i
    g = [[dot(v, b) for b in basis] for v in gens]
    found: list[tuple[Fraction, ...]] = []
    seen = set()
    if r == 1:
        cands = [(Fraction(1),), (Fraction(-1),)]
        for y in cands:
            if all(dot(row, y) >= 0 for row in g):
                m = tuple(sum(y[i] * basis[i][j] for i in range(r)) for j in range(n))
                found.append(m)
        return found, lin
    for sub in combinations(range(len(g)), r - 1):
        ns = nullspace([g[i] for i in sub], r)
        if len(ns) != 1:
            continue
        y = ns[0]
        vals = [dot(row, y) for row in g]
        if all(v >= 0 for v in vals):
            pass
        elif all(v <= 0 for v in vals):
            y = tuple(-x for x in y)
        else:
            continue
        m = tuple(sum(y[i] * basis[i][j] for i in range(r)) for j in range(n))
        key = primitive(m)
        if key not in seen:
            seen.add(key)
            found.append(m)
    return found, lin


@dataclass(frozen=True)
class Cone:
    """Rational polyhedral cone generated by primitive integer rays."""

    rays: tuple[tuple[int, ...], ...]
    rank: int

    @staticmethod
    def of(rays: Iterable[Sequence], rank: int | None = None) -> "Cone":
        rs = [tuple(r) for r in rays]
        if rank is None:
            if not rs:
                raise RankMismatch("rank required for the zero cone")
            rank = len(rs[0])
        if any(len(r) != rank for r in rs):
            raise RankMismatch("rays of differing rank")
        out: list[tuple[int, ...]] = []
        for r in rs:
            if all(x == 0 for x in r):
                continue
            p = primitive(r)
            if p not in out:
                out.append(p)
        return Cone(tuple(out), rank)

    @cached_property
    def dimension(self) -> int:
        return rank(self.rays) if self.rays else 0

    @cached_property
    def _dual(self):
        if not self.rays:
            n = self.rank
            basis = [tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)]
            return [], basis
        return _cone_facets(self.rays)

    @property
    def facet_normals(self) -> list[tuple[Fraction, ...]]:
        return self._dual[0]

    @cached_property
    def lineality(self) -> list[tuple[Fraction, ...]]:
        """Basis of the largest linear subspace contained in the cone."""
        # the lineality space is the annihilator of the dual cone's span
        pointed, lin = self._dual
        dual_span = list(pointed) + list(lin)
        if not dual_span:
            return nullspace([], self.rank)
        return nullspace(dual_span, self.rank)

    @property
    def strongly_convex(self) -> bool:
        return not self.lineality

    @property
    def full_dimensional(self) -> bool:
        return self.dimension == self.rank

    def contains(self, v: Sequence) -> bool:
        pointed, lin = self._dual
        return all(dot(m, v) >= 0 for m in pointed) and all(dot(m, v) == 0 for m in lin)

    def in_relative_interior(self, v: Sequence) -> bool:
        pointed, lin = self._dual
        return all(dot(m, v) > 0 for m in pointed) and all(dot(m, v) == 0 for m in lin)

    @cached_property
    def extreme_rays(self) -> tuple[tuple[int, ...], ...]:
        if not self.strongly_convex:
            raise GeometryError("cone with lineality has no extreme rays")
        pointed = self.facet_normals
        d = self.dimension
        out = []
        for r in self.rays:
            tight = [m for m in pointed if dot(m, r) == 0]
            if d == 1 or (tight and rank(tight) == d - 1):
                out.append(r)
        return tuple(out)

    def triangulation(self, order: Sequence[int] | None = None) -> list[tuple[int, ...]]:
        """Simplicial cones (index tuples into ``rays``) triangulating a strongly convex cone.

        Pulling triangulation: the first generator in ``order`` is coned over the
        triangulations of the facets not containing it.
        """
        if order is None:
            order = range(len(self.rays))
        idx = [i for i in order if self.rays[i] in self.extreme_rays]
        return _triangulate([self.rays[i] for i in range(len(self.rays))], idx)


def _triangulate(vectors: Sequence[Sequence], idx: Sequence[int]) -> list[tuple[int, ...]]:
    gens = [vectors[i] for i in idx]
    d = rank(gens)
    if d == len(idx):
        return [tuple(idx)]
    apex = idx[0]
    pointed, _ = _cone_facets(gens)
    out = []
    for m in pointed:
        if dot(m, vectors[apex]) == 0:
            continue
        face = [i for i in idx if dot(m, vectors[i]) == 0]
        for simplex in _triangulate(vectors, face):
            out.append((apex,) + simplex)
    return out


def dual_cone(c: Cone) -> Cone:
    """The dual cone {m : <m,v> >= 0 for v in c}, with primitive rays.

    A lineality space is represented by a pair of opposite rays per basis vector.
    """
    pointed, lin = c._dual
    rays = [primitive(m) for m in pointed]
    for b in lin:
        d = line_direction(b)
        rays.append(d)
        rays.append(tuple(-x for x in d))
    return Cone.of(rays, c.rank)


# ---------------------------------------------------------------------------
# lattice points


def _box_points(gens: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
    """Lattice points sum c_i g_i with 0 <= c_i < 1 for linearly independent integer generators."""
    k = len(gens)
    n = len(gens[0])
    red, piv = rref(gens, n)
    # coordinates of a point p of span(gens) in the basis gens
    sub = [[g[c] for c in piv] for g in gens]  # k x k, invertible
    inv = inverse([list(col) for col in zip(*sub)])  # maps restricted p -> coefficients

    def coeffs(p):
        restricted = [p[c] for c in piv]
        return [sum(inv[i][j] * restricted[j] for j in range(k)) for i in range(k)]

    def from_coeffs(cs):
        return tuple(int(sum(cs[i] * gens[i][j] for i in range(k))) for j in range(n))

    if k == n:
        # the box is a group generated by the reductions of the unit vectors
        gen_coeffs = []
        for j in range(n):
            e = [0] * n
            e[j] = 1
            gen_coeffs.append(tuple(x - (x.numerator // x.denominator) for x in coeffs(e)))
        zero = tuple(Fraction(0) for _ in range(k))
        seen = {zero}
        frontier = [zero]
        while frontier:
            nxt = []
            for cur in frontier:
                for g in gen_coeffs:
                    s = tuple((a + b) - ((a + b).numerator // (a + b).denominator) for a, b in zip(cur, g))
                    if s not in seen:
                        seen.add(s)
                        nxt.append(s)
            frontier = nxt
        return sorted(from_coeffs(cs) for cs in seen)
    # lower-dimensional: scan the projection of the parallelepiped to the pivot coordinates
    lo = [sum(min(0, g[c]) for g in gens) for c in piv]
    hi = [sum(max(0, g[c]) for g in gens) for c in piv]
    out = []

    def rec(i, cur):
        if i == k:
            cs = coeffs_from_pivot(cur)
            if all(0 <= x < 1 for x in cs):
                p = [sum(cs[a] * gens[a][j] for a in range(k)) for j in range(n)]
                if all(x.denominator == 1 for x in p):
                    out.append(tuple(int(x) for x in p))
            return
        for val in range(lo[i], hi[i] + 1):
            rec(i + 1, cur + [val])

    def coeffs_from_pivot(restricted):
        return [sum(inv[i][j] * restricted[j] for j in range(k)) for i in range(k)]

    rec(0, [])
    return sorted(out)


def box_points(gens: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
    return _box_points([tuple(g) for g in gens])


def enumerate_lattice_points(c: Cone, ell: Sequence, bound) -> set[tuple[int, ...]]:
    """All v in c with integer coordinates and <ell, v> <= bound."""
    bound = Fraction(bound)
    if len(ell) != c.rank:
        raise RankMismatch("functional rank differs from cone rank")
    if not c.strongly_convex or any(dot(ell, r) <= 0 for r in c.rays):
        raise UnboundedRegion("functional is not strictly positive on the cone")
    if bound < 0:
        return set()
    origin = tuple([0] * c.rank)
    out = {origin}
    if not c.rays:
        return out
    for simplex in c.triangulation():
        gens = [c.rays[i] for i in simplex]
        heights = [Fraction(dot(ell, g)) for g in gens]
        for p in _box_points(gens):
            h0 = Fraction(dot(ell, p))
            if h0 > bound:
                continue
            _extend(p, h0, gens, heights, 0, bound, out)
    return out


def _extend(p, h, gens, heights, i, bound, out):
    if i == len(gens):
        out.add(p)
        return
    g = gens[i]
    step = heights[i]
    while h <= bound:
        _extend(p, h, gens, heights, i + 1, bound, out)
        p = tuple(a + b for a, b in zip(p, g))
        h += step


# ---------------------------------------------------------------------------
# polytopes


@dataclass(frozen=True)
class LatticePolytope:
    """Convex hull of finitely many rational points; ``vertices`` are the extreme points."""

    vertices: tuple[tuple[Fraction, ...], ...]

    @staticmethod
    def hull(points: Iterable[Sequence]) -> "LatticePolytope":
        pts = []
        for p in points:
            q = ratvec(p)
            if q not in pts:
                pts.append(q)
        if not pts:
            raise GeometryError("empty polytope")
        d = len(pts[0])
        if any(len(p) != d for p in pts):
            raise RankMismatch("points of differing rank")
        if len(pts) == 1:
            return LatticePolytope((pts[0],))
        lifted = [p + (Fraction(1),) for p in pts]
        pointed, _ = _cone_facets(lifted)
        dim = rank(lifted)
        verts = []
        for p, lp in zip(pts, lifted):
            tight = [m for m in pointed if dot(m, lp) == 0]
            if dim == 1 or (tight and rank(tight) == dim - 1):
                verts.append(p)
        return LatticePolytope(tuple(verts))

    @property
    def ambient_dim(self) -> int:
        return len(self.vertices[0])

    @cached_property
    def dimension(self) -> int:
        v0 = self.vertices[0]
        return rank([tuple(a - b for a, b in zip(v, v0)) for v in self.vertices[1:]]) if len(self.vertices) > 1 else 0

    def triangulation(self, order: Sequence[int] | None = None) -> list[tuple[int, ...]]:
        lifted = [v + (Fraction(1),) for v in self.vertices]
        if order is None:
            order = range(len(lifted))
        return _triangulate(lifted, list(order))

    def inequalities(self) -> list[tuple[tuple[Fraction, ...], Fraction]]:
        """Facet inequalities (a, b) meaning <a, u> >= b, for a full-dimensional polytope."""
        lifted = [v + (Fraction(1),) for v in self.vertices]
        pointed, _ = _cone_facets(lifted)
        return [(m[:-1], -m[-1]) for m in pointed]


def polytope_volume(p: LatticePolytope, normalization: str = "euclidean", order: Sequence[int] | None = None) -> Fraction:
    """Exact volume of a polytope in its ambient space (zero unless full-dimensional)."""
    d = p.ambient_dim
    if any(len(v) != d for v in p.vertices):
        raise RankMismatch("vertices of differing rank")
    if normalization not in ("euclidean", "lattice"):
        raise ValueError(f"unknown normalization {normalization!r}")
    if p.dimension < d:
        return Fraction(0)
    lifted = [v + (Fraction(1),) for v in p.vertices]
    total = Fraction(0)
    for simplex in p.triangulation(order):
        total += abs(det([lifted[i] for i in simplex]))
    if normalization == "lattice":
        return total
    return total / factorial(d)


def random_triangulation_order(p: LatticePolytope, rng: random.Random) -> list[int]:
    order = list(range(len(p.vertices)))
    rng.shuffle(order)
    return order


def polytope_from_inequalities(normals: Sequence[Sequence], rhs: Sequence) -> LatticePolytope | None:
    """The polytope {u : <normals_i, u> >= rhs_i}; None when empty.

    Assumes boundedness.  Vertices come from brute force over n-subsets.
    """
    n = len(normals[0])
    pts = set()
    a = [ratvec(x) for x in normals]
    b = [Fraction(x) for x in rhs]
    for sub in combinations(range(len(a)), n):
        u = solve([a[i] for i in sub], [b[i] for i in sub])
        if u is None:
            continue
        if all(dot(a[i], u) >= b[i] for i in range(len(a))):
            pts.add(u)
    if not pts:
        return None
    return LatticePolytope.hull(sorted(pts))


def relative_lattice_volume(points: Sequence[Sequence], normal: Sequence[int]) -> Fraction:
    """Normalized lattice volume of a polytope lying in a hyperplane <normal, u> = c.

    ``normal`` must be primitive.  The volume is measured with respect to the
    lattice normal^perp, normalized so a unimodular simplex has volume 1.
    """
    pts = [ratvec(p) for p in points]
    n = len(pts[0])
    c = dot(normal, pts[0])
    # apex at lattice height 1 above the hyperplane
    apex = None
    for j in range(n):
        if normal[j] != 0:
            e = [Fraction(0)] * n
            e[j] = Fraction(1)
            apex = tuple(pts[0][i] + e[i] for i in range(n))
            break
    height = abs(dot(normal, apex) - c)
    pyramid = LatticePolytope.hull(pts + [apex])
    if pyramid.dimension < n:
        return Fraction(0)
    return polytope_volume(pyramid, "lattice") / height
