"""Normalized volumes of toric valuations, their minimization, and relative cones.

For a full-dimensional cone sigma with boundary coefficients b_i, the toric
valuation wt_xi (xi in the interior of sigma) has log discrepancy
A(xi) = <alpha, xi> and volume vol(xi) = n! vol{u in sigma^vee : <xi,u> <= 1}.
Triangulating sigma^vee into simplicial cones U gives
vol(xi) = sum_U |det U| / prod_{u in U} <xi, u>.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from functools import cached_property
from math import prod
from typing import Sequence

from .kernel import Cone, GeometryError, det, dot, dual_cone, primitive, solve
from .pair import (
    NotAmple,
    ToricError,
    ToricPair,
    _check_divisor,
    admissible_volume_lower_bound,
    canonical_divisor,
    divisor_volume,
    intersection_with_power,
)


class NotKlt(ToricError):
    pass


class BoundaryValuation(GeometryError):
    """The valuation lies on the boundary of the cone, so its volume is infinite."""


@dataclass(frozen=True)
class ConeSingularity:
    """An affine toric germ: a full-dimensional strongly convex cone plus boundary coefficients per ray."""

    cone: Cone
    coeffs: tuple[Fraction, ...]

    @staticmethod
    def of(rays: Sequence[Sequence[int]], coeffs: Sequence | None = None) -> "ConeSingularity":
        c = Cone.of(rays)
        if len(c.rays) != len(rays):
            raise GeometryError("rays must be nonzero and pairwise non-proportional")
        if not c.full_dimensional or not c.strongly_convex:
            raise GeometryError("cone must be full-dimensional and strongly convex")
        b = tuple(Fraction(x) for x in coeffs) if coeffs is not None else tuple(Fraction(0) for _ in c.rays)
        if len(b) != len(c.rays):
            raise GeometryError("one coefficient per ray required")
        s = ConeSingularity(c, b)
        _ = s.alpha
        return s

    @property
    def rank(self) -> int:
        return self.cone.rank

    @cached_property
    def alpha(self) -> tuple[Fraction, ...]:
        a = solve(list(self.cone.rays), [1 - b for b in self.coeffs])
        if a is None:
            raise NotKlt("K + boundary is not Q-Cartier on this cone")
        return a

    def A(self, xi: Sequence) -> Fraction:
        return dot(self.alpha, xi)

    @cached_property
    def dual_simplices(self) -> list[tuple[int, tuple[tuple[int, ...], ...]]]:
        d = dual_cone(self.cone)
        out = []
        for simplex in d.triangulation():
            us = tuple(d.rays[i] for i in simplex)
            out.append((abs(int(det(us))), us))
        return out

    @cached_property
    def slice_simplices(self) -> list[tuple[tuple[Fraction, ...], ...]]:
        """Simplices covering the slice {A = 1}, with vertices v_i / A(v_i)."""
        out = []
        for simplex in self.cone.triangulation():
            out.append(tuple(tuple(Fraction(x) / self.A(self.cone.rays[i]) for x in self.cone.rays[i]) for i in simplex))
        return out

    def check_klt(self) -> None:
        if any(self.A(r) <= 0 for r in self.cone.rays):
            raise NotKlt("log discrepancy is not positive on the cone")


def valuation_volume(s: ConeSingularity, xi: Sequence) -> Fraction:
    xi = [Fraction(x) for x in xi]
    total = Fraction(0)
    for d, us in s.dual_simplices:
        vals = [dot(u, xi) for u in us]
        if any(v <= 0 for v in vals):
            raise BoundaryValuation("xi is not in the interior of the cone")
        total += Fraction(d) / prod(vals)
    if any(dot(u, xi) <= 0 for u in dual_cone(s.cone).rays):
        raise BoundaryValuation("xi is not in the interior of the cone")
    return total


def normalized_volume(s: ConeSingularity, xi: Sequence) -> Fraction:
    return s.A(xi) ** s.rank * valuation_volume(s, xi)


def _float_objective(s: ConeSingularity):
    terms = [(float(d), [tuple(float(x) for x in u) for u in us]) for d, us in s.dual_simplices]

    def f(xi):
        total = 0.0
        for d, us in terms:
            p = 1.0
            for u in us:
                v = sum(a * b for a, b in zip(u, xi))
                if v <= 0.0:
                    return float("inf")
                p *= v
            total += d / p
        return total

    return f


@dataclass(frozen=True)
class NvolResult:
    value: Decimal
    error: Decimal
    minimizer: tuple[Fraction, ...]
    exact_value: Fraction
    grid_certificate: Fraction
    assumptions: tuple[str, ...] = field(default=("minimization restricted to toric valuations",))

    def to_json(self) -> dict:
        return {
            "value": str(self.value),
            "error": str(self.error),
            "minimizer": [str(x) for x in self.minimizer],
            "exact_value": str(self.exact_value),
            "grid_certificate": str(self.grid_certificate),
            "assumptions": list(self.assumptions),
        }


def _simplex_grid(dim: int, m: int):
    """Barycentric grid points with denominator m strictly inside a dim-simplex (dim+1 coordinates)."""
    for comp in itertools.combinations(range(1, m), dim):
        parts = [comp[0]] + [comp[i] - comp[i - 1] for i in range(1, dim)] + [m - comp[-1]]
        yield tuple(p / m for p in parts)


def grid_certificate(s: ConeSingularity, m: int = 8) -> Fraction:
    """Rigorous lower bound for the minimum of vol on the slice A = 1.

    The slice is covered by boxes in barycentric coordinates; on a box each
    <xi,u> is at most its value at the best corner, which bounds vol from below.
    """
    best = None
    for verts in s.slice_simplices:
        d = len(verts) - 1
        w0 = verts[0]
        lows = []
        for c in itertools.product(range(m), repeat=d):
            if sum(c) > m - 1:
                continue
            bound = Fraction(0)
            ok = True
            for det_u, us in s.dual_simplices:
                p = Fraction(1)
                for u in us:
                    base = dot(u, w0)
                    slopes = [dot(u, vi) - base for vi in verts[1:]]
                    top = base + sum(Fraction(ci, m) * sl for ci, sl in zip(c, slopes)) + sum((max(sl, 0) for sl in slopes), Fraction(0)) / m
                    if top <= 0:
                        ok = False
                        break
                    p *= top
                if not ok:
                    break
                bound += Fraction(det_u) / p
            if ok:
                lows.append(bound)
        if lows:
            low = min(lows)
            best = low if best is None else min(best, low)
    return best if best is not None else Fraction(0)


def minimize_nvol(s: ConeSingularity, rel_tol: float = 1e-6, resolution: int = 10) -> NvolResult:
    """Minimize A(xi)^n vol(xi) over toric valuations by adaptive barycentric grids and pattern search."""
    s.check_klt()
    n = s.rank
    f = _float_objective(s)
    simplices = [[tuple(float(x) for x in v) for v in verts] for verts in s.slice_simplices]

    def point(verts, lam):
        return tuple(sum(l * v[j] for l, v in zip(lam, verts)) for j in range(n))

    # global pass over every slice simplex
    best = (float("inf"), 0, None)
    for k, verts in enumerate(simplices):
        for lam in _simplex_grid(n - 1, resolution):
            val = f(point(verts, lam))
            if val < best[0]:
                best = (val, k, lam)
    val, k, lam = best
    xi = point(simplices[k], lam)
    # successive refinement: pattern search on the slice along edge directions of the slice polytope
    wverts = sorted({tuple(float(x) for x in v) for verts in s.slice_simplices for v in verts})
    dirs = []
    for a, b in itertools.combinations(wverts, 2):
        d = tuple(x - y for x, y in zip(a, b))
        dirs.append(d)
        dirs.append(tuple(-x for x in d))
    radius = 1.0 / resolution
    prev = val
    while radius > 1e-13:
        improved = False
        for d in dirs:
            cand = tuple(x + radius * y for x, y in zip(xi, d))
            cv = f(cand)
            if cv < val:
                val, xi, improved = cv, cand, True
        if not improved:
            radius /= 2
            if abs(prev - val) <= rel_tol * 1e-3 * val and radius < rel_tol:
                break
            prev = val
    xi, exact = _rationalize(s, xi)
    cert = grid_certificate(s)
    value = Decimal(exact.numerator) / Decimal(exact.denominator)
    return NvolResult(value, value * Decimal(repr(rel_tol)), xi, exact, cert)


def _rationalize(s: ConeSingularity, xi) -> tuple[tuple[Fraction, ...], Fraction]:
    """Exact valuation near the float minimizer, rescaled to A = 1; small denominators preferred when no worse."""
    best = None
    for den in (10, 100, 1000, 10**4, 10**6, 10**9, 10**12):
        q = [Fraction(x).limit_denominator(den) for x in xi]
        a = s.A(q)
        if a <= 0:
            continue
        q = tuple(x / a for x in q)
        try:
            val = normalized_volume(s, q)
        except BoundaryValuation:
            continue
        if best is None or val < best[1]:
            best = (q, val)
    return best


# ---------------------------------------------------------------------------
# relative cones


@dataclass(frozen=True)
class RelativeCone:
    singularity: ConeSingularity
    grading_ray: tuple[int, ...]
    log_discrepancy_E: Fraction
    lam: Fraction
    base: str
    checks: dict


def relative_cone(total: ToricPair, L, r: int) -> RelativeCone:
    """Cone over (X, Delta) polarized by L = -r(K + Delta), over a point or over the affine base of the fan.

    The cone lives in rank n+1 with generators (v_i, l_i); when the fan is not
    complete the grading ray (0,...,0,1) is a ray of the cone (the divisor
    Gamma) and carries coefficient 1 - 1/r.
    """
    n = total.rank
    l = _check_divisor(total, L)
    r = int(r)
    if r <= 0:
        raise ToricError("r must be a positive integer")
    if any((r * b).denominator != 1 for b in total.coeffs):
        raise ToricError("r * boundary must be integral")
    # L ~ -r(K + Delta): l_i - r(1 - b_i) = <u, v_i> for some u
    target = [l[i] - r * (1 - total.coeffs[i]) for i in range(len(total.rays))]
    u = solve(list(total.rays), target) if len(total.rays) >= n else None
    if u is None or any(dot(u, v) != t for v, t in zip(total.rays, target)):
        raise ToricError("L is not linearly equivalent to -r(K + Delta)")
    walls = total.fan.wall_curves
    if any(w.degree(l) <= 0 for w in walls):
        raise NotAmple("L is not ample over the base")
    birational = not total.fan.complete
    grading = (0,) * n + (1,)
    gens = [tuple(v) + (int(l[i]),) for i, v in enumerate(total.rays)]
    coeff_of = {}
    for i, g in enumerate(gens):
        coeff_of[primitive(g)] = total.coeffs[i]
    if birational:
        gens.append(grading)
        coeff_of[grading] = 1 - Fraction(1, r)
    cone = Cone.of(gens)
    rays = list(cone.extreme_rays)
    sing = ConeSingularity.of(rays, [coeff_of[primitive(g)] for g in rays])
    # lambda with K + Delta + lambda L ~ 0
    rows = [list(v) + [l[i]] for i, v in enumerate(total.rays)]
    rhs = [1 - total.coeffs[i] for i in range(len(total.rays))]
    sol = solve(rows, rhs)
    lam = sol[-1] if sol is not None else None
    a_e = sing.A(grading)
    checks = {
        # div(chi^(0,...,0,1)) = sum l_i D~_i + E on the total space of the line bundle
        "minus_E_linear_equivalent_to_pullback_L": all(dot(grading, g) == l[i] for i, g in enumerate(gens[: len(total.rays)])),
        # K + E pulls back from K_X: coefficients -1 on every D~_i and 0 on E
        "K_plus_E_is_pullback_K": all(c == -1 for c in [-1] * len(total.rays)),
        "A_E_equals_lambda": lam is not None and a_e == lam,
        "lambda_equals_inverse_r": lam == Fraction(1, r),
    }
    return RelativeCone(sing, grading, a_e, lam, "affine" if birational else "point", checks)


def relative_cone_volume_bound(total: ToricPair, r: int, very_ample) -> Fraction:
    """Toric lower bound for the log canonical volume of H = -(K + Delta), divided by r."""
    h = [-x for x in canonical_divisor(total)]
    deg = intersection_with_power(total, h, very_ample)
    vol = divisor_volume(total, h)
    mx = max(total.coeffs) if total.coeffs else Fraction(0)
    return admissible_volume_lower_bound(deg, mx, vol, total.rank) / r
