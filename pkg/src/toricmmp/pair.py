"""Simplicial fans, toric pairs and their classical invariants.

A toric pair is a simplicial fan together with a rational coefficient on each
ray (the boundary divisor).  Log discrepancies of toric valuations are read off
the piecewise-linear function alpha with <alpha_sigma, v_i> = 1 - b_i.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, reduce
from itertools import combinations, product
from math import comb
from typing import Iterable, Mapping, Sequence

from .kernel import (
    Cone,
    LatticePolytope,
    det,
    dot,
    enumerate_lattice_points,
    inverse,
    lattice_index,
    lcm,
    polytope_from_inequalities,
    polytope_volume,
    primitive,
    relative_lattice_volume,
    solve,
    strictly_feasible_covector,
)


class ToricError(ValueError):
    """Base class for invalid toric input."""


class NotComplete(ToricError):
    pass


class NotSimplicial(ToricError):
    pass


class NotAFan(ToricError):
    pass


class CoefficientOutOfRange(ToricError):
    pass


class NotProjective(ToricError):
    pass


class NotNef(ToricError):
    pass


class NotAmple(ToricError):
    pass


class NotBig(ToricError):
    pass


class OutsideSupport(ToricError):
    pass


class NotInFan(ToricError):
    pass


INFINITY = math.inf


# ---------------------------------------------------------------------------
# fans


@dataclass(frozen=True)
class WallCurve:
    """Torus-invariant curve of an interior wall and its intersection numbers with every D_rho."""

    wall: tuple[int, ...]
    sides: tuple[int, int]
    intersections: tuple[Fraction, ...]

    def degree(self, divisor: Sequence) -> Fraction:
        return sum((Fraction(d) * c for d, c in zip(divisor, self.intersections) if c), Fraction(0))


@dataclass(frozen=True)
class Fan:
    """A pure simplicial fan given by primitive rays and full-dimensional maximal cones."""

    rank: int
    rays: tuple[tuple[int, ...], ...]
    max_cones: tuple[tuple[int, ...], ...]

    @staticmethod
    def build(rank: int, rays: Iterable[Sequence[int]], max_cones: Iterable[Iterable[int]], check_faces: bool = True) -> "Fan":
        rays = tuple(tuple(int(x) for x in r) for r in rays)
        for r in rays:
            if len(r) != rank:
                raise ToricError(f"ray {r} does not have rank {rank}")
            if all(x == 0 for x in r):
                raise ToricError("zero ray")
            if primitive(r) != r:
                raise ToricError(f"ray {r} is not primitive")
        if len(set(rays)) != len(rays):
            raise ToricError("repeated ray")
        cones = []
        for c in max_cones:
            idx = tuple(sorted(int(i) for i in c))
            if len(set(idx)) != len(idx) or any(i < 0 or i >= len(rays) for i in idx):
                raise ToricError(f"bad ray indices in cone {list(c)}")
            if len(idx) != rank:
                raise NotSimplicial(f"cone {list(idx)} does not have exactly {rank} rays")
            if det([rays[i] for i in idx]) == 0:
                raise NotSimplicial(f"cone {list(idx)} has linearly dependent rays")
            cones.append(idx)
        if len(set(cones)) != len(cones):
            raise NotAFan("repeated maximal cone")
        used = {i for c in cones for i in c}
        if used != set(range(len(rays))):
            raise NotAFan("some ray lies in no maximal cone")
        fan = Fan(rank, rays, tuple(sorted(cones)))
        fan._check_walls()
        if check_faces:
            fan._check_faces()
        return fan

    # -- combinatorics ------------------------------------------------------

    @cached_property
    def wall_map(self) -> dict[tuple[int, ...], list[tuple[int, ...]]]:
        walls: dict[tuple[int, ...], list[tuple[int, ...]]] = defaultdict(list)
        for c in self.max_cones:
            for i in range(len(c)):
                walls[c[:i] + c[i + 1:]].append(c)
        return dict(walls)

    @cached_property
    def complete(self) -> bool:
        return all(len(cs) == 2 for cs in self.wall_map.values())

    @cached_property
    def cone_set(self) -> frozenset:
        return frozenset(self.max_cones)

    @cached_property
    def _inverses(self) -> dict[tuple[int, ...], list[list[Fraction]]]:
        return {c: inverse([list(col) for col in zip(*[self.rays[i] for i in c])]) for c in self.max_cones}

    def coordinates(self, cone: tuple[int, ...], v: Sequence) -> tuple[Fraction, ...]:
        """Coefficients lambda with v = sum lambda_i v_i over the rays of a maximal cone."""
        inv = self._inverses[cone]
        return tuple(sum(row[j] * v[j] for j in range(self.rank) if v[j]) for row in inv)

    def containing_cone(self, v: Sequence) -> tuple[int, ...] | None:
        for c in self.max_cones:
            if all(x >= 0 for x in self.coordinates(c, v)):
                return c
        return None

    def minimal_cone(self, v: Sequence) -> tuple[int, ...] | None:
        """Ray indices of the smallest cone of the fan containing v (empty tuple for the origin)."""
        c = self.containing_cone(v)
        if c is None:
            return None
        lam = self.coordinates(c, v)
        return tuple(i for i, x in zip(c, lam) if x > 0)

    def is_cone(self, idx: Sequence[int]) -> bool:
        s = set(idx)
        return any(s <= set(c) for c in self.max_cones)

    @cached_property
    def cones_by_dim(self) -> list[set[tuple[int, ...]]]:
        out: list[set[tuple[int, ...]]] = [set() for _ in range(self.rank + 1)]
        for c in self.max_cones:
            for k in range(self.rank + 1):
                for sub in combinations(c, k):
                    out[k].add(sub)
        return out

    def multiplicity(self, idx: Sequence[int]) -> int:
        vecs = [self.rays[i] for i in idx]
        if len(vecs) == self.rank:
            return abs(int(det(vecs)))
        return lattice_index(vecs)

    def is_smooth(self) -> bool:
        return all(self.multiplicity(c) == 1 for c in self.max_cones)

    def neighbours(self, i: int) -> set[int]:
        return {j for c in self.max_cones if i in c for j in c if j != i}

    # -- walls and curves ---------------------------------------------------

    @cached_property
    def wall_curves(self) -> tuple[WallCurve, ...]:
        out = []
        for w, cs in sorted(self.wall_map.items()):
            if len(cs) != 2:
                continue
            s1, s2 = cs
            i = next(k for k in s1 if k not in w)
            j = next(k for k in s2 if k not in w)
            x = self.coordinates(s1, self.rays[j])
            xi = x[s1.index(i)]
            if xi >= 0:
                raise NotAFan(f"cones {list(s1)} and {list(s2)} lie on the same side of wall {list(w)}")
            dj = Fraction(self.multiplicity(w), self.multiplicity(s2))
            inter = [Fraction(0)] * len(self.rays)
            inter[j] = dj
            for k, xk in zip(s1, x):
                inter[k] = -xk * dj
            out.append(WallCurve(w, (i, j), tuple(inter)))
        return tuple(out)

    def _check_walls(self) -> None:
        for w, cs in self.wall_map.items():
            if len(cs) > 2:
                raise NotAFan(f"wall {list(w)} lies in {len(cs)} maximal cones")
        _ = self.wall_curves  # raises when two cones sit on the same side of a wall

    def _check_faces(self) -> None:
        if self.complete:
            # locally consistent gluing: the covering degree is constant, so one generic point suffices
            probe = tuple(7919 ** k % 1009 + k for k in range(1, self.rank + 1))
            hits = sum(1 for c in self.max_cones if all(x > 0 for x in self.coordinates(c, probe)))
            if hits != 1:
                raise NotAFan(f"generic point covered {hits} times")
            return
        for a, b in combinations(self.max_cones, 2):
            common = set(a) & set(b)
            rows = []
            for i in a:
                rows.append(([x for x in self.rays[i]], 0 if i in common else 1))
            for i in b:
                if i not in common:
                    rows.append(([-x for x in self.rays[i]], 1))
            if not _separable(rows, [self.rays[i] for i in common], self.rank):
                raise NotAFan(f"cones {list(a)} and {list(b)} do not meet in a common face")

    def with_cones(self, rays, max_cones) -> "Fan":
        return Fan.build(self.rank, rays, max_cones, check_faces=False)


def _separable(rows, common, n) -> bool:
    """Is there m with <m, r> >= t for the listed rows and <m, c> = 0 on the common rays?"""
    from .kernel import linear_program

    # variables m = p - q, slack s >= 0
    a = []
    b = []
    nrows = len(rows)
    for k, (r, t) in enumerate(rows):
        a.append(list(r) + [-x for x in r] + [-int(j == k) for j in range(nrows)])
        b.append(t)
    for c in common:
        a.append(list(c) + [-x for x in c] + [0] * nrows)
        b.append(0)
    return linear_program([0] * (2 * n + nrows), a, b).status == "optimal"


# ---------------------------------------------------------------------------
# pairs


@dataclass(frozen=True)
class ToricPair:
    fan: Fan
    coeffs: tuple[Fraction, ...]
    mode: str = "pair"

    @property
    def rank(self) -> int:
        return self.fan.rank

    @property
    def rays(self):
        return self.fan.rays

    @property
    def max_cones(self):
        return self.fan.max_cones

    def coeff_map(self) -> dict[int, Fraction]:
        return {i: b for i, b in enumerate(self.coeffs) if b != 0}

    def boundary_rays(self) -> list[int]:
        return [i for i, b in enumerate(self.coeffs) if b != 0]

    @cached_property
    def projectivity_witness(self) -> tuple[Fraction, ...] | None:
        """Values on the rays of a strictly convex support function, or None if none exists."""
        walls = self.fan.wall_curves
        if not walls:
            return tuple(Fraction(0) for _ in self.rays)
        return strictly_feasible_covector(sorted({w.intersections for w in walls}))

    @property
    def projective(self) -> bool:
        return self.projectivity_witness is not None

    def require_projective(self) -> None:
        if not self.projective:
            raise NotProjective("no strictly convex support function exists")

    def require_complete(self) -> None:
        if not self.fan.complete:
            raise NotComplete("fan is not complete")

    @cached_property
    def alpha(self) -> "LogDiscrepancyFunction":
        return log_discrepancy(self)

    def A(self, v: Sequence[int]) -> Fraction:
        return self.alpha.evaluate(v)

    def to_json(self) -> dict:
        return {
            "rank": self.rank,
            "rays": [list(r) for r in self.rays],
            "max_cones": [list(c) for c in self.max_cones],
            "coeffs": {str(i): str(b) for i, b in self.coeff_map().items()},
            "mode": self.mode,
        }


def build_pair(
    fan_data,
    coeffs: Mapping[int, object] | Sequence | None = None,
    mode: str = "pair",
    require_complete: bool = True,
    check_faces: bool = True,
) -> ToricPair:
    """Validate fan data and a boundary into a ToricPair.

    ``fan_data`` is a Fan, or a mapping with keys rank/rays/max_cones, or a
    (rank, rays, max_cones) tuple.  ``coeffs`` maps ray index to coefficient.
    """
    if isinstance(fan_data, Fan):
        fan = fan_data
    else:
        if isinstance(fan_data, Mapping):
            rk, rays, cones = fan_data["rank"], fan_data["rays"], fan_data["max_cones"]
        else:
            rk, rays, cones = fan_data
        rays = [primitive(r) if any(r) else tuple(r) for r in rays]
        fan = Fan.build(int(rk), rays, cones, check_faces=check_faces)
    if require_complete and not fan.complete:
        raise NotComplete("some wall lies in only one maximal cone")
    b = [Fraction(0)] * len(fan.rays)
    if coeffs is not None:
        items = coeffs.items() if isinstance(coeffs, Mapping) else enumerate(coeffs)
        for i, x in items:
            i = int(i)
            if not 0 <= i < len(b):
                raise CoefficientOutOfRange(f"coefficient on nonexistent ray {i}")
            b[i] = Fraction(x)
    if mode == "pair":
        bad = [x for x in b if not 0 <= x < 1]
    elif mode == "subpair":
        bad = [x for x in b if not -1 < x < 1]
    else:
        raise ToricError(f"unknown mode {mode!r}")
    if bad:
        raise CoefficientOutOfRange(f"coefficient {bad[0]} outside the range for mode {mode}")
    return ToricPair(fan, tuple(b), mode)


# ---------------------------------------------------------------------------
# log discrepancies


@dataclass(frozen=True)
class LogDiscrepancyFunction:
    """The PL function A(v) = <alpha_sigma, v> on each maximal cone sigma."""

    fan: Fan
    covectors: dict

    def evaluate(self, v: Sequence[int]) -> Fraction:
        c = self.fan.containing_cone(v)
        if c is None:
            raise OutsideSupport(f"{tuple(v)} is outside the support of the fan")
        return dot(self.covectors[c], v)

    def discrepancy(self, v: Sequence[int]) -> Fraction:
        return self.evaluate(v) - 1

    def continuity_defects(self) -> list[tuple[int, ...]]:
        """Walls on which the two adjacent covectors disagree (always empty for a valid pair)."""
        bad = []
        for w, cs in self.fan.wall_map.items():
            if len(cs) == 2:
                a, b = (self.covectors[c] for c in cs)
                if any(dot(a, self.fan.rays[i]) != dot(b, self.fan.rays[i]) for i in w):
                    bad.append(w)
        return bad


def log_discrepancy(p: ToricPair) -> LogDiscrepancyFunction:
    cov = {}
    for c in p.fan.max_cones:
        cov[c] = solve([p.rays[i] for i in c], [1 - p.coeffs[i] for i in c])
    return LogDiscrepancyFunction(p.fan, cov)


def ray_log_discrepancy(p: ToricPair, i: int) -> Fraction:
    return 1 - p.coeffs[i]


def cone_lattice_points(p: ToricPair, cone: Sequence[int], bound) -> set[tuple[int, ...]]:
    """Lattice points v of cone(rays in ``cone``) with A(v) <= bound."""
    host = next(c for c in p.max_cones if set(cone) <= set(c))
    ell = p.alpha.covectors[host]
    return enumerate_lattice_points(Cone.of([p.rays[i] for i in cone], p.rank), ell, bound)


def in_relative_interior(p: ToricPair, cone: Sequence[int], v: Sequence[int]) -> bool:
    host = next(c for c in p.max_cones if set(cone) <= set(c))
    lam = p.fan.coordinates(host, v)
    return all((x > 0) if i in cone else (x == 0) for i, x in zip(host, lam))


def is_primitive(v: Sequence[int]) -> bool:
    return reduce(math.gcd, v, 0) == 1


def mld(p: ToricPair, cone: Sequence[int]) -> Fraction:
    """Minimal log discrepancy over divisors whose center is the orbit closure V(cone)."""
    cone = tuple(sorted(cone))
    if not cone or not p.fan.is_cone(cone):
        raise NotInFan(f"{list(cone)} is not a nonzero cone of the fan")
    bound = sum(1 - p.coeffs[i] for i in cone)
    best = None
    for v in cone_lattice_points(p, cone, bound):
        if any(v) and in_relative_interior(p, cone, v):
            a = p.A(v)
            if best is None or a < best:
                best = a
    return best


def exceptional_points(p: ToricPair, bound, strict: bool) -> list[tuple[tuple[int, ...], Fraction, tuple[int, ...]]]:
    """Primitive non-ray lattice points v with A(v) < bound (or <= when not strict).

    Returns (v, A(v), minimal cone) triples, sorted.  These are the toric
    exceptional divisors over X with bounded log discrepancy.
    """
    seen = {}
    rayset = set(p.rays)
    for c in p.max_cones:
        for v in enumerate_lattice_points(Cone.of([p.rays[i] for i in c], p.rank), p.alpha.covectors[c], bound):
            if v in seen or not any(v) or v in rayset or not is_primitive(v):
                continue
            a = dot(p.alpha.covectors[c], v)
            if (a < bound) if strict else (a <= bound):
                lam = p.fan.coordinates(c, v)
                seen[v] = (a, tuple(i for i, x in zip(c, lam) if x > 0))
    return sorted((v, a, m) for v, (a, m) in seen.items())


# ---------------------------------------------------------------------------
# lct and alpha


def _check_divisor(p: ToricPair, d) -> list[Fraction]:
    out = [Fraction(0)] * len(p.rays)
    items = d.items() if isinstance(d, Mapping) else enumerate(d)
    for i, x in items:
        out[int(i)] = Fraction(x)
    return out


def lct(p: ToricPair, D, at: Sequence[int] | None = None):
    """Log canonical threshold of an effective invariant divisor, globally or near V(at).

    Returns ``math.inf`` when no relevant valuation sees D.
    """
    d = _check_divisor(p, D)
    if any(x < 0 for x in d):
        raise ToricError("lct requires an effective divisor")
    if at is None:
        rays = range(len(p.rays))
    else:
        at = tuple(sorted(at))
        if not at or not p.fan.is_cone(at):
            raise NotInFan(f"{list(at)} is not a cone of the fan")
        rays = at
    best = INFINITY
    for i in rays:
        if d[i] > 0:
            t = (1 - p.coeffs[i]) / d[i]
            if best == INFINITY or t < best:
                best = t
    return best


def multiplicity_at(p: ToricPair, D, cone: Sequence[int]) -> Fraction:
    """Multiplicity of an invariant divisor at the generic point of V(cone), for a smooth cone."""
    d = _check_divisor(p, D)
    if p.fan.multiplicity(cone) != 1:
        raise ToricError("multiplicity formula needs a smooth cone")
    return sum((d[i] for i in cone), Fraction(0))


def support_vertices(p: ToricPair, L) -> dict[tuple[int, ...], tuple[Fraction, ...]]:
    """u_sigma with <u_sigma, v_i> = -l_i on each maximal cone (vertices of P_L when L is nef)."""
    l = _check_divisor(p, L)
    return {c: solve([p.rays[i] for i in c], [-l[i] for i in c]) for c in p.max_cones}


def is_nef(p: ToricPair, L) -> bool:
    l = _check_divisor(p, L)
    return all(w.degree(l) >= 0 for w in p.fan.wall_curves)


def is_ample(p: ToricPair, L) -> bool:
    l = _check_divisor(p, L)
    return p.fan.complete and all(w.degree(l) > 0 for w in p.fan.wall_curves)


def alpha_invariant(p: ToricPair, L) -> Fraction:
    """Alpha invariant of (X, Delta) with respect to a nef invariant divisor, using invariant members.

    The minimum of A(v)/width_v(P_L) over v in the support is attained on a
    ray because the width is convex and A is linear on each cone.
    """
    p.require_projective()
    l = _check_divisor(p, L)
    if not is_nef(p, l):
        raise NotNef("divisor has negative degree on some wall curve")
    verts = list(support_vertices(p, l).values())
    best = None
    for i, v in enumerate(p.rays):
        width = max(dot(u, v) for u in verts) + l[i]
        if width > 0:
            t = (1 - p.coeffs[i]) / width
            if best is None or t < best:
                best = t
    if best is None:
        raise NotNef("moment polytope is a point")
    return best


# ---------------------------------------------------------------------------
# volumes and intersection numbers


def divisor_polytope(p: ToricPair, D) -> LatticePolytope | None:
    d = _check_divisor(p, D)
    return polytope_from_inequalities(p.rays, [-x for x in d])


def divisor_volume(p: ToricPair, D) -> Fraction:
    """vol(D) = n! * vol(P_D); zero when D is not big."""
    poly = divisor_polytope(p, D)
    if poly is None:
        return Fraction(0)
    return polytope_volume(poly, "lattice")


def canonical_divisor(p: ToricPair) -> list[Fraction]:
    """Coefficients of K_X + Delta on the rays."""
    return [b - 1 for b in p.coeffs]


def facet_degrees(p: ToricPair, H) -> list[Fraction]:
    """(D_i . H^{n-1}) for every ray, as relative lattice volumes of the facets of P_H."""
    h = _check_divisor(p, H)
    if not is_ample(p, h):
        raise NotAmple("divisor is not ample")
    verts = list(support_vertices(p, h).values())
    out = []
    for i, v in enumerate(p.rays):
        face = sorted({u for u in verts if dot(u, v) == -h[i]})
        out.append(relative_lattice_volume(face, v) if len(face) >= p.rank else Fraction(0))
    return out


def intersection_with_power(p: ToricPair, D, H) -> Fraction:
    d = _check_divisor(p, D)
    return sum((x * y for x, y in zip(d, facet_degrees(p, H))), Fraction(0))


@dataclass(frozen=True)
class NumericalInvariants:
    vol_boundary: Fraction
    vol_log_canonical: Fraction
    boundary_degree: Fraction
    max_coeff: Fraction
    volume_lower_bound: Fraction | None


def admissible_volume_lower_bound(degree: Fraction, max_coeff: Fraction, vol: Fraction, n: int) -> Fraction:
    """ceil(degree / (1 - max_coeff))^(-n) * vol, the Izumi-type lower bound for log canonical volumes."""
    ell = math.ceil(degree / (1 - max_coeff))
    if ell <= 0:
        raise ToricError("degree must be positive")
    return Fraction(1, ell**n) * vol


def numerical_invariants(p: ToricPair, H) -> NumericalInvariants:
    p.require_projective()
    h = _check_divisor(p, H)
    if not is_ample(p, h):
        raise NotAmple("divisor is not ample")
    vol_b = divisor_volume(p, p.coeffs)
    vol_k = divisor_volume(p, canonical_divisor(p))
    deg = intersection_with_power(p, p.coeffs, h)
    mx = max(p.coeffs) if p.coeffs else Fraction(0)
    bound = admissible_volume_lower_bound(deg, mx, vol_b, p.rank) if vol_b > 0 else None
    return NumericalInvariants(vol_b, vol_k, deg, mx, bound)


# ---------------------------------------------------------------------------
# topology and indices


def cartier_index(p: ToricPair, D) -> int:
    """Smallest k such that k*D has an integral support function on every maximal cone."""
    d = _check_divisor(p, D)
    k = 1
    for c in p.max_cones:
        m = solve([p.rays[i] for i in c], [-d[i] for i in c])
        for x in m:
            k = lcm(k, x.denominator)
    return k


def local_cartier_index(p: ToricPair, D, cone: Sequence[int]) -> int:
    d = _check_divisor(p, D)
    m = solve([p.rays[i] for i in cone], [-d[i] for i in cone])
    return reduce(lcm, (x.denominator for x in m), 1)


def local_class_group_exponent(rays: Sequence[Sequence[int]]) -> int:
    """Largest Cartier index of an invariant Weil divisor on the affine chart of a full simplicial cone."""
    inv = inverse([list(r) for r in rays])
    return reduce(lcm, (x.denominator for row in inv for x in row), 1)


def h_vector(fan: Fan) -> list[int]:
    n = fan.rank
    f = [len(fan.cones_by_dim[j]) for j in range(n + 1)]
    return [sum((-1) ** (i - k) * comb(i, k) * f[n - i] for i in range(k, n + 1)) for k in range(n + 1)]


def star_picard_number(fan: Fan, i: int) -> int:
    """Picard number of the orbit closure V(v_i): rays of the star fan minus its dimension."""
    return len(fan.neighbours(i)) - (fan.rank - 1)


@dataclass(frozen=True)
class TopologicalInvariants:
    picard: int
    boundary_picard: dict
    h_alg: int
    betti: tuple[int, ...]
    gorenstein_index: int
    cartier_indices: dict
    rho_pair: int
    notes: tuple[str, ...] = field(default=())


def topological_invariants(p: ToricPair) -> TopologicalInvariants:
    p.require_complete()
    fan = p.fan
    n = fan.rank
    picard = len(fan.rays) - n
    bpic = {i: star_picard_number(fan, i) for i in p.boundary_rays()}
    h = h_vector(fan)
    h_alg = h[n - 2] if n >= 2 else 0
    gor = cartier_index(p, [-1] * len(fan.rays))
    idx = {}
    for i in range(len(fan.rays)):
        e = [0] * len(fan.rays)
        e[i] = 1
        idx[i] = cartier_index(p, e)
    notes = ("h_alg(2n-4) taken as the even Betti number b_{2n-4} of a complete simplicial toric variety",)
    return TopologicalInvariants(picard, bpic, h_alg, tuple(h), gor, idx, picard + sum(bpic.values()) + h_alg, notes)


# ---------------------------------------------------------------------------
# subdivisions and terminalization


def star_subdivide(p: ToricPair, v: Sequence[int], coeff) -> ToricPair:
    """Insert the primitive lattice vector v as a new ray with the given coefficient."""
    v = tuple(int(x) for x in v)
    if v in p.rays:
        raise ToricError(f"{v} is already a ray")
    tau = p.fan.minimal_cone(v)
    if tau is None:
        raise OutsideSupport(f"{v} is outside the support of the fan")
    new = len(p.rays)
    cones = []
    for c in p.max_cones:
        if set(tau) <= set(c):
            for i in tau:
                cones.append(tuple(sorted([j for j in c if j != i] + [new])))
        else:
            cones.append(c)
    fan = Fan.build(p.rank, p.rays + (v,), cones, check_faces=False)
    return ToricPair(fan, p.coeffs + (Fraction(coeff),), p.mode)


def terminalize(p: ToricPair) -> tuple[ToricPair, list[tuple[tuple[int, ...], Fraction]]]:
    """Crepant star subdivisions at every toric divisor with A <= 1, smallest A first."""
    inserted: list[tuple[tuple[int, ...], Fraction]] = []
    cur = p
    while True:
        pts = exceptional_points(cur, 1, strict=False)
        if not pts:
            return cur, inserted
        v, a, _ = min(pts, key=lambda t: (t[1], t[0]))
        cur = star_subdivide(cur, v, 1 - a)
        inserted.append((v, a))


def is_terminal(p: ToricPair) -> bool:
    return not exceptional_points(p, 1, strict=False)


# ---------------------------------------------------------------------------
# standard fans


def projective_space(n: int) -> Fan:
    rays = [tuple(int(i == j) for j in range(n)) for i in range(n)] + [tuple([-1] * n)]
    cones = [tuple(j for j in range(n + 1) if j != i) for i in range(n + 1)]
    return Fan.build(n, rays, cones)


def product_fan(a: Fan, b: Fan) -> Fan:
    n = a.rank + b.rank
    rays = [r + (0,) * b.rank for r in a.rays] + [(0,) * a.rank + r for r in b.rays]
    off = len(a.rays)
    cones = [ca + tuple(off + j for j in cb) for ca, cb in product(a.max_cones, b.max_cones)]
    return Fan.build(n, rays, cones, check_faces=False)


def fan_from_rays_2d(rays: Sequence[Sequence[int]]) -> Fan:
    """Complete surface fan through the given primitive rays (sorted by angle, consecutive cones)."""
    rs = sorted((tuple(r) for r in rays), key=lambda r: math.atan2(r[1], r[0]))
    cones = [(i, (i + 1) % len(rs)) for i in range(len(rs))]
    return Fan.build(2, rs, cones)


def weighted_projective_plane_112() -> Fan:
    return Fan.build(2, [(1, 0), (0, 1), (-1, -2)], [(0, 1), (1, 2), (0, 2)])


def pair_from_fan(fan: Fan, coeffs=None, mode: str = "pair") -> ToricPair:
    return build_pair(fan, coeffs, mode, require_complete=False)
