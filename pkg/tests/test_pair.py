from __future__ import annotations

import itertools
import math
import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from generators import COEFFS, random_cone, random_surface_pair, random_threefold_pair
from toricmmp.kernel import Cone, dot
from toricmmp.pair import (
    CoefficientOutOfRange,
    NotAFan,
    NotComplete,
    NotInFan,
    NotSimplicial,
    OutsideSupport,
    ToricError,
    alpha_invariant,
    build_pair,
    cartier_index,
    divisor_volume,
    fan_from_rays_2d,
    is_terminal,
    lct,
    log_discrepancy,
    mld,
    multiplicity_at,
    numerical_invariants,
    pair_from_fan,
    product_fan,
    projective_space,
    terminalize,
    topological_invariants,
    weighted_projective_plane_112,
)

half = Fraction(1, 2)
P2 = {"rank": 2, "rays": [(1, 0), (0, 1), (-1, -1)], "max_cones": [(0, 1), (1, 2), (0, 2)]}


def germ(rays, coeffs=None):
    return build_pair((len(rays[0]), rays, [tuple(range(len(rays)))]), coeffs, require_complete=False)


def sympy_alpha(rays, coeffs):
    """Covector of the log discrepancy function on one simplicial cone, solved by sympy."""
    m = sympy.Matrix([list(r) for r in rays])
    rhs = sympy.Matrix([sympy.Rational(1) - sympy.Rational(b.numerator, b.denominator) for b in coeffs])
    sol = m.LUsolve(rhs)
    return [Fraction(int(x.p), int(x.q)) for x in sol]


# --- construction


def test_projective_plane_is_valid():
    p = build_pair(P2)
    assert p.fan.complete and p.projective and p.fan.is_smooth()


def test_missing_cone_is_not_complete():
    with pytest.raises(NotComplete):
        build_pair({**P2, "max_cones": [(0, 1), (1, 2)]})


def test_coefficient_one_rejected_in_pair_mode():
    with pytest.raises(CoefficientOutOfRange):
        build_pair(P2, {0: 1})


def test_subpair_allows_negative_coefficients():
    p = build_pair(P2, {0: Fraction(-1, 2)}, mode="subpair")
    assert p.coeffs[0] == Fraction(-1, 2)
    with pytest.raises(CoefficientOutOfRange):
        build_pair(P2, {0: Fraction(-1, 2)})


def test_non_simplicial_rejected():
    with pytest.raises(NotSimplicial):
        build_pair((2, [(1, 0), (0, 1), (-1, 0)], [(0, 1, 2)]), require_complete=False)


def test_overlapping_cones_rejected():
    with pytest.raises(NotAFan):
        build_pair((2, [(1, 0), (0, 1), (1, 1)], [(0, 1), (0, 2)]), require_complete=False)


def test_rays_are_made_primitive():
    p = build_pair({**P2, "rays": [(2, 0), (0, 1), (-1, -1)]})
    assert p.rays[0] == (1, 0)


def prism_fan(twisted: bool):
    """Fan over a triangulated prism boundary; the cyclic side diagonals admit no convex support function."""
    tri = [(1, 0), (0, 1), (-1, -1)]
    rays = [(x, y, -1) for x, y in tri] + [(x, y, 1) for x, y in tri]
    cones = [(0, 1, 2), (3, 4, 5)]
    for i in range(3):
        j = (i + 1) % 3
        if twisted or i == 2:
            cones += [(i, j, 3 + j), (i, 3 + j, 3 + i)]
        else:
            cones += [(i, j, 3 + i), (j, 3 + j, 3 + i)]
    return build_pair((3, rays, cones))


def test_projectivity_witness():
    assert not prism_fan(True).projective
    p = prism_fan(False)
    assert p.projective
    w = p.projectivity_witness
    assert all(wc.degree(w) > 0 for wc in p.fan.wall_curves)


# --- log discrepancies


def test_quadrant_log_discrepancy_is_coordinate_sum():
    p = germ([(1, 0), (0, 1)])
    assert p.A((2, 3)) == 5


def test_quadrant_with_half_boundary():
    p = germ([(1, 0), (0, 1)], {0: half})
    assert log_discrepancy(p).covectors[(0, 1)] == (half, 1)
    assert p.A((1, 1)) == Fraction(3, 2)
    assert log_discrepancy(p).discrepancy((1, 1)) == half


def test_a1_log_discrepancy():
    p = germ([(1, 0), (1, 2)])
    assert log_discrepancy(p).covectors[(0, 1)] == (1, 0)
    assert p.A((1, 1)) == 1


def test_outside_support_raises():
    p = germ([(1, 0), (0, 1)])
    with pytest.raises(OutsideSupport):
        p.A((-1, 0))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**9))
def test_log_discrepancy_continuous_across_walls(seed):
    rng = random.Random(seed)
    p = random_surface_pair(rng) if seed % 2 else random_threefold_pair(rng)
    assert p.alpha.continuity_defects() == []
    for c, cov in p.alpha.covectors.items():
        assert list(cov) == sympy_alpha([p.rays[i] for i in c], [p.coeffs[i] for i in c])


# --- mld


def test_mld_smooth_point():
    assert mld(germ([(1, 0), (0, 1)]), (0, 1)) == 2


def test_mld_a1():
    assert mld(germ([(1, 0), (1, 2)]), (0, 1)) == 1


def test_mld_quadrant_half_boundary():
    assert mld(germ([(1, 0), (0, 1)], {0: half}), (0, 1)) == Fraction(3, 2)


def test_mld_rejects_non_cone():
    with pytest.raises(NotInFan):
        mld(build_pair(P2), (0, 1, 2))


def brute_mld(rays, coeffs):
    n = len(rays)
    alpha = sympy_alpha(rays, coeffs)
    c = Cone.of(rays)
    radius = 4 * max(max(abs(x) for x in r) for r in rays)
    best = None
    for v in itertools.product(range(-radius, radius + 1), repeat=n):
        if any(v) and c.in_relative_interior(v):
            a = dot(alpha, v)
            best = a if best is None or a < best else best
    return best


@pytest.mark.parametrize("seed", range(30))
def test_mld_matches_brute_force(seed):
    rng = random.Random(seed)
    n = 2 if seed < 18 else 3
    rays = random_cone(rng, n, entries=2 if n == 3 else 3)
    coeffs = [rng.choice(COEFFS) for _ in rays]
    p = germ(rays, dict(enumerate(coeffs)))
    assert mld(p, tuple(range(n))) == brute_mld(rays, coeffs)


# --- lct


def brute_lct(p, d, radius=6):
    """min A(v)/v(D) over lattice points of a box, v(D) read off the cone coordinates."""
    best = None
    for c in p.max_cones:
        for v in itertools.product(range(-radius, radius + 1), repeat=p.rank):
            if not any(v):
                continue
            lam = p.fan.coordinates(c, v)
            if any(x < 0 for x in lam):
                continue
            vd = sum(x * d[i] for i, x in zip(c, lam))
            if vd > 0:
                t = p.A(v) / vd
                best = t if best is None or t < best else best
    return best


def test_lct_of_xy():
    p = germ([(1, 0), (0, 1)])
    assert lct(p, [1, 1]) == 1 == brute_lct(p, [1, 1])


def test_lct_of_x2y3():
    p = germ([(1, 0), (0, 1)])
    assert lct(p, [2, 3]) == Fraction(1, 3) == brute_lct(p, [2, 3])


def test_lct_with_boundary_meets_izumi():
    p = germ([(1, 0), (0, 1)], {0: half})
    t = lct(p, [1, 0])
    assert t == half
    eps = 1 - max(p.coeffs)
    assert t >= eps / multiplicity_at(p, [1, 0], (0, 1))


def test_lct_rejects_negative_divisor():
    with pytest.raises(ToricError):
        lct(germ([(1, 0), (0, 1)]), [-1, 0])


def test_lct_of_zero_divisor_is_infinite():
    assert lct(germ([(1, 0), (0, 1)]), [0, 0]) == math.inf


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**9))
def test_lct_matches_brute_force(seed):
    rng = random.Random(seed)
    p = random_surface_pair(rng, max_rays=5)
    d = [Fraction(rng.randint(0, 3), rng.randint(1, 2)) for _ in p.rays]
    if not any(d):
        d[0] = Fraction(1)
    assert lct(p, d) == brute_lct(p, d)


# --- alpha invariants


def test_alpha_projective_line():
    assert alpha_invariant(pair_from_fan(projective_space(1)), [1, 0]) == 1


def test_alpha_projective_plane():
    assert alpha_invariant(build_pair(P2), [1, 0, 0]) == 1


def test_alpha_p1xp1_bidegree_1_2():
    fan = product_fan(projective_space(1), projective_space(1))
    L = [0] * 4
    L[fan.rays.index((1, 0))] = 1
    L[fan.rays.index((0, 1))] = 2
    assert alpha_invariant(pair_from_fan(fan), L) == half


# --- topology and indices


def test_projective_plane_topology():
    t = topological_invariants(build_pair(P2))
    assert (t.picard, t.h_alg, t.gorenstein_index) == (1, 1, 1)


def test_weighted_plane_112_indices():
    p = pair_from_fan(weighted_projective_plane_112())
    t = topological_invariants(p)
    assert t.picard == 1
    assert t.cartier_indices[p.rays.index((1, 0))] == 2
    assert t.gorenstein_index == 1


def test_blown_up_plane_picard_two():
    p = pair_from_fan(fan_from_rays_2d([(1, 0), (1, 1), (0, 1), (-1, -1)]))
    assert topological_invariants(p).picard == 2


def test_topology_needs_complete_fan():
    with pytest.raises(NotComplete):
        topological_invariants(germ([(1, 0), (0, 1)]))


def test_cartier_index_integral_divisor_on_smooth_fan():
    assert cartier_index(build_pair(P2), [1, 2, 3]) == 1


# --- numerical invariants


def test_plane_half_line_numerics():
    p = build_pair(P2, {0: half})
    num = numerical_invariants(p, [1, 0, 0])
    assert num.vol_boundary == Fraction(1, 4)
    assert num.boundary_degree == half


def test_plane_log_canonical_volume_zero():
    assert numerical_invariants(build_pair(P2), [1, 0, 0]).vol_log_canonical == 0


def test_plane_three_half_lines_lower_bound():
    p = build_pair(P2, {0: half, 1: half, 2: half})
    num = numerical_invariants(p, [1, 0, 0])
    assert num.boundary_degree == Fraction(3, 2)
    assert num.vol_boundary == Fraction(9, 4)
    assert num.volume_lower_bound == Fraction(1, 4)


def test_divisor_volume_degree_of_o3():
    assert divisor_volume(build_pair(P2), [3, 0, 0]) == 9


# --- terminalization


def test_smooth_fan_is_already_terminal():
    p = build_pair(P2)
    q, ins = terminalize(p)
    assert ins == [] and q == p


def test_a1_terminalization():
    q, ins = terminalize(germ([(1, 0), (1, 2)]))
    assert ins == [((1, 1), 1)]
    assert q.fan.is_smooth()


def test_one_third_terminalization():
    q, ins = terminalize(germ([(1, 0), (1, 3)]))
    assert sorted(v for v, _ in ins) == [(1, 1), (1, 2)]
    assert all(a <= 1 for _, a in ins)
    assert q.fan.is_smooth()


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**9))
def test_terminalization_is_crepant_and_terminal(seed):
    rng = random.Random(seed)
    p = random_surface_pair(rng) if seed % 3 else random_threefold_pair(rng, 1)
    q, ins = terminalize(p)
    assert is_terminal(q)
    for i in range(len(p.rays)):
        assert q.A(p.rays[i]) == p.A(p.rays[i])
    for _ in range(10):
        v = tuple(rng.randint(-4, 4) for _ in range(p.rank))
        if any(v):
            assert q.A(v) == p.A(v)
    for v, a in ins:
        assert q.coeffs[q.rays.index(v)] == 1 - a
    if not any(p.coeffs):
        for cones in q.fan.cones_by_dim[2:]:
            for c in cones:
                assert mld(q, c) > 1
