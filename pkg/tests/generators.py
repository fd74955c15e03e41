"""Seeded generators of random complete simplicial projective toric pairs."""

from __future__ import annotations

import random
from fractions import Fraction

from toricmmp.kernel import det, primitive
from toricmmp.pair import (
    Fan,
    ToricPair,
    fan_from_rays_2d,
    pair_from_fan,
    product_fan,
    projective_space,
    star_subdivide,
)

COEFFS = (Fraction(0), Fraction(1, 2), Fraction(2, 3))


def _with_coeffs(fan: Fan, rng: random.Random, choices=COEFFS) -> ToricPair:
    return pair_from_fan(fan, [rng.choice(choices) for _ in fan.rays])


def random_surface_fan(rng: random.Random, max_rays: int = 7, smooth: bool = False) -> Fan:
    a = rng.randint(0, 3)
    starts = [
        [(1, 0), (0, 1), (-1, -1)],
        [(1, 0), (0, 1), (-1, a), (0, -1)],
    ]
    rays = list(rng.choice(starts))
    for _ in range(rng.randint(0, max_rays - len(rays))):
        fan = fan_from_rays_2d(rays)
        i, j = rng.choice(fan.max_cones)
        u, w = fan.rays[i], fan.rays[j]
        p, q = (1, 1) if smooth else (rng.randint(1, 2), rng.randint(1, 2))
        v = primitive((p * u[0] + q * w[0], p * u[1] + q * w[1]))
        if v not in rays:
            rays.append(v)
    return fan_from_rays_2d(rays)


def random_surface_pair(rng: random.Random, max_rays: int = 7, choices=COEFFS) -> ToricPair:
    return _with_coeffs(random_surface_fan(rng, max_rays), rng, choices)


def random_threefold_fan(rng: random.Random, subdivisions: int = 2, smooth: bool = False) -> Fan:
    p1 = projective_space(1)
    starts = [projective_space(3), product_fan(p1, projective_space(2)), product_fan(p1, product_fan(p1, p1))]
    p = pair_from_fan(rng.choice(starts))
    for _ in range(rng.randint(0, subdivisions)):
        dim = rng.choice((2, 3))
        tau = rng.choice(sorted(p.fan.cones_by_dim[dim]))
        if smooth and p.fan.multiplicity(tau) != 1:
            continue
        weights = [1] * dim if smooth else [rng.randint(1, 2) for _ in tau]
        v = primitive([sum(c * p.rays[i][k] for c, i in zip(weights, tau)) for k in range(3)])
        if v in p.rays:
            continue
        p = star_subdivide(p, v, 0)
    return p.fan


def random_threefold_pair(rng: random.Random, subdivisions: int = 2, choices=COEFFS) -> ToricPair:
    return _with_coeffs(random_threefold_fan(rng, subdivisions), rng, choices)


def random_terminal_pair(rng: random.Random, dim: int, choices=COEFFS) -> ToricPair:
    """A smooth pair whose boundary components are pairwise disjoint, hence terminal."""
    fan = random_surface_fan(rng, 7, smooth=True) if dim == 2 else random_threefold_fan(rng, 2, smooth=True)
    coeffs = [Fraction(0)] * len(fan.rays)
    order = list(range(len(fan.rays)))
    rng.shuffle(order)
    used: set[int] = set()
    for i in order:
        if i in used or rng.random() < 0.5:
            continue
        b = rng.choice(choices)
        if b:
            coeffs[i] = b
            used |= fan.neighbours(i) | {i}
    return pair_from_fan(fan, coeffs)


def random_cone(rng: random.Random, dim: int, entries: int = 3) -> list[tuple[int, ...]]:
    """Rays of a random full-dimensional simplicial cone with primitive generators."""
    while True:
        raw = [[rng.randint(-entries, entries) for _ in range(dim)] for _ in range(dim)]
        if any(all(x == 0 for x in r) for r in raw):
            continue
        rays = [primitive(r) for r in raw]
        d = det(rays)
        if d != 0 and abs(d) <= 12:
            return rays if d > 0 else [rays[1], rays[0]] + rays[2:]

