from __future__ import annotations

import json
import random
from functools import reduce
from math import gcd
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from generators import random_surface_pair, random_threefold_pair
from toricmmp.mmp import (
    DIVISORIAL,
    FIBERING,
    FLIPPING,
    BudgetExceeded,
    PositiveDegree,
    ZeroDegree,
    canonical_form,
    enumerate_runs,
    flip_circuit,
    line_bundle_flip_pair,
    mmp_run,
    mmp_step,
    mori_walls,
    negative_classes,
)
from toricmmp.pair import (
    NotProjective,
    build_pair,
    fan_from_rays_2d,
    pair_from_fan,
    product_fan,
    projective_space,
    topological_invariants,
)

BLOWUP = [(1, 0), (1, 1), (0, 1), (-1, -1)]
TWO_BLOWUPS = [(1, 0), (1, 1), (0, 1), (-1, 0), (-1, -1)]


def blowup_p2():
    return pair_from_fan(fan_from_rays_2d(BLOWUP))


def relation_holds(p, w):
    """The relation is a linear dependence among the rays."""
    return all(sum(r * v[k] for r, v in zip(w.relation, p.rays)) == 0 for k in range(p.rank))


# --- walls


def test_blowup_exceptional_wall_is_divisorial():
    p = blowup_p2()
    e = p.rays.index((1, 1))
    walls = [w for w in mori_walls(p) if w.wall == (e,)]
    assert len(walls) == 1
    assert walls[0].kind == DIVISORIAL and walls[0].degree < 0


def test_p1xp1_negative_walls_fiber():
    p = pair_from_fan(product_fan(projective_space(1), projective_space(1)))
    negs = [w for w in mori_walls(p) if w.degree < 0]
    assert negs and all(w.kind == FIBERING for w in negs)


def test_line_bundle_wall_flips_for_1_4():
    p = line_bundle_flip_pair(1, 4)
    walls = mori_walls(p)
    assert len({w.relation for w in walls}) == 1
    assert all(w.kind == FLIPPING and w.degree < 0 for w in walls)


def test_relations_are_primitive_and_vanish():
    rng = random.Random(5)
    for _ in range(10):
        p = random_surface_pair(rng)
        for w in mori_walls(p):
            assert relation_holds(p, w)
            assert reduce(gcd, w.relation, 0) == 1


def test_non_projective_input_rejected():
    tri = [(1, 0), (0, 1), (-1, -1)]
    rays = [(x, y, -1) for x, y in tri] + [(x, y, 1) for x, y in tri]
    cones = [(0, 1, 2), (3, 4, 5)]
    for i in range(3):
        j = (i + 1) % 3
        cones += [(i, j, 3 + j), (i, 3 + j, 3 + i)]
    with pytest.raises(NotProjective):
        mori_walls(build_pair((3, rays, cones)))


# --- single steps


def test_contract_exceptional_curve_gives_plane():
    p = blowup_p2()
    step = mmp_step(p, p.rays.index((1, 1)))
    assert step.kind == DIVISORIAL
    assert sorted(step.after.rays) == sorted([(1, 0), (0, 1), (-1, -1)])
    assert step.after.fan.complete and step.after.projective


def test_line_bundle_flip_changes_sign():
    p = line_bundle_flip_pair(1, 4)
    step = mmp_step(p, mori_walls(p)[0])
    assert step.kind == "Flip"
    assert step.after.rays == p.rays
    w = mori_walls(step.after)[0]
    assert all(v.degree > 0 for v in mori_walls(step.after))
    with pytest.raises(PositiveDegree):
        mmp_step(step.after, w)


def test_flop_rejected():
    p = line_bundle_flip_pair(1, 3)
    w = mori_walls(p)[0]
    assert w.flop
    with pytest.raises(ZeroDegree):
        mmp_step(p, w)


def test_plane_is_a_mori_fiber_space():
    run = mmp_run(pair_from_fan(projective_space(2)))
    assert run.outcome == "MoriFiberSpace"
    assert [s.kind for s in run.steps] == ["MoriFiberSpace"]


@pytest.mark.parametrize("m,n", [(1, 2), (1, 4), (2, 4), (2, 6)])
def test_flip_involution(m, n):
    p = line_bundle_flip_pair(m, n)
    w = mori_walls(p)[0]
    once = flip_circuit(p, w.relation)
    assert once.fan != p.fan
    assert flip_circuit(once, w.relation).fan == p.fan


# --- runs


def test_blowup_run():
    run = mmp_run(blowup_p2())
    assert [s.kind for s in run.steps] == [DIVISORIAL, "MoriFiberSpace"]
    assert run.outcome == "MoriFiberSpace"


def test_flipped_side_is_minimal():
    p = line_bundle_flip_pair(1, 4, side=2)
    assert negative_classes(p) == []
    run = mmp_run(p)
    assert run.steps == () and run.outcome == "MinimalModel"


def test_random_strategy_is_deterministic():
    p = pair_from_fan(fan_from_rays_2d(TWO_BLOWUPS))
    a = json.dumps(mmp_run(p, "random", seed=7).to_json())
    b = json.dumps(mmp_run(p, "random", seed=7).to_json())
    assert a == b


def test_index_strategy_cycles():
    p = pair_from_fan(fan_from_rays_2d(TWO_BLOWUPS))
    classes = negative_classes(p)
    run = mmp_run(p, "index", index=len(classes) + 1)
    assert run.steps[0].contracted.relation == classes[1 % len(classes)].relation


def test_run_budget_exceeded_keeps_partial_run():
    p = pair_from_fan(fan_from_rays_2d(TWO_BLOWUPS))
    with pytest.raises(BudgetExceeded) as exc:
        mmp_run(p, budget=1)
    assert len(exc.value.partial.steps) == 1


def test_runs_chain():
    rng = random.Random(3)
    for _ in range(5):
        run = mmp_run(random_surface_pair(rng), "random", seed=1)
        for a, b in zip(run.steps, run.steps[1:]):
            assert a.after is b.before


# --- enumeration


def test_plane_has_one_run():
    assert len(enumerate_runs(pair_from_fan(projective_space(2)))) == 1


def test_two_point_blowup_runs():
    e = enumerate_runs(pair_from_fan(fan_from_rays_2d(TWO_BLOWUPS)))
    assert e.count_runs() >= 2
    assert e.max_length() <= 2
    for run in e.runs():
        assert len(run.birational_steps) <= 2


def test_enumeration_budget_zero():
    with pytest.raises(BudgetExceeded):
        enumerate_runs(blowup_p2(), budget=0)


def test_parallel_enumeration_matches_serial():
    p = pair_from_fan(fan_from_rays_2d(TWO_BLOWUPS + [(1, 2)]), {0: Fraction(1, 2)})
    a = enumerate_runs(p)
    b = enumerate_runs(p, jobs=2)
    assert set(a.edges) == set(b.edges)
    assert a.count_runs() == b.count_runs()


def signed_permutations(n):
    from itertools import permutations

    for perm in permutations(range(n)):
        for signs in product((1, -1), repeat=n):
            yield perm, signs


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**9))
def test_canonical_form_invariant_under_signed_permutations(seed):
    rng = random.Random(seed)
    p = random_surface_pair(rng) if seed % 2 else random_threefold_pair(rng, 1)
    perm, signs = rng.choice(list(signed_permutations(p.rank)))
    rays = [tuple(signs[k] * r[perm[k]] for k in range(p.rank)) for r in p.rays]
    order = list(range(len(rays)))
    rng.shuffle(order)
    pos = {old: new for new, old in enumerate(order)}
    q = build_pair(
        (p.rank, [rays[i] for i in order], [tuple(pos[i] for i in c) for c in p.max_cones]),
        {pos[i]: b for i, b in enumerate(p.coeffs)},
        require_complete=False,
    )
    assert canonical_form(q) == canonical_form(p)


def brute_form(p):
    """Exhaustive minimum over every signed permutation, with the same ordering as canonical_form."""
    best = None
    for perm, signs in signed_permutations(p.rank):
        rows = [(b,) + tuple(signs[k] * r[perm[k]] for k in range(p.rank)) for r, b in zip(p.rays, p.coeffs)]
        order = sorted(range(len(rows)), key=lambda i: rows[i])
        pos = {old: new for new, old in enumerate(order)}
        matrix = tuple(tuple(rows[i][j] for i in order) for j in range(p.rank + 1))
        cones = tuple(sorted(tuple(sorted(pos[i] for i in c)) for c in p.max_cones))
        key = (matrix, cones)
        if best is None or key < best:
            best = key
    return best


def test_canonical_form_matches_exhaustive_search():
    rng = random.Random(17)
    pairs = [random_surface_pair(rng) for _ in range(15)] + [random_threefold_pair(rng, 1) for _ in range(15)]
    pairs += [line_bundle_flip_pair(1, 2, s) for s in (1, 2)] + [pair_from_fan(product_fan(projective_space(1), projective_space(2)))]
    for a in pairs:
        for b in pairs:
            assert (canonical_form(a) == canonical_form(b)) == (brute_form(a) == brute_form(b) and a.mode == b.mode)


def test_canonical_form_fast_on_symmetric_fans():
    one, two = line_bundle_flip_pair(2, 6, 1), line_bundle_flip_pair(2, 6, 2)
    assert canonical_form(one) != canonical_form(two)
    assert canonical_form(mmp_step(one, mori_walls(one)[0]).after) == canonical_form(two)


# --- step properties


def probes(rng, p, cone, count):
    """Random lattice points in the interior of a cone of p."""
    out = []
    for _ in range(count):
        w = [rng.randint(1, 6) for _ in cone]
        out.append(tuple(sum(k * p.rays[i][j] for k, i in zip(w, cone)) for j in range(p.rank)))
    return out


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**9))
def test_negativity_lemma_and_picard_numbers(seed):
    rng = random.Random(seed)
    p = random_surface_pair(rng) if seed % 3 else random_threefold_pair(rng)
    run = mmp_run(p, "random", seed=seed)
    for step in run.birational_steps:
        before, after = step.before, step.after
        box = [tuple(rng.randint(-5, 5) for _ in range(p.rank)) for _ in range(25)]
        box = [v for v in box if any(v)]
        near = []
        w = step.contracted
        for side in w.sides:
            near += probes(rng, before, w.wall + (side,), 13)
        assert all(after.A(v) >= before.A(v) for v in box + near)
        assert any(after.A(v) > before.A(v) for v in near)
        rb = topological_invariants(before).picard
        ra = topological_invariants(after).picard
        assert ra == (rb - 1 if step.kind == DIVISORIAL else rb)
        if step.kind == DIVISORIAL:
            assert len(after.rays) == len(before.rays) - 1
        else:
            assert after.rays == before.rays
