from __future__ import annotations

import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from generators import COEFFS, random_surface_pair, random_terminal_pair
from toricmmp.difficulty import (
    DifficultyVector,
    HypothesisViolated,
    coefficient_monoid,
    delta_M,
    difficulty_bound,
    difficulty_vector,
    e_plus,
    is_echo,
    lex_compare,
    log_smooth_estimates,
    madic_check,
    non_echo_points,
    s_invariant,
    step_monotonicity,
    theorem_M,
)
from toricmmp.mmp import mmp_run
from toricmmp.pair import ToricError, build_pair, fan_from_rays_2d, pair_from_fan, projective_space

H = Fraction(1, 2)


def knapsack(gens):
    """[0,1] intersected with the monoid generated by gens, by a bounded product scan."""
    out = set()
    bounds = [int(1 / g) for g in gens]
    for ms in itertools.product(*(range(b + 1) for b in bounds)):
        s = sum((m * g for m, g in zip(ms, gens)), Fraction(0))
        if s <= 1:
            out.add(s)
    return out | {Fraction(1)}


def vec(rhos, ds, levels=()):
    return DifficultyVector(tuple(rhos), tuple(ds), tuple(levels), sum(ds), True)


# --- coefficient monoid


def test_monoid_half():
    m = coefficient_monoid([H])
    assert m.elements == (0, H, 1) and m.size == 3


def test_monoid_two_thirds_and_half():
    assert set(coefficient_monoid([Fraction(2, 3), H]).elements) == {0, H, Fraction(2, 3), 1}


def test_monoid_empty():
    assert coefficient_monoid([]).elements == (0, 1)


def test_monoid_rejects_floats_and_range():
    with pytest.raises(ToricError):
        coefficient_monoid([0.5])
    with pytest.raises(ToricError):
        coefficient_monoid([Fraction(3, 2)])


@settings(max_examples=50, deadline=None)
@given(st.lists(st.sampled_from([Fraction(p, q) for q in range(2, 7) for p in range(1, q)]), max_size=3))
def test_monoid_matches_knapsack(gens):
    m = coefficient_monoid(gens)
    assert set(m.elements) == knapsack(sorted(set(gens)))
    els = set(m.elements)
    assert all(a + b in els for a in els for b in els if a + b <= 1)


def test_theorem_M_values():
    assert theorem_M(coefficient_monoid([H])) == 18
    assert theorem_M(coefficient_monoid([])) == 6


# --- difficulty vectors


def test_plane_without_boundary():
    v = difficulty_vector(pair_from_fan(projective_space(2)))
    assert v.rhos == (1, 1) and v.ds == (0,) and v.k == 0


def test_plane_with_half_line():
    p = pair_from_fan(projective_space(2), [H, 0, 0])
    v = difficulty_vector(p)
    assert v.rhos == (1, 1, 1)
    # v_L + v_j lies in a smooth 2-cone with exactly one boundary ray, so it is an echo
    assert is_echo(p, (0, 1))
    assert v.ds == (0, 0)


def test_blowup_rho():
    v = difficulty_vector(pair_from_fan(fan_from_rays_2d([(1, 0), (1, 1), (0, 1), (-1, -1)])))
    assert v.rhos[0] == 2


def test_quotient_singularity_counts_non_echo_points():
    # P(1,1,2) has an A1 point whose exceptional curve has A = 1 < 2
    p = build_pair((2, [(1, 0), (0, 1), (-1, -2)], [(0, 1), (1, 2), (0, 2)]))
    assert [a for _, a in non_echo_points(p)] == [1]
    assert difficulty_vector(p).ds == (1,)
    assert not difficulty_vector(p).exact


def test_levels_must_cover_coefficients():
    p = pair_from_fan(projective_space(2), [H, 0, 0])
    with pytest.raises(ToricError):
        difficulty_vector(p, [Fraction(1, 3)])


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**9))
def test_ds_are_monotone(seed):
    v = difficulty_vector(random_surface_pair(random.Random(seed)))
    assert all(a <= b for a, b in zip(v.ds, v.ds[1:]))
    assert all(x >= 0 for x in v.sequence())


# --- delta_M and the Lemma bound


def test_delta_M_substitution():
    assert delta_M(vec((2, 1), (1,)), 10) == 211


def test_delta_M_bound_example():
    v = vec((2, 1), (1,))
    assert delta_M(v, 10) <= difficulty_bound(v, 10) == 100 * 4


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**9), st.integers(0, 5))
def test_delta_M_bound_on_generated_pairs(seed, extra):
    p = random_surface_pair(random.Random(seed))
    v = difficulty_vector(p)
    M = coefficient_monoid(v.levels).size + 1 + extra
    assert delta_M(v, M) <= difficulty_bound(v, M)


def test_delta_is_exact_integer_for_huge_M():
    v = vec((3, 2, 1), (4, 5))
    M = 10**40
    assert delta_M(v, M) == 3 * M**4 + 4 * M**3 + 2 * M**2 + 5 * M + 1


# --- lexicographic comparison


def test_lex_examples():
    assert lex_compare(vec((2, 1), (1,)), vec((1, 9), (5,))) == "Greater"
    assert lex_compare(vec((2, 1), (1,)), vec((2, 1), (1,))) == "Equal"
    assert lex_compare(vec((1, 9), (5,)), vec((2, 1), (1,))) == "Less"


def test_lex_level_mismatch():
    with pytest.raises(ToricError):
        lex_compare(vec((2, 1), (1,)), vec((2, 1, 1), (1, 1), (H,)))


@pytest.mark.parametrize("seed", range(6))
def test_steps_decrease_on_terminal_pairs(seed):
    p = random_terminal_pair(random.Random(seed), 2)
    levels = sorted({b for b in p.coeffs if b}, reverse=True)
    M = theorem_M(coefficient_monoid(levels))
    for step in mmp_run(p, "random", seed=seed).birational_steps:
        r = step_monotonicity(step.before, step.after, levels, M)
        assert r["lex"] == "Greater" and r["delta_strict"]


# --- the M-adic inequality


def test_madic_examples():
    r = madic_check([1, 0], [0, 0], [0, 2], 3)
    assert r["holds"] and not r["equality"] and r["lhs"] == Fraction(2, 3)
    r = madic_check([5, 5], [5, 5], [5, 5], 3)
    assert r["holds"] and r["equality"]


def test_madic_hypothesis_violation():
    with pytest.raises(HypothesisViolated) as exc:
        madic_check([1, 0], [0, 0], [0, 3], 3)
    assert exc.value.index == 1


def hypothesis_triple(rng, m, M):
    a, b, c = [], [], []
    acc = Fraction(0)
    for _ in range(m + 1):
        bi = Fraction(rng.randint(-5, 5), rng.randint(1, 4))
        ai = bi + (Fraction(rng.randint(0, 6), rng.randint(1, 3)) if rng.random() < 0.7 else 0)
        room = (M - 1) * acc
        ci = bi + room * Fraction(rng.randint(0, 8), 8) - (Fraction(rng.randint(0, 3), 2) if rng.random() < 0.5 else 0)
        a.append(ai), b.append(bi), c.append(ci)
        acc += ai - bi
    return a, b, c


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10**9), st.integers(0, 5), st.sampled_from([Fraction(3, 2), 2, 3, Fraction(7, 2), 10]))
def test_madic_property(seed, m, M):
    a, b, c = hypothesis_triple(random.Random(seed), m, Fraction(M))
    r = madic_check(a, b, c, M)
    assert r["holds"] and r["equality_consistent"]


# --- e_plus and s


def test_e_plus_smooth_no_boundary():
    assert e_plus(pair_from_fan(projective_space(2))) == 0


def test_e_plus_a1_germ():
    a1 = build_pair((2, [(1, 0), (1, 2)], [(0, 1)]), None, require_complete=False)
    assert e_plus(a1) == 1


def test_e_plus_plane_with_half_line():
    assert e_plus(pair_from_fan(projective_space(2), [H, 0, 0])) == 1


def test_s_is_flagged_upper_bound():
    s = s_invariant(build_pair((2, [(1, 0), (0, 1), (-1, -2)], [(0, 1), (1, 2), (0, 2)])))
    assert s["upper_bound"] and s["value"] == s["rho"] + s["d"]


@pytest.mark.parametrize("coeffs", [[0, 0, 0], [H, 0, 0], [H, H, Fraction(1, 3)], [Fraction(2, 3), 0, Fraction(1, 2)]])
def test_log_smooth_estimates_on_plane(coeffs):
    r = log_smooth_estimates(pair_from_fan(projective_space(2), coeffs))
    assert r["e_ok"] and r["s_ok"]


def test_log_smooth_estimates_reject_singular():
    p = build_pair((2, [(1, 0), (0, 1), (-1, -2)], [(0, 1), (1, 2), (0, 2)]))
    with pytest.raises(ToricError):
        log_smooth_estimates(p)


def test_coefficient_choices_are_in_range():
    assert all(0 <= Fraction(c) < 1 for c in COEFFS)
