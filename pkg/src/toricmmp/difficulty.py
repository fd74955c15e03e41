"""Difficulty invariants of toric pairs: coefficient monoid, invariant ladders, M-adic difficulty.

Exceptional divisors are counted through toric valuations, i.e. primitive
lattice points of the support that are not rays.  A point in the relative
interior of a 2-cone with exactly one boundary ray is an echo: its center is a
codimension one point of a single (normal) boundary component.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .pair import (
    Fan,
    ToricError,
    ToricPair,
    exceptional_points,
    h_vector,
    star_picard_number,
    terminalize,
)


class HypothesisViolated(ValueError):
    def __init__(self, index: int, message: str):
        super().__init__(message)
        self.index = index


# ---------------------------------------------------------------------------
# coefficient monoid


@dataclass(frozen=True)
class CoeffMonoid:
    generators: tuple[Fraction, ...]
    elements: tuple[Fraction, ...]

    @property
    def size(self) -> int:
        return len(self.elements)

    @property
    def k(self) -> int:
        return len(self.generators)


def coefficient_monoid(coeffs: Sequence) -> CoeffMonoid:
    """S = [0,1] intersected with the monoid generated by 1 and the coefficients."""
    gens = []
    for c in coeffs:
        if isinstance(c, float):
            raise ToricError("coefficients must be given exactly (int, Fraction or 'p/q' string)")
        gens.append(Fraction(c))
    if any(not 0 < b < 1 for b in gens):
        raise ToricError("coefficients must lie in the open interval (0, 1)")
    gens = sorted(set(gens), reverse=True)
    elems = {Fraction(0), Fraction(1)}
    frontier = [Fraction(0)]
    while frontier:
        x = frontier.pop()
        for b in gens:
            y = x + b
            if y <= 1 and y not in elems:
                elems.add(y)
                frontier.append(y)
    return CoeffMonoid(tuple(gens), tuple(sorted(elems)))


def theorem_M(monoid: CoeffMonoid) -> int:
    """(2 + ceil(1/b_k) ceil(1/(1-b_1))) |S|; with no boundary, b_k = 1 and b_1 = 0."""
    if monoid.generators:
        lo, hi = monoid.generators[-1], monoid.generators[0]
    else:
        lo, hi = Fraction(1), Fraction(0)
    return (2 + math.ceil(1 / lo) * math.ceil(1 / (1 - hi))) * monoid.size


# ---------------------------------------------------------------------------
# the difficulty vector


@dataclass(frozen=True)
class DifficultyVector:
    rhos: tuple[int, ...]
    ds: tuple[int, ...]
    levels: tuple[Fraction, ...]
    d_plain: int
    exact: bool

    @property
    def k(self) -> int:
        return len(self.levels)

    def sequence(self) -> tuple[int, ...]:
        out = [self.rhos[0]]
        for d, r in zip(self.ds, self.rhos[1:]):
            out += [d, r]
        return tuple(out)

    @property
    def rho_total(self) -> int:
        return sum(self.rhos)

    def to_json(self) -> dict:
        return {
            "rhos": list(self.rhos),
            "ds": list(self.ds),
            "levels": [str(b) for b in self.levels],
            "d": self.d_plain,
            "exact": self.exact,
        }


def is_echo(p: ToricPair, center: Sequence[int]) -> bool:
    return len(center) == 2 and sum(1 for i in center if p.coeffs[i] > 0) == 1


def non_echo_points(p: ToricPair, bound=2) -> list[tuple[tuple[int, ...], Fraction]]:
    """Exceptional toric valuations with A < bound that are not echoes."""
    return [(v, a) for v, a, c in exceptional_points(p, bound, strict=True) if not is_echo(p, c)]


def _h_alg(fan: Fan) -> int:
    return h_vector(fan)[fan.rank - 2] if fan.rank >= 2 else 0


def difficulty_vector(p: ToricPair, levels: Sequence | None = None) -> DifficultyVector:
    """(rho_0, d_1, rho_1, ..., d_{k+1}, rho_{k+1}) for the given coefficient levels.

    ``levels`` defaults to the distinct boundary coefficients of p; pass the
    levels of the initial pair to keep vectors along an MMP comparable.
    """
    if p.mode != "pair":
        raise ToricError("difficulty invariants need pair mode")
    p.require_complete()
    present = sorted({b for b in p.coeffs if b}, reverse=True)
    levels = tuple(sorted({Fraction(b) for b in levels}, reverse=True)) if levels is not None else tuple(present)
    if any(b not in levels for b in present):
        raise ToricError("pair has a coefficient outside the given levels")
    fan = p.fan
    monoid = coefficient_monoid(levels)
    rhos = [len(fan.rays) - fan.rank]
    for b in levels:
        rhos.append(sum(star_picard_number(fan, i) for i, c in enumerate(p.coeffs) if c == b))
    rhos.append(_h_alg(fan))
    values = sorted(a for _, a in non_echo_points(p, 2))
    ds = []
    for b in list(levels) + [Fraction(0)]:
        ds.append(sum(sum(1 for a in values if a < 2 - eta) for eta in monoid.elements if eta >= b))
    return DifficultyVector(tuple(rhos), tuple(ds), levels, len(values), fan.is_smooth())


def delta_M(v: DifficultyVector, M: int) -> int:
    """The M-adic difficulty sum of M^(2k+2-j) times the j-th entry of the sequence."""
    seq = v.sequence()
    top = len(seq) - 1
    return sum(x * M ** (top - j) for j, x in enumerate(seq))


def lex_compare(a: DifficultyVector, b: DifficultyVector) -> str:
    if a.levels != b.levels:
        raise ToricError("difficulty vectors have different coefficient levels")
    sa, sb = a.sequence(), b.sequence()
    return "Less" if sa < sb else "Greater" if sa > sb else "Equal"


def difficulty_bound(v: DifficultyVector, M: int) -> int:
    """M^(2k+2) (rho + d), the upper bound for delta_M."""
    return M ** (2 * v.k + 2) * (v.rho_total + v.d_plain)


# ---------------------------------------------------------------------------
# the M-adic inequality


def madic_check(a: Sequence, b: Sequence, c: Sequence, M) -> dict:
    """Check the hypotheses and conclusion of the M-adic comparison of three sequences.

    Hypotheses: a_i >= b_i and c_i - b_i <= (M-1) sum_{j<i} (a_j - b_j).
    Conclusion: sum M^-i c_i <= sum M^-i a_i, with equality iff a = b = c.
    """
    a = [Fraction(x) for x in a]
    b = [Fraction(x) for x in b]
    c = [Fraction(x) for x in c]
    M = Fraction(M)
    if not len(a) == len(b) == len(c):
        raise ValueError("sequences must have equal length")
    if M <= 1:
        raise ValueError("M must exceed 1")
    acc = Fraction(0)
    for i in range(len(a)):
        if a[i] < b[i]:
            raise HypothesisViolated(i, f"a[{i}] < b[{i}]")
        if c[i] - b[i] > (M - 1) * acc:
            raise HypothesisViolated(i, f"c[{i}] - b[{i}] = {c[i] - b[i]} exceeds {(M - 1) * acc}")
        acc += a[i] - b[i]
    lhs = sum((ci / M**i for i, ci in enumerate(c)), Fraction(0))
    rhs = sum((ai / M**i for i, ai in enumerate(a)), Fraction(0))
    equality = lhs == rhs
    return {
        "holds": lhs <= rhs,
        "equality": equality,
        "equality_consistent": equality == (a == b == c),
        "lhs": lhs,
        "rhs": rhs,
    }


# ---------------------------------------------------------------------------
# e_+, s and the log smooth estimates


def e_plus(p: ToricPair) -> int:
    """Exceptional toric divisors with A <= 1 plus the number of boundary components."""
    return len(exceptional_points(p, 1, strict=False)) + len(p.boundary_rays())


def rho_pair(p: ToricPair) -> int:
    fan = p.fan
    return len(fan.rays) - fan.rank + sum(star_picard_number(fan, i) for i in p.boundary_rays()) + _h_alg(fan)


def s_invariant(p: ToricPair) -> dict:
    """rho + d on the toric terminalization; an upper bound for the minimum over terminalizations."""
    y, inserted = terminalize(p)
    d = len(non_echo_points(y, 2))
    r = rho_pair(y)
    return {"value": r + d, "rho": r, "d": d, "inserted": len(inserted), "upper_bound": True}


def strata(p: ToricPair) -> list[tuple[int, ...]]:
    """Cones spanned by boundary rays (including the zero cone, whose stratum is X)."""
    bset = set(p.boundary_rays())
    out = []
    for cones in p.fan.cones_by_dim:
        out += sorted(c for c in cones if set(c) <= bset)
    return out


def stratum_picard(fan: Fan, tau: Sequence[int]) -> int:
    tau = set(tau)
    link = {j for c in fan.max_cones if tau <= set(c) for j in c if j not in tau}
    return len(link) - (fan.rank - len(tau))


def log_smooth_parameter(p: ToricPair) -> int:
    """Smallest N satisfying the hypotheses of the log smooth estimates for e_+ and s."""
    if not p.fan.is_smooth():
        raise ToricError("pair is not log smooth")
    p.require_complete()
    bmax = max(p.coeffs, default=Fraction(0))
    n_coeff = math.ceil(1 / (1 - bmax))
    st = strata(p)
    n_pic = max(stratum_picard(p.fan, t) for t in st)
    return max(1, n_coeff, len(st), n_pic, _h_alg(p.fan))


def log_smooth_estimates(p: ToricPair, N: int | None = None) -> dict:
    N = log_smooth_parameter(p) if N is None else N
    n = p.rank
    e = e_plus(p)
    s = s_invariant(p)["value"]
    return {
        "N": N,
        "e_plus": e,
        "e_bound": N ** (n + 1),
        "e_ok": e < N ** (n + 1),
        "s": s,
        "s_bound": 3 * N ** (2 * n + 3),
        "s_ok": s < 3 * N ** (2 * n + 3),
    }


# ---------------------------------------------------------------------------
# monotonicity along an MMP step


def step_monotonicity(before: ToricPair, after: ToricPair, levels: Sequence, M: int) -> dict:
    """Compare difficulty vectors and delta_M across one birational step."""
    va = difficulty_vector(before, levels)
    vb = difficulty_vector(after, levels)
    da, db = delta_M(va, M), delta_M(vb, M)
    return {
        "before": va.sequence(),
        "after": vb.sequence(),
        "lex": lex_compare(va, vb),
        "delta_before": da,
        "delta_after": db,
        "delta_strict": db < da,
        "exact": va.exact and vb.exact,
    }
