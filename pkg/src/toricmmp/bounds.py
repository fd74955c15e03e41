"""Explicit termination and index bounds, evaluated exactly or as rigorous log brackets.

Values are carried at one of three levels: an exact integer (up to 10^6
digits), a bracket for log10 of the value, or a bracket for log10(log10) of
the value when even the logarithm does not fit in a decimal exponent.
Brackets are computed with outward rounding, so every comparison either is
certified or reports Incomparable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import ROUND_CEILING, ROUND_FLOOR, ROUND_HALF_EVEN, MAX_EMAX, MIN_EMIN, Context, Decimal
from fractions import Fraction
from typing import Mapping, Sequence

from .difficulty import coefficient_monoid, theorem_M
from .nvol import ConeSingularity, minimize_nvol
from .pair import (
    NotAmple,
    NotBig,
    ToricPair,
    _check_divisor,
    admissible_volume_lower_bound,
    alpha_invariant,
    divisor_volume,
    intersection_with_power,
    is_ample,
    local_cartier_index,
)

PREC = 60
EXACT_DIGITS = 10**6
_NEAR = Context(prec=PREC, rounding=ROUND_HALF_EVEN, Emax=MAX_EMAX, Emin=MIN_EMIN)
_DOWN = Context(prec=PREC, rounding=ROUND_FLOOR, Emax=MAX_EMAX, Emin=MIN_EMIN)
_UP = Context(prec=PREC, rounding=ROUND_CEILING, Emax=MAX_EMAX, Emin=MIN_EMIN)
# a value is kept at the log10 level while log10 log10 of it stays below this
_L2_LIMIT = Decimal(10) ** 15


class BoundsError(ValueError):
    pass


class UnknownFormula(BoundsError):
    pass


class DomainError(BoundsError):
    pass


# ---------------------------------------------------------------------------
# intervals with outward rounding


@dataclass(frozen=True)
class Interval:
    lo: Decimal
    hi: Decimal

    @staticmethod
    def point(x) -> "Interval":
        if isinstance(x, Fraction):
            return Interval(_DOWN.divide(Decimal(x.numerator), Decimal(x.denominator)),
                            _UP.divide(Decimal(x.numerator), Decimal(x.denominator)))
        if isinstance(x, int) and x.bit_length() > 3000:
            lg = log10_int(x)
            return lg.exp10()
        d = Decimal(x)
        return Interval(_DOWN.plus(d), _UP.plus(d))

    def __add__(self, o: "Interval") -> "Interval":
        return Interval(_DOWN.add(self.lo, o.lo), _UP.add(self.hi, o.hi))

    def __sub__(self, o: "Interval") -> "Interval":
        return Interval(_DOWN.subtract(self.lo, o.hi), _UP.subtract(self.hi, o.lo))

    def __mul__(self, o: "Interval") -> "Interval":
        if self.lo < 0 or o.lo < 0:
            cands = [(a, b) for a in (self.lo, self.hi) for b in (o.lo, o.hi)]
            return Interval(min(_DOWN.multiply(a, b) for a, b in cands), max(_UP.multiply(a, b) for a, b in cands))
        return Interval(_DOWN.multiply(self.lo, o.lo), _UP.multiply(self.hi, o.hi))

    def inverse(self) -> "Interval":
        if self.lo <= 0:
            raise DomainError("inverse of a nonpositive interval")
        return Interval(_DOWN.divide(1, self.hi), _UP.divide(1, self.lo))

    def ln(self) -> "Interval":
        if self.lo <= 0:
            raise DomainError("logarithm of a nonpositive interval")
        return Interval(_NEAR.next_minus(_NEAR.ln(self.lo)), _NEAR.next_plus(_NEAR.ln(self.hi)))

    def log10(self) -> "Interval":
        if self.lo <= 0:
            raise DomainError("logarithm of a nonpositive interval")
        return Interval(_NEAR.next_minus(_NEAR.log10(self.lo)), _NEAR.next_plus(_NEAR.log10(self.hi)))

    def exp10(self) -> "Interval":
        x = self * LN10
        return Interval(_NEAR.next_minus(_NEAR.exp(x.lo)), _NEAR.next_plus(_NEAR.exp(x.hi)))

    @property
    def mid(self) -> Decimal:
        return _NEAR.divide(_NEAR.add(self.lo, self.hi), 2)

    @property
    def radius(self) -> Decimal:
        return _UP.divide(_UP.subtract(self.hi, self.lo), 2)

    def contains(self, x) -> bool:
        return self.lo <= x <= self.hi


LN10 = Interval(_NEAR.next_minus(_NEAR.ln(Decimal(10))), _NEAR.next_plus(_NEAR.ln(Decimal(10))))
LOG10E = LN10.inverse()
_PI = Decimal("3.14159265358979323846264338327950288419716939937510582097494459230781640628620899")
PI = Interval(_DOWN.plus(_PI), _UP.plus(_PI) + Decimal("1e-75"))


def log10_int(x: int) -> Interval:
    """Bracket for log10 of a positive integer, using its leading bits."""
    if x <= 0:
        raise DomainError("log10 of a nonpositive integer")
    shift = max(0, x.bit_length() - 220)
    y = x >> shift
    base = Interval.point(y) if shift == 0 else Interval(_DOWN.plus(Decimal(y)), _UP.plus(Decimal(y + 1)))
    out = base.log10()
    if shift:
        out = out + Interval.point(shift) * Interval.point(2).log10()
    return out


def digit_count(x: int) -> int:
    """Exact number of decimal digits of a positive integer."""
    if x <= 0:
        raise DomainError("digit count of a nonpositive integer")
    d = max(1, int(x.bit_length() * 0.30102999566398120))
    while 10**d <= x:
        d += 1
    while d > 1 and 10 ** (d - 1) > x:
        d -= 1
    return d


def stirling_ln_factorial(k: Interval) -> Interval:
    """Bracket for ln(k!) from Stirling's series truncated after the 1/(360 k^3) term.

    The remainder lies between 0 and the first omitted term 1/(1260 k^5).
    ``k`` brackets a positive integer; the bracket is monotone in k.
    """
    if k.lo < 1:
        raise DomainError("Stirling bracket needs k >= 1")
    half = Interval.point(Fraction(1, 2))
    lo, hi = Interval(k.lo, k.lo), Interval(k.hi, k.hi)
    s_lo = _stirling_main(lo, half) + (Interval.point(12) * hi).inverse() - (Interval.point(360) * lo * lo * lo).inverse()
    s_hi = (
        _stirling_main(hi, half)
        + (Interval.point(12) * lo).inverse()
        - (Interval.point(360) * hi * hi * hi).inverse()
        + (Interval.point(1260) * lo * lo * lo * lo * lo).inverse()
    )
    return Interval(s_lo.lo, s_hi.hi)


def _stirling_main(k: Interval, half: Interval) -> Interval:
    return (k + half) * k.ln() - k + half * (Interval.point(2) * PI).ln()


def stirling_log10_factorial(k: int | Interval) -> Interval:
    ki = k if isinstance(k, Interval) else Interval.point(k)
    return stirling_ln_factorial(ki) * LOG10E


# ---------------------------------------------------------------------------
# magnitudes


@dataclass(frozen=True)
class BigMagnitude:
    """An exact integer, or a bracket for log10 (level 1) or log10 log10 (level 2) of a positive value."""

    level: int
    exact: int | None = None
    bracket: Interval | None = None

    @staticmethod
    def of(x: int) -> "BigMagnitude":
        return BigMagnitude(0, exact=int(x))

    @property
    def kind(self) -> str:
        return ("Exact", "Log10", "Log10Log10")[self.level]

    def log10(self) -> Interval:
        """Bracket for log10 of the value."""
        if self.level == 0:
            return log10_int(self.exact)
        if self.level == 1:
            return self.bracket
        if self.bracket.hi > _L2_LIMIT:
            raise DomainError("log10 of this value does not fit in a decimal")
        return self.bracket.exp10()

    def log10log10(self) -> Interval:
        if self.level == 2:
            return self.bracket
        lg = self.log10()
        if lg.lo <= 0:
            raise DomainError("value too small for a double logarithm")
        return lg.log10()

    def to_json(self) -> dict:
        if self.level == 0:
            text = str(self.exact) if self.exact.bit_length() < 13000 else _long_str(self.exact)
            return {"exact": text}
        key = "log10" if self.level == 1 else "log10log10"
        return {key: _fmt(self.bracket.mid), "err": _fmt(self.bracket.radius), "lo": _fmt(self.bracket.lo), "hi": _fmt(self.bracket.hi)}

    def __str__(self) -> str:
        if self.level == 0:
            return str(self.exact) if self.exact.bit_length() < 13000 else f"<{digit_count(self.exact)}-digit integer>"
        return f"{self.kind}({_fmt(self.bracket.mid)} +- {_fmt(self.bracket.radius)})"


def _fmt(d: Decimal) -> str:
    return format(_NEAR.plus(d), "")


def _long_str(x: int) -> str:
    # avoid the interpreter's limit on int -> str conversion for very long integers
    chunks = []
    base = 10**1000
    while x:
        x, r = divmod(x, base)
        chunks.append(r)
    return str(chunks[-1]) + "".join(str(c).zfill(1000) for c in reversed(chunks[:-1]))


def _from_log10(lg: Interval) -> BigMagnitude:
    if lg.hi.adjusted() < _L2_LIMIT:
        return BigMagnitude(1, bracket=lg)
    return BigMagnitude(2, bracket=lg.log10())


def mag_mul(a: BigMagnitude, b: BigMagnitude) -> BigMagnitude:
    if a.level == 0 and b.level == 0:
        if a.exact.bit_length() + b.exact.bit_length() <= 3.33 * EXACT_DIGITS:
            v = a.exact * b.exact
            if v.bit_length() <= 3.32 * EXACT_DIGITS:
                return BigMagnitude.of(v)
    if max(a.level, b.level) <= 1 or _fits_l1(a) and _fits_l1(b):
        return _from_log10(a.log10() + b.log10())
    la, lb = a.log10log10(), b.log10log10()
    big, small = (la, lb) if la.lo >= lb.lo else (lb, la)
    # log10(10^x + 10^y) = x + log10(1 + 10^(y - x)) in the second logarithm
    diff = small - big
    if diff.hi < Decimal(-PREC - 5):
        return BigMagnitude(2, bracket=Interval(big.lo, _NEAR.next_plus(big.hi)))
    term = (Interval.point(1) + Interval(max(diff.lo, Decimal(-PREC - 5)), diff.hi).exp10()).log10()
    lo = max(big.lo, small.lo)
    return BigMagnitude(2, bracket=Interval(lo, (big + term).hi))


def _fits_l1(m: BigMagnitude) -> bool:
    return m.level < 2 or m.bracket.hi <= _L2_LIMIT


def mag_pow(base: BigMagnitude, exp: BigMagnitude) -> BigMagnitude:
    """base^exp for base >= 2 and exp >= 1."""
    if base.level == 0 and exp.level == 0:
        lg = log10_int(base.exact) * Interval.point(exp.exact)
        if lg.hi < EXACT_DIGITS - 1:
            return BigMagnitude.of(base.exact**exp.exact)
    l2 = exp.log10() + base.log10log10() if _fits_l1(exp) else exp.log10log10() + base.log10log10()
    if l2.hi <= _L2_LIMIT:
        e = Interval.point(exp.exact) if exp.level == 0 else exp.log10().exp10()
        return BigMagnitude(1, bracket=e * base.log10())
    return BigMagnitude(2, bracket=l2)


def mag_factorial(k: BigMagnitude) -> BigMagnitude:
    if k.level == 0:
        if k.exact < 1:
            return BigMagnitude.of(1)
        lg = stirling_log10_factorial(k.exact) if k.exact > 20 else log10_int(math.factorial(k.exact))
        if lg.hi < EXACT_DIGITS - 1:
            return BigMagnitude.of(math.factorial(k.exact))
        return _from_log10(lg)
    lk = k.log10()
    if lk.hi <= _L2_LIMIT:
        return _from_log10(stirling_log10_factorial(lk.exp10()))
    # (k/e)^k <= k! <= k^k
    lo = lk.lo + _NEAR.next_minus(_NEAR.log10(_DOWN.subtract(lk.lo, LOG10E.hi)))
    hi = (lk + lk.log10()).hi
    return BigMagnitude(2, bracket=Interval(_DOWN.plus(lo), hi))


def compare(a: BigMagnitude, b: BigMagnitude) -> str:
    """Less / Equal / Greater when certified, Incomparable when the brackets overlap."""
    if a.level == 0 and b.level == 0:
        return "Less" if a.exact < b.exact else "Greater" if a.exact > b.exact else "Equal"
    if max(a.level, b.level) <= 1 or _fits_l1(a) and _fits_l1(b):
        x, y = a.log10(), b.log10()
    else:
        x, y = a.log10log10(), b.log10log10()
    if x.hi < y.lo:
        return "Less"
    if x.lo > y.hi:
        return "Greater"
    return "Incomparable"


def bound_covers(bound: BigMagnitude, length: int) -> str:
    """'pass' if the run length is certified <= bound, 'fail' if certified >, else 'Incomparable'."""
    if length <= 1:
        return "pass" if bound.level > 0 or bound.exact >= length else "fail"
    res = compare(bound, BigMagnitude.of(length))
    if res in ("Greater", "Equal"):
        return "pass"
    if res == "Less":
        return "fail"
    return "Incomparable"


# ---------------------------------------------------------------------------
# the formulas


def _int_param(params, name, minimum=1) -> int:
    if name not in params:
        raise DomainError(f"missing parameter {name}")
    v = params[name]
    if isinstance(v, float) or int(v) != Fraction(v):
        raise DomainError(f"{name} must be an integer")
    v = int(v)
    if v < minimum:
        raise DomainError(f"{name} must be at least {minimum}")
    return v


def _rational_list(params, name) -> list[Fraction]:
    raw = params.get(name, [])
    if isinstance(raw, str):
        raw = [x for x in raw.split(",") if x.strip()]
    return [Fraction(str(x).strip()) if isinstance(x, str) else Fraction(x) for x in raw]


def _M_of_set(S: Sequence[Fraction]) -> int:
    S = sorted(set(S))
    if S[0] != 0 or S[-1] != 1:
        raise DomainError("S must contain 0 and 1")
    for a in S:
        for b in S:
            if a + b <= 1 and a + b not in S:
                raise DomainError(f"S is not closed under admissible sums ({a} + {b})")
    lo = min(x for x in S if x > 0)
    hi = max(x for x in S if x < 1)
    return (2 + math.ceil(1 / lo) * math.ceil(1 / (1 - hi))) * len(S)


def _tower_4fold(N: int) -> tuple[BigMagnitude, BigMagnitude]:
    M = mag_factorial(BigMagnitude.of((2 * N) ** 9))
    return M, mag_pow(M, M)


def explicit_bound(formula_id: str, params: Mapping) -> BigMagnitude:
    """Evaluate one of the explicit bounds; see FORMULAS for ids and parameters."""
    return explicit_bound_details(formula_id, params)["bound"]


def explicit_bound_details(formula_id: str, params: Mapping) -> dict:
    if formula_id not in FORMULAS:
        raise UnknownFormula(f"unknown formula {formula_id!r}; known: {', '.join(sorted(FORMULAS))}")
    return FORMULAS[formula_id][1](params)


def _cor_terminal(params) -> dict:
    b = _rational_list(params, "b")
    if any(not 0 < x < 1 for x in b):
        raise DomainError("coefficients must lie in (0, 1)")
    rd = _int_param(params, "rho_plus_d", 0)
    monoid = coefficient_monoid(b)
    M = theorem_M(monoid)
    k = monoid.k
    return {"M": BigMagnitude.of(M), "S": len(monoid.elements), "k": k, "bound": BigMagnitude.of(M ** (2 * k + 2) * rd)}


def _thm_4fold(params) -> dict:
    N = _int_param(params, "N")
    M, bound = _tower_4fold(N)
    return {"M": M, "M_factorial_of": (2 * N) ** 9, "bound": bound}


def _thm_3fold(params) -> dict:
    N = _int_param(params, "N")
    inner = mag_factorial(BigMagnitude.of(N**5 + 2 * N))
    M = mag_pow(inner, BigMagnitude.of(2 ** (N**4)))
    Mf = mag_factorial(M)
    base = mag_mul(BigMagnitude.of(N), Mf)
    if Mf.level == 0:
        expo = BigMagnitude.of(8 * N**8 * (Mf.exact + 1))
    else:
        # M! + 1 and M! agree to far beyond the bracket width; bracket (M!+1) by M! and 2 M!
        expo = mag_mul(BigMagnitude.of(8 * N**8), Mf)
        expo = _widen_upper(expo, Interval.point(2).log10())
    bound = mag_mul(BigMagnitude.of(3), mag_pow(base, expo))
    return {"M": M, "M_factorial": Mf, "bound": bound}


def _widen_upper(m: BigMagnitude, lg_factor: Interval) -> BigMagnitude:
    if m.level == 1:
        return BigMagnitude(1, bracket=Interval(m.bracket.lo, (m.bracket + lg_factor).hi))
    if m.level == 2:
        # log10(log10 x + c) <= log10 log10 x + c / (ln 10 log10 x); for log10 x >= 1 use c
        return BigMagnitude(2, bracket=Interval(m.bracket.lo, (m.bracket + lg_factor).hi))
    return m


def _cor_index(params) -> dict:
    n = _int_param(params, "n")
    N = _int_param(params, "N")
    arg = n**n * N ** (2 * n + 1)
    return {"factorial_of": arg, "bound": mag_factorial(BigMagnitude.of(arg))}


def _cor_index_3fold(params) -> dict:
    e = _int_param(params, "e", 0)
    if "eps" not in params:
        raise DomainError("missing parameter eps")
    eps = Fraction(str(params["eps"])) if not isinstance(params["eps"], Fraction) else params["eps"]
    if eps <= 0:
        raise DomainError("eps must be positive")
    m = math.ceil((e + 3) / eps)
    f = mag_factorial(BigMagnitude.of(m))
    return {"factorial_of": m, "bound": mag_pow(f, BigMagnitude.of(2 ** (1 + e))) if m > 1 else BigMagnitude.of(1)}


def _lemma_fix_discrep(params) -> dict:
    if "S" in params:
        S = _rational_list(params, "S")
    else:
        S = list(coefficient_monoid(_rational_list(params, "b")).elements)
    k = _int_param(params, "k", 0)
    s = _int_param(params, "s", 0)
    M = _M_of_set(S)
    expo = 2 * (k + 1) ** 2 * len(set(S))
    bound = mag_mul(mag_pow(BigMagnitude.of(M), BigMagnitude.of(expo)), BigMagnitude.of(s)) if s else BigMagnitude.of(0)
    return {"M": BigMagnitude.of(M), "exponent": expo, "bound": bound}


FORMULAS = {
    "cor_terminal": ("(2+ceil(1/b_k)ceil(1/(1-b_1)))^(2k+2) |S|^(2k+2) (rho+d); params b, rho_plus_d", _cor_terminal),
    "thm_4fold": ("M^M with M = ((2N)^9)!; params N", _thm_4fold),
    "thm_4fold_boundary": ("M^M with M = ((2N)^9)!, big boundary version; params N", _thm_4fold),
    "thm_3fold": ("3 (N M!)^(8 N^8 (M!+1)) with M = ((N^5+2N)!)^(2^(N^4)); params N", _thm_3fold),
    "cor_index_big_boundary": ("(n^n N^(2n+1))!; params n, N", _cor_index),
    "cor_index_big_canonical": ("(n^n N^(2n+1))!; params n, N", _cor_index),
    "cor_index_3fold": ("(ceil((e+3)/eps)!)^(2^(1+e)); params e, eps", _cor_index_3fold),
    "lemma_fix_discrep": ("M^(2(k+1)^2 |S|) s; params S (or b), k, s", _lemma_fix_discrep),
}


# ---------------------------------------------------------------------------
# volume chains at the fixed points


def verify_volume_bounds(p: ToricPair, H, tol: float = 1e-6) -> dict:
    """Check the local volume lower bounds at every torus-fixed point of a projective pair.

    Three chains are checked at each fixed point x:
      nvol(x, X) >= ceil((Delta.H^(n-1)) / (1 - max coeff))^(-n) vol(Delta),
      nvol(x, X, Delta) >= alpha(X, Delta; H)^n vol(H),
      Cartier index at x of every invariant divisor <= n^n / nvol(x, X).
    """
    p.require_projective()
    p.require_complete()
    h = _check_divisor(p, H)
    if not is_ample(p, h):
        raise NotAmple("polarization is not ample")
    n = p.rank
    vol_b = divisor_volume(p, p.coeffs)
    if vol_b <= 0:
        raise NotBig("boundary is not big")
    deg = intersection_with_power(p, p.coeffs, h)
    lower = admissible_volume_lower_bound(deg, max(p.coeffs), vol_b, n)
    alpha = alpha_invariant(p, h)
    prop = alpha**n * divisor_volume(p, h)
    points = []
    ok = True
    for c in p.max_cones:
        rays = [p.rays[i] for i in c]
        plain = minimize_nvol(ConeSingularity.of(rays), tol)
        with_b = minimize_nvol(ConeSingularity.of(rays, [p.coeffs[i] for i in c]), tol)
        v0 = float(plain.exact_value)
        vb = float(with_b.exact_value)
        index = max(local_cartier_index(p, [int(i == j) for j in range(len(p.rays))], c) for i in range(len(p.rays)))
        checks = {
            "lower_bound": v0 + tol >= float(lower),
            "alpha_volume": vb + tol >= float(prop),
            "index": index <= n**n / (v0 - tol),
        }
        ok &= all(checks.values())
        points.append({
            "cone": list(c),
            "nvol": str(plain.exact_value),
            "nvol_pair": str(with_b.exact_value),
            "index": index,
            "checks": checks,
        })
    return {
        "pass": ok,
        "lower_bound": str(lower),
        "alpha": str(alpha),
        "alpha_volume": str(prop),
        "points": points,
    }
