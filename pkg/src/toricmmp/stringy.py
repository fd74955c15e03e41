"""Stringy E-functions of toric sub-pairs as exact rational functions in a fractional power of t.

On a smooth fan the strata are torus orbits O(tau), with Hodge-Deligne
polynomial (t-1)^(n - dim tau).  For a crepant smooth subdivision carrying log
discrepancies A_rho the function is

    E = sum over cones tau of (t-1)^(n - dim tau) * prod_{rho in tau} (t-1)/(t^A_rho - 1).

A second, resolution-free evaluation sums t^(-A(v)) over all lattice points of
the support, cone by cone, using relative-interior box points.  The two agree,
which is what the tests use as an oracle.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, reduce
from math import gcd
from typing import Iterable, Sequence

from .kernel import box_points, det, primitive, solve
from .pair import ToricPair

from .nvol import NotKlt

Poly = tuple[int, ...]


# ---------------------------------------------------------------------------
# dense integer polynomials (index = exponent)


def _trim(a: Sequence) -> tuple:
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return tuple(a)


def _add(a: Sequence, b: Sequence) -> tuple:
    n = max(len(a), len(b))
    return _trim([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)])


def _neg(a: Sequence) -> tuple:
    return tuple(-x for x in a)


def _mul(a: Sequence, b: Sequence) -> tuple:
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] += x * y
    return _trim(out)


def _pow(a: Sequence, k: int) -> tuple:
    out: tuple = (1,)
    for _ in range(k):
        out = _mul(out, a)
    return out


def _divmod(a: Sequence, b: Sequence) -> tuple[tuple, tuple]:
    """Polynomial division over the rationals."""
    a = [Fraction(x) for x in a]
    b = [Fraction(x) for x in _trim(b)]
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    while len(_trim(a)) >= len(b):
        a = list(_trim(a))
        shift = len(a) - len(b)
        f = a[-1] / b[-1]
        q[shift] = f
        for i, y in enumerate(b):
            a[i + shift] -= f * y
    return _trim(q), _trim(a)


def _gcd(a: Sequence, b: Sequence) -> tuple:
    a, b = _trim(a), _trim(b)
    while b:
        _, r = _divmod(a, b)
        a, b = b, r
    return a


def _spread(a: Sequence, k: int) -> tuple:
    """Substitute s -> s^k."""
    if k == 1 or not a:
        return tuple(a)
    out = [0] * ((len(a) - 1) * k + 1)
    for i, x in enumerate(a):
        out[i * k] = x
    return tuple(out)


def _eval(a: Sequence, x) -> Fraction:
    return sum((Fraction(c) * Fraction(x) ** i for i, c in enumerate(a) if c), Fraction(0))


@lru_cache(maxsize=None)
def cyclotomic(d: int) -> Poly:
    num = tuple([-1] + [0] * (d - 1) + [1])
    for e in range(1, d):
        if d % e == 0:
            num, r = _divmod(num, cyclotomic(e))
            assert not r
    return tuple(int(x) for x in num)


def _divisors(e: int) -> list[int]:
    return [d for d in range(1, e + 1) if e % d == 0]


# ---------------------------------------------------------------------------
# the value type


@dataclass(frozen=True)
class FracPowerRationalFunction:
    """num(s) / den(s) with s = t^(1/l), stored in lowest terms."""

    l: int
    num: Poly
    den: Poly

    @staticmethod
    def make(l: int, num: Sequence, den: Sequence) -> "FracPowerRationalFunction":
        num, den = _trim(num), _trim(den)
        if not den:
            raise ZeroDivisionError("zero denominator")
        if not num:
            return FracPowerRationalFunction(1, (), (1,))
        g = _gcd(num, den)
        if len(g) > 1:
            num, _ = _divmod(num, g)
            den, _ = _divmod(den, g)
        # clear denominators, remove content, make the denominator's leading coefficient positive
        fr = [Fraction(x) for x in num] + [Fraction(x) for x in den]
        m = reduce(lambda a, b: a * b // gcd(a, b), (x.denominator for x in fr), 1)
        ints = [int(x * m) for x in fr]
        c = reduce(gcd, ints, 0)
        if ints[-1] < 0:
            c = -c
        ints = [x // c for x in ints]
        num, den = tuple(ints[: len(num)]), tuple(ints[len(num):])
        # smallest l
        exps = [i for i, x in enumerate(num) if x] + [i for i, x in enumerate(den) if x]
        k = reduce(gcd, exps + [l], 0)
        if k > 1:
            num = tuple(num[i] for i in range(0, len(num), k))
            den = tuple(den[i] for i in range(0, len(den), k))
            l //= k
        return FracPowerRationalFunction(l, num, den)

    @staticmethod
    def polynomial(terms: dict) -> "FracPowerRationalFunction":
        """From a mapping exponent (rational) -> integer coefficient."""
        exps = {Fraction(e): c for e, c in terms.items()}
        l = reduce(lambda a, b: a * b // gcd(a, b), (e.denominator for e in exps), 1)
        top = max((int(e * l) for e in exps), default=0)
        num = [0] * (top + 1)
        for e, c in exps.items():
            num[int(e * l)] += c
        return FracPowerRationalFunction.make(l, num, (1,))

    def _lift(self, l: int) -> tuple[Poly, Poly]:
        k = l // self.l
        return _spread(self.num, k), _spread(self.den, k)

    def __sub__(self, other: "FracPowerRationalFunction") -> "FracPowerRationalFunction":
        l = self.l * other.l // gcd(self.l, other.l)
        an, ad = self._lift(l)
        bn, bd = other._lift(l)
        return FracPowerRationalFunction.make(l, _add(_mul(an, bd), _neg(_mul(bn, ad))), _mul(ad, bd))

    def __add__(self, other: "FracPowerRationalFunction") -> "FracPowerRationalFunction":
        l = self.l * other.l // gcd(self.l, other.l)
        an, ad = self._lift(l)
        bn, bd = other._lift(l)
        return FracPowerRationalFunction.make(l, _add(_mul(an, bd), _mul(bn, ad)), _mul(ad, bd))

    def is_polynomial(self) -> bool:
        return self.den == (1,)

    def at_one(self) -> Fraction:
        """The t -> 1 value, which is finite whenever the denominator does not vanish at 1."""
        d = _eval(self.den, 1)
        if d == 0:
            raise ZeroDivisionError("pole at t = 1")
        return _eval(self.num, 1) / d

    def terms(self) -> list[tuple[int, Fraction]]:
        return [(c, Fraction(i, self.l)) for i, c in enumerate(self.num) if c]

    def to_json(self) -> dict:
        return {
            "l": self.l,
            "num": [[c, i] for i, c in enumerate(self.num) if c],
            "den": [[c, i] for i, c in enumerate(self.den) if c],
        }

    @staticmethod
    def from_json(data: dict) -> "FracPowerRationalFunction":
        def dense(pairs):
            top = max((int(e) for _, e in pairs), default=-1)
            out = [0] * (top + 1)
            for c, e in pairs:
                out[int(e)] += int(c)
            return out

        return FracPowerRationalFunction.make(int(data["l"]), dense(data["num"]), dense(data["den"]))

    def __str__(self) -> str:
        def show(poly):
            parts = []
            for i in range(len(poly) - 1, -1, -1):
                c = poly[i]
                if not c:
                    continue
                e = Fraction(i, self.l)
                mono = "" if e == 0 else "t" if e == 1 else f"t^{e}" if e.denominator == 1 else f"t^({e})"
                coef = str(abs(c)) if (abs(c) != 1 or not mono) else ""
                sign = "-" if c < 0 else "+"
                parts.append((sign, coef + ("*" if coef and mono else "") + mono))
            if not parts:
                return "0"
            text = ("-" if parts[0][0] == "-" else "") + parts[0][1]
            for sign, body in parts[1:]:
                text += f" {sign} {body}"
            return text

        if self.is_polynomial():
            return show(self.num)
        return f"({show(self.num)}) / ({show(self.den)})"


def asymptotic_compare(f: FracPowerRationalFunction, g: FracPowerRationalFunction) -> str:
    """Sign of f - g as t -> +infinity."""
    l = f.l * g.l // gcd(f.l, g.l)
    fn, fd = f._lift(l)
    gn, gd = g._lift(l)
    diff = _add(_mul(fn, gd), _neg(_mul(gn, fd)))
    if not diff:
        return "Equal"
    sign = (diff[-1] > 0) == (_mul(fd, gd)[-1] > 0)
    return "Greater" if sign else "Less"


# ---------------------------------------------------------------------------
# sums of cone terms


def _cone_sum(l: int, terms: Iterable[tuple[Poly, tuple[int, ...]]], n: int) -> FracPowerRationalFunction:
    """(s^l - 1)^n * sum numerator / prod_{e in exps} (s^e - 1)."""
    grouped: dict[tuple[int, ...], tuple] = {}
    for numer, exps in terms:
        key = tuple(sorted(exps))
        grouped[key] = _add(grouped.get(key, ()), numer)
    need: dict[int, int] = {}
    for key in grouped:
        counts: dict[int, int] = {}
        for e in key:
            for d in _divisors(e):
                counts[d] = counts.get(d, 0) + 1
        for d, c in counts.items():
            need[d] = max(need.get(d, 0), c)
    total: tuple = ()
    for key, numer in grouped.items():
        have: dict[int, int] = {}
        for e in key:
            for d in _divisors(e):
                have[d] = have.get(d, 0) + 1
        factor: tuple = (1,)
        for d, k in need.items():
            factor = _mul(factor, _pow(cyclotomic(d), k - have.get(d, 0)))
        total = _add(total, _mul(numer, factor))
    den: tuple = (1,)
    for d, k in sorted(need.items()):
        den = _mul(den, _pow(cyclotomic(d), k))
    base = tuple([-1] + [0] * (l - 1) + [1])
    return FracPowerRationalFunction.make(l, _mul(_pow(base, n), total), den)


def _lcm_den(values: Iterable[Fraction]) -> int:
    return reduce(lambda a, b: a * b // gcd(a, b), (Fraction(v).denominator for v in values), 1)


# ---------------------------------------------------------------------------
# smooth subdivisions


def _check(p: ToricPair) -> list[Fraction]:
    p.require_complete()
    A = [1 - b for b in p.coeffs]
    bad = [i for i, a in enumerate(A) if a <= 0]
    if bad:
        raise NotKlt(f"ray {bad[0]} has log discrepancy {A[bad[0]]} <= 0")
    return A


def smooth_subdivision(p: ToricPair, strategy: str = "first", seed: int | None = None):
    """A crepant smooth star subdivision: returns (rays, maximal cones, log discrepancies)."""
    A = _check(p)
    rays = list(p.rays)
    cones = [tuple(c) for c in p.max_cones]
    rng = random.Random(seed)
    while True:
        singular = sorted(c for c in cones if abs(det([rays[i] for i in c])) > 1)
        if not singular:
            return rays, cones, A
        c = singular[0] if strategy == "first" else rng.choice(singular)
        pts = [q for q in box_points([rays[i] for i in c]) if any(q)]
        q = pts[0] if strategy == "first" else rng.choice(pts)
        v = primitive(q)
        lam = solve([list(col) for col in zip(*[rays[i] for i in c])], v)
        tau = {i for i, x in zip(c, lam) if x > 0}
        a = sum((x * A[i] for i, x in zip(c, lam)), Fraction(0))
        new = len(rays)
        rays.append(v)
        A.append(a)
        out = []
        for d in cones:
            if tau <= set(d):
                out += [tuple(sorted([j for j in d if j != i] + [new])) for i in tau]
            else:
                out.append(d)
        cones = out


def stringy_E(p: ToricPair, strategy: str = "first", seed: int | None = None) -> FracPowerRationalFunction:
    """Stringy E-function in t = uv, computed on a smooth crepant subdivision."""
    rays, cones, A = smooth_subdivision(p, strategy, seed)
    n = p.rank
    l = _lcm_den(A)
    e = [int(a * l) for a in A]
    faces = set()
    for c in cones:
        for mask in range(1 << n):
            faces.add(tuple(c[i] for i in range(n) if mask >> i & 1))
    return _cone_sum(l, (((1,), tuple(e[i] for i in f)) for f in faces), n)


def stringy_E_lattice(p: ToricPair) -> FracPowerRationalFunction:
    """(t-1)^n times the sum of t^(-A(v)) over all lattice points v, without resolving."""
    A = _check(p)
    n = p.rank
    fan = p.fan
    raw = []
    for k in range(n + 1):
        for tau in sorted(fan.cones_by_dim[k]):
            if not tau:
                raw.append(({Fraction(0): 1}, ()))
                continue
            host = next(c for c in fan.max_cones if set(tau) <= set(c))
            weights: dict[Fraction, int] = {}
            for b in box_points([fan.rays[i] for i in tau]):
                lam = dict(zip(host, fan.coordinates(host, b)))
                expo = sum(((1 - lam[i]) * A[i] for i in tau if lam[i] > 0), Fraction(0))
                weights[expo] = weights.get(expo, 0) + 1
            raw.append((weights, tuple(A[i] for i in tau)))
    l = _lcm_den([e for w, _ in raw for e in w] + A)
    terms = []
    for weights, avals in raw:
        top = max(int(e * l) for e in weights)
        numer = [0] * (top + 1)
        for e, c in weights.items():
            numer[int(e * l)] += c
        terms.append((tuple(numer), tuple(int(a * l) for a in avals)))
    return _cone_sum(l, terms, n)


def poincare_polynomial(p: ToricPair) -> FracPowerRationalFunction:
    """Sum of b_2k t^k from the h-vector of a complete simplicial fan."""
    from .pair import h_vector

    h = h_vector(p.fan)
    return FracPowerRationalFunction.make(1, h, (1,))


# ---------------------------------------------------------------------------
# no-loop certificate


def verify_no_loop(run, strategy: str = "first") -> dict:
    """Stringy E along a run: strict decrease at each birational step and pairwise distinctness.

    ``run`` is an MmpRun or a plain list of pairs (a run record).
    """
    pairs = run.pairs() if hasattr(run, "pairs") else list(run)
    values = [stringy_E(q, strategy) for q in pairs]
    comparisons = []
    ok = True
    for i in range(len(values) - 1):
        res = asymptotic_compare(values[i], values[i + 1])
        comparisons.append({"step": i, "result": res})
        ok &= res == "Greater"
    duplicates = []
    first_seen: dict = {}
    for i, v in enumerate(values):
        if v in first_seen:
            duplicates.append({"index": i, "duplicate_of": first_seen[v]})
        else:
            first_seen[v] = i
    return {
        "pass": ok and not duplicates,
        "values": [str(v) for v in values],
        "comparisons": comparisons,
        "duplicates": duplicates,
    }
