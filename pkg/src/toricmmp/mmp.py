"""Toric MMP: wall classification, extremal contractions, flips, runs and run enumeration.

Every interior wall of a simplicial fan gives an invariant curve whose class is
the vector of its intersection numbers with the invariant divisors.  That
vector is a linear relation among the rays of the wall's circuit.  Contracting
an extremal class removes the circuit triangulation that contains the negative
part of the relation and replaces it with the opposite one.
"""

from __future__ import annotations

import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Iterator, Sequence

from .kernel import in_cone_of
from .pair import Fan, NotProjective, ToricError, ToricPair, build_pair

FIBERING = "Fibering"
DIVISORIAL = "Divisorial"
FLIPPING = "Flipping"


class MmpError(ToricError):
    pass


class ZeroDegree(MmpError):
    pass


class PositiveDegree(MmpError):
    pass


class NotExtremal(MmpError):
    pass


class NotContractible(MmpError):
    pass


class LoopDetected(MmpError):
    pass


class BudgetExceeded(MmpError):
    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial


# ---------------------------------------------------------------------------
# walls


def _primitive_relation(values: Sequence[Fraction]) -> tuple[int, ...]:
    den = reduce(lambda a, b: a * b // math.gcd(a, b), (Fraction(x).denominator for x in values), 1)
    ints = [int(Fraction(x) * den) for x in values]
    g = reduce(math.gcd, ints, 0)
    return tuple(x // g for x in ints)


@dataclass(frozen=True)
class WallData:
    """An interior wall, the relation of its circuit and the (K+Delta)-degree of its curve."""

    wall: tuple[int, ...]
    sides: tuple[int, int]
    relation: tuple[int, ...]
    degree: Fraction
    kind: str
    extremal: bool

    @property
    def flop(self) -> bool:
        return self.degree == 0

    @property
    def positive(self) -> tuple[int, ...]:
        return tuple(i for i, r in enumerate(self.relation) if r > 0)

    @property
    def negative(self) -> tuple[int, ...]:
        return tuple(i for i, r in enumerate(self.relation) if r < 0)

    def to_json(self) -> dict:
        return {
            "wall": list(self.wall),
            "relation": list(self.relation),
            "degree": str(self.degree),
            "kind": self.kind,
            "flop": self.flop,
            "extremal": self.extremal,
        }


def _classify(relation: Sequence[int]) -> str:
    neg = sum(1 for r in relation if r < 0)
    if neg == 0:
        return FIBERING
    if neg == 1:
        return DIVISORIAL
    return FLIPPING


def mori_walls(p: ToricPair) -> list[WallData]:
    """Every interior wall with its relation, degree, type and extremality."""
    if not p.projective:
        raise NotProjective("wall classification needs a projective fan")
    kb = [b - 1 for b in p.coeffs]
    curves = p.fan.wall_curves
    rels = [_primitive_relation(c.intersections) for c in curves]
    classes = sorted(set(rels))
    extremal = {}
    for c in classes:
        others = [o for o in classes if o != c]
        extremal[c] = not in_cone_of(others, c)
    out = []
    for c, r in zip(curves, rels):
        out.append(WallData(c.wall, c.sides, r, c.degree(kb), _classify(r), extremal[r]))
    return out


def negative_classes(p: ToricPair) -> list[WallData]:
    """One representative wall per (K+Delta)-negative extremal class.

    Birational classes come first, then fibering ones, each ordered by wall.
    """
    seen = {}
    for w in mori_walls(p):
        if w.degree < 0 and w.extremal and w.relation not in seen:
            seen[w.relation] = w
    return sorted(seen.values(), key=lambda w: (w.kind == FIBERING, w.wall, w.relation))


# ---------------------------------------------------------------------------
# steps


@dataclass(frozen=True)
class MmpStep:
    kind: str
    contracted: WallData
    before: ToricPair
    after: ToricPair | None
    removed_ray: int | None = None

    @property
    def birational(self) -> bool:
        return self.after is not None

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "wall": list(self.contracted.wall),
            "relation": list(self.contracted.relation),
            "degree": str(self.contracted.degree),
            "removed_ray": self.removed_ray,
            "after": self.after.to_json() if self.after is not None else None,
        }


def _retriangulate(p: ToricPair, pos: Sequence[int], neg: Sequence[int]) -> list[tuple[int, ...]] | None:
    """Swap the circuit triangulation that contains ``neg`` for the one that contains ``pos``.

    Returns the new list of maximal cones, or None if the fan does not contain
    the required local triangulation.
    """
    circuit = set(pos) | set(neg)
    negset = set(neg)
    groups: dict[tuple[int, ...], set[int]] = {}
    kept = []
    for c in p.max_cones:
        s = set(c)
        if not negset <= s:
            kept.append(c)
            continue
        missing = circuit - s
        if len(missing) != 1:
            return None
        (k,) = missing
        if k not in pos:
            return None
        groups.setdefault(tuple(sorted(s - circuit)), set()).add(k)
    if not groups or any(ks != set(pos) for ks in groups.values()):
        return None
    new = list(kept)
    for tau in groups:
        for k in neg:
            new.append(tuple(sorted((circuit - {k}) | set(tau))))
    return new


def _contract(p: ToricPair, w: WallData) -> MmpStep:
    if w.kind == FIBERING:
        return MmpStep("MoriFiberSpace", w, p, None)
    cones = _retriangulate(p, w.positive, w.negative)
    if cones is None:
        raise NotContractible(f"class of wall {list(w.wall)} does not span a contractible circuit")
    rays = list(p.rays)
    coeffs = list(p.coeffs)
    removed = None
    if w.kind == DIVISORIAL:
        (removed,) = w.negative
        shift = {i: i - (i > removed) for i in range(len(rays)) if i != removed}
        cones = [tuple(sorted(shift[i] for i in c)) for c in cones]
        del rays[removed]
        del coeffs[removed]
    try:
        fan = Fan.build(p.rank, rays, cones, check_faces=False)
    except ToricError as exc:
        raise NotContractible(f"contraction of wall {list(w.wall)} is not a simplicial fan: {exc}") from exc
    if fan.complete != p.fan.complete:
        raise NotContractible("contraction changed the support of the fan")
    q = ToricPair(fan, tuple(coeffs), p.mode)
    if not q.projective:
        raise NotContractible("contraction is not projective")
    return MmpStep(DIVISORIAL if w.kind == DIVISORIAL else "Flip", w, p, q, removed)


def _resolve_target(p: ToricPair, target) -> WallData:
    walls = mori_walls(p)
    if isinstance(target, WallData):
        target = target.wall
    if isinstance(target, int):
        cands = [w for w in walls if w.negative == (target,)]
        if not cands:
            raise NotExtremal(f"no wall class contracts ray {target}")
        cands.sort(key=lambda w: (not w.extremal, w.degree >= 0, w.wall))
        return cands[0]
    key = tuple(sorted(int(i) for i in target))
    for w in walls:
        if w.wall == key:
            return w
    raise MmpError(f"{list(key)} is not an interior wall")


def mmp_step(p: ToricPair, target) -> MmpStep:
    """Contract the extremal class of a wall (or the divisorial class removing a ray index)."""
    w = _resolve_target(p, target)
    if w.degree == 0:
        raise ZeroDegree(f"wall {list(w.wall)} has degree 0 (a flop, not an MMP step)")
    if w.degree > 0:
        raise PositiveDegree(f"wall {list(w.wall)} has positive degree {w.degree}")
    if not w.extremal:
        raise NotExtremal(f"class of wall {list(w.wall)} is not extremal")
    return _contract(p, w)


def flip_circuit(p: ToricPair, relation: Sequence[int]) -> ToricPair:
    """Replace the triangulation of a circuit by the opposite one, ignoring degrees.

    Whichever of the two triangulations is present gets swapped, so applying
    this twice with the same relation returns the original fan.
    """
    pos = tuple(i for i, r in enumerate(relation) if r > 0)
    neg = tuple(i for i, r in enumerate(relation) if r < 0)
    if len(pos) < 2 or len(neg) < 2:
        raise MmpError("a flip circuit needs at least two rays on each side")
    cones = _retriangulate(p, pos, neg)
    if cones is None:
        cones = _retriangulate(p, neg, pos)
    if cones is None:
        raise NotContractible("neither triangulation of the circuit is present")
    return ToricPair(Fan.build(p.rank, p.rays, cones, check_faces=False), p.coeffs, p.mode)


# ---------------------------------------------------------------------------
# runs


@dataclass(frozen=True)
class MmpRun:
    initial: ToricPair
    steps: tuple[MmpStep, ...]
    outcome: str
    strategy: str = "first"
    seed: int | None = None

    @property
    def final(self) -> ToricPair:
        for s in reversed(self.steps):
            if s.after is not None:
                return s.after
        return self.initial

    @property
    def birational_steps(self) -> tuple[MmpStep, ...]:
        return tuple(s for s in self.steps if s.after is not None)

    def pairs(self) -> list[ToricPair]:
        """The initial pair followed by the result of every birational step."""
        return [self.initial] + [s.after for s in self.steps if s.after is not None]

    def to_json(self) -> dict:
        return {
            "strategy": self.strategy,
            "seed": self.seed,
            "outcome": self.outcome,
            "length": len(self.birational_steps),
            "steps": [s.to_json() for s in self.steps],
        }


def _choose(classes: list[WallData], strategy: str, rng: random.Random, index: int) -> WallData:
    if strategy == "first":
        return classes[0]
    if strategy == "random":
        return rng.choice(classes)
    if strategy == "index":
        return classes[index % len(classes)]
    raise MmpError(f"unknown strategy {strategy!r}")


def mmp_run(p: ToricPair, strategy: str = "first", seed: int | None = None, index: int = 0, budget: int = 10_000) -> MmpRun:
    """Run the MMP until no negative class remains or a Mori fiber space is reached."""
    p.require_projective()
    rng = random.Random(seed)
    steps: list[MmpStep] = []
    cur = p
    while True:
        classes = negative_classes(cur)
        if not classes:
            return MmpRun(p, tuple(steps), "MinimalModel", strategy, seed)
        if len(steps) >= budget:
            partial = MmpRun(p, tuple(steps), "Incomplete", strategy, seed)
            raise BudgetExceeded(f"run not finished after {budget} steps", partial)
        step = _contract(cur, _choose(classes, strategy, rng, index))
        steps.append(step)
        if step.after is None:
            return MmpRun(p, tuple(steps), "MoriFiberSpace", strategy, seed)
        cur = step.after


# ---------------------------------------------------------------------------
# canonical forms and enumeration


def _is_automorphism(p: ToricPair, perm: tuple[int, ...], signs: tuple[int, ...]) -> bool:
    """Whether the signed coordinate permutation maps the pair onto itself."""
    index = {(r, b): i for i, (r, b) in enumerate(zip(p.rays, p.coeffs))}
    image = []
    for r, b in zip(p.rays, p.coeffs):
        j = index.get((tuple(signs[k] * r[perm[k]] for k in range(p.rank)), b))
        if j is None:
            return False
        image.append(j)
    cones = {frozenset(c) for c in p.max_cones}
    return all(frozenset(image[i] for i in c) in cones for c in p.max_cones)


def canonical_form(p: ToricPair) -> tuple:
    """Lexicographically smallest ray matrix over coordinate permutations and sign changes.

    Rows are (coefficient, ray) sorted, and the matrix is compared column by column,
    so the first k columns depend only on the first k chosen coordinates and the
    search can discard every partial choice that is already larger. Coordinates
    whose swap is an automorphism of the pair give identical subtrees, as do sign
    changes that are automorphisms, so only one branch of each is explored. Ties
    on the matrix are broken by the sorted cone list.
    """
    n, m = p.rank, len(p.rays)
    ident = tuple(range(n))
    cls = list(range(n))
    for i in range(n):
        for j in range(i):
            if cls[j] == j:
                perm = list(ident)
                perm[i], perm[j] = j, i
                if _is_automorphism(p, tuple(perm), (1,) * n):
                    cls[i] = j
                    break
    free_sign = {i for i in range(n) if _is_automorphism(p, ident, tuple(-1 if k == i else 1 for k in range(n)))}
    # a state is the chosen (coordinate, sign) list and the row prefixes it produces
    states = [((), [(b,) for b in p.coeffs])]
    for _ in range(n):
        best = None
        nxt = []
        for chosen, rows in states:
            used = {c for c, _ in chosen}
            seen = set()
            for c in range(n):
                if c in used or cls[c] in seen:
                    continue
                seen.add(cls[c])
                for s in (1,) if c in free_sign else (1, -1):
                    new_rows = [row + (s * r[c],) for row, r in zip(rows, p.rays)]
                    col = tuple(row[-1] for row in sorted(new_rows))
                    if best is None or col < best:
                        best, nxt = col, []
                    if col == best:
                        nxt.append((chosen + ((c, s),), new_rows))
        states = nxt
    result = None
    for _, rows in states:
        order = sorted(range(m), key=lambda i: rows[i])
        pos = {old: new for new, old in enumerate(order)}
        key = (
            tuple((rows[i][1:], rows[i][0]) for i in order),
            tuple(sorted(tuple(sorted(pos[i] for i in c)) for c in p.max_cones)),
        )
        if result is None or key < result:
            result = key
    return (p.mode,) + result


@dataclass
class RunEnumeration:
    """All MMP runs from a pair, stored as a DAG over canonical forms.

    Each edge is one MMP step computed on the node's representative pair.
    Runs are the maximal paths from the root; consecutive steps chain up to
    lattice automorphism.
    """

    root: tuple
    pairs: dict = field(default_factory=dict)
    edges: dict = field(default_factory=dict)
    steps_computed: int = 0

    def children(self, key) -> list[tuple[MmpStep, tuple | None]]:
        return self.edges[key]

    def all_steps(self) -> Iterator[MmpStep]:
        for key in sorted(self.edges, key=repr):
            for step, _ in self.edges[key]:
                yield step

    def count_runs(self) -> int:
        memo: dict = {}

        def count(key) -> int:
            if key not in memo:
                out = self.edges[key]
                memo[key] = 1 if not out else sum(1 if child is None else count(child) for _, child in out)
            return memo[key]

        return count(self.root)

    def max_length(self) -> int:
        memo: dict = {}

        def longest(key) -> int:
            if key not in memo:
                memo[key] = max((1 + longest(c) for _, c in self.edges[key] if c is not None), default=0)
            return memo[key]

        return longest(self.root)

    def runs(self, limit: int | None = None) -> Iterator[MmpRun]:
        produced = 0
        stack: list[tuple[tuple, tuple[MmpStep, ...]]] = [(self.root, ())]
        while stack:
            key, path = stack.pop()
            out = self.edges[key]
            if not out:
                yield MmpRun(self.pairs[self.root], path, "MinimalModel", "enumerate")
                produced += 1
            for step, child in reversed(out):
                if child is None:
                    yield MmpRun(self.pairs[self.root], path + (step,), "MoriFiberSpace", "enumerate")
                    produced += 1
                else:
                    stack.append((child, path + (step,)))
                if limit is not None and produced >= limit:
                    return
            if limit is not None and produced >= limit:
                return

    def __iter__(self) -> Iterator[MmpRun]:
        return self.runs()

    def __len__(self) -> int:
        return self.count_runs()

    def merge(self, other: "RunEnumeration") -> None:
        self.pairs.update(other.pairs)
        self.edges.update(other.edges)
        self.steps_computed += other.steps_computed


def _explore(p: ToricPair, key: tuple, budget: int) -> RunEnumeration:
    enum = RunEnumeration(key)
    enum.pairs[key] = p
    onstack = set()

    def visit(node: tuple) -> None:
        if node in enum.edges:
            return
        onstack.add(node)
        out = []
        for w in negative_classes(enum.pairs[node]):
            if enum.steps_computed >= budget:
                raise BudgetExceeded(f"enumeration exceeded {budget} steps", enum)
            step = _contract(enum.pairs[node], w)
            enum.steps_computed += 1
            if step.after is None:
                out.append((step, None))
                continue
            child = canonical_form(step.after)
            if child in onstack:
                raise LoopDetected(f"MMP returned to an isomorphic pair after {len(onstack)} steps")
            enum.pairs.setdefault(child, step.after)
            out.append((step, child))
            visit(child)
        enum.edges[node] = out
        onstack.discard(node)

    visit(key)
    return enum


def _explore_job(args):
    p, key, budget = args
    return _explore(p, key, budget)


def enumerate_runs(p: ToricPair, budget: int = 10_000, jobs: int = 1) -> RunEnumeration:
    """Depth-first enumeration of every MMP run, branching over all negative extremal classes."""
    p.require_projective()
    root = canonical_form(p)
    if jobs <= 1:
        return _explore(p, root, budget)
    enum = RunEnumeration(root)
    enum.pairs[root] = p
    out = []
    for w in negative_classes(p):
        if enum.steps_computed >= budget:
            raise BudgetExceeded(f"enumeration exceeded {budget} steps", enum)
        step = _contract(p, w)
        enum.steps_computed += 1
        child = None if step.after is None else canonical_form(step.after)
        out.append((step, child))
    enum.edges[root] = out
    todo = {}
    for step, child in out:
        if child is not None and child not in todo:
            todo[child] = step.after
    remaining = budget - enum.steps_computed
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        results = list(pool.map(_explore_job, [(q, k, remaining) for k, q in todo.items()]))
    for sub in results:
        if root in sub.edges:
            raise LoopDetected("MMP returned to the initial pair")
        for k, q in sub.pairs.items():
            enum.pairs.setdefault(k, q)
        for k, e in sub.edges.items():
            enum.edges.setdefault(k, e)
        enum.steps_computed += sub.steps_computed
    if enum.steps_computed > budget:
        raise BudgetExceeded(f"enumeration exceeded {budget} steps", enum)
    return enum


# ---------------------------------------------------------------------------
# the line bundle O(-1,-2) over P^m x P^n


def line_bundle_flip_pair(m: int, n: int, side: int = 1) -> ToricPair:
    """A small modification of the contraction of the zero section of O(-1,-2) over P^m x P^n.

    The circuit splits into I_a (rays of the P^m factor lifted with height 1)
    and I_b (rays of the P^n factor lifted with height 2), with relation
    sum(I_b) = 2 sum(I_a).  Side 1 uses the cones containing all of I_a and
    is smooth.  Side 2 uses the cones containing all of I_b.
    """
    dim = m + n + 1
    rays = []
    for i in range(m):
        rays.append(tuple(int(j == i) for j in range(dim)))
    rays.append(tuple([-1] * m + [0] * n + [1]))
    for i in range(n):
        rays.append(tuple(int(j == m + i) for j in range(dim)))
    rays.append(tuple([0] * m + [-1] * n + [2]))
    ia = list(range(m + 1))
    ib = list(range(m + 1, m + n + 2))
    circuit = set(ia) | set(ib)
    drop = ib if side == 1 else ia
    cones = [tuple(sorted(circuit - {k})) for k in drop]
    return build_pair((dim, rays, cones), None, require_complete=False)
