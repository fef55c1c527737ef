"""The pattern calculus: relative representation, pattern extraction and
equivalence, the next/reset transformers, pattern rings, and the rewriting
of clock constraints into integral atoms plus fractional orderings fixed by
a pattern.

A pattern abstracts the fractional parts of an initialized valuation pair
(v0, v1): it is the ordered partition of the tagged indices i^0 (clocks of
v0) and i^1 (clocks of v1) by the cyclic order of their fractional values in
the relative representation.  Synchronous progress leaves every relative
fraction fixed except the now marker 0^1, which sweeps downward; that single
moving point is what makes the calculus finite.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Optional, Sequence

from .constraints import (
    And,
    AtomDiff,
    AtomUnary,
    BoolLit,
    ClockConstraint,
    DiscreteConstraint,
    Not,
    Or,
)
from .model import (
    ClockValuation,
    DiscreteValuation,
    Pattern,
    Position,
    TaggedIndex,
    fractional,
    integral,
    make_position,
    rat,
    split,
    validate_pattern,
)

NOW = TaggedIndex(0, 1)


def relative_representation(v: ClockValuation) -> ClockValuation:
    """Re-anchor fractional parts by the complement of clock 0's fraction.

    Integral parts are unchanged; clock 0's new fraction is frac(1 - frac(v0))
    and every other clock's fraction is rotated by that amount (mod 1).  Under
    synchronous progress the rotated fractions of clocks 1..k stay fixed.
    """
    ints = [integral(x) for x in v.values]
    fracs = [fractional(x) for x in v.values]
    anchor = fractional(1 - fracs[0])
    out = [ints[0] + anchor]
    for i in range(1, len(v.values)):
        out.append(ints[i] + fractional(fracs[i] + anchor))
    return ClockValuation(tuple(out))


def _relative_fracs(v0: ClockValuation, v1: ClockValuation) -> dict[TaggedIndex, Fraction]:
    """Relative fractional value of every tagged index of the pair."""
    if not v0.is_initial:
        raise ValueError("the first valuation of an initialized pair must have x0 = 0")
    if v0.k != v1.k:
        raise ValueError("valuations have different clock counts")
    r0 = relative_representation(v0)
    r1 = relative_representation(v1)
    vals: dict[TaggedIndex, Fraction] = {}
    for i in range(v0.k + 1):
        vals[TaggedIndex(i, 0)] = fractional(r0[i])
        vals[TaggedIndex(i, 1)] = fractional(r1[i])
    return vals


def pattern_of(v0: ClockValuation, v1: ClockValuation) -> Pattern:
    """The pattern of an initialized pair: group tagged indices by equal
    relative fraction, ordered by increasing value."""
    vals = _relative_fracs(v0, v1)
    groups: dict[Fraction, list[TaggedIndex]] = {}
    for idx, val in vals.items():
        groups.setdefault(val, []).append(idx)
    ordered = [groups[val] for val in sorted(groups)]
    return Pattern.of(ordered)


def init_pattern(eta: Pattern) -> Pattern:
    """The pattern of (v0, v0) for any v0 whose pair realizes eta: relocate
    each i^1 to the position of i^0 and drop emptied positions."""
    homes = {t.clock: m for m, pos in enumerate(eta.positions) for t in pos if t.tag == 0}
    groups: list[list[TaggedIndex]] = [
        [t for t in pos if t.tag == 0] for pos in eta.positions
    ]
    for m, pos in enumerate(eta.positions):
        for t in pos:
            if t.tag == 1:
                groups[homes[t.clock]].append(t)
    return Pattern.of(g for g in groups if g)


def equivalent(
    pair1: tuple[ClockValuation, ClockValuation],
    pair2: tuple[ClockValuation, ClockValuation],
) -> bool:
    """The pattern-and-integral-parts equivalence on initialized pairs."""
    (a0, a1), (b0, b1) = pair1, pair2
    if not a0.is_initial or not b0.is_initial:
        raise ValueError("equivalence is defined on initialized pairs only")
    if a0.integral_parts() != b0.integral_parts():
        return False
    if a1.integral_parts() != b1.integral_parts():
        return False
    return pattern_of(a0, a1) == pattern_of(b0, b1)


@dataclass(frozen=True)
class PatternClass:
    regulated: bool
    merge: bool
    split: bool
    now_index: int


def classify(eta: Pattern) -> PatternClass:
    """Regulated / merge / split classification plus the now-position index."""
    i = eta.now_index
    merge = len(eta.positions[i]) == 1
    return PatternClass(regulated=(i == 0), merge=merge, split=not merge, now_index=i)


def increment_vector(eta: Pattern) -> tuple[int, ...]:
    """The 0/1 vector added to the discrete clocks by one application of next.

    Nonzero only for merge-patterns: the clocks whose i^1 sits in the position
    the now marker merges into get +1, and clock 0 gets +1 exactly when that
    position is p0.
    """
    k = eta.k
    i = eta.now_index
    delta = [0] * (k + 1)
    if len(eta.positions[i]) == 1 and i > 0:
        for t in eta.positions[i - 1]:
            if t.tag == 1 and t.clock != 0:
                delta[t.clock] = 1
        if i == 1:
            delta[0] = 1
    return tuple(delta)


@dataclass(frozen=True)
class NextResult:
    pattern: Pattern
    discrete: DiscreteValuation
    increment: tuple[int, ...]


def next_pattern(eta: Pattern, u: DiscreteValuation) -> NextResult:
    """One pattern change under clock progress.

    Merge case (now-position is the singleton {0^1} at i > 0): 0^1 joins the
    previous position and the clocks landing on integral values get +1.
    Split case (now-position shared): 0^1 is extracted into its own position
    just below the remainder, or wraps to the end when the now-position is p0.
    """
    i = eta.now_index
    pos = list(eta.positions)
    delta = increment_vector(eta)
    if len(pos[i]) == 1 and i > 0:
        new = pos[:i - 1] + [make_position(pos[i - 1] + (NOW,))] + pos[i + 1:]
    else:
        rest = make_position(t for t in pos[i] if t != NOW)
        if i > 0:
            new = pos[:i] + [(NOW,), rest] + pos[i + 1:]
        else:
            new = [rest] + pos[1:] + [(NOW,)]
    return NextResult(Pattern(tuple(new)), u.add(delta), delta)


def next_of(eta: Pattern) -> Pattern:
    """The next pattern alone (the increment vector depends only on eta)."""
    return next_pattern(eta, DiscreteValuation.zero(eta.k)).pattern


def reset_pattern(
    eta: Pattern, u: DiscreteValuation, r: Iterable[int]
) -> tuple[Pattern, DiscreteValuation]:
    """Bring every j^1 with j in r into the now-position; zero those clocks."""
    rs = frozenset(r)
    if 0 in rs:
        raise ValueError("the auxiliary clock x0 can never be reset")
    for j in rs:
        if not 1 <= j <= eta.k:
            raise ValueError("reset index %d out of range 1..%d" % (j, eta.k))
    moved = {TaggedIndex(j, 1) for j in rs}
    i = eta.now_index
    groups: list[Position] = []
    for m, pos in enumerate(eta.positions):
        if m == i:
            groups.append(make_position(tuple(t for t in pos if t not in moved) + tuple(sorted(moved))))
        else:
            kept = tuple(t for t in pos if t not in moved)
            if kept:
                groups.append(make_position(kept))
    return Pattern(tuple(groups)), u.reset(rs)


def reset_of(eta: Pattern, r: Iterable[int]) -> Pattern:
    return reset_pattern(eta, DiscreteValuation.zero(eta.k), r)[0]


def pattern_ring(eta: Pattern) -> tuple[Pattern, ...]:
    """The cycle eta, Next(eta), ... back to eta; length 2n for merge-patterns
    and 2(n+1) for split-patterns, all intermediate patterns distinct."""
    ring = [eta]
    cur = next_of(eta)
    while cur != eta:
        ring.append(cur)
        cur = next_of(cur)
    ring.append(eta)
    n = eta.n
    expect = 2 * n if classify(eta).merge else 2 * (n + 1)
    assert len(ring) - 1 == expect, "ring length %d != %d" % (len(ring) - 1, expect)
    return tuple(ring)


# --- constraint rewriting ---------------------------------------------------


@dataclass(frozen=True)
class FracAtom:
    """A fractional ordering atom over the current valuation's clocks.

    kind 'lt'/'eq' compare frac(x_i) with frac(x_j); kinds 'gt0'/'eq0'
    compare frac(x_i) with zero (j is unused there).
    """

    kind: str
    i: int
    j: int = 0

    def __post_init__(self) -> None:
        if self.kind not in ("lt", "eq", "gt0", "eq0"):
            raise ValueError("bad fractional atom kind %r" % self.kind)


# a rewritten constraint is a Boolean tree whose leaves are either discrete
# atoms over the integral parts (AtomUnary/AtomDiff), FracAtoms, or literals
RewrittenConstraint = object


def _frac_le(i: int, j: int) -> RewrittenConstraint:
    return Or(FracAtom("lt", i, j), FracAtom("eq", i, j))


def rewrite_constraint(c: ClockConstraint) -> RewrittenConstraint:
    """Expand each atom into integral-part comparisons and fractional
    orderings; satisfaction is preserved when the pieces are evaluated
    against the split of the same valuation."""
    if isinstance(c, BoolLit):
        return c
    if isinstance(c, Not):
        return Not(rewrite_constraint(c.arg))
    if isinstance(c, And):
        return And(rewrite_constraint(c.left), rewrite_constraint(c.right))
    if isinstance(c, Or):
        return Or(rewrite_constraint(c.left), rewrite_constraint(c.right))
    if isinstance(c, AtomUnary):
        i, d, op = c.clock, c.bound, c.op
        I = AtomUnary(i, "=", d)
        if op == "<":
            return AtomUnary(i, "<", d)
        if op == "<=":
            return Or(AtomUnary(i, "<", d), And(I, FracAtom("eq0", i)))
        if op == "=":
            return And(I, FracAtom("eq0", i))
        if op == ">":
            return Or(AtomUnary(i, ">", d), And(I, FracAtom("gt0", i)))
        return AtomUnary(i, ">=", d)  # op == ">="
    if isinstance(c, AtomDiff):
        i, j, d, op = c.left, c.right, c.bound, c.op
        E = AtomDiff(i, j, "=", d)
        if op == "<":
            return Or(AtomDiff(i, j, "<", d), And(E, FracAtom("lt", i, j)))
        if op == "<=":
            return Or(AtomDiff(i, j, "<", d), And(E, _frac_le(i, j)))
        if op == "=":
            return And(E, FracAtom("eq", i, j))
        if op == ">":
            return Or(AtomDiff(i, j, ">", d), And(E, FracAtom("lt", j, i)))
        return Or(AtomDiff(i, j, ">", d), And(E, Not(FracAtom("lt", i, j))))  # >=
    raise TypeError("not a clock constraint: %r" % (c,))


def _frac_gt(eta: Pattern, j1: int, j2: int) -> bool:
    """frac(v)(j1) > frac(v)(j2) read off the pattern: the cyclic order of the
    positions of j1^1 and j2^1 relative to the now-position."""
    i = eta.now_index
    m1 = eta.position_of(TaggedIndex(j1, 1))
    m2 = eta.position_of(TaggedIndex(j2, 1))
    return (m1 < i <= m2) or (m2 < m1 < i) or (i <= m2 < m1)


def frac_atom_truth(eta: Pattern, atom: FracAtom) -> bool:
    """Truth value of a fractional ordering fixed by the pattern."""
    if atom.kind == "lt":
        return _frac_gt(eta, atom.j, atom.i)
    if atom.kind == "eq":
        return eta.position_of(TaggedIndex(atom.i, 1)) == eta.position_of(TaggedIndex(atom.j, 1))
    m1 = eta.position_of(TaggedIndex(atom.i, 1))
    if atom.kind == "gt0":
        return m1 != eta.now_index
    return m1 == eta.now_index  # eq0


def eval_rewritten(rc: RewrittenConstraint, u: DiscreteValuation, fracs: Sequence[Fraction]) -> bool:
    """Evaluate a rewritten constraint against explicit integral parts and
    fractional parts (the brute-force reading, used as an oracle)."""
    if isinstance(rc, BoolLit):
        return rc.value
    if isinstance(rc, FracAtom):
        if rc.kind == "lt":
            return fracs[rc.i] < fracs[rc.j]
        if rc.kind == "eq":
            return fracs[rc.i] == fracs[rc.j]
        if rc.kind == "gt0":
            return fracs[rc.i] > 0
        return fracs[rc.i] == 0
    if isinstance(rc, AtomUnary):
        return eval_clock_or_discrete_atom(rc, u)
    if isinstance(rc, AtomDiff):
        return eval_clock_or_discrete_atom(rc, u)
    if isinstance(rc, Not):
        return not eval_rewritten(rc.arg, u, fracs)
    if isinstance(rc, And):
        return eval_rewritten(rc.left, u, fracs) and eval_rewritten(rc.right, u, fracs)
    if isinstance(rc, Or):
        return eval_rewritten(rc.left, u, fracs) or eval_rewritten(rc.right, u, fracs)
    raise TypeError("not a rewritten constraint: %r" % (rc,))


def eval_clock_or_discrete_atom(atom, u: DiscreteValuation) -> bool:
    from .constraints import cmp_op

    if isinstance(atom, AtomUnary):
        return cmp_op(u[atom.clock], atom.op, atom.bound)
    return cmp_op(u[atom.left] - u[atom.right], atom.op, atom.bound)


def _fold_not(x: DiscreteConstraint) -> DiscreteConstraint:
    if isinstance(x, BoolLit):
        return BoolLit(not x.value)
    return Not(x)


def _fold_and(a: DiscreteConstraint, b: DiscreteConstraint) -> DiscreteConstraint:
    if isinstance(a, BoolLit):
        return b if a.value else a
    if isinstance(b, BoolLit):
        return a if b.value else b
    return And(a, b)


def _fold_or(a: DiscreteConstraint, b: DiscreteConstraint) -> DiscreteConstraint:
    if isinstance(a, BoolLit):
        return a if a.value else b
    if isinstance(b, BoolLit):
        return b if b.value else a
    return Or(a, b)


def specialize(c: ClockConstraint, eta: Pattern) -> DiscreteConstraint:
    """c^eta: substitute the pattern's fractional-ordering truth values into
    the rewriting of c and fold constants; the result reads over integral
    parts only."""

    def subst(rc) -> DiscreteConstraint:
        if isinstance(rc, BoolLit):
            return rc
        if isinstance(rc, FracAtom):
            return BoolLit(frac_atom_truth(eta, rc))
        if isinstance(rc, (AtomUnary, AtomDiff)):
            return rc
        if isinstance(rc, Not):
            return _fold_not(subst(rc.arg))
        if isinstance(rc, And):
            return _fold_and(subst(rc.left), subst(rc.right))
        if isinstance(rc, Or):
            return _fold_or(subst(rc.left), subst(rc.right))
        raise TypeError("not a rewritten constraint: %r" % (rc,))

    return subst(rewrite_constraint(c))


# --- enumeration and realization ---------------------------------------------


def enumerate_patterns(k: int) -> Iterator[Pattern]:
    """All well-formed patterns for clock count k, by brute force: ordered
    partitions of the 2(k+1) tagged indices whose first block contains 0^0."""
    indices = [TaggedIndex(i, b) for b in (0, 1) for i in range(k + 1)]
    anchor = TaggedIndex(0, 0)
    rest = [t for t in indices if t != anchor]

    def ordered_partitions(elems: list[TaggedIndex]) -> Iterator[tuple[tuple[TaggedIndex, ...], ...]]:
        if not elems:
            yield ()
            return
        for size in range(1, len(elems) + 1):
            for block in itertools.combinations(elems, size):
                remaining = [e for e in elems if e not in block]
                for tail in ordered_partitions(remaining):
                    yield (block,) + tail

    # choose the companions of 0^0 in the first block, then order the rest
    for size in range(len(rest) + 1):
        for extra in itertools.combinations(rest, size):
            block = (anchor,) + extra
            remaining = [e for e in rest if e not in extra]
            for tail in ordered_partitions(remaining):
                yield Pattern.of((block,) + tail)


def enumerate_initial_patterns(k: int) -> Iterator[Pattern]:
    """All patterns of pairs (v0, v0): each i^1 co-located with i^0."""
    for eta in enumerate_patterns(k):
        if all(
            eta.position_of(TaggedIndex(i, 1)) == eta.position_of(TaggedIndex(i, 0))
            for i in range(k + 1)
        ):
            yield eta


def default_position_values(n_positions: int, family: str = "mid") -> tuple[Fraction, ...]:
    """Canonical increasing relative-fraction values for a pattern's positions.

    Value 0 is pinned to the first position; the rest are evenly spaced, with
    'low'/'high' shifting each interior value toward its lower/upper neighbor
    to exercise boundary-adjacent realizations.
    """
    den = n_positions + 1
    offsets = {"mid": Fraction(0), "low": Fraction(-1, 3), "high": Fraction(1, 3)}
    off = offsets[family]
    vals = [Fraction(0)]
    for j in range(1, n_positions):
        vals.append((Fraction(j) + off) / den)
    return tuple(vals)


def realize_pair(
    eta: Pattern,
    u0: DiscreteValuation,
    u1: DiscreteValuation,
    values: Optional[Sequence[Fraction]] = None,
    family: str = "mid",
) -> tuple[ClockValuation, ClockValuation]:
    """Construct an initialized pair with the given pattern and integral parts.

    `values` assigns the relative fractional value of each position (strictly
    increasing, starting at 0); when omitted a canonical family is used.  Any
    choice yields an equivalent pair: the pattern fixes orderings, not
    magnitudes.
    """
    n_pos = len(eta.positions)
    if values is None:
        values = default_position_values(n_pos, family)
    values = tuple(rat(v) for v in values)
    if len(values) != n_pos:
        raise ValueError("need %d position values, got %d" % (n_pos, len(values)))
    if values[0] != 0:
        raise ValueError("the first position's value must be 0")
    for a, b in zip(values, values[1:]):
        if not 0 <= a < b < 1:
            raise ValueError("position values must be strictly increasing within [0,1)")
    if u0[0] != 0:
        raise ValueError("an initialized pair needs u0(0) = 0")
    k = eta.k
    if u0.k != k or u1.k != k:
        raise ValueError("integral parts have the wrong clock count")

    where = {t: m for m, pos in enumerate(eta.positions) for t in pos}
    v0 = [rat(u0[i]) + values[where[TaggedIndex(i, 0)]] for i in range(k + 1)]
    anchor = values[where[NOW]]
    v1 = []
    for i in range(k + 1):
        if i == 0:
            frac = fractional(1 - anchor)
        else:
            frac = fractional(values[where[TaggedIndex(i, 1)]] - anchor)
        v1.append(rat(u1[i]) + frac)
    pair = ClockValuation(tuple(v0)), ClockValuation(tuple(v1))
    got = pattern_of(*pair)
    if got != eta:
        raise AssertionError("realization produced pattern %s, wanted %s" % (got.encode(), eta.encode()))
    return pair


def pattern_is_valid(eta: Pattern, k: int) -> bool:
    return validate_pattern(eta, k) is None
