"""Core domain types: exact rationals, valuations, patterns, automata, configurations.

All values are immutable and all operations are pure; everything here is safe
to share across threads and to use as dict keys (where hashable).

Dense values are exact rationals (`fractions.Fraction`).  A value v >= 0
splits uniquely as v = integral(v) + fractional(v) with the integral part a
nonnegative integer and 0 <= fractional part < 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, NamedTuple, Optional, Union

Rat = Fraction

RatLike = Union[int, str, Fraction]


def rat(x: RatLike) -> Fraction:
    """Build an exact rational.

    Accepts ints, Fractions, and decimal/fraction strings ("4.296", "3/7").
    Floats are rejected: they would smuggle binary rounding into an exact
    calculus.
    """
    if isinstance(x, float):
        raise TypeError("refusing float %r: pass a string or Fraction for exactness" % (x,))
    return Fraction(x)


def split(v: RatLike) -> tuple[int, Fraction]:
    """Split v >= 0 into (integral, fractional) with integral + fractional = v.

    The integral part is the greatest integer <= v; the fractional part lies
    in [0, 1).
    """
    v = rat(v)
    if v < 0:
        raise ValueError("split requires a nonnegative value, got %s" % v)
    n = v.numerator // v.denominator
    return n, v - n


def integral(v: RatLike) -> int:
    return split(v)[0]


def fractional(v: RatLike) -> Fraction:
    return split(v)[1]


@dataclass(frozen=True)
class ClockValuation:
    """Values of clocks x_0..x_k; index 0 is the auxiliary "now" clock."""

    values: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if len(self.values) < 2:
            raise ValueError("a valuation needs at least clocks x0 and x1")
        for v in self.values:
            if v < 0:
                raise ValueError("clock values must be nonnegative, got %s" % v)

    @classmethod
    def of(cls, *xs: RatLike) -> "ClockValuation":
        return cls(tuple(rat(x) for x in xs))

    @property
    def k(self) -> int:
        return len(self.values) - 1

    @property
    def is_initial(self) -> bool:
        return self.values[0] == 0

    def integral_parts(self) -> "DiscreteValuation":
        return DiscreteValuation(tuple(integral(v) for v in self.values))

    def fractional_parts(self) -> tuple[Fraction, ...]:
        return tuple(fractional(v) for v in self.values)

    def __getitem__(self, i: int) -> Fraction:
        return self.values[i]

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self):
        return iter(self.values)


@dataclass(frozen=True)
class DiscreteValuation:
    """Integral clock values u_0..u_k (also the graph-side discrete clocks)."""

    values: tuple[int, ...]

    def __post_init__(self) -> None:
        for v in self.values:
            if v < 0:
                raise ValueError("discrete clock values must be nonnegative, got %s" % v)

    @classmethod
    def of(cls, *xs: int) -> "DiscreteValuation":
        return cls(tuple(int(x) for x in xs))

    @classmethod
    def zero(cls, k: int) -> "DiscreteValuation":
        return cls((0,) * (k + 1))

    @property
    def k(self) -> int:
        return len(self.values) - 1

    def add(self, delta: Iterable[int]) -> "DiscreteValuation":
        return DiscreteValuation(tuple(v + d for v, d in zip(self.values, delta, strict=True)))

    def reset(self, r: Iterable[int]) -> "DiscreteValuation":
        rs = set(r)
        return DiscreteValuation(tuple(0 if i in rs else v for i, v in enumerate(self.values)))

    def __getitem__(self, i: int) -> int:
        return self.values[i]

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self):
        return iter(self.values)


def progress_valuation(v: ClockValuation, delta: RatLike) -> ClockValuation:
    """Synchronous clock progress: every component advances by delta >= 0."""
    d = rat(delta)
    if d < 0:
        raise ValueError("progress amount must be nonnegative, got %s" % d)
    return ClockValuation(tuple(x + d for x in v.values))


def reset_valuation(v: ClockValuation, r: Iterable[int]) -> ClockValuation:
    """Reset the clocks in r (a subset of {1..k}) to zero."""
    rs = set(r)
    if 0 in rs:
        raise ValueError("the auxiliary clock x0 can never be reset")
    for i in rs:
        if not 1 <= i <= v.k:
            raise ValueError("reset index %d out of range 1..%d" % (i, v.k))
    return ClockValuation(tuple(Fraction(0) if i in rs else x for i, x in enumerate(v.values)))


class TaggedIndex(NamedTuple):
    """Index i^b: clock i of the initial valuation (tag 0) or current one (tag 1)."""

    clock: int
    tag: int

    def encode(self) -> str:
        return "%d%d" % (self.clock, self.tag)


def _canon_key(t: TaggedIndex) -> tuple[int, int]:
    # canonical in-position order: all tag-0 indices first, then tag-1, by clock
    return (t.tag, t.clock)


Position = tuple[TaggedIndex, ...]


def make_position(indices: Iterable[TaggedIndex]) -> Position:
    return tuple(sorted(indices, key=_canon_key))


@dataclass(frozen=True)
class Pattern:
    """Ordered partition of the tagged indices recording fractional-part order.

    positions[0] holds the indices whose relative fractional value is least
    (always including 0^0, whose value is 0); later positions hold strictly
    larger values.  Positions are canonically sorted so structural equality
    is pattern equality and patterns can key dicts.
    """

    positions: tuple[Position, ...]

    @classmethod
    def of(cls, groups: Iterable[Iterable[TaggedIndex]]) -> "Pattern":
        return cls(tuple(make_position(g) for g in groups))

    @property
    def k(self) -> int:
        return max(t.clock for p in self.positions for t in p)

    @property
    def n(self) -> int:
        """Index of the last position (the paper's n in p_0..p_n)."""
        return len(self.positions) - 1

    def position_of(self, idx: TaggedIndex) -> int:
        for m, p in enumerate(self.positions):
            if idx in p:
                return m
        raise KeyError("index %s not in pattern" % (idx,))

    @property
    def now_index(self) -> int:
        return self.position_of(TaggedIndex(0, 1))

    def encode(self) -> str:
        return "|".join(" ".join(t.encode() for t in p) for p in self.positions)

    @classmethod
    def decode(cls, text: str) -> "Pattern":
        groups = []
        for part in text.split("|"):
            toks = part.split()
            if not toks:
                raise ValueError("empty position in pattern encoding %r" % text)
            idxs = []
            for tok in toks:
                if len(tok) < 2 or not tok.isdigit() or tok[-1] not in "01":
                    raise ValueError("bad tagged index %r in pattern encoding" % tok)
                idxs.append(TaggedIndex(int(tok[:-1]), int(tok[-1])))
            groups.append(idxs)
        return cls.of(groups)


@dataclass(frozen=True)
class PatternViolation:
    """First well-formedness clause a candidate pattern breaks."""

    clause: str
    detail: str


def validate_pattern(p: Pattern, k: int) -> Optional[PatternViolation]:
    """Check pattern well-formedness for clock count k; None means valid.

    Clauses, in the order checked: "empty" (a position with no indices),
    "range" (an index outside 0..k or tag outside {0,1}), "disjoint",
    "coverage" (union must be all 2(k+1) tagged indices), "anchor"
    (0^0 must sit in the first position), "canonical" (positions must be
    sorted by (tag, clock)).
    """
    seen: set[TaggedIndex] = set()
    for m, pos in enumerate(p.positions):
        if not pos:
            return PatternViolation("empty", "position %d is empty" % m)
        for t in pos:
            if not (0 <= t.clock <= k) or t.tag not in (0, 1):
                return PatternViolation("range", "index %s out of range for k=%d" % (t.encode(), k))
            if t in seen:
                return PatternViolation("disjoint", "index %s appears twice" % t.encode())
            seen.add(t)
    want = {TaggedIndex(i, b) for i in range(k + 1) for b in (0, 1)}
    if seen != want:
        missing = sorted(want - seen, key=_canon_key)
        return PatternViolation(
            "coverage", "missing indices: %s" % " ".join(t.encode() for t in missing)
        )
    if not p.positions or TaggedIndex(0, 0) not in p.positions[0]:
        return PatternViolation("anchor", "0^0 must be in the first position")
    for m, pos in enumerate(p.positions):
        if tuple(sorted(pos, key=_canon_key)) != pos:
            return PatternViolation("canonical", "position %d is not canonically sorted" % m)
    return None


# --- automata -------------------------------------------------------------


@dataclass(frozen=True)
class Edge:
    """A reset edge of the automaton.

    `pop`/`push` are None on edges with no stack operation (always the case
    for plain timed automata).  `push` is the word written in place of the
    popped symbol, topmost symbol first.
    """

    source: str
    target: str
    guard: "ClockConstraint"
    resets: frozenset[int]
    pop: Optional[str] = None
    push: Optional[str] = None


@dataclass(frozen=True)
class PtaSpec:
    """A pushdown timed automaton; empty stack alphabet means timed automaton."""

    states: frozenset[str]
    clock_count: int
    stack_alphabet: frozenset[str]
    invariants: Mapping[str, "ClockConstraint"]
    edges: tuple[Edge, ...]

    def validate(self) -> None:
        from .constraints import constraint_clocks

        if self.clock_count < 1:
            raise ValueError("need at least one real clock")
        for s in self.invariants:
            if s not in self.states:
                raise ValueError("invariant for undeclared state %r" % s)
        for s in self.states:
            if s not in self.invariants:
                raise ValueError("state %r has no invariant" % s)
            for i in constraint_clocks(self.invariants[s]):
                if not 1 <= i <= self.clock_count:
                    raise ValueError("invariant of %r uses x%d out of range" % (s, i))
        for e in self.edges:
            if e.source not in self.states or e.target not in self.states:
                raise ValueError("edge %r -> %r uses undeclared state" % (e.source, e.target))
            if (e.pop is None) != (e.push is None):
                raise ValueError("edge %r -> %r must set pop and push together" % (e.source, e.target))
            if e.pop is not None:
                if not self.stack_alphabet:
                    raise ValueError("stack operation on a stackless automaton")
                if e.pop not in self.stack_alphabet:
                    raise ValueError("undeclared stack symbol %r" % e.pop)
                for a in e.push or "":
                    if a not in self.stack_alphabet:
                        raise ValueError("undeclared stack symbol %r" % a)
            for i in e.resets:
                if not 1 <= i <= self.clock_count:
                    raise ValueError("reset of x%d out of range" % i)
            for i in constraint_clocks(e.guard):
                if not 1 <= i <= self.clock_count:
                    raise ValueError("guard uses x%d out of range" % i)

    @property
    def k(self) -> int:
        return self.clock_count


@dataclass(frozen=True)
class Configuration:
    """Dense configuration (state, valuation, stack word, topmost first)."""

    state: str
    valuation: ClockValuation
    stack: str = ""


@dataclass(frozen=True)
class GConfiguration:
    """Pattern-graph configuration (state, pattern, integral clocks, stack)."""

    state: str
    pattern: Pattern
    discrete: DiscreteValuation
    stack: str = ""


# re-export the constraint ASTs so `pta.model` is a one-stop import for types
from .constraints import (  # noqa: E402  (cycle-free: constraints imports nothing from here)
    And,
    AtomDiff,
    AtomUnary,
    BoolLit,
    ClockConstraint,
    DiscreteConstraint,
    Not,
    Or,
    eval_clock_constraint,
    eval_discrete_constraint,
)
from .constraints import (  # noqa: E402
    MixedLinearRelation,
    eval_mixed,
)

__all__ = [
    "Rat",
    "rat",
    "split",
    "integral",
    "fractional",
    "ClockValuation",
    "DiscreteValuation",
    "progress_valuation",
    "reset_valuation",
    "TaggedIndex",
    "Position",
    "make_position",
    "Pattern",
    "PatternViolation",
    "validate_pattern",
    "Edge",
    "PtaSpec",
    "Configuration",
    "GConfiguration",
    "And",
    "Or",
    "Not",
    "BoolLit",
    "AtomUnary",
    "AtomDiff",
    "ClockConstraint",
    "DiscreteConstraint",
    "eval_clock_constraint",
    "eval_discrete_constraint",
    "MixedLinearRelation",
    "eval_mixed",
]
