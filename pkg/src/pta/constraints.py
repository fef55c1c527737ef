"""Constraint languages and their concrete-value evaluators.

Three languages share the Boolean shell (BoolLit / Not / And / Or):

* clock constraints: atoms compare a clock, or a difference of two clocks,
  against a nonnegative integer constant (the auxiliary clock x0 is never
  mentioned);
* discrete clock constraints: the same atom shapes read over the integral
  parts of the clocks (this is what specialization produces);
* mixed linear relations: linear atoms over dense clock values, integral
  parts, and stack-symbol counts of a source and a target configuration,
  with mod atoms restricted to discrete terms.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING, Iterator, Union

if TYPE_CHECKING:
    from .model import ClockValuation, Configuration, DiscreteValuation

OPS = ("<", "<=", "=", ">=", ">")


def cmp_op(a, op: str, b) -> bool:
    if op == "<":
        return a < b
    if op == "<=":
        return a <= b
    if op == "=":
        return a == b
    if op == ">=":
        return a >= b
    if op == ">":
        return a > b
    raise ValueError("unknown comparison operator %r" % op)


@dataclass(frozen=True)
class BoolLit:
    value: bool


@dataclass(frozen=True)
class AtomUnary:
    """x_i op d, with i in 1..k and d a nonnegative integer."""

    clock: int
    op: str
    bound: int

    def __post_init__(self) -> None:
        if self.op not in OPS:
            raise ValueError("bad operator %r" % self.op)
        if self.bound < 0:
            raise ValueError("constraint constants must be nonnegative")
        if self.clock < 1:
            raise ValueError("constraints never mention the auxiliary clock x0")


@dataclass(frozen=True)
class AtomDiff:
    """x_i - x_j op d, with i, j in 1..k and d a nonnegative integer."""

    left: int
    right: int
    op: str
    bound: int

    def __post_init__(self) -> None:
        if self.op not in OPS:
            raise ValueError("bad operator %r" % self.op)
        if self.bound < 0:
            raise ValueError("constraint constants must be nonnegative")
        if self.left < 1 or self.right < 1:
            raise ValueError("constraints never mention the auxiliary clock x0")


@dataclass(frozen=True)
class Not:
    arg: "ClockConstraint"


@dataclass(frozen=True)
class And:
    left: "ClockConstraint"
    right: "ClockConstraint"


@dataclass(frozen=True)
class Or:
    left: "ClockConstraint"
    right: "ClockConstraint"


ClockConstraint = Union[BoolLit, AtomUnary, AtomDiff, Not, And, Or]

# A discrete constraint has the same AST shape; its atoms are read over the
# integral parts of the clocks.  Specialization (c^eta) produces these.
DiscreteConstraint = ClockConstraint

TRUE = BoolLit(True)
FALSE = BoolLit(False)


def constraint_clocks(c: ClockConstraint) -> Iterator[int]:
    """Yield every clock index mentioned by c (with repetition)."""
    if isinstance(c, AtomUnary):
        yield c.clock
    elif isinstance(c, AtomDiff):
        yield c.left
        yield c.right
    elif isinstance(c, Not):
        yield from constraint_clocks(c.arg)
    elif isinstance(c, (And, Or)):
        yield from constraint_clocks(c.left)
        yield from constraint_clocks(c.right)


def max_constant(c: ClockConstraint) -> int:
    """Largest constant appearing in c (0 for constant formulas)."""
    if isinstance(c, (AtomUnary, AtomDiff)):
        return c.bound
    if isinstance(c, Not):
        return max_constant(c.arg)
    if isinstance(c, (And, Or)):
        return max(max_constant(c.left), max_constant(c.right))
    return 0


def eval_clock_constraint(c: ClockConstraint, v: "ClockValuation") -> bool:
    """Satisfaction of c by dense clock values, decided exactly."""
    if isinstance(c, BoolLit):
        return c.value
    if isinstance(c, AtomUnary):
        return cmp_op(v[c.clock], c.op, c.bound)
    if isinstance(c, AtomDiff):
        return cmp_op(v[c.left] - v[c.right], c.op, c.bound)
    if isinstance(c, Not):
        return not eval_clock_constraint(c.arg, v)
    if isinstance(c, And):
        return eval_clock_constraint(c.left, v) and eval_clock_constraint(c.right, v)
    if isinstance(c, Or):
        return eval_clock_constraint(c.left, v) or eval_clock_constraint(c.right, v)
    raise TypeError("not a clock constraint: %r" % (c,))


def eval_discrete_constraint(c: DiscreteConstraint, u: "DiscreteValuation") -> bool:
    """Satisfaction of a discrete constraint by integral clock values."""
    if isinstance(c, BoolLit):
        return c.value
    if isinstance(c, AtomUnary):
        return cmp_op(u[c.clock], c.op, c.bound)
    if isinstance(c, AtomDiff):
        return cmp_op(u[c.left] - u[c.right], c.op, c.bound)
    if isinstance(c, Not):
        return not eval_discrete_constraint(c.arg, u)
    if isinstance(c, And):
        return eval_discrete_constraint(c.left, u) and eval_discrete_constraint(c.right, u)
    if isinstance(c, Or):
        return eval_discrete_constraint(c.left, u) or eval_discrete_constraint(c.right, u)
    raise TypeError("not a discrete constraint: %r" % (c,))


# --- mixed linear relations -------------------------------------------------


@dataclass(frozen=True)
class TInt:
    value: int


@dataclass(frozen=True)
class TClock:
    """Dense value of clock x_i in the source (primed=False) or target config."""

    clock: int
    primed: bool


@dataclass(frozen=True)
class TIntPart:
    """Integral part of clock x_i (the query surface's u_i / u_i')."""

    clock: int
    primed: bool


@dataclass(frozen=True)
class TFrac:
    """Fractional part of clock x_i; produced by separation, not by parsing."""

    clock: int
    primed: bool


@dataclass(frozen=True)
class TCount:
    """Number of occurrences of a stack symbol in the source/target stack word."""

    symbol: str
    primed: bool


@dataclass(frozen=True)
class TAdd:
    left: "LinearTerm"
    right: "LinearTerm"


@dataclass(frozen=True)
class TSub:
    left: "LinearTerm"
    right: "LinearTerm"


LinearTerm = Union[TInt, TClock, TIntPart, TFrac, TCount, TAdd, TSub]


@dataclass(frozen=True)
class RelGt0:
    term: LinearTerm


@dataclass(frozen=True)
class RelEq0:
    term: LinearTerm


@dataclass(frozen=True)
class RelMod:
    """term mod modulus = 0; the term must not contain dense variables."""

    term: LinearTerm
    modulus: int

    def __post_init__(self) -> None:
        if self.modulus == 0:
            raise ValueError("mod 0 is undefined")


@dataclass(frozen=True)
class RelNot:
    arg: "MixedLinearRelation"


@dataclass(frozen=True)
class RelAnd:
    left: "MixedLinearRelation"
    right: "MixedLinearRelation"


MixedLinearRelation = Union[RelGt0, RelEq0, RelMod, RelNot, RelAnd]


class QueryError(ValueError):
    """A relation cannot be evaluated: bad variable, or a dense term under mod."""


def term_is_discrete(t: LinearTerm) -> bool:
    """True when the term contains no dense variables (clock values or fracs)."""
    if isinstance(t, (TClock, TFrac)):
        return False
    if isinstance(t, (TInt, TIntPart, TCount)):
        return True
    if isinstance(t, (TAdd, TSub)):
        return term_is_discrete(t.left) and term_is_discrete(t.right)
    raise TypeError("not a linear term: %r" % (t,))


def rel_or(a: MixedLinearRelation, b: MixedLinearRelation) -> MixedLinearRelation:
    """Disjunction, desugared into the not/and core."""
    return RelNot(RelAnd(RelNot(a), RelNot(b)))


def _eval_term(t: LinearTerm, source: "Configuration", target: "Configuration") -> Fraction:
    from .model import split

    if isinstance(t, TInt):
        return Fraction(t.value)
    cfg = target if getattr(t, "primed", False) else source
    if isinstance(t, TClock):
        if not 1 <= t.clock <= cfg.valuation.k:
            raise QueryError("clock x%d%s out of range" % (t.clock, "'" if t.primed else ""))
        return cfg.valuation[t.clock]
    if isinstance(t, TIntPart):
        if not 1 <= t.clock <= cfg.valuation.k:
            raise QueryError("clock u%d%s out of range" % (t.clock, "'" if t.primed else ""))
        return Fraction(split(cfg.valuation[t.clock])[0])
    if isinstance(t, TFrac):
        if not 1 <= t.clock <= cfg.valuation.k:
            raise QueryError("fractional variable out of range: %d" % t.clock)
        return split(cfg.valuation[t.clock])[1]
    if isinstance(t, TCount):
        return Fraction(cfg.stack.count(t.symbol))
    if isinstance(t, TAdd):
        return _eval_term(t.left, source, target) + _eval_term(t.right, source, target)
    if isinstance(t, TSub):
        return _eval_term(t.left, source, target) - _eval_term(t.right, source, target)
    raise TypeError("not a linear term: %r" % (t,))


def eval_mixed(l: MixedLinearRelation, source: "Configuration", target: "Configuration") -> bool:
    """Exact satisfaction of a mixed linear relation by a configuration pair."""
    if isinstance(l, RelGt0):
        return _eval_term(l.term, source, target) > 0
    if isinstance(l, RelEq0):
        return _eval_term(l.term, source, target) == 0
    if isinstance(l, RelMod):
        if not term_is_discrete(l.term):
            raise QueryError("dense variable inside a mod atom")
        val = _eval_term(l.term, source, target)
        assert val.denominator == 1
        return val.numerator % l.modulus == 0
    if isinstance(l, RelNot):
        return not eval_mixed(l.arg, source, target)
    if isinstance(l, RelAnd):
        return eval_mixed(l.left, source, target) and eval_mixed(l.right, source, target)
    raise TypeError("not a mixed linear relation: %r" % (l,))


def linearize(t: LinearTerm) -> tuple[dict, int]:
    """Collect t into (coefficient map, constant).

    Keys of the map are the non-constant leaves (TClock/TIntPart/TFrac/TCount
    instances); values are integer coefficients.
    """
    coeffs: dict = {}
    const = 0

    def walk(term: LinearTerm, sign: int) -> None:
        nonlocal const
        if isinstance(term, TInt):
            const += sign * term.value
        elif isinstance(term, (TClock, TIntPart, TFrac, TCount)):
            coeffs[term] = coeffs.get(term, 0) + sign
        elif isinstance(term, TAdd):
            walk(term.left, sign)
            walk(term.right, sign)
        elif isinstance(term, TSub):
            walk(term.left, sign)
            walk(term.right, -sign)
        else:
            raise TypeError("not a linear term: %r" % (term,))

    walk(t, 1)
    return {k: v for k, v in coeffs.items() if v != 0}, const


def scale_term(n: int, t: LinearTerm) -> LinearTerm:
    """n * t as repeated addition (n is a nonnegative integer literal)."""
    if n < 0:
        raise ValueError("coefficients are nonnegative literals; negate with '-'")
    if n == 0:
        return TInt(0)
    out = t
    for _ in range(n - 1):
        out = TAdd(out, t)
    return out
