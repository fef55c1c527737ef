"""Exact dense-time semantics: progress/reset transitions, trace replay,
seeded random runs, and the constructive backward-witness procedures that
transfer a run onto any equivalent valuation pair.

Interval conditions are decided by breaking [0, delta] at every time some
clock crosses an integer (differences of clocks are invariant under
synchronous progress) and checking endpoints and midpoints of the pieces,
all in exact rational arithmetic.  The fractional-geometry helpers here are
written directly from the definitions, independent of the pattern
transformers they are used to test.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

from .constraints import ClockConstraint, eval_clock_constraint
from .model import (
    ClockValuation,
    Configuration,
    Edge,
    PtaSpec,
    RatLike,
    fractional,
    progress_valuation,
    rat,
    reset_valuation,
)
from .patterns import equivalent, pattern_of


class SemanticsError(Exception):
    """Base class for illegal dense transitions."""


class NonPositiveDelta(SemanticsError):
    pass


class InvariantViolated(SemanticsError):
    def __init__(self, at: Fraction):
        super().__init__("invariant violated at offset %s" % at)
        self.at = at


class GuardFailed(SemanticsError):
    pass


class SourceInvariantFailed(SemanticsError):
    pass


class TargetInvariantFailed(SemanticsError):
    pass


class StackTopMismatch(SemanticsError):
    pass


class EmptyStack(SemanticsError):
    pass


class DeadEnd(SemanticsError):
    """Random run generation found no legal step within its budget."""


class TraceStepError(SemanticsError):
    def __init__(self, index: int, cause: SemanticsError):
        super().__init__("step %d: %s" % (index, cause))
        self.index = index
        self.cause = cause


@dataclass(frozen=True)
class Progress:
    delta: Fraction

    def __post_init__(self) -> None:
        if self.delta <= 0:
            raise ValueError("progress steps have strictly positive duration")


@dataclass(frozen=True)
class Fire:
    edge: int  # index into the automaton's edge list


TraceStep = Union[Progress, Fire]


@dataclass(frozen=True)
class DenseRun:
    start: Configuration
    steps: tuple[TraceStep, ...]
    checkpoints: tuple[Configuration, ...]

    @property
    def end(self) -> Configuration:
        return self.checkpoints[-1] if self.checkpoints else self.start

    def configurations(self) -> tuple[Configuration, ...]:
        return (self.start,) + self.checkpoints


# --- interval satisfaction ---------------------------------------------------


def first_violation(c: ClockConstraint, v: ClockValuation, delta: RatLike) -> Optional[Fraction]:
    """Earliest sampled offset in [0, delta] where c fails under progress,
    or None if c holds throughout.

    Sample points are the integer-crossing breakpoints of each clock plus the
    midpoints of the pieces between them; unary atoms only change truth at
    breakpoints and difference atoms never change, so this is exact.
    """
    delta = rat(delta)
    points = {Fraction(0), delta}
    for i in range(1, v.k + 1):
        t = fractional(1 - fractional(v[i]))
        while t <= delta:
            points.add(t)
            t += 1
    ordered = sorted(points)
    samples = []
    for a, b in zip(ordered, ordered[1:]):
        samples.append(a)
        samples.append((a + b) / 2)
    samples.append(ordered[-1])
    for t in samples:
        if not eval_clock_constraint(c, progress_valuation(v, t)):
            return t
    return None


def holds_throughout(c: ClockConstraint, v: ClockValuation, delta: RatLike) -> bool:
    return first_violation(c, v, delta) is None


# --- transitions -------------------------------------------------------------


def step_progress(spec: PtaSpec, c: Configuration, delta: RatLike) -> Configuration:
    """Progress transition: all clocks advance by delta > 0 while the state
    invariant holds at every point of the closed interval."""
    delta = rat(delta)
    if delta <= 0:
        raise NonPositiveDelta("progress requires delta > 0, got %s" % delta)
    bad = first_violation(spec.invariants[c.state], c.valuation, delta)
    if bad is not None:
        raise InvariantViolated(bad)
    return Configuration(c.state, progress_valuation(c.valuation, delta), c.stack)


def step_fire(spec: PtaSpec, c: Configuration, edge: Edge) -> Configuration:
    """Reset transition along an edge: guard and both invariants must hold;
    the stack operation replaces the popped top symbol with the push word."""
    if edge.source != c.state:
        raise ValueError("edge starts at %r but configuration is at %r" % (edge.source, c.state))
    if not eval_clock_constraint(spec.invariants[c.state], c.valuation):
        raise SourceInvariantFailed("invariant of %r fails" % c.state)
    if not eval_clock_constraint(edge.guard, c.valuation):
        raise GuardFailed("guard of %r -> %r fails" % (edge.source, edge.target))
    if edge.pop is not None:
        if not c.stack:
            raise EmptyStack("edge pops %r from an empty stack" % edge.pop)
        if c.stack[0] != edge.pop:
            raise StackTopMismatch("edge pops %r but top is %r" % (edge.pop, c.stack[0]))
        stack = (edge.push or "") + c.stack[1:]
    else:
        stack = c.stack
    v2 = reset_valuation(c.valuation, edge.resets)
    if not eval_clock_constraint(spec.invariants[edge.target], v2):
        raise TargetInvariantFailed("invariant of %r fails after reset" % edge.target)
    return Configuration(edge.target, v2, stack)


def apply_step(spec: PtaSpec, c: Configuration, step: TraceStep) -> Configuration:
    if isinstance(step, Progress):
        return step_progress(spec, c, step.delta)
    return step_fire(spec, c, spec.edges[step.edge])


def run_trace(spec: PtaSpec, start: Configuration, steps: Sequence[TraceStep]) -> DenseRun:
    """Replay steps from start, failing fast with the offending step index."""
    cur = start
    checkpoints = []
    for i, step in enumerate(steps):
        try:
            cur = apply_step(spec, cur, step)
        except SemanticsError as e:
            raise TraceStepError(i, e) from e
        checkpoints.append(cur)
    return DenseRun(start, tuple(steps), tuple(checkpoints))


def random_run(
    spec: PtaSpec,
    start: Configuration,
    length: int,
    seed: int,
    max_delta: int = 4,
    max_denominator: int = 1000,
    budget: int = 40,
) -> DenseRun:
    """Generate a legal run of the given length by seeded rejection sampling."""
    run = random_run_upto(spec, start, length, seed, max_delta, max_denominator, budget)
    if len(run.steps) < length:
        raise DeadEnd("no legal step found after %d attempts at step %d" % (budget, len(run.steps)))
    return run


def random_run_upto(
    spec: PtaSpec,
    start: Configuration,
    length: int,
    seed: int,
    max_delta: int = 4,
    max_denominator: int = 1000,
    budget: int = 40,
) -> DenseRun:
    """Like random_run but returns the longest prefix it managed to build."""
    rng = random.Random(seed)
    cur = start
    steps: list[TraceStep] = []
    checkpoints: list[Configuration] = []
    for _ in range(length):
        found = None
        out_edges = [i for i, e in enumerate(spec.edges) if e.source == cur.state]
        for _attempt in range(budget):
            if out_edges and rng.random() < 0.5:
                idx = rng.choice(out_edges)
                try:
                    nxt = step_fire(spec, cur, spec.edges[idx])
                except SemanticsError:
                    continue
                found = (Fire(idx), nxt)
                break
            den = rng.randint(1, max_denominator)
            num = rng.randint(1, max_delta * den)
            delta = Fraction(num, den)
            try:
                nxt = step_progress(spec, cur, delta)
            except SemanticsError:
                continue
            found = (Progress(delta), nxt)
            break
        if found is None:
            break
        step, cur = found
        steps.append(step)
        checkpoints.append(cur)
    return DenseRun(start, tuple(steps), tuple(checkpoints))


# --- fractional geometry of an initialized pair -------------------------------


def now_value(v: ClockValuation) -> Fraction:
    """Relative fractional value of the now marker 0^1."""
    return fractional(1 - fractional(v[0]))


def occupied_values(v0: ClockValuation, v: ClockValuation) -> list[Fraction]:
    """Relative fractional values of every tagged index except the now marker,
    deduplicated and sorted.  These are fixed under synchronous progress."""
    if not v0.is_initial:
        raise ValueError("the first valuation must be initial")
    a = now_value(v)
    vals = {fractional(v0[i]) for i in range(v0.k + 1)}
    for i in range(1, v.k + 1):
        vals.add(fractional(fractional(v[i]) + a))
    return sorted(vals)


def gap_down(v0: ClockValuation, v: ClockValuation) -> Fraction:
    """Distance the now marker sweeps forward before hitting an occupied value."""
    g = now_value(v)
    best = None
    for o in occupied_values(v0, v):
        d = (g - o) % 1
        if d == 0:
            continue
        if best is None or d < best:
            best = d
    assert best is not None
    return best


def gap_up(v0: ClockValuation, v: ClockValuation) -> Fraction:
    """Distance backward (in time) before the now marker hits an occupied value."""
    g = now_value(v)
    best = None
    for o in occupied_values(v0, v):
        d = (o - g) % 1
        if d == 0:
            continue
        if best is None or d < best:
            best = d
    assert best is not None
    return best


def now_is_shared(v0: ClockValuation, v: ClockValuation) -> bool:
    """True when 0^1 currently coincides with some other index (split pattern)."""
    return now_value(v) in occupied_values(v0, v)


def count_pattern_changes(v0: ClockValuation, v: ClockValuation, delta: RatLike) -> int:
    """Number of pattern changes along the progress from v by delta.

    Counted directly from the geometry: the now marker sweeps downward at
    rate 1; merging with an occupied value is a change at the hit instant,
    and leaving it is another change immediately after.
    """
    delta = rat(delta)
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    if delta == 0:
        return 0
    g = now_value(v)
    occ = occupied_values(v0, v)
    shared = g in occ
    n = 1 if shared else 0
    for o in occ:
        t0 = (g - o) % 1
        if t0 == 0:
            t0 = Fraction(1)
        if t0 > delta:
            continue
        hits_le = (delta - t0).__floor__() + 1
        n += hits_le  # merge changes at each hit
        # a split change completes after each hit that is strictly before delta
        last_hit = t0 + (hits_le - 1)
        n += hits_le if last_hit < delta else hits_le - 1
    return n


def one_change_delta(v0: ClockValuation, v: ClockValuation) -> Fraction:
    """A progress amount causing exactly one pattern change from (v0, v)."""
    d = gap_down(v0, v)
    return d / 2 if now_is_shared(v0, v) else d


def no_change_delta(v0: ClockValuation, v: ClockValuation) -> Optional[Fraction]:
    """A positive progress amount causing no pattern change, when one exists
    (never from a split pattern)."""
    if now_is_shared(v0, v):
        return None
    return gap_down(v0, v) / 2


def _recede(v: ClockValuation, delta: Fraction) -> ClockValuation:
    out = tuple(x - delta for x in v.values)
    for x in out:
        if x < 0:
            raise AssertionError("backward slide went below zero; pairs were not equivalent")
    return ClockValuation(out)


# --- backward witnesses --------------------------------------------------------


def backward_progress_witness(
    v0_1: ClockValuation,
    v_prev1: ClockValuation,
    delta1: RatLike,
    v0_2: ClockValuation,
    v2: ClockValuation,
) -> tuple[Fraction, ClockValuation]:
    """Given a progress v_prev1 + delta1 on side 1 and an equivalent end pair
    (v0_2, v2), slide side 2 backward to a (delta2, v_prev2) with
    v_prev2 + delta2 = v2 and (v0_1, v_prev1) equivalent to (v0_2, v_prev2).

    The slide mirrors the side-1 pattern changes one at a time, last first:
    from a split pattern the now marker backs into the open gap above (half
    the gap, to hit nothing); from a merge pattern it backs up exactly onto
    the next occupied value.
    """
    delta1 = rat(delta1)
    if delta1 < 0:
        raise ValueError("delta1 must be nonnegative")
    end1 = progress_valuation(v_prev1, delta1)
    if not equivalent((v0_1, end1), (v0_2, v2)):
        raise ValueError("pairs are not equivalent; no witness exists")
    if delta1 == 0:
        return Fraction(0), v2
    n = count_pattern_changes(v0_1, v_prev1, delta1)
    cur = v2
    if n == 0:
        # no pattern change on side 1: stay strictly inside the merge gap
        step = gap_up(v0_2, cur) / 2
        cur = _recede(cur, step)
    else:
        for _ in range(n):
            up = gap_up(v0_2, cur)
            step = up / 2 if now_is_shared(v0_2, cur) else up
            cur = _recede(cur, step)
    delta2 = v2[0] - cur[0]
    if not equivalent((v0_1, v_prev1), (v0_2, cur)):
        raise AssertionError("backward progress reconstruction lost equivalence")
    return delta2, cur


def backward_reset_witness(
    v0_1: ClockValuation,
    v_prev1: ClockValuation,
    r: frozenset[int],
    v0_2: ClockValuation,
    v2: ClockValuation,
) -> ClockValuation:
    """Given a reset v_prev1 |r -> on side 1 and an equivalent post-reset pair
    (v0_2, v2), rebuild v_prev2 with v_prev2 reset to v2 and the pre-reset
    pairs equivalent.

    Each reset clock j is re-seated one at a time: j's relative fraction is
    copied from any index sharing its position in the side-1 pattern, or put
    at the exact midpoint of the surrounding known values.
    """
    r = frozenset(r)
    if not equivalent((v0_1, reset_valuation(v_prev1, r)), (v0_2, v2)):
        raise ValueError("pairs are not equivalent; no witness exists")
    if not r:
        return v2
    eta = pattern_of(v0_1, v_prev1)
    anchor = now_value(v2)
    ints1 = v_prev1.integral_parts()

    # side-2 relative value of each position, where known
    known: dict[int, Fraction] = {}
    from .model import TaggedIndex

    for m, pos in enumerate(eta.positions):
        for t in pos:
            if t.tag == 0:
                known[m] = fractional(v0_2[t.clock])
                break
            if t.tag == 1 and (t.clock == 0 or t.clock not in r):
                if t.clock == 0:
                    known[m] = anchor
                else:
                    known[m] = fractional(fractional(v2[t.clock]) + anchor)
                break

    vals = list(v2.values)
    for j in sorted(r):
        m = eta.position_of(TaggedIndex(j, 1))
        if m in known:
            rel = known[m]
        else:
            lo = max(mm for mm in known if mm < m)  # position 0 is always known
            above = [mm for mm in known if mm > m]
            lo_val = known[lo]
            hi_val = known[min(above)] if above else Fraction(1)
            rel = (lo_val + hi_val) / 2
            known[m] = rel
        vals[j] = ints1[j] + fractional(rel - anchor)
    out = ClockValuation(tuple(vals))
    if reset_valuation(out, r) != v2:
        raise AssertionError("backward reset reconstruction does not reset to v2")
    if not equivalent((v0_1, v_prev1), (v0_2, out)):
        raise AssertionError("backward reset reconstruction lost equivalence")
    return out


def transfer_run(
    spec: PtaSpec,
    run1: DenseRun,
    pair2: tuple[ClockValuation, ClockValuation],
) -> DenseRun:
    """Rebuild run1 from a different but equivalent start/end valuation pair.

    Works backward from the end, reconstructing each intermediate valuation
    with the progress/reset witnesses, then replays the result forward; the
    transferred run has the same edge/progress shape and ends at exactly the
    prescribed valuation.
    """
    v0_2, v2 = pair2
    v0_1 = run1.start.valuation
    if not v0_1.is_initial:
        raise ValueError("the source run must start at an initial valuation")
    if not equivalent((v0_1, run1.end.valuation), (v0_2, v2)):
        raise ValueError("pairs are not equivalent; transfer impossible")
    configs1 = run1.configurations()
    vals2: list[Optional[ClockValuation]] = [None] * len(configs1)
    vals2[-1] = v2
    steps2: list[TraceStep] = [None] * len(run1.steps)  # type: ignore[list-item]
    for t in range(len(run1.steps) - 1, -1, -1):
        prev1 = configs1[t].valuation
        after2 = vals2[t + 1]
        assert after2 is not None
        step = run1.steps[t]
        if isinstance(step, Progress):
            d2, prev2 = backward_progress_witness(v0_1, prev1, step.delta, v0_2, after2)
            if d2 == 0:
                raise AssertionError("transfer produced a zero-duration progress")
            steps2[t] = Progress(d2)
            vals2[t] = prev2
        else:
            edge = spec.edges[step.edge]
            prev2 = backward_reset_witness(v0_1, prev1, edge.resets, v0_2, after2)
            steps2[t] = Fire(step.edge)
            vals2[t] = prev2
    if vals2[0] != v0_2:
        raise AssertionError("backward induction did not land on the prescribed start")
    out = run_trace(spec, Configuration(run1.start.state, v0_2, run1.start.stack), steps2)
    if out.end != Configuration(run1.end.state, v2, run1.end.stack):
        raise AssertionError("transferred run missed the prescribed end configuration")
    return out
