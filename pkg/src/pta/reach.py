"""Decision procedures over the pattern graph.

Control-state reachability is exact: the graph's discrete clocks admit a
finite quotient (component values capped just above the largest constraint
constant, plus the integer floors of pairwise dense differences, which are
invariant under synchronous progress), and the stack is handled by the
standard post* saturation for pushdown systems over that finite control.

Full binary-reachability queries over mixed linear relations are answered
soundly but within explicit bounds: graph paths are enumerated, endpoints
are realized as exact rationals consistent with the end pattern, and a found
witness is lifted to a dense run and transferred onto the realized pair
before being reported.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

from .constraints import (
    And,
    AtomDiff,
    AtomUnary,
    BoolLit,
    DiscreteConstraint,
    MixedLinearRelation,
    Not,
    Or,
    QueryError,
    RelAnd,
    RelEq0,
    RelGt0,
    RelMod,
    RelNot,
    TAdd,
    TClock,
    TCount,
    TFrac,
    TInt,
    TIntPart,
    TSub,
    LinearTerm,
    eval_mixed,
    linearize,
    max_constant,
    term_is_discrete,
)
from .model import (
    ClockValuation,
    Configuration,
    DiscreteValuation,
    GConfiguration,
    Pattern,
    PtaSpec,
    TaggedIndex,
)
from .graph import Bounds, GPath, GReachResult, g_reach_bounded, g_successors
from .patterns import (
    classify,
    enumerate_initial_patterns,
    increment_vector,
    init_pattern,
    next_of,
    realize_pair,
    reset_of,
    specialize,
)
from .semantics import (
    DenseRun,
    Fire,
    Progress,
    apply_step,
    no_change_delta,
    one_change_delta,
    transfer_run,
)


# --- the capped abstraction ---------------------------------------------------


@dataclass(frozen=True)
class CappedValuation:
    """Discrete clocks capped at M+1 with the saturated pairwise differences.

    Values at the cap mean "at least M+1"; every constraint atom compares
    against a constant <= M, so the capped class answers all tests uniformly.
    The diff matrix is exact wherever both components are below the cap.
    """

    capped: tuple[int, ...]
    diffs: tuple[tuple[int, ...], ...]
    cap: int


def cap_abstract(u: DiscreteValuation, M: int) -> CappedValuation:
    c = M + 1
    capped = tuple(min(x, c) for x in u.values)
    diffs = tuple(
        tuple(max(-c, min(c, a - b)) for b in u.values) for a in u.values
    )
    return CappedValuation(capped, diffs, c)


def capped_increment(cv: CappedValuation, delta: Sequence[int]) -> CappedValuation:
    """Apply an increment vector directly on the abstraction.

    Component caps commute with increments exactly.  Below the cap the diff
    matrix is recomputable from the components, which is how it is updated;
    saturated entries stay saturated (both components are then at the cap and
    every test on them is already decided).
    """
    c = cv.cap
    capped = tuple(min(x + d, c) for x, d in zip(cv.capped, delta))
    diffs = []
    for i, a in enumerate(capped):
        row = []
        for j, b in enumerate(capped):
            if a < c and b < c:
                row.append(max(-c, min(c, a - b)))
            else:
                row.append(cv.diffs[i][j])
        diffs.append(tuple(row))
    return CappedValuation(capped, tuple(diffs), c)


# Internal exact control abstraction: capped components plus the floors of
# the dense pairwise differences floor(x_i - x_j), which never change under
# synchronous progress and are recomputed from a single component at resets.
# The true integral difference is floor + [frac(x_i) < frac(x_j)], and the
# fractional ordering is read off the pattern, so constraint tests are exact
# whenever the floor is inside (-cap, cap); at +-cap the whole class answers
# every test (constants <= M < cap) uniformly.

Floors = tuple[int, ...]  # floors for ordered pairs (i, j), 1 <= i != j <= k


def _floor_index(k: int):
    pairs = [(i, j) for i in range(1, k + 1) for j in range(1, k + 1) if i != j]
    return pairs, {p: n for n, p in enumerate(pairs)}


@dataclass(frozen=True)
class Control:
    state: str
    pattern: Pattern
    capped: tuple[int, ...]
    floors: Floors


def _frac_lt(eta: Pattern, i: int, j: int) -> bool:
    from .patterns import _frac_gt

    return _frac_gt(eta, j, i)


def _frac_gt0(eta: Pattern, i: int) -> bool:
    return eta.position_of(TaggedIndex(i, 1)) != eta.now_index


class _AbstractDomain:
    def __init__(self, spec: PtaSpec):
        self.spec = spec
        self.k = spec.clock_count
        m = max(
            [max_constant(c) for c in spec.invariants.values()]
            + [max_constant(e.guard) for e in spec.edges]
            + [1]
        )
        self.cap = m + 1
        self.pairs, self.pair_at = _floor_index(self.k)

    def start_control(self, state: str, eta0: Pattern) -> Control:
        return Control(state, eta0, (0,) * (self.k + 1), (0,) * len(self.pairs))

    def eval_test(self, c: DiscreteConstraint, ctl: Control) -> bool:
        cap = self.cap
        if isinstance(c, BoolLit):
            return c.value
        if isinstance(c, AtomUnary):
            u = ctl.capped[c.clock]
            if u >= cap:  # class "at least cap > every constant"
                return c.op in (">", ">=")
            from .constraints import cmp_op

            return cmp_op(u, c.op, c.bound)
        if isinstance(c, AtomDiff):
            fl = ctl.floors[self.pair_at[(c.left, c.right)]]
            if fl >= cap:
                return c.op in (">", ">=")
            if fl <= -cap:
                return c.op in ("<", "<=")
            diff = fl + (1 if _frac_lt(ctl.pattern, c.left, c.right) else 0)
            from .constraints import cmp_op

            return cmp_op(diff, c.op, c.bound)
        if isinstance(c, Not):
            return not self.eval_test(c.arg, ctl)
        if isinstance(c, And):
            return self.eval_test(c.left, ctl) and self.eval_test(c.right, ctl)
        if isinstance(c, Or):
            return self.eval_test(c.left, ctl) or self.eval_test(c.right, ctl)
        raise TypeError("not a discrete constraint: %r" % (c,))

    def progress(self, ctl: Control) -> Control:
        eta2 = next_of(ctl.pattern)
        inc = increment_vector(ctl.pattern)
        capped = tuple(min(u + d, self.cap) for u, d in zip(ctl.capped, inc))
        return Control(ctl.state, eta2, capped, ctl.floors)

    def reset(self, ctl: Control, target: str, resets: frozenset[int]) -> Control:
        eta2 = reset_of(ctl.pattern, resets)
        capped = tuple(
            0 if 1 <= i <= self.k and i in resets else u for i, u in enumerate(ctl.capped)
        )
        floors = list(ctl.floors)
        for n, (i, j) in enumerate(self.pairs):
            ri, rj = i in resets, j in resets
            if ri and rj:
                floors[n] = 0
            elif rj:  # floor(x_i - 0) = integral part of x_i
                floors[n] = min(ctl.capped[i], self.cap)
            elif ri:  # floor(0 - x_j)
                floors[n] = max(
                    -self.cap,
                    -ctl.capped[j] - (1 if _frac_gt0(eta2, j) else 0),
                )
        return Control(target, eta2, capped, tuple(floors))


# --- post* saturation over the abstract controls --------------------------------

_BOTTOM = "⊥"  # stack-bottom sentinel, distinct from any declared symbol
_FINAL = ("final",)


@dataclass
class SaturationStats:
    controls: int = 0
    transitions: int = 0


def _post_star_reaches(
    spec: PtaSpec, start_state: str, start_stack: str, to_state: str
) -> tuple[bool, SaturationStats]:
    """Exact control-state reachability by forward pushdown saturation.

    Automaton states are abstract controls plus chain states; a control is
    reachable exactly when it acquires an outgoing transition, since every
    transition target keeps a path to the final state by construction.
    """
    dom = _AbstractDomain(spec)
    eta0 = init_pattern(
        # pattern of the all-zero pair: a single position holding every index
        _all_zero_pattern(spec.clock_count)
    )
    p0 = dom.start_control(start_state, eta0)
    stats = SaturationStats()
    if start_state == to_state:
        stats.controls = 1
        return True, stats

    word = start_stack + _BOTTOM
    rel: set = set()
    trans_from: dict = {}
    eps_by_mid: dict = {}
    queue: deque = deque()
    controls_seen: set = {p0}

    spec_cache: dict = {}

    def specialize_cached(c, eta):
        key = (c, eta)
        out = spec_cache.get(key)
        if out is None:
            out = specialize(c, eta)
            spec_cache[key] = out
        return out

    rules_cache: dict = {}

    def rules(ctl: Control, sym: str):
        key = (ctl, sym)
        cached = rules_cache.get(key)
        if cached is not None:
            return cached
        out = []
        inv = spec.invariants[ctl.state]
        pre_ok = dom.eval_test(specialize_cached(inv, ctl.pattern), ctl)
        if pre_ok:
            nxt = dom.progress(ctl)
            if dom.eval_test(specialize_cached(inv, nxt.pattern), nxt):
                out.append((nxt, (sym,)))
        for e in spec.edges:
            if e.source != ctl.state:
                continue
            if e.pop is not None and e.pop != sym:
                continue
            tgt = dom.reset(ctl, e.target, e.resets)
            pre = specialize_cached(And(e.guard, inv), ctl.pattern)
            post = specialize_cached(spec.invariants[e.target], tgt.pattern)
            if dom.eval_test(pre, ctl) and dom.eval_test(post, tgt):
                if e.pop is None:
                    out.append((tgt, (sym,)))
                else:
                    out.append((tgt, tuple(e.push or "")))
        rules_cache[key] = out
        return out

    found = [False]

    def add(p, y, q):
        t = (p, y, q)
        if t in rel:
            return
        rel.add(t)
        trans_from.setdefault(p, []).append((y, q))
        queue.append(t)
        if isinstance(p, Control):
            controls_seen.add(p)
            if p.state == to_state:
                found[0] = True

    prev = p0
    for i, y in enumerate(word):
        nxt = _FINAL if i == len(word) - 1 else ("w", i)
        add(prev, y, nxt)
        prev = nxt

    while queue and not found[0]:
        p, y, q = queue.popleft()
        if isinstance(p, Control):
            for p2, out in rules(p, y):
                if len(out) == 0:
                    mids = eps_by_mid.setdefault(q, set())
                    if p2 not in mids:
                        mids.add(p2)
                        for y2, q2 in list(trans_from.get(q, ())):
                            add(p2, y2, q2)
                elif len(out) == 1:
                    add(p2, out[0], q)
                else:
                    chain_prev = p2
                    for n, sym in enumerate(out[:-1]):
                        nxt_state = ("chain", p2, out, n)
                        add(chain_prev, sym, nxt_state)
                        chain_prev = nxt_state
                    add(chain_prev, out[-1], q)
        for p2 in eps_by_mid.get(p, ()):
            add(p2, y, q)

    stats.controls = len(controls_seen)
    stats.transitions = len(rel)
    return found[0], stats


def _all_zero_pattern(k: int) -> Pattern:
    every = [TaggedIndex(i, b) for i in range(k + 1) for b in (0, 1)]
    return Pattern.of([every])


def control_reach(
    spec: PtaSpec, source: tuple[str, str], to_state: str
) -> tuple[bool, SaturationStats]:
    """Whether any configuration at to_state is dense-reachable from
    (source state, all clocks zero, source stack).  Exact."""
    state, stack = source
    if state not in spec.states or to_state not in spec.states:
        raise ValueError("undeclared state")
    for a in stack:
        if a not in spec.stack_alphabet:
            raise ValueError("undeclared stack symbol %r" % a)
    return _post_star_reaches(spec, state, stack, to_state)


# --- lifting graph witnesses to dense runs ---------------------------------------


class LiftError(AssertionError):
    """A graph path failed to realize as a dense run; this would falsify the
    simulation argument and is treated as an internal invariant breach."""


def lift_witness(spec: PtaSpec, gpath: GPath) -> DenseRun:
    """Realize a graph path as a legal dense run whose checkpoints carry
    exactly the path's (state, pattern, integral parts, stack word)."""
    start = gpath.start
    if init_pattern(start.pattern) != start.pattern:
        raise ValueError("lifting starts from an initial pattern")
    if start.discrete[0] != 0:
        raise ValueError("lifting starts with the auxiliary clock at 0")
    v0, _ = realize_pair(start.pattern, start.discrete, start.discrete)
    cur = Configuration(start.state, v0, start.stack)
    steps = []
    checkpoints = []
    from .patterns import pattern_of

    for edge, target in gpath.moves:
        if edge.kind == "progress":
            step: Union[Progress, Fire] = Progress(one_change_delta(v0, cur.valuation))
        elif edge.kind == "stay":
            d = no_change_delta(v0, cur.valuation)
            if d is None:
                raise LiftError("stay move from a split pattern")
            step = Progress(d)
        else:
            assert edge.edge_index is not None
            step = Fire(edge.edge_index)
        try:
            cur = apply_step(spec, cur, step)
        except Exception as e:  # noqa: BLE001 - converted to an invariant breach
            raise LiftError("graph move %s did not replay: %s" % (edge.kind, e)) from e
        got = GConfiguration(
            cur.state, pattern_of(v0, cur.valuation), cur.valuation.integral_parts(), cur.stack
        )
        if got != target:
            raise LiftError(
                "lifted checkpoint %s diverged from graph node %s"
                % ((got.state, got.pattern.encode(), got.discrete.values, got.stack),
                   (target.state, target.pattern.encode(), target.discrete.values, target.stack))
            )
        steps.append(step)
        checkpoints.append(cur)
    return DenseRun(Configuration(start.state, v0, start.stack), tuple(steps), tuple(checkpoints))


# --- bounded binary-reachability queries ------------------------------------------


@dataclass(frozen=True)
class QueryBounds:
    max_steps: int
    max_stack: int
    clock_cap: int
    source_stack_len: int = 1


@dataclass(frozen=True)
class QueryWitness:
    run: DenseRun
    source: Configuration
    target: Configuration


@dataclass
class QueryResult:
    verdict: str  # 'WitnessFound' | 'NoWitnessWithinBounds' | 'Unreachable'
    witness: Optional[QueryWitness]
    diagnostics: dict


def _relation_symbols(l: MixedLinearRelation) -> set[str]:
    out: set[str] = set()

    def walk_term(t: LinearTerm) -> None:
        if isinstance(t, TCount):
            out.add(t.symbol)
        elif isinstance(t, (TAdd, TSub)):
            walk_term(t.left)
            walk_term(t.right)

    def walk(rel: MixedLinearRelation) -> None:
        if isinstance(rel, (RelGt0, RelEq0)):
            walk_term(rel.term)
        elif isinstance(rel, RelMod):
            walk_term(rel.term)
        elif isinstance(rel, RelNot):
            walk(rel.arg)
        elif isinstance(rel, RelAnd):
            walk(rel.left)
            walk(rel.right)

    walk(l)
    return out


def _relation_clocks(l: MixedLinearRelation) -> set[int]:
    out: set[int] = set()

    def walk_term(t: LinearTerm) -> None:
        if isinstance(t, (TClock, TIntPart, TFrac)):
            out.add(t.clock)
        elif isinstance(t, (TAdd, TSub)):
            walk_term(t.left)
            walk_term(t.right)

    def walk(rel: MixedLinearRelation) -> None:
        if isinstance(rel, (RelGt0, RelEq0, RelMod)):
            walk_term(rel.term)
        elif isinstance(rel, RelNot):
            walk(rel.arg)
        elif isinstance(rel, RelAnd):
            walk(rel.left)
            walk(rel.right)

    walk(l)
    return out


def _validate_query(spec: PtaSpec, l: MixedLinearRelation) -> None:
    for sym in _relation_symbols(l):
        if sym not in spec.stack_alphabet:
            raise QueryError("undeclared stack symbol %r in relation" % sym)
    for clk in _relation_clocks(l):
        if not 1 <= clk <= spec.clock_count:
            raise QueryError("clock x%d out of range in relation" % clk)

    def check_mod(rel: MixedLinearRelation) -> None:
        if isinstance(rel, RelMod):
            if not term_is_discrete(rel.term):
                raise QueryError("dense variable inside a mod atom")
        elif isinstance(rel, RelNot):
            check_mod(rel.arg)
        elif isinstance(rel, RelAnd):
            check_mod(rel.left)
            check_mod(rel.right)

    check_mod(l)


def _trivially_false(l: MixedLinearRelation) -> bool:
    """Constant-fold atoms whose linear term normalizes to a constant."""

    def fold(rel: MixedLinearRelation) -> Optional[bool]:
        if isinstance(rel, (RelGt0, RelEq0)):
            coeffs, const = linearize(rel.term)
            if coeffs:
                return None
            return const > 0 if isinstance(rel, RelGt0) else const == 0
        if isinstance(rel, RelMod):
            coeffs, const = linearize(rel.term)
            if coeffs:
                return None
            return const % rel.modulus == 0
        if isinstance(rel, RelNot):
            inner = fold(rel.arg)
            return None if inner is None else not inner
        if isinstance(rel, RelAnd):
            a, b = fold(rel.left), fold(rel.right)
            if a is False or b is False:
                return False
            if a is True and b is True:
                return True
            return None
        return None

    return fold(l) is False


def _stack_words(alphabet: Sequence[str], max_len: int) -> list[str]:
    words = [""]
    for n in range(1, max_len + 1):
        words.extend("".join(t) for t in itertools.product(alphabet, repeat=n))
    return words


def binreach_query(spec: PtaSpec, l: MixedLinearRelation, bounds: QueryBounds) -> QueryResult:
    """Search for a configuration pair (alpha, beta) with alpha reaching beta
    and l(alpha, beta) true, within the given bounds.

    Sources range over every state, every initial pattern, integral parts up
    to the clock cap (auxiliary clock pinned to 0), and stack words up to the
    source stack length.  Every reached endpoint is realized with three
    boundary-adjacent families of exact fractional parts before evaluating l.
    """
    _validate_query(spec, l)
    diagnostics = {"nodes_explored": 0, "patterns_seen": 0, "evaluations": 0, "time_ms": 0}
    if _trivially_false(l):
        return QueryResult("NoWitnessWithinBounds", None, diagnostics | {"note": "relation is unsatisfiable"})

    g_bounds = Bounds(bounds.max_steps, bounds.max_stack, bounds.clock_cap)
    alphabet = sorted(spec.stack_alphabet)
    words = _stack_words(alphabet, min(bounds.source_stack_len, bounds.max_stack)) if alphabet else [""]
    init_patterns = sorted(enumerate_initial_patterns(spec.clock_count), key=lambda p: p.encode())
    grids = itertools.product(range(bounds.clock_cap + 1), repeat=spec.clock_count)
    source_ints = [DiscreteValuation((0,) + tuple(g)) for g in grids]

    truncated_any = False
    patterns_seen: set = set()
    for state in sorted(spec.states):
        for eta0 in init_patterns:
            for u0 in source_ints:
                for w0 in words:
                    start = GConfiguration(state, eta0, u0, w0)
                    result = g_reach_bounded(spec, start, g_bounds)
                    truncated_any = truncated_any or result.truncated
                    diagnostics["nodes_explored"] += len(result.order)
                    for gc in result.order:
                        patterns_seen.add(gc.pattern)
                        for family in ("mid", "low", "high"):
                            v0, v1 = realize_pair(gc.pattern, u0, gc.discrete, family=family)
                            alpha = Configuration(state, v0, w0)
                            beta = Configuration(gc.state, v1, gc.stack)
                            diagnostics["evaluations"] += 1
                            if not eval_mixed(l, alpha, beta):
                                continue
                            lifted = lift_witness(spec, result.path_to(gc))
                            run = transfer_run(spec, lifted, (v0, v1))
                            assert run.end == beta
                            assert eval_mixed(l, Configuration(state, v0, w0), run.end)
                            diagnostics["patterns_seen"] = len(patterns_seen)
                            return QueryResult("WitnessFound", QueryWitness(run, alpha, beta), diagnostics)
    diagnostics["patterns_seen"] = len(patterns_seen)
    verdict = "NoWitnessWithinBounds" if truncated_any else "Unreachable"
    return QueryResult(verdict, None, diagnostics)


# --- separating mixed relations ----------------------------------------------------


def _sum_terms(parts: list[LinearTerm]) -> LinearTerm:
    if not parts:
        return TInt(0)
    out = parts[0]
    for p in parts[1:]:
        out = TAdd(out, p)
    return out


def _coeff_times(leaf: LinearTerm, coeff: int) -> LinearTerm:
    out = leaf
    for _ in range(abs(coeff) - 1):
        out = TAdd(out, leaf)
    return out


def _rebuild(coeffs: dict, const: int) -> LinearTerm:
    pos = [_coeff_times(leaf, c) for leaf, c in coeffs.items() if c > 0]
    neg = [_coeff_times(leaf, c) for leaf, c in coeffs.items() if c < 0]
    if const > 0:
        pos.append(TInt(const))
    elif const < 0:
        neg.append(TInt(-const))
    term = _sum_terms(pos)
    for n in neg:
        term = TSub(term, n)
    return term


def separate_mixed(l: MixedLinearRelation) -> MixedLinearRelation:
    """Rewrite l so every atom is either dense-only (over fractional parts)
    or discrete-only (over integral parts, integer designators, and counts).

    Each atom's dense part - a sum of fractional variables with integer
    coefficients - is bounded, so it is case-split over the integer points
    and unit intervals it can reach; within each case the comparison reduces
    to a discrete one.
    """
    if isinstance(l, RelNot):
        return RelNot(separate_mixed(l.arg))
    if isinstance(l, RelAnd):
        return RelAnd(separate_mixed(l.left), separate_mixed(l.right))
    if isinstance(l, RelMod):
        return l  # discrete by construction
    if not isinstance(l, (RelGt0, RelEq0)):
        raise TypeError("not a mixed linear relation: %r" % (l,))

    coeffs, const = linearize(l.term)
    dense = {leaf: c for leaf, c in coeffs.items() if isinstance(leaf, TClock)}
    if not dense:
        return l

    # substitute x = intpart(x) + frac(x)
    disc_coeffs = {leaf: c for leaf, c in coeffs.items() if not isinstance(leaf, TClock)}
    frac_coeffs: dict = {}
    for leaf, c in dense.items():
        ip = TIntPart(leaf.clock, leaf.primed)
        fr = TFrac(leaf.clock, leaf.primed)
        disc_coeffs[ip] = disc_coeffs.get(ip, 0) + c
        frac_coeffs[fr] = frac_coeffs.get(fr, 0) + c

    lo = sum(c for c in frac_coeffs.values() if c < 0)  # exclusive lower bound
    hi = sum(c for c in frac_coeffs.values() if c > 0)  # exclusive upper bound

    frac_term = _rebuild(frac_coeffs, 0)
    disc_term = _rebuild(disc_coeffs, const)

    def frac_eq(m: int) -> MixedLinearRelation:
        return RelEq0(TSub(frac_term, TInt(m)))

    def frac_in_open(m: int) -> MixedLinearRelation:
        above = RelGt0(TSub(frac_term, TInt(m)))
        below = RelGt0(TSub(TInt(m + 1), frac_term))
        return RelAnd(above, below)

    def disc_gt(m: int) -> MixedLinearRelation:
        # discrete part + m > 0 (all terms integer-valued)
        return RelGt0(TAdd(disc_term, TInt(m)))

    def disc_eq(m: int) -> MixedLinearRelation:
        return RelEq0(TAdd(disc_term, TInt(m)))

    points = sorted(set(range(lo + 1, hi)) | {0})
    cases: list[MixedLinearRelation] = []
    if isinstance(l, RelGt0):
        for m in points:
            cases.append(RelAnd(frac_eq(m), disc_gt(m)))
        for m in range(lo, hi):
            cases.append(RelAnd(frac_in_open(m), disc_gt(m)))
    else:
        for m in points:
            cases.append(RelAnd(frac_eq(m), disc_eq(m)))

    out: Optional[MixedLinearRelation] = None
    for case in cases:
        out = case if out is None else RelNot(RelAnd(RelNot(out), RelNot(case)))
    return out if out is not None else RelEq0(TInt(1))  # unsatisfiable: empty case list


def is_separately_mixed(l: MixedLinearRelation) -> bool:
    """True when no atom mixes dense and discrete leaves."""

    def leaves(t: LinearTerm, acc: list) -> None:
        if isinstance(t, (TClock, TFrac)):
            acc.append("dense")
        elif isinstance(t, (TIntPart, TCount)):
            acc.append("discrete")
        elif isinstance(t, (TAdd, TSub)):
            leaves(t.left, acc)
            leaves(t.right, acc)

    def walk(rel: MixedLinearRelation) -> bool:
        if isinstance(rel, (RelGt0, RelEq0, RelMod)):
            acc: list = []
            leaves(rel.term, acc)
            return not ("dense" in acc and "discrete" in acc)
        if isinstance(rel, RelNot):
            return walk(rel.arg)
        if isinstance(rel, RelAnd):
            return walk(rel.left) and walk(rel.right)
        raise TypeError("not a mixed linear relation: %r" % (rel,))

    return walk(l)
