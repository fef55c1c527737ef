"""The pattern graph: a discrete transition system on (state, pattern,
integral clocks, stack word) simulating the dense automaton, plus the
pattern ordering graph with the synchronous-counter translation, bounded
exploration, projection of dense runs onto graph paths, and DOT export.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

from .constraints import And, DiscreteConstraint, eval_discrete_constraint
from .model import (
    Configuration,
    DiscreteValuation,
    GConfiguration,
    Pattern,
    PtaSpec,
    progress_valuation,
)
from .patterns import (
    classify,
    increment_vector,
    next_of,
    next_pattern,
    pattern_of,
    reset_of,
    reset_pattern,
    specialize,
)
from .semantics import DenseRun, Fire, gap_down, now_is_shared


@dataclass(frozen=True)
class GEdge:
    """One edge of the pattern graph.

    Progress edges advance the pattern along its ring on the same state;
    stay edges loop on a merge-pattern node; reset edges follow an automaton
    edge (index into the spec's edge list) and may rewrite the stack.
    """

    kind: str  # 'progress' | 'stay' | 'reset'
    from_state: str
    from_pattern: Pattern
    to_state: str
    to_pattern: Pattern
    pre_test: DiscreteConstraint
    post_test: DiscreteConstraint
    edge_index: Optional[int] = None


def g_successors(spec: PtaSpec, gc: GConfiguration) -> list[tuple[GEdge, GConfiguration]]:
    """Enumerate the enabled one-step successors of a graph configuration."""
    inv = spec.invariants[gc.state]
    pre = specialize(inv, gc.pattern)
    pre_ok = eval_discrete_constraint(pre, gc.discrete)
    out: list[tuple[GEdge, GConfiguration]] = []

    nr = next_pattern(gc.pattern, gc.discrete)
    post = specialize(inv, nr.pattern)
    if pre_ok and eval_discrete_constraint(post, nr.discrete):
        edge = GEdge("progress", gc.state, gc.pattern, gc.state, nr.pattern, pre, post)
        out.append((edge, GConfiguration(gc.state, nr.pattern, nr.discrete, gc.stack)))

    if pre_ok and classify(gc.pattern).merge:
        edge = GEdge("stay", gc.state, gc.pattern, gc.state, gc.pattern, pre, pre)
        out.append((edge, gc))

    for idx, e in enumerate(spec.edges):
        if e.source != gc.state:
            continue
        if e.pop is not None:
            if not gc.stack or gc.stack[0] != e.pop:
                continue
            stack = (e.push or "") + gc.stack[1:]
        else:
            stack = gc.stack
        eta2, u2 = reset_pattern(gc.pattern, gc.discrete, e.resets)
        pre_t = specialize(And(e.guard, inv), gc.pattern)
        post_t = specialize(spec.invariants[e.target], eta2)
        if eval_discrete_constraint(pre_t, gc.discrete) and eval_discrete_constraint(post_t, u2):
            edge = GEdge("reset", gc.state, gc.pattern, e.target, eta2, pre_t, post_t, idx)
            out.append((edge, GConfiguration(e.target, eta2, u2, stack)))
    return out


@dataclass(frozen=True)
class Bounds:
    max_steps: int
    max_stack: int
    clock_cap: int


def _canon_key(gc: GConfiguration) -> tuple:
    return (gc.state, gc.pattern.encode(), gc.discrete.values, gc.stack)


@dataclass
class GReachResult:
    start: GConfiguration
    bounds: Bounds
    depth: dict[GConfiguration, int]
    parent: dict[GConfiguration, Optional[tuple[GConfiguration, GEdge]]]
    order: list[GConfiguration]
    truncated: bool

    def __contains__(self, gc: GConfiguration) -> bool:
        return gc in self.depth

    def path_to(self, gc: GConfiguration) -> "GPath":
        moves: list[tuple[GEdge, GConfiguration]] = []
        cur = gc
        while True:
            back = self.parent[cur]
            if back is None:
                break
            prev, edge = back
            moves.append((edge, cur))
            cur = prev
        moves.reverse()
        return GPath(self.start, tuple(moves))


@dataclass(frozen=True)
class GPath:
    start: GConfiguration
    moves: tuple[tuple[GEdge, GConfiguration], ...]

    @property
    def end(self) -> GConfiguration:
        return self.moves[-1][1] if self.moves else self.start

    def configurations(self) -> tuple[GConfiguration, ...]:
        return (self.start,) + tuple(gc for _, gc in self.moves)


def g_reach_bounded(spec: PtaSpec, start: GConfiguration, bounds: Bounds) -> GReachResult:
    """Deterministic breadth-first closure under g_successors, truncated by
    the given bounds; rejected successors set the truncation marker instead
    of raising."""
    if not classify(start.pattern).regulated:
        raise ValueError("exploration starts from a regulated pattern")
    if start.discrete[0] != 0:
        raise ValueError("exploration starts with the auxiliary clock at 0")
    depth = {start: 0}
    parent: dict[GConfiguration, Optional[tuple[GConfiguration, GEdge]]] = {start: None}
    order = [start]
    truncated = False
    frontier = [start]
    for level in range(bounds.max_steps):
        nxt: list[GConfiguration] = []
        for gc in frontier:
            for edge, succ in g_successors(spec, gc):
                if succ in depth:
                    continue
                if len(succ.stack) > bounds.max_stack or any(
                    u > bounds.clock_cap for u in succ.discrete
                ):
                    truncated = True
                    continue
                depth[succ] = level + 1
                parent[succ] = (gc, edge)
                nxt.append(succ)
        nxt.sort(key=_canon_key)
        order.extend(nxt)
        frontier = nxt
        if not frontier:
            break
    else:
        # depth budget exhausted; did the frontier still have unseen successors?
        for gc in frontier:
            if any(succ not in depth for _, succ in g_successors(spec, gc)):
                truncated = True
                break
    return GReachResult(start, bounds, depth, parent, order, truncated)


# --- pattern ordering graph and synchronous counters -------------------------


@dataclass(frozen=True)
class PSuccessors:
    p_succ: Pattern
    r_succs: dict


def p_successors(eta: Pattern, reset_sets: Iterable[frozenset[int]] = ()) -> PSuccessors:
    """Successors in the pattern ordering graph: the unique progress successor
    plus the reset successor for each queried reset set."""
    return PSuccessors(next_of(eta), {frozenset(r): reset_of(eta, r) for r in reset_sets})


@dataclass(frozen=True)
class PLabel:
    """A progress edge of the ordering graph, carrying the increment vector of
    its source and whether it lands on a regulated pattern (an add-one edge)."""

    increment: tuple[int, ...]
    lands_regulated: bool


@dataclass(frozen=True)
class RLabel:
    resets: frozenset[int]


SyncLabel = Union[PLabel, RLabel]


@dataclass(frozen=True)
class SyncState:
    """Synchronous counters z with the segment bookkeeping (Delta, I) that
    recovers the asynchronous counters as y = (z + Delta) reset on I."""

    z: tuple[int, ...]
    delta_acc: tuple[int, ...]
    reset_set: frozenset[int]

    def recovered(self) -> tuple[int, ...]:
        return tuple(
            0 if i in self.reset_set else zi + di
            for i, (zi, di) in enumerate(zip(self.z, self.delta_acc))
        )


def sync_step(st: SyncState, label: SyncLabel) -> SyncState:
    """One translation step of the synchronous-counter simulation."""
    if isinstance(label, PLabel):
        if label.lands_regulated:
            z = tuple(
                0 if i in st.reset_set else zi + 1 for i, zi in enumerate(st.z)
            )
            return SyncState(z, (0,) * len(st.z), frozenset())
        delta = tuple(d + inc for d, inc in zip(st.delta_acc, label.increment))
        return SyncState(st.z, delta, st.reset_set)
    z = tuple(0 if i in label.resets else zi for i, zi in enumerate(st.z))
    delta = tuple(0 if i in label.resets else d for i, d in enumerate(st.delta_acc))
    return SyncState(z, delta, st.reset_set | label.resets)


def check_sync_claim(
    eta0: Pattern, labels: Sequence[Union[str, frozenset[int]]], u_start: DiscreteValuation
) -> bool:
    """Walk a regulated path of the ordering graph ('p' or a reset set per
    edge), running the direct counter semantics and the synchronous
    simulation side by side; True iff they agree at the end."""
    if not classify(eta0).regulated:
        raise ValueError("the claim is about regulated paths")
    eta = eta0
    y = u_start
    st = SyncState(u_start.values, (0,) * len(u_start.values), frozenset())
    for lab in labels:
        if lab == "p":
            inc = increment_vector(eta)
            eta2 = next_of(eta)
            y = y.add(inc)
            st = sync_step(st, PLabel(inc, classify(eta2).regulated))
            eta = eta2
        else:
            rs = frozenset(lab)
            eta, y = reset_pattern(eta, y, rs)
            st = sync_step(st, RLabel(rs))
    return y.values == st.recovered()


# --- projecting dense runs onto the graph ------------------------------------


@dataclass(frozen=True)
class ProjectedMove:
    kind: str  # 'progress' | 'stay' | 'reset'
    edge_index: Optional[int]
    config: GConfiguration


def project_run(spec: PtaSpec, run: DenseRun) -> tuple[GConfiguration, tuple[ProjectedMove, ...]]:
    """Project a dense run starting at an initial valuation onto the pattern
    graph: progress steps decompose into one-pattern-change slices (a
    no-change progress becomes a stay move), resets map to reset moves."""
    v0 = run.start.valuation
    if not v0.is_initial:
        raise ValueError("projection needs a run from an initial valuation")

    def abstract(c: Configuration) -> GConfiguration:
        return GConfiguration(
            c.state, pattern_of(v0, c.valuation), c.valuation.integral_parts(), c.stack
        )

    start = abstract(run.start)
    moves: list[ProjectedMove] = []
    configs = run.configurations()
    for idx, step in enumerate(run.steps):
        before = configs[idx]
        after = configs[idx + 1]
        if isinstance(step, Fire):
            moves.append(ProjectedMove("reset", step.edge, abstract(after)))
            continue
        remaining = step.delta
        v = before.valuation
        emitted = 0
        while remaining > 0:
            gd = gap_down(v0, v)
            if now_is_shared(v0, v):
                s = remaining if remaining < gd else gd / 2
                v = progress_valuation(v, s)
                remaining -= s
                moves.append(
                    ProjectedMove(
                        "progress", None, GConfiguration(
                            before.state, pattern_of(v0, v), v.integral_parts(), before.stack
                        )
                    )
                )
                emitted += 1
            elif remaining < gd:
                v = progress_valuation(v, remaining)
                remaining -= remaining
                if emitted == 0:
                    moves.append(ProjectedMove("stay", None, abstract(after)))
            else:
                v = progress_valuation(v, gd)
                remaining -= gd
                moves.append(
                    ProjectedMove(
                        "progress", None, GConfiguration(
                            before.state, pattern_of(v0, v), v.integral_parts(), before.stack
                        )
                    )
                )
                emitted += 1
        assert v == after.valuation
    return start, tuple(moves)


# --- DOT export ----------------------------------------------------------------


def render_dot(spec: PtaSpec, result: GReachResult) -> str:
    """Byte-stable Graphviz rendering of the explored slice (all edges between
    visited configurations)."""
    nodes = sorted(result.depth, key=_canon_key)
    ids = {gc: "n%d" % i for i, gc in enumerate(nodes)}
    lines = ["digraph pattern_graph {"]
    for gc in nodes:
        label = "%s | %s | (%s) | %s" % (
            gc.state,
            gc.pattern.encode(),
            ",".join(str(u) for u in gc.discrete),
            gc.stack or "(empty)",
        )
        shape = ' shape=box' if gc == result.start else ""
        lines.append('  %s [label="%s"%s];' % (ids[gc], label, shape))
    for gc in nodes:
        for edge, succ in g_successors(spec, gc):
            if succ not in result.depth:
                continue
            suffix = "" if edge.edge_index is None else " %d" % edge.edge_index
            lines.append(
                '  %s -> %s [label="%s%s"];' % (ids[gc], ids[succ], edge.kind, suffix)
            )
    lines.append("}")
    return "\n".join(lines) + "\n"
