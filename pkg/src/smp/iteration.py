"""Computing the side-optimal stable assignments.

Three routes are provided:

* the classical deferred-acceptance style iteration (firms propose up to the
  current bounds, workers cut back, bounds shrink) — may fail to terminate on
  instances with ties because the per-round progress can shrink geometrically;
* the finite variant, which detects rounds that make no combinatorial
  progress and aggregates the whole stalled tail into one exact LP step;
* a combinatorial decision procedure for the special case where stable
  assignments fill every quota, via an auxiliary instance with two depot
  vertices absorbing all slack.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional

from .choice import choose
from .model import Edge, Instance, InstanceError, full_assignment, vertex_load
from .rotations import route_to_terminal
from .simplex import LinearProgram, simplex_maximize
from .stability import stability_report

MAX_STEPS_ENV = "SMP_MAX_STEPS"


def _step_cap(inst: Instance) -> int:
    override = os.environ.get(MAX_STEPS_ENV)
    if override:
        return int(override)
    return 10 * len(inst.edges)


@dataclass
class IterationState:
    round: int
    bounds: dict[str, Fraction]
    x: dict[str, Fraction]
    y: dict[str, Fraction]
    terminal: bool
    fully_firms: frozenset[str] = frozenset()
    fully_workers: frozenset[str] = frozenset()
    reduced_edges: dict[str, frozenset[str]] = field(default_factory=dict)


def initial_state(inst: Instance) -> IterationState:
    if any(e.capacity is None for e in inst.edges):
        raise InstanceError("iteration requires finite capacities")
    bounds = {e.id: e.capacity for e in inst.edges}
    return IterationState(
        round=-1, bounds=bounds, x=dict(bounds), y=dict(bounds), terminal=False
    )


def ordinary_iteration_step(inst: Instance, state: IterationState) -> IterationState:
    """One proposal/cut round: firms take up to the bounds, workers cut back.

    Wherever the workers' cut bites, the bound drops to the cut value, so
    firms cannot re-propose what was refused.
    """
    b = state.bounds
    x: dict[str, Fraction] = {}
    for f in inst.firms:
        x.update(choose(inst, f, b).result)
    y: dict[str, Fraction] = {}
    for w in inst.workers:
        y.update(choose(inst, w, x).result)
    orig = {e.id: e.capacity for e in inst.edges}
    new_bounds = {
        eid: (b[eid] if y[eid] == x[eid] else y[eid]) for eid in inst.edge_ids
    }
    for eid in inst.edge_ids:
        assert b[eid] >= x[eid] >= y[eid] >= 0 and b[eid] >= new_bounds[eid]
    fully_firms = frozenset(
        f for f in inst.firms if vertex_load(inst, x, f) == inst.quota[f]
    )
    fully_workers = frozenset(
        w for w in inst.workers if vertex_load(inst, y, w) == inst.quota[w]
    )
    reduced = {
        f: frozenset(
            e for e in inst.incident[f] if new_bounds[e] < orig[e]
        )
        for f in inst.firms
    }
    return IterationState(
        round=state.round + 1,
        bounds=new_bounds,
        x=x,
        y=y,
        terminal=(y == x),
        fully_firms=fully_firms,
        fully_workers=fully_workers,
        reduced_edges=reduced,
    )


def _progress_marker(inst: Instance, state: IterationState):
    """The monotone quantities whose growth makes a round 'productive'."""
    orig = {e.id: e.capacity for e in inst.edges}
    stuck = {
        f: frozenset(
            e
            for e in inst.incident[f]
            if state.x[e] == orig[e] or e in state.reduced_edges[f]
        )
        for f in inst.firms
    }
    worker_view = {}
    for w in state.fully_workers:
        out = choose(inst, w, state.y)
        worker_view[w] = (out.critical_tie, out.head)
    return stuck, state.fully_workers, worker_view


def _is_productive(before, after) -> bool:
    stuck0, fully0, view0 = before
    stuck1, fully1, view1 = after
    if any(stuck1[f] - stuck0[f] for f in stuck1):
        return True
    if fully1 - fully0:
        return True
    for w in fully0 & fully1:
        tie0, head0 = view0[w]
        tie1, head1 = view1[w]
        if tie1 < tie0 or head1 - head0:
            return True
    return False


@dataclass
class BigIterationLP:
    lp: LinearProgram
    firms: tuple[str, ...]
    workers: tuple[str, ...]
    firm_head: dict[str, frozenset[str]]
    worker_head: dict[str, frozenset[str]]


def _build_big_lp(inst: Instance, state: IterationState) -> BigIterationLP:
    """Aggregate a stalled tail of rounds into one linear program.

    Variables: a uniform raise φ_f on each fully filled firm's head, a uniform
    cut ψ_w on each fully filled worker's head.  Constraints keep the workers
    exactly filled, respect bounds/quotas, and keep every worker head a head.
    The objective pushes the total raise as far as the whole stalled tail
    could ever have gone.
    """
    x, y = state.x, state.y
    firms = tuple(sorted(state.fully_firms))
    workers = tuple(sorted(state.fully_workers))
    fh = {f: choose(inst, f, x).head for f in firms}
    wh: dict[str, frozenset[str]] = {}
    height: dict[str, Fraction] = {}
    critical: dict[str, int] = {}
    for w in workers:
        out = choose(inst, w, y)
        wh[w] = out.head
        critical[w] = out.critical_tie
        heights = {y[e] for e in out.head}
        assert len(heights) == 1, f"head of {w!r} not level"
        height[w] = heights.pop()
    var = {v: i for i, v in enumerate(firms + workers)}
    n = len(var)
    obj = [Fraction(0)] * n
    for f in firms:
        obj[var[f]] = Fraction(len(fh[f]))
    lp = LinearProgram(objective=obj)

    def firm_of(eid: str) -> str:
        return inst.edge_by_id[eid].firm

    def worker_of(eid: str) -> str:
        return inst.edge_by_id[eid].worker

    for w in workers:  # keep w exactly filled
        row = [Fraction(0)] * n
        row[var[w]] = Fraction(len(wh[w]))
        for e in inst.incident[w]:
            f = firm_of(e)
            if f in var and e in fh[f]:
                row[var[f]] -= 1
        lp.a_eq.append(row)
        lp.b_eq.append(Fraction(0))
    for w in workers:  # cut cannot exceed the head level
        row = [Fraction(0)] * n
        row[var[w]] = Fraction(1)
        lp.a_le.append(row)
        lp.b_le.append(height[w])
    for f in firms:  # firm quota after raise minus the cuts it receives
        row = [Fraction(0)] * n
        row[var[f]] = Fraction(len(fh[f]))
        for e in state.reduced_edges[f]:
            w = worker_of(e)
            if w in var and e in wh[w]:
                row[var[w]] -= 1
        lp.a_le.append(row)
        lp.b_le.append(inst.quota[f] - vertex_load(inst, y, f))
    for f in firms:  # raises stay under the original capacities
        for e in fh[f]:
            cap = inst.edge_by_id[e].capacity
            row = [Fraction(0)] * n
            row[var[f]] = Fraction(1)
            lp.a_le.append(row)
            lp.b_le.append(cap - y[e])
    for w in workers:  # worker heads must remain heads
        tie = inst.corteges[w][critical[w]]
        for e in tie:
            if e in wh[w]:
                continue
            f = firm_of(e)
            row = [Fraction(0)] * n
            row[var[w]] = Fraction(1)
            if f in var and e in fh[f]:
                row[var[f]] = Fraction(1)
            lp.a_le.append(row)
            lp.b_le.append(height[w] - y[e])
    for f in firms:
        # a raise lands uniformly on the whole head H_f; if any of those
        # edges sits in a filled worker's head or below its critical tie, the
        # worker would cut the raise right back (shrinking the bound), which
        # cannot happen in a stalled tail -- so such a firm cannot raise
        blocked = False
        for e in fh[f]:
            w = worker_of(e)
            if w not in wh:
                continue
            if e in wh[w] or inst.tie_index[(w, e)] > critical[w]:
                blocked = True
                break
        if blocked:
            row = [Fraction(0)] * n
            row[var[f]] = Fraction(1)
            lp.a_le.append(row)
            lp.b_le.append(Fraction(0))
    deficit_workers = [w for w in inst.workers if w not in state.fully_workers]
    for w in deficit_workers:  # raises must not overflow a deficit worker
        row = [Fraction(0)] * n
        for e in inst.incident[w]:
            f = firm_of(e)
            if f in var and e in fh[f]:
                row[var[f]] += 1
        lp.a_le.append(row)
        lp.b_le.append(inst.quota[w] - vertex_load(inst, y, w))
    return BigIterationLP(lp=lp, firms=firms, workers=workers, firm_head=fh, worker_head=wh)


def _big_iteration(inst: Instance, state: IterationState) -> IterationState:
    big = _build_big_lp(inst, state)
    res = simplex_maximize(big.lp)
    assert res.status == "optimal", f"aggregation LP {res.status}"
    var = {v: i for i, v in enumerate(big.firms + big.workers)}
    phi = {f: res.solution[var[f]] for f in big.firms}
    psi = {w: res.solution[var[w]] for w in big.workers}
    delta = {eid: Fraction(0) for eid in inst.edge_ids}
    for f in big.firms:
        for e in big.firm_head[f]:
            delta[e] += phi[f]
    for w in big.workers:
        for e in big.worker_head[w]:
            # firms raising into a filled worker's head are excluded by the
            # LP, so a cut edge can never simultaneously carry a raise
            assert delta[e] == 0, f"edge {e!r} raised and cut at once"
            delta[e] -= psi[w]
    yp = {eid: state.y[eid] + delta[eid] for eid in inst.edge_ids}
    if res.value > 0:
        # at least one inequality must be tight, otherwise the raise could grow
        tight = any(
            sum(a * v for a, v in zip(row, res.solution)) == rhs
            for row, rhs in zip(big.lp.a_le, big.lp.b_le)
        )
        assert tight, "aggregation LP optimum leaves all inequalities slack"
    bounds = dict(state.bounds)
    for w in big.workers:
        for e in big.worker_head[w]:
            bounds[e] = yp[e]
    for f in big.firms:
        for e in big.firm_head[f]:
            bounds[e] = max(bounds[e], yp[e])
    return IterationState(
        round=state.round + 1,
        bounds=bounds,
        x=yp,
        y=yp,
        terminal=False,
        fully_firms=state.fully_firms,
        fully_workers=state.fully_workers,
        reduced_edges={
            f: frozenset(
                e for e in inst.incident[f] if bounds[e] < inst.edge_by_id[e].capacity
            )
            for f in inst.firms
        },
    )


def _is_stable(inst: Instance, x: Mapping[str, Fraction]) -> bool:
    try:
        return stability_report(inst, x).stable
    except InstanceError:
        return False


def solve_xmin_modified(inst: Instance, trace: Optional[list] = None) -> dict[str, Fraction]:
    """The firm-optimal stable assignment, guaranteed finite.

    Ordinary rounds run as long as they are productive; a stalled round is
    followed by one LP aggregation step.  The raw stable output is then
    normalized to the firm-optimal point by exhausting rotations in the
    swapped orientation.
    """
    cap = _step_cap(inst)
    state = initial_state(inst)
    result: Optional[dict[str, Fraction]] = None
    marker = None
    while state.round < cap:
        state = ordinary_iteration_step(inst, state)
        if trace is not None:
            trace.append(("ordinary", state.round, dict(state.y)))
        if state.terminal:
            result = state.x
            break
        new_marker = _progress_marker(inst, state)
        if marker is not None and not _is_productive(marker, new_marker):
            state = _big_iteration(inst, state)
            if trace is not None:
                trace.append(("aggregated", state.round, dict(state.y)))
            new_marker = _progress_marker(inst, state)
            if _is_stable(inst, state.y):
                result = state.y
                break
        marker = new_marker
    if result is None:
        raise AssertionError(
            f"no stable point within {cap} rounds (raise ${MAX_STEPS_ENV} to retry)"
        )
    assert stability_report(inst, result).stable
    # normalize: in the swapped orientation the routes descend toward the
    # firm-optimal end of the original instance
    xmin, _ = route_to_terminal(inst.swapped(), result)
    return full_assignment(inst, xmin)


def solve_xmin(inst: Instance) -> dict[str, Fraction]:
    return solve_xmin_modified(inst)


def solve_xmax(inst: Instance) -> dict[str, Fraction]:
    """The worker-optimal stable assignment (terminal point of any route)."""
    xmax, _ = route_to_terminal(inst, solve_xmin(inst))
    return xmax


@dataclass
class ExtendedInstance:
    base: Instance
    ext: Instance
    depot_firm: str
    depot_worker: str
    firm_side_edges: tuple[str, ...]   # depot-firm -> worker edges ("A")
    worker_side_edges: tuple[str, ...]  # firm -> depot-worker edges ("B")
    root_edge: str

    def seed(self) -> dict[str, Fraction]:
        """The firm-optimal assignment of the extension: all slack at depots."""
        y0 = {eid: Fraction(0) for eid in self.ext.edge_ids}
        for eid in self.firm_side_edges + self.worker_side_edges:
            y0[eid] = self.ext.edge_by_id[eid].capacity
        return y0


def build_extended_instance(inst: Instance) -> ExtendedInstance:
    f0, w0 = "__depot_firm", "__depot_worker"
    if f0 in inst.quota or w0 in inst.quota:
        raise InstanceError("reserved depot vertex ids present in instance")
    edges = list(inst.edges)
    a_edges, b_edges = [], []
    for w in inst.workers:
        eid = f"__a_{w}"
        edges.append(Edge(eid, f0, w, inst.quota[w]))
        a_edges.append(eid)
    for f in inst.firms:
        eid = f"__b_{f}"
        edges.append(Edge(eid, f, w0, inst.quota[f]))
        b_edges.append(eid)
    root = "__root"
    edges.append(Edge(root, f0, w0, None))
    q_w = sum((inst.quota[w] for w in inst.workers), Fraction(0))
    q_f = sum((inst.quota[f] for f in inst.firms), Fraction(0))
    quota = dict(inst.quota)
    quota[f0] = q_w
    quota[w0] = q_f
    corteges: dict[str, list] = {}
    for f in inst.firms:
        corteges[f] = [[f"__b_{f}"]] + [list(t) for t in inst.corteges[f]]
    for w in inst.workers:
        corteges[w] = [list(t) for t in inst.corteges[w]] + [[f"__a_{w}"]]
    corteges[f0] = [[e] for e in sorted(a_edges)] + [[root]]
    corteges[w0] = [[root]] + [[e] for e in sorted(b_edges)]
    ext = Instance(
        firms=list(inst.firms) + [f0],
        workers=list(inst.workers) + [w0],
        edges=edges,
        quota=quota,
        corteges=corteges,
    )
    return ExtendedInstance(
        base=inst,
        ext=ext,
        depot_firm=f0,
        depot_worker=w0,
        firm_side_edges=tuple(a_edges),
        worker_side_edges=tuple(b_edges),
        root_edge=root,
    )


@dataclass
class QuotaFillingResult:
    quota_filling: bool
    assignment: Optional[dict[str, Fraction]]


def solve_quota_filling(inst: Instance) -> QuotaFillingResult:
    """Decide whether every stable assignment fills all quotas; if so, return one.

    The instance is extended by a depot firm and worker that soak up all
    remaining capacity (each real vertex ranks its depot edge at the opposite
    extreme of its list).  The seed putting everything on depot edges is the
    extension's firm-optimal stable point; routing it to the worker-optimal
    end empties the depot edges exactly when the original instance is quota
    filling, and then the restriction is its worker-optimal assignment.
    """
    extended = build_extended_instance(inst)
    ext = extended.ext
    y0 = extended.seed()
    assert stability_report(ext, y0).stable, "depot seed unexpectedly unstable"
    ymax, _ = route_to_terminal(ext, y0)
    side = extended.firm_side_edges + extended.worker_side_edges
    if any(ymax[e] != 0 for e in side):
        return QuotaFillingResult(quota_filling=False, assignment=None)
    x = {eid: ymax[eid] for eid in inst.edge_ids}
    report = stability_report(inst, x)
    assert report.stable and report.deficit == frozenset()
    return QuotaFillingResult(quota_filling=True, assignment=x)
