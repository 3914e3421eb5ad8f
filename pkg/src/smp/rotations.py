"""Rotations: the exact directions along which a stable assignment can move.

Given a stable assignment x, each fully filled worker w can only concede by
decreasing uniformly on its head H_w, and each fully filled firm f can only
gain by increasing uniformly on a "potential head" D_f (the best tie holding
an unsaturated edge that its worker would welcome).  After a cleaning pass
removes vertices pinned by deficit neighbours, the remaining active edges form
a digraph whose sink strong components each carry a unique (up to scale)
balanced circulation — the rotation.  Shifting x by λ·ρ for 0 < λ ≤ τ yields
a new stable assignment strictly worse for firms, better for workers.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from .choice import ChoiceOutcome, choose
from .linalg import gaussian_solve
from .model import Instance, InstanceError, full_assignment
from .stability import stability_report


@dataclass
class ActiveStructure:
    outcomes: dict[str, ChoiceOutcome]       # per-vertex choice at x
    potential_head: dict[str, frozenset[str]]  # f in F^= -> D_f
    chosen_tie: dict[str, Optional[int]]       # f -> tie index of D_f
    reduced_head: dict[str, bool]              # D_f sits inside the critical tie
    head: dict[str, frozenset[str]]            # w in W^= -> H_w
    singular: frozenset[str]                   # V0
    regular: frozenset[str]                    # V+ = V^= - V0
    regular_firms: frozenset[str]
    regular_workers: frozenset[str]

    def active_edges(self) -> frozenset[str]:
        out: set[str] = set()
        for f in self.regular_firms:
            out |= self.potential_head[f]
        for w in self.regular_workers:
            out |= self.head[w]
        return frozenset(out)


@dataclass
class Component:
    firms: tuple[str, ...]
    workers: tuple[str, ...]
    edges: tuple[str, ...]  # active edges inside the component

    @property
    def vertices(self) -> tuple[str, ...]:
        return tuple(sorted(self.firms + self.workers))


@dataclass
class Rotation:
    values: dict[str, Fraction]        # edge id -> integer-valued Fraction
    component: Component
    tau: Fraction
    raise_edges: dict[str, frozenset[str]]  # f -> D_f restriction (positive side)
    drop_edges: dict[str, frozenset[str]]   # w -> H_w restriction (negative side)

    def support(self) -> frozenset[str]:
        return frozenset(e for e, v in self.values.items() if v != 0)

    def key(self) -> tuple:
        """Identity of the rotation: its exact integer vector over the edges."""
        return tuple(sorted((e, v) for e, v in self.values.items() if v != 0))


def build_active_structure(inst: Instance, x: Mapping[str, Fraction]) -> ActiveStructure:
    """Heads, potential heads and the cleaned regular vertex set at stable x."""
    x = full_assignment(inst, x)
    report = stability_report(inst, x)
    if not report.stable:
        raise InstanceError(f"assignment is not stable (blocking: {report.blocking_edges})")
    outcomes = {v: choose(inst, v, x) for v in inst.vertices()}
    fully = report.fully_filled

    def unsaturated(eid: str) -> bool:
        cap = inst.edge_by_id[eid].capacity
        return cap is None or x[eid] < cap

    head = {w: outcomes[w].head for w in inst.workers if w in fully}

    potential_head: dict[str, frozenset[str]] = {}
    chosen_tie: dict[str, Optional[int]] = {}
    reduced: dict[str, bool] = {}
    for f in inst.firms:
        if f not in fully:
            continue
        potential_head[f] = frozenset()
        chosen_tie[f] = None
        reduced[f] = False
        for i, tie in enumerate(inst.corteges[f]):
            # a tie holding an unsaturated edge to a deficit worker blocks
            # this tie and every worse one from being a potential head
            if any(
                unsaturated(e) and inst.edge_by_id[e].other(f) not in fully
                for e in tie
            ):
                break
            candidates = frozenset(
                e for e in tie
                if unsaturated(e) and e in outcomes[inst.edge_by_id[e].other(f)].tail
            )
            if candidates:
                potential_head[f] = candidates
                chosen_tie[f] = i
                reduced[f] = i == outcomes[f].critical_tie
                break

    # cleaning: remove vertices whose head leads (transitively) to a vertex
    # where no change of x is possible
    singular: set[str] = set()
    pending = [w for w in head if any(inst.edge_by_id[e].other(w) not in fully for e in head[w])]
    pending += [f for f in potential_head if not potential_head[f]]
    own_head = {**head, **potential_head}
    while pending:
        v = pending.pop()
        if v in singular:
            continue
        singular.add(v)
        for u, edges in own_head.items():
            if u not in singular and any(inst.edge_by_id[e].other(u) == v for e in edges):
                pending.append(u)
    regular = fully - singular
    for f in regular & inst.firm_set:
        assert potential_head[f], f"regular firm {f!r} with empty potential head"
        assert all(inst.edge_by_id[e].other(f) in regular for e in potential_head[f])
    for w in regular & inst.worker_set:
        assert all(inst.edge_by_id[e].other(w) in regular for e in head[w])
    return ActiveStructure(
        outcomes=outcomes,
        potential_head=potential_head,
        chosen_tie=chosen_tie,
        reduced_head=reduced,
        head=head,
        singular=frozenset(singular),
        regular=frozenset(regular),
        regular_firms=frozenset(regular) & inst.firm_set,
        regular_workers=frozenset(regular) & inst.worker_set,
    )


def _tarjan_scc(vertices: Sequence[str], succ: Mapping[str, Sequence[str]]) -> list[set[str]]:
    """Iterative Tarjan; yields strongly connected components."""
    counter = itertools.count()
    index: dict[str, int] = {}
    lowlink: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    sccs: list[set[str]] = []
    for root in vertices:
        if root in index:
            continue
        work: list[tuple[str, int]] = [(root, 0)]
        while work:
            v, pi = work.pop()
            if pi == 0:
                index[v] = lowlink[v] = next(counter)
                stack.append(v)
                on_stack.add(v)
            recurse = False
            neighbours = succ.get(v, ())
            for i in range(pi, len(neighbours)):
                u = neighbours[i]
                if u not in index:
                    work.append((v, i + 1))
                    work.append((u, 0))
                    recurse = True
                    break
                if u in on_stack:
                    lowlink[v] = min(lowlink[v], index[u])
            if recurse:
                continue
            if lowlink[v] == index[v]:
                scc = set()
                while True:
                    u = stack.pop()
                    on_stack.discard(u)
                    scc.add(u)
                    if u == v:
                        break
                sccs.append(scc)
            if work:
                parent = work[-1][0]
                lowlink[parent] = min(lowlink[parent], lowlink[v])
    return sccs


def _active_digraph(inst: Instance, act: ActiveStructure) -> dict[str, list[str]]:
    succ: dict[str, list[str]] = {}
    for f in sorted(act.regular_firms):
        succ[f] = sorted(inst.edge_by_id[e].other(f) for e in act.potential_head[f])
    for w in sorted(act.regular_workers):
        succ[w] = sorted(inst.edge_by_id[e].other(w) for e in act.head[w])
    return succ


def maximal_components(inst: Instance, act: ActiveStructure) -> list[Component]:
    """Sink strong components of the active digraph, by smallest vertex id."""
    succ = _active_digraph(inst, act)
    vertices = sorted(succ)
    comps = _tarjan_scc(vertices, succ)
    comp_of = {v: i for i, comp in enumerate(comps) for v in comp}
    maximal = []
    for i, comp in enumerate(comps):
        if all(comp_of[u] == i for v in comp for u in succ[v]):
            maximal.append(comp)
    out = []
    for comp in sorted(maximal, key=min):
        firms = tuple(sorted(comp & inst.firm_set))
        workers = tuple(sorted(comp & inst.worker_set))
        if not firms or not workers:
            # an isolated vertex cannot arise: every regular vertex has an
            # outgoing active edge, so sink components are genuine cycles
            raise AssertionError(f"degenerate sink component {sorted(comp)}")
        edges = set()
        for f in firms:
            edges |= act.potential_head[f]
        for w in workers:
            edges |= act.head[w]
        out.append(Component(firms=firms, workers=workers, edges=tuple(sorted(edges))))
    # supports of distinct sink components never share a vertex
    seen: set[str] = set()
    for comp in out:
        overlap = seen & set(comp.vertices)
        assert not overlap, f"sink components share vertices {sorted(overlap)}"
        seen |= set(comp.vertices)
    return out


def extract_rotation(
    inst: Instance,
    x: Mapping[str, Fraction],
    comp: Component,
    act: Optional[ActiveStructure] = None,
) -> Rotation:
    """Solve the balance system on a sink component and assemble the rotation.

    Per firm f the increase is a single unknown φ_f spread over D_f; per
    worker w the decrease is ψ_w spread over H_w.  Conservation at every
    vertex gives a homogeneous system whose solution space must be a line;
    its positive integer generator with gcd 1 defines the rotation values.
    """
    x = full_assignment(inst, x)
    if act is None:
        act = build_active_structure(inst, x)
    firms, workers = comp.firms, comp.workers
    var_index = {v: i for i, v in enumerate(firms + workers)}
    nvars = len(var_index)
    raise_edges = {f: act.potential_head[f] for f in firms}
    drop_edges = {w: act.head[w] for w in workers}
    rows: list[list[Fraction]] = []
    for f in firms:
        row = [Fraction(0)] * nvars
        row[var_index[f]] = Fraction(len(raise_edges[f]))
        for e in inst.incident[f]:
            w = inst.edge_by_id[e].other(f)
            if w in drop_edges and e in drop_edges[w]:
                row[var_index[w]] -= 1
        rows.append(row)
    for w in workers:
        row = [Fraction(0)] * nvars
        row[var_index[w]] = Fraction(len(drop_edges[w]))
        for e in inst.incident[w]:
            f = inst.edge_by_id[e].other(w)
            if f in raise_edges and e in raise_edges[f]:
                row[var_index[f]] -= 1
        rows.append(row)
    sol = gaussian_solve(rows, [Fraction(0)] * len(rows))
    if sol.status != "underdetermined" or len(sol.nullspace) != 1:
        dim = len(sol.nullspace) if sol.nullspace else 0
        raise AssertionError(f"balance system nullspace has dimension {dim}, expected 1")
    gen = sol.nullspace[0]
    if any(v < 0 for v in gen):
        gen = [-v for v in gen]
    assert all(v > 0 for v in gen), "balance solution not strictly positive on the component"
    values = {e: Fraction(0) for e in inst.edge_ids}
    for f in firms:
        for e in raise_edges[f]:
            values[e] = gen[var_index[f]]
    for w in workers:
        for e in drop_edges[w]:
            assert values[e] == 0, f"edge {e!r} active on both sides"
            values[e] = -gen[var_index[w]]
    rot = Rotation(
        values=values,
        component=comp,
        tau=Fraction(0),  # filled in below
        raise_edges=raise_edges,
        drop_edges=drop_edges,
    )
    _check_rotation_invariants(inst, rot)
    rot.tau = max_weight(inst, x, rot, act)
    return rot


def _check_rotation_invariants(inst: Instance, rot: Rotation) -> None:
    for v in inst.vertices():
        total = sum((rot.values[e] for e in inst.incident[v]), Fraction(0))
        assert total == 0, f"rotation not conserved at {v!r}"
    for f, edges in rot.raise_edges.items():
        vals = {rot.values[e] for e in edges}
        assert len(vals) == 1 and vals.pop() > 0, f"rotation not aligned at firm {f!r}"
    for w, edges in rot.drop_edges.items():
        vals = {rot.values[e] for e in edges}
        assert len(vals) == 1 and vals.pop() < 0, f"rotation not aligned at worker {w!r}"
    from math import gcd

    g = 0
    for v in rot.values.values():
        assert v.denominator == 1
        g = gcd(g, abs(int(v)))
    assert g == 1, "rotation values not coprime"
    # support connectivity
    support = rot.support()
    if support:
        verts = {inst.edge_by_id[e].firm for e in support} | {
            inst.edge_by_id[e].worker for e in support
        }
        seen = set()
        stack = [next(iter(sorted(verts)))]
        while stack:
            v = stack.pop()
            if v in seen:
                continue
            seen.add(v)
            for e in support:
                edge = inst.edge_by_id[e]
                if v in (edge.firm, edge.worker):
                    stack.append(edge.other(v))
        assert seen == verts, "rotation support is disconnected"


def max_weight(
    inst: Instance,
    x: Mapping[str, Fraction],
    rot: Rotation,
    act: Optional[ActiveStructure] = None,
) -> Fraction:
    """Largest λ for which x + λ·rot stays stable."""
    x = full_assignment(inst, x)
    if act is None:
        act = build_active_structure(inst, x)
    candidates: list[Fraction] = []
    for w, edges in rot.drop_edges.items():
        for e in edges:
            candidates.append(x[e] / abs(rot.values[e]))
    for f, edges in rot.raise_edges.items():
        for e in edges:
            cap = inst.edge_by_id[e].capacity
            if cap is not None:
                candidates.append((cap - x[e]) / rot.values[e])
    for w in rot.component.workers:
        out = act.outcomes[w]
        critical = inst.corteges[w][out.critical_tie]
        others = [e for e in critical if e not in out.head]
        for e in act.head[w]:
            for ep in others:
                candidates.append(
                    (x[e] - x[ep]) / (abs(rot.values[e]) + rot.values[ep])
                )
    tau = min(candidates)
    assert tau > 0, "maximal admissible weight must be positive"
    return tau


def route_to_terminal(
    inst: Instance,
    x: Mapping[str, Fraction],
    rng=None,
    verify_each: bool = False,
) -> tuple[dict[str, Fraction], list[Rotation]]:
    """Drive x down by full-weight shifts until no rotation remains.

    Returns the terminal (worker-optimal) assignment and the rotations applied
    in order.  The shift count is bounded by twice the number of edges; the
    guard allows four times as a diagnostic margin.  `rng` (a random.Random)
    randomizes which available rotation is applied first; the terminal point
    and the multiset of applied rotations do not depend on it.
    """
    x = full_assignment(inst, x)
    steps: list[Rotation] = []
    guard = 4 * len(inst.edges)
    while True:
        act = build_active_structure(inst, x)
        comps = maximal_components(inst, act)
        if not comps:
            assert not act.active_edges(), "active edges left but no sink component"
            return x, steps
        comp = comps[0] if rng is None else rng.choice(comps)
        rot = extract_rotation(inst, x, comp, act)
        x = apply_shift(inst, x, [rot], [rot.tau], verify=verify_each)
        steps.append(rot)
        if len(steps) > guard:
            raise AssertionError(f"route exceeded {guard} shifts")


def apply_shift(
    inst: Instance,
    x: Mapping[str, Fraction],
    rotations: Sequence[Rotation],
    lam: Sequence[Fraction],
    verify: bool = True,
) -> dict[str, Fraction]:
    """x + Σ λ_i · ρ_i for vertex-disjoint rotations, 0 < λ_i ≤ τ_i.

    The result is verified stable and strictly worse for the firm side.
    """
    x = full_assignment(inst, x)
    if len(rotations) != len(lam):
        raise ValueError("one weight per rotation required")
    seen: set[str] = set()
    for rot, l in zip(rotations, lam):
        if not (0 < l <= rot.tau):
            raise ValueError(f"weight {l} outside (0, {rot.tau}]")
        verts = set(rot.component.vertices)
        if seen & verts:
            raise ValueError("simultaneous rotations must be vertex-disjoint")
        seen |= verts
    xp = dict(x)
    for rot, l in zip(rotations, lam):
        for e, v in rot.values.items():
            if v:
                xp[e] = xp[e] + l * v
    if verify:
        from .stability import compare_stable

        assert stability_report(inst, xp).stable, "shift broke stability"
        cmp = compare_stable(inst, x, xp, side="firms")
        assert cmp.holds and xp != x, "shift is not a strict firm-side descent"
    return xp
