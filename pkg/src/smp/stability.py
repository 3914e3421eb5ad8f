"""Stability checking and side-wise comparison of stable assignments."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .choice import choose
from .model import Instance, InstanceError, full_assignment, validate_assignment, vertex_load


@dataclass
class StabilityReport:
    stable: bool
    blocking_edges: list[str]          # canonical edge-id order
    fully_filled: frozenset[str]       # vertices with load exactly at quota
    deficit: frozenset[str]

    def fully_filled_firms(self, inst: Instance) -> frozenset[str]:
        return self.fully_filled & inst.firm_set

    def fully_filled_workers(self, inst: Instance) -> frozenset[str]:
        return self.fully_filled & inst.worker_set


def stability_report(inst: Instance, x: Mapping[str, Fraction]) -> StabilityReport:
    """Blocking-edge analysis of an admissible, stationary assignment.

    An edge blocks when it is below capacity and sits in the tail of the
    choice at *both* endpoints.  An equivalent formulation — every
    below-capacity edge must have a fully filled endpoint that keeps it in its
    head or strictly below its critical tie — is evaluated independently and
    the two are asserted to agree.
    """
    x = full_assignment(inst, x)
    report = validate_assignment(inst, x)
    if not (report.in_box and report.quota_feasible):
        raise InstanceError("assignment not admissible: " + "; ".join(report.violations))
    outcomes = {v: choose(inst, v, x) for v in inst.vertices()}
    for v, out in outcomes.items():
        xv = {e: x[e] for e in inst.incident[v]}
        if out.result != xv:
            raise InstanceError(f"assignment not stationary at vertex {v!r}")

    blocking = []
    for eid in inst.edge_ids:
        e = inst.edge_by_id[eid]
        if e.capacity is not None and x[eid] >= e.capacity:
            continue
        in_both_tails = eid in outcomes[e.firm].tail and eid in outcomes[e.worker].tail
        # second route: some endpoint is fully filled and holds the edge in
        # its head or past its critical tie
        excused = False
        for v in (e.firm, e.worker):
            out = outcomes[v]
            if out.deficit:
                continue
            if eid in out.head:
                excused = True
            else:
                tie = inst.tie_index[(v, eid)]
                if tie > out.critical_tie:
                    excused = True
        assert in_both_tails == (not excused), (
            f"blocking characterizations disagree on edge {eid!r}"
        )
        if in_both_tails:
            blocking.append(eid)

    fully = frozenset(v for v in inst.vertices() if vertex_load(inst, x, v) == inst.quota[v])
    return StabilityReport(
        stable=not blocking,
        blocking_edges=blocking,
        fully_filled=fully,
        deficit=frozenset(inst.vertices()) - fully,
    )


@dataclass
class Comparison:
    holds: bool                     # x weakly preferred to y on the given side
    per_vertex: dict[str, bool]


def compare_stable(
    inst: Instance,
    x: Mapping[str, Fraction],
    y: Mapping[str, Fraction],
    side: str = "firms",
) -> Comparison:
    """Does every vertex on `side` weakly prefer x to y?

    Both assignments must be stable.  When the comparison holds, the converse
    relation on the opposite side is asserted (preferring more on one side
    means conceding on the other).
    """
    if side not in ("firms", "workers"):
        raise ValueError(f"side must be 'firms' or 'workers', got {side!r}")
    x = full_assignment(inst, x)
    y = full_assignment(inst, y)
    for name, z in (("x", x), ("y", y)):
        if not stability_report(inst, z).stable:
            raise InstanceError(f"compare_stable: assignment {name} is not stable")
    from .choice import prefers  # local import to keep module surface tidy

    vertices = inst.firms if side == "firms" else inst.workers
    per_vertex = {v: prefers(inst, v, x, y) for v in vertices}
    holds = all(per_vertex.values())
    if holds:
        other = inst.workers if side == "firms" else inst.firms
        assert all(prefers(inst, v, y, x) for v in other), (
            "polarity violated: opposite side does not prefer the other assignment"
        )
    return Comparison(holds=holds, per_vertex=per_vertex)
