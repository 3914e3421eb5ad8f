"""Minimum-cost stable assignment via a closure/min-cut reduction.

Every stable assignment is x_min plus a closed combination of rotations, so
its cost is c·x_min plus the summed rotation weights ζ(ρ) = τ(ρ)·(c·ρ) over a
downward-closed set of rotations.  Minimizing a node-weight sum over closed
sets is the classical project-selection min-cut.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional

from .flow import FlowNetwork, min_cut
from .model import Instance, InstanceError, full_assignment
from .poset import ClosedFunction, RotationPoset, build_poset, gamma


@dataclass
class CostedPoset:
    poset: RotationPoset
    costs: dict[str, Fraction]
    rotation_cost: dict[int, Fraction]   # c·ρ per rotation
    zeta: dict[int, Fraction]            # τ(ρ)·(c·ρ)


def build_costed_poset(
    inst: Instance,
    costs: Optional[Mapping[str, Fraction]] = None,
    poset: Optional[RotationPoset] = None,
) -> CostedPoset:
    if costs is None:
        costs = inst.costs
    if costs is None:
        raise InstanceError("no edge costs given")
    missing = set(inst.edge_ids) - set(costs)
    if missing:
        raise InstanceError(f"costs missing for edges: {sorted(missing)}")
    if poset is None:
        poset = build_poset(inst)
    rotation_cost = {
        i: sum((costs[e] * v for e, v in rot.values.items()), Fraction(0))
        for i, rot in enumerate(poset.rotations)
    }
    zeta = {i: poset.tau[i] * rotation_cost[i] for i in rotation_cost}
    return CostedPoset(
        poset=poset, costs=dict(costs), rotation_cost=rotation_cost, zeta=zeta
    )


@dataclass
class MinCostResult:
    assignment: dict[str, Fraction]
    cost: Fraction
    ideal: frozenset[int]


def assignment_cost(costs: Mapping[str, Fraction], x: Mapping[str, Fraction]) -> Fraction:
    return sum((costs[e] * v for e, v in x.items()), Fraction(0))


def min_cost_stable(
    inst: Instance,
    costs: Optional[Mapping[str, Fraction]] = None,
    poset: Optional[RotationPoset] = None,
) -> MinCostResult:
    """The cheapest stable assignment under the given edge costs.

    Network: source feeds each positive-ζ rotation with capacity ζ, each
    negative-ζ rotation drains |ζ| to the sink, and each covering relation
    ρ ⋖ ρ' carries an infinite arc ρ → ρ'.  A finite source-side cut A is then
    up-closed, so its complement X is an ideal, and the cut capacity equals
    ζ(X) minus the (constant) total negative weight — minimal cut, minimal
    ideal weight.  Ties are broken deterministically by taking A = the nodes
    reachable from the source in the final residual network (the unique
    smallest min cut).
    """
    cp = build_costed_poset(inst, costs, poset)
    poset = cp.poset
    n = len(poset.rotations)
    net = FlowNetwork(source="s", sink="t")
    for i in range(n):
        z = cp.zeta[i]
        if z > 0:
            net.add_edge("s", i, z)
        elif z < 0:
            net.add_edge(i, "t", -z)
    for (a, b) in poset.hasse:
        net.add_edge(a, b, None)
    cut = min_cut(net)
    assert cut.value is not None, "cut network cannot be unbounded"
    source_side = cut.source_side
    ideal = frozenset(i for i in range(n) if i not in source_side)
    # closure check: no covering arc may leave the source side
    for (a, b) in poset.hasse:
        assert not (a in source_side and b not in source_side)
    zeta_neg = sum((z for z in cp.zeta.values() if z < 0), Fraction(0))
    zeta_ideal = sum((cp.zeta[i] for i in ideal), Fraction(0))
    assert zeta_ideal == cut.value + zeta_neg, "cut capacity does not match ideal weight"
    lam = ClosedFunction(
        {i: (poset.tau[i] if i in ideal else Fraction(0)) for i in range(n)}
    )
    x = gamma(inst, poset, lam)
    cost = assignment_cost(cp.costs, x)
    base = assignment_cost(cp.costs, full_assignment(inst, poset.xmin))
    assert cost == base + zeta_ideal, "cost decomposition mismatch"
    return MinCostResult(assignment=x, cost=cost, ideal=ideal)
