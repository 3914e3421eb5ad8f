"""Minimum-cost stable assignment vs exhaustive ideal enumeration."""

import random
from fractions import Fraction as F

import pytest

from smp import (
    InstanceError,
    assignment_cost,
    build_costed_poset,
    build_poset,
    full_assignment,
    min_cost_stable,
    stability_report,
)
from smp.bruteforce import oracle_min_cost_ideal

from gen import rand_marriage, triangle_instance


def _random_costs(rng, inst):
    return {e: F(rng.randint(-9, 9)) for e in inst.edge_ids}


def test_costed_poset_requires_complete_costs():
    inst = triangle_instance(F(8), F(15))
    with pytest.raises(InstanceError, match="no edge costs"):
        build_costed_poset(inst)
    with pytest.raises(InstanceError, match="missing"):
        build_costed_poset(inst, {"f1w1": F(1)})


def test_triangle_min_cost_picks_the_cheaper_end():
    inst = triangle_instance(F(8), F(15))
    poset = build_poset(inst)
    # make the rotation's direction expensive: rotation raises f3w1 by 7,
    # so a positive cost there keeps the firm-optimal point optimal
    costs = {e: F(0) for e in inst.edge_ids}
    costs["f3w1"] = F(1)
    res = min_cost_stable(inst, costs, poset)
    assert res.ideal == frozenset()
    assert res.assignment == poset.xmin
    # flip the sign: now the fully rotated point is cheaper
    costs["f3w1"] = F(-1)
    res = min_cost_stable(inst, costs, poset)
    assert res.ideal == frozenset({0})
    assert res.assignment == full_assignment(inst, poset.xmax)
    assert res.cost == assignment_cost(costs, res.assignment)


def test_constant_costs_make_all_rotations_free():
    inst = triangle_instance(F(8), F(15))
    cp = build_costed_poset(inst, {e: F(3) for e in inst.edge_ids})
    assert all(z == 0 for z in cp.zeta.values())
    res = min_cost_stable(inst, {e: F(3) for e in inst.edge_ids}, cp.poset)
    assert res.cost == F(3) * sum(cp.poset.xmin.values(), F(0))


def test_min_cost_matches_exhaustive_ideal_enumeration():
    checked = 0
    for seed in range(30):
        rng = random.Random(f"mc{seed}")
        inst = rand_marriage(rng, 4, cap=2, tie_prob=0.25)
        poset = build_poset(inst)
        if not poset.rotations:
            continue
        costs = _random_costs(rng, inst)
        cp = build_costed_poset(inst, costs, poset)
        res = min_cost_stable(inst, costs, poset)
        best_weight, _ = oracle_min_cost_ideal(
            cp.zeta, poset.less, len(poset.rotations)
        )
        base = assignment_cost(costs, full_assignment(inst, poset.xmin))
        assert res.cost == base + best_weight
        assert stability_report(inst, res.assignment).stable
        # every other fully closed choice costs at least as much
        from smp import enumerate_fully_closed, gamma

        for lam in enumerate_fully_closed(poset):
            x = gamma(inst, poset, lam)
            assert assignment_cost(costs, x) >= res.cost
        checked += 1
    assert checked >= 10


def test_costs_from_the_instance_document():
    inst = triangle_instance(F(8), F(15))
    from smp import Instance

    with_costs = Instance(
        inst.firms,
        inst.workers,
        inst.edges,
        inst.quota,
        inst.corteges,
        costs={e: F(1) for e in inst.edge_ids},
    )
    res = min_cost_stable(with_costs)
    assert res.cost == sum(res.assignment.values(), F(0))
