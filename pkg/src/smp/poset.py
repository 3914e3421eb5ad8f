"""The rotation poset and the lattice of stable assignments.

Running full-weight shifts from the firm-optimal assignment to the
worker-optimal one always consumes the same set of rotations with the same
weights, regardless of order.  Imposing "ρ must be applied before ρ'" gives a
partial order whose ideals — equivalently, the closed weight functions λ —
are in bijection with the stable assignments via x = x_min + Σ λ(ρ)·ρ.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from .choice import choose
from .iteration import solve_xmin
from .model import Instance, InstanceError, full_assignment
from .rotations import (
    Rotation,
    apply_shift,
    build_active_structure,
    extract_rotation,
    maximal_components,
)
from .stability import stability_report

RotationKey = tuple  # sorted (edge id, value) pairs — the vector identity


@dataclass
class Route:
    states: list[dict[str, Fraction]]
    steps: list[tuple[Rotation, Fraction]]
    all_full: bool

    @property
    def non_expensive(self) -> bool:
        keys = [rot.key() for rot, _ in self.steps]
        return len(keys) == len(set(keys))


def _applicable(inst: Instance, x: Mapping[str, Fraction]) -> list[Rotation]:
    act = build_active_structure(inst, x)
    comps = maximal_components(inst, act)
    return [extract_rotation(inst, x, c, act) for c in comps]


def run_route(
    inst: Instance,
    start: Optional[Mapping[str, Fraction]] = None,
    rng=None,
    avoid: Optional[RotationKey] = None,
) -> Route:
    """Full-weight shifts from `start` (default: the firm optimum) to the end.

    With `avoid` set, the rotation with that vector is never applied and the
    route stops once nothing else is applicable.  `rng` shuffles the choice
    among simultaneously applicable rotations.
    """
    x = full_assignment(inst, start if start is not None else solve_xmin(inst))
    states = [dict(x)]
    steps: list[tuple[Rotation, Fraction]] = []
    guard = 4 * len(inst.edges)
    while True:
        options = _applicable(inst, x)
        if avoid is not None:
            options = [r for r in options if r.key() != avoid]
        if not options:
            break
        rot = options[0] if rng is None else rng.choice(options)
        x = apply_shift(inst, x, [rot], [rot.tau], verify=False)
        states.append(dict(x))
        steps.append((rot, rot.tau))
        if len(steps) > guard:
            raise AssertionError(f"route exceeded {guard} shifts")
    if avoid is None:
        assert len(steps) <= 2 * len(inst.edges), "route longer than twice the edge count"
    return Route(states=states, steps=steps, all_full=True)


@dataclass
class RotationPoset:
    rotations: list[Rotation]            # canonical representatives, stable ids 0..n-1
    tau: dict[int, Fraction]
    less: frozenset[tuple[int, int]]     # (i, j) with ρ_i strictly before ρ_j
    hasse: list[tuple[int, int]]         # transitive reduction of `less`
    xmin: dict[str, Fraction]
    xmax: dict[str, Fraction]

    def index_of(self, key: RotationKey) -> Optional[int]:
        for i, rot in enumerate(self.rotations):
            if rot.key() == key:
                return i
        return None

    def upset(self, i: int) -> frozenset[int]:
        return frozenset({i} | {j for (a, j) in self.less if a == i})

    def downset(self, i: int) -> frozenset[int]:
        return frozenset({i} | {a for (a, j) in self.less if j == i})


@dataclass
class ClosedFunction:
    weights: dict[int, Fraction]  # rotation id -> λ in [0, τ]

    def key(self) -> tuple:
        return tuple(sorted(self.weights.items()))


def is_closed(poset: RotationPoset, lam: Mapping[int, Fraction]) -> bool:
    for i in range(len(poset.rotations)):
        if not (0 <= lam.get(i, Fraction(0)) <= poset.tau[i]):
            return False
    for (a, b) in poset.less:
        if lam.get(b, Fraction(0)) > 0 and lam.get(a, Fraction(0)) != poset.tau[a]:
            return False
    return True


def build_poset(inst: Instance, xmin: Optional[Mapping[str, Fraction]] = None) -> RotationPoset:
    """Collect the rotation set and its precedence order.

    The order is found by avoidance runs: forbidding ρ and applying everything
    else leaves unapplied exactly ρ and the rotations that need ρ first.  The
    Hasse diagram is the transitive reduction, and every Hasse edge (ρ, ρ')
    is re-verified directly: at the assignment realizing all of ρ's strict
    predecessors except ρ, the successor ρ' is not applicable, but it becomes
    applicable after the full shift along ρ.
    """
    xmin = full_assignment(inst, xmin if xmin is not None else solve_xmin(inst))
    base = run_route(inst, xmin)
    rotations: list[Rotation] = []
    keys: list[RotationKey] = []
    for rot, _ in base.steps:
        assert rot.key() not in keys, "full-shift route repeated a rotation"
        rotations.append(rot)
        keys.append(rot.key())
    assert len(rotations) <= 2 * len(inst.edges)
    tau = {i: rot.tau for i, rot in enumerate(rotations)}
    xmax = base.states[-1]

    upsets: dict[int, frozenset[int]] = {}
    for i, key in enumerate(keys):
        partial = run_route(inst, xmin, avoid=key)
        applied = {rot.key() for rot, _ in partial.steps}
        unapplied = frozenset(j for j, k in enumerate(keys) if k not in applied)
        assert i in unapplied
        upsets[i] = unapplied
    less = frozenset(
        (i, j) for i, up in upsets.items() for j in up if j != i
    )
    # strict partial order sanity
    for (a, b) in less:
        assert (b, a) not in less, "precedence not antisymmetric"
        assert upsets[b] <= upsets[a], "precedence not transitive"
    hasse = sorted(
        (a, b)
        for (a, b) in less
        if not any((a, c) in less and (c, b) in less for c in range(len(keys)))
    )
    poset = RotationPoset(
        rotations=rotations, tau=tau, less=less, hasse=hasse, xmin=xmin, xmax=xmax
    )
    for (a, b) in hasse:
        _verify_hasse_edge(inst, poset, a, b)
    return poset


def _verify_hasse_edge(inst: Instance, poset: RotationPoset, a: int, b: int) -> None:
    """Direct witness that ρ_a immediately precedes ρ_b."""
    ideal = poset.downset(b) - {a, b}
    assert all(poset.downset(c) - {c} <= ideal for c in ideal), "witness set not an ideal"
    lam = {c: poset.tau[c] for c in ideal}
    x = gamma(inst, poset, ClosedFunction(lam), verify=False)
    here = {r.key() for r in _applicable(inst, x)}
    assert poset.rotations[a].key() in here, "predecessor not applicable at witness state"
    assert poset.rotations[b].key() not in here, "successor applicable too early"
    x2 = apply_shift(inst, x, [poset.rotations[a]], [poset.tau[a]], verify=False)
    there = {r.key() for r in _applicable(inst, x2)}
    assert poset.rotations[b].key() in there, "successor not enabled by predecessor"


def gamma(
    inst: Instance,
    poset: RotationPoset,
    lam: ClosedFunction,
    verify: bool = True,
) -> dict[str, Fraction]:
    """Stable assignment realizing the closed weight function λ."""
    if not is_closed(poset, lam.weights):
        raise InstanceError("weight function is not closed")
    x = dict(poset.xmin)
    for i, rot in enumerate(poset.rotations):
        l = lam.weights.get(i, Fraction(0))
        if l:
            for e, v in rot.values.items():
                if v:
                    x[e] += l * v
    if verify:
        assert stability_report(inst, x).stable, "closed function image not stable"
    return x


def omega(inst: Instance, poset: RotationPoset, x: Mapping[str, Fraction]) -> ClosedFunction:
    """Closed weight function of a stable assignment (inverse of gamma).

    Computed by routing x the rest of the way to the worker optimum: the
    weight still consumed on each rotation there is τ minus the weight already
    spent reaching x.
    """
    x = full_assignment(inst, x)
    rest = run_route(inst, x)
    assert rest.states[-1] == poset.xmax, "route from x did not reach the worker optimum"
    used: dict[int, Fraction] = {i: Fraction(0) for i in range(len(poset.rotations))}
    for rot, weight in rest.steps:
        i = poset.index_of(rot.key())
        assert i is not None, "route used a rotation outside the poset"
        used[i] += weight
    lam = ClosedFunction({i: poset.tau[i] - used[i] for i in used})
    assert is_closed(poset, lam.weights), "recovered weights are not closed"
    assert gamma(inst, poset, lam, verify=False) == x, "weights do not reproduce x"
    return lam


def _ideals(preds: dict[int, set[int]], elements: frozenset[int]) -> list[frozenset[int]]:
    """All downward-closed subsets; `preds[i]` = all strict predecessors of i.

    Split on a minimal element m: ideals containing m are m plus an ideal of
    the rest; ideals avoiding m must also avoid everything above m.
    """
    if not elements:
        return [frozenset()]
    m = min(e for e in elements if not (preds[e] & elements))
    up_m = {e for e in elements if m in preds[e]} | {m}
    with_m = [ideal | {m} for ideal in _ideals(preds, elements - {m})]
    without_m = _ideals(preds, elements - up_m)
    out = set(with_m) | set(without_m)
    return sorted(out, key=lambda s: (len(s), sorted(s)))


def enumerate_fully_closed(poset: RotationPoset, cap: int = 20) -> list[ClosedFunction]:
    """One fully closed function (λ ∈ {0, τ} with downward-closed support) per ideal."""
    n = len(poset.rotations)
    if n > cap:
        raise InstanceError(f"poset size {n} exceeds cap {cap}")
    preds = {i: {a for (a, b) in poset.less if b == i} for i in range(n)}
    ideals = _ideals(preds, frozenset(range(n)))
    out = []
    for ideal in ideals:
        lam = ClosedFunction(
            {i: (poset.tau[i] if i in ideal else Fraction(0)) for i in range(n)}
        )
        assert is_closed(poset, lam.weights)
        out.append(lam)
    return out


def grid_sublattice(
    inst: Instance, poset: RotationPoset, k: int, cap: int = 10**6
) -> list[dict[str, Fraction]]:
    """Stable assignments whose weights sit on a k-point grid per rotation."""
    if k < 2:
        raise InstanceError("grid needs k >= 2")
    n = len(poset.rotations)
    if k**n > cap:
        raise InstanceError(f"grid size {k}^{n} exceeds cap {cap}")
    grids = {
        i: [poset.tau[i] * j / (k - 1) for j in range(k)] for i in range(n)
    }
    out = []
    combos: list[dict[int, Fraction]] = [{}]
    for i in range(n):
        combos = [{**c, i: v} for c in combos for v in grids[i]]
    seen = set()
    for weights in combos:
        if not is_closed(poset, weights):
            continue
        lam = ClosedFunction(weights)
        if lam.key() in seen:
            continue
        seen.add(lam.key())
        out.append(gamma(inst, poset, lam))
    return out


def hull_membership(poset: RotationPoset, lam: Mapping[int, Fraction]) -> bool:
    """Whether λ lies in the convex hull of the closed functions."""
    n = len(poset.rotations)
    for i in range(n):
        v = lam.get(i, Fraction(0))
        if not (0 <= v <= poset.tau[i]):
            return False
    for (a, b) in poset.less:
        # the fraction of ρ_b consumed can never exceed that of ρ_a
        if lam.get(b, Fraction(0)) / poset.tau[b] > lam.get(a, Fraction(0)) / poset.tau[a]:
            return False
    return True


def stable_join_workers(
    inst: Instance, x: Mapping[str, Fraction], y: Mapping[str, Fraction]
) -> dict[str, Fraction]:
    """Worker-side join: each worker chooses from the edgewise maximum."""
    x = full_assignment(inst, x)
    y = full_assignment(inst, y)
    top = {e: max(x[e], y[e]) for e in inst.edge_ids}
    out: dict[str, Fraction] = {}
    for w in inst.workers:
        out.update(choose(inst, w, top).result)
    assert stability_report(inst, out).stable, "worker-side join not stable"
    return full_assignment(inst, out)


def stable_meet_workers(
    inst: Instance, x: Mapping[str, Fraction], y: Mapping[str, Fraction]
) -> dict[str, Fraction]:
    """Worker-side meet: each firm chooses from the edgewise maximum."""
    x = full_assignment(inst, x)
    y = full_assignment(inst, y)
    top = {e: max(x[e], y[e]) for e in inst.edge_ids}
    out: dict[str, Fraction] = {}
    for f in inst.firms:
        out.update(choose(inst, f, top).result)
    assert stability_report(inst, out).stable, "firm-side meet not stable"
    return full_assignment(inst, out)
