"""Per-vertex choice functions and the revealed preference order they induce.

Each vertex v chooses from an offered vector z on its incident edges: if the
offer does not reach the quota, everything is taken; otherwise edges are taken
greedily tie by tie, and the tie that straddles the quota (the *critical* tie)
is truncated at a common cutting height r.  The edges of the critical tie that
hit the height form the *head*; the better ties together with the rest of the
critical tie form the *tail*.  The head/tail split drives everything else:
stability, the active digraph, rotations.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional

from .model import Instance


@dataclass(frozen=True)
class ChoiceOutcome:
    result: dict[str, Fraction]       # chosen vector on the incident edges
    head: frozenset[str]
    tail: frozenset[str]
    critical_tie: Optional[int]       # tie index, None when in deficit
    height: Optional[Fraction]        # cutting height r, None when in deficit
    deficit: bool

    @property
    def size(self) -> Fraction:
        return sum(self.result.values(), Fraction(0))


def _restrict(inst: Instance, v: str, z: Mapping[str, Fraction]) -> dict[str, Fraction]:
    return {e: Fraction(z.get(e, 0)) for e in inst.incident[v]}


def _cutting_height(values: list[Fraction], target: Fraction) -> Fraction:
    """Smallest r with sum(min(r, val) for val in values) == target.

    Requires 0 < target <= sum(values).  If target equals the full sum every
    r >= max(values) works; the maximum value is returned so that the edges
    attaining it form a nonempty head.
    """
    total = sum(values, Fraction(0))
    if target == total:
        return max(values)
    # scan the breakpoints (the distinct values, ascending)
    taken = Fraction(0)   # sum of values <= current breakpoint
    below = 0             # how many values <= current breakpoint
    n = len(values)
    for bp in sorted(set(values)):
        # on [prev, bp] the sum is taken + (n - below) * r
        at_bp = taken + (n - below) * bp
        if at_bp >= target:
            return (target - taken) / (n - below)
        for val in values:
            if val == bp:
                taken += val
                below += 1
    raise AssertionError("target above total offer")  # pragma: no cover


def choose(inst: Instance, v: str, z: Mapping[str, Fraction]) -> ChoiceOutcome:
    """Apply v's choice function to the offer z (restricted to E_v)."""
    zv = _restrict(inst, v, z)
    if any(val < 0 for val in zv.values()):
        raise ValueError(f"negative offer at {v!r}")
    q = inst.quota[v]
    size = sum(zv.values(), Fraction(0))
    if size < q:
        return ChoiceOutcome(
            result=zv,
            head=frozenset(),
            tail=frozenset(inst.incident[v]),
            critical_tie=None,
            height=None,
            deficit=True,
        )
    ties = inst.corteges[v]
    prefix = Fraction(0)
    critical = None
    for i, tie in enumerate(ties):
        tie_sum = sum((zv[e] for e in tie), Fraction(0))
        if prefix < q <= prefix + tie_sum:
            critical = i
            break
        prefix += tie_sum
    assert critical is not None, "quota not reached despite sufficient offer"
    tie = ties[critical]
    r = _cutting_height([zv[e] for e in tie], q - prefix)
    result = dict(zv)
    for i, t in enumerate(ties):
        if i < critical:
            continue
        for e in t:
            result[e] = min(r, zv[e]) if i == critical else Fraction(0)
    head = frozenset(e for e in tie if zv[e] >= r)
    better = [e for t in ties[:critical] for e in t]
    tail = frozenset(better) | (frozenset(tie) - head)
    return ChoiceOutcome(
        result=result,
        head=head,
        tail=tail,
        critical_tie=critical,
        height=r,
        deficit=False,
    )


def prefers(inst: Instance, v: str, z: Mapping[str, Fraction], zp: Mapping[str, Fraction]) -> bool:
    """Whether v weakly prefers offer z to offer zp (revealed preference).

    Defined only for vectors v would actually keep (fixed points of the
    choice function, e.g. restrictions of admissible assignments); on
    anything else the two characterizations below genuinely diverge.

    Two independent characterizations are evaluated — choosing from the join
    must return z, and z must dominate zp on the tail of z — and they are
    asserted to agree.
    """
    zv = _restrict(inst, v, z)
    zpv = _restrict(inst, v, zp)
    for name, vec in (("first", zv), ("second", zpv)):
        if choose(inst, v, vec).result != vec:
            raise ValueError(
                f"{name} offer at {v!r} is not a chosen vector; the preference "
                "order is only defined on fixed points of the choice function"
            )
    join = {e: max(zv[e], zpv[e]) for e in zv}
    via_join = choose(inst, v, join).result == zv
    tail = choose(inst, v, zv).tail
    via_tail = all(zv[e] >= zpv[e] for e in tail)
    assert via_join == via_tail, (
        f"preference characterizations disagree at {v!r}: join={via_join} tail={via_tail}"
    )
    return via_join


def interesting_edges(inst: Instance, v: str, z: Mapping[str, Fraction]) -> frozenset[str]:
    """Edges at v that are unsaturated and lie in the tail of v's choice at z.

    These are exactly the edges along which v would accept more, i.e. the
    candidates for blocking.
    """
    zv = _restrict(inst, v, z)
    tail = choose(inst, v, zv).tail
    out = set()
    for e in tail:
        cap = inst.edge_by_id[e].capacity
        if cap is None or zv[e] < cap:
            out.add(e)
    return frozenset(out)
