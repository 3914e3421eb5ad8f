"""Problem instance data model, validation and the on-disk JSON format.

An instance is a bipartite graph between firms and workers.  Every edge has a
rational capacity, every vertex a rational quota and an ordered partition of
its incident edges into indifference classes ("ties"), best tie first.  All
numeric data are `fractions.Fraction`; nothing in the core ever touches a
float.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence, Union


class InstanceError(ValueError):
    """Raised for malformed instances, assignments or rationals."""


RationalLike = Union[int, str, Fraction]


def parse_rational(value: RationalLike) -> Fraction:
    """Parse an exact rational from a bare int or a 'p/q' / 'p' string."""
    if isinstance(value, bool):
        raise InstanceError(f"not a rational: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        # 'p' or 'p/q' only; Fraction() would also take decimals like '1.5',
        # which the exact format forbids
        if not re.fullmatch(r"[+-]?\d+(/\d+)?", value.strip()):
            raise InstanceError(f"not a rational: {value!r}")
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InstanceError(f"not a rational: {value!r}") from exc
    # Floats are rejected on purpose: the format is exact.
    raise InstanceError(f"not a rational: {value!r}")


def format_rational(value: Fraction) -> Union[int, str]:
    """Serialize exactly: bare integer when possible, else 'p/q'."""
    if value.denominator == 1:
        return int(value)
    return f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True)
class Edge:
    id: str
    firm: str
    worker: str
    capacity: Optional[Fraction]  # None = unbounded (internal sentinel only)

    def other(self, vertex: str) -> str:
        return self.worker if vertex == self.firm else self.firm


class Instance:
    """Immutable problem instance.

    Attributes:
        firms, workers: vertex ids in input order.
        edges: Edge tuples in input order.
        quota: vertex id -> Fraction > 0.
        corteges: vertex id -> tuple of ties; each tie is a tuple of edge ids
            (sorted lexicographically inside the tie), best tie first.
        costs: optional edge id -> Fraction.
    """

    def __init__(
        self,
        firms: Sequence[str],
        workers: Sequence[str],
        edges: Sequence[Edge],
        quota: Mapping[str, Fraction],
        corteges: Mapping[str, Sequence[Iterable[str]]],
        costs: Optional[Mapping[str, Fraction]] = None,
    ):
        self.firms = tuple(firms)
        self.workers = tuple(workers)
        self.edges = tuple(edges)
        self.quota = dict(quota)
        self.corteges = {
            v: tuple(tuple(sorted(tie)) for tie in ties)
            for v, ties in corteges.items()
        }
        self.costs = dict(costs) if costs is not None else None
        self._validate()
        self.edge_by_id = {e.id: e for e in self.edges}
        self.edge_ids = tuple(sorted(self.edge_by_id))  # canonical order
        self.firm_set = frozenset(self.firms)
        self.worker_set = frozenset(self.workers)
        incident: dict[str, list[str]] = {v: [] for v in self.vertices()}
        for e in self.edges:
            incident[e.firm].append(e.id)
            incident[e.worker].append(e.id)
        self.incident = {v: tuple(sorted(ids)) for v, ids in incident.items()}
        # tie index of each edge at each endpoint
        self.tie_index: dict[tuple[str, str], int] = {}
        for v, ties in self.corteges.items():
            for i, tie in enumerate(ties):
                for eid in tie:
                    self.tie_index[(v, eid)] = i

    def vertices(self) -> tuple[str, ...]:
        return self.firms + self.workers

    def is_firm(self, v: str) -> bool:
        return v in self.firm_set

    def swapped(self) -> "Instance":
        """The same instance with the two sides exchanged.

        Edge ids, capacities, quotas and corteges are untouched; only the
        firm/worker roles flip.  Used to run the rotation machinery "in
        reverse" (toward the firm-optimal end).
        """
        return Instance(
            firms=self.workers,
            workers=self.firms,
            edges=[Edge(e.id, e.worker, e.firm, e.capacity) for e in self.edges],
            quota=self.quota,
            corteges=self.corteges,
            costs=self.costs,
        )

    def _validate(self) -> None:
        firms, workers = set(self.firms), set(self.workers)
        if len(firms) != len(self.firms) or len(workers) != len(self.workers):
            raise InstanceError("duplicate vertex id within a part")
        if firms & workers:
            raise InstanceError(f"vertex ids shared across parts: {sorted(firms & workers)}")
        seen_ids: set[str] = set()
        seen_pairs: set[tuple[str, str]] = set()
        for e in self.edges:
            if e.id in seen_ids:
                raise InstanceError(f"duplicate edge id {e.id!r}")
            seen_ids.add(e.id)
            if e.firm not in firms:
                raise InstanceError(f"edge {e.id!r}: unknown firm {e.firm!r}")
            if e.worker not in workers:
                raise InstanceError(f"edge {e.id!r}: unknown worker {e.worker!r}")
            if (e.firm, e.worker) in seen_pairs:
                raise InstanceError(
                    f"parallel edges between {e.firm!r} and {e.worker!r} are forbidden"
                )
            seen_pairs.add((e.firm, e.worker))
            if e.capacity is not None and e.capacity <= 0:
                raise InstanceError(f"edge {e.id!r}: capacity must be positive")
        for v in self.vertices():
            q = self.quota.get(v)
            if q is None:
                raise InstanceError(f"missing quota for vertex {v!r}")
            if q <= 0:
                raise InstanceError(f"vertex {v!r}: quota must be positive")
        extra = set(self.quota) - set(self.vertices())
        if extra:
            raise InstanceError(f"quota given for unknown vertices: {sorted(extra)}")
        # cortege of each vertex must partition its incident edge set exactly
        incident: dict[str, set[str]] = {v: set() for v in self.vertices()}
        for e in self.edges:
            incident[e.firm].add(e.id)
            incident[e.worker].add(e.id)
        for v in self.vertices():
            ties = self.corteges.get(v)
            if ties is None:
                raise InstanceError(f"missing preferences for vertex {v!r}")
            listed: list[str] = [eid for tie in ties for eid in tie]
            if any(not tie for tie in ties):
                raise InstanceError(f"vertex {v!r}: empty tie")
            if len(set(listed)) != len(listed) or set(listed) != incident[v]:
                raise InstanceError(
                    f"vertex {v!r}: tie partition mismatch (ties must partition the incident edges)"
                )
        extra = set(self.corteges) - set(self.vertices())
        if extra:
            raise InstanceError(f"preferences given for unknown vertices: {sorted(extra)}")
        if self.costs is not None:
            unknown = set(self.costs) - seen_ids
            if unknown:
                raise InstanceError(f"costs given for unknown edges: {sorted(unknown)}")


def parse_instance(data) -> Instance:
    """Build a validated Instance from JSON text/bytes or a decoded dict."""
    if isinstance(data, (bytes, str)):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise InstanceError(f"malformed JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise InstanceError("instance document must be a JSON object")
    try:
        firms = list(data["firms"])
        workers = list(data["workers"])
        raw_edges = list(data["edges"])
        raw_quotas = dict(data["quotas"])
        raw_prefs = dict(data["preferences"])
    except (KeyError, TypeError) as exc:
        raise InstanceError(f"missing or malformed field: {exc}") from exc
    edges = []
    for item in raw_edges:
        try:
            edges.append(
                Edge(
                    id=str(item["id"]),
                    firm=str(item["firm"]),
                    worker=str(item["worker"]),
                    capacity=parse_rational(item["capacity"]),
                )
            )
        except (KeyError, TypeError) as exc:
            raise InstanceError(f"malformed edge record {item!r}: {exc}") from exc
    quota = {str(v): parse_rational(q) for v, q in raw_quotas.items()}
    corteges = {}
    for v, ties in raw_prefs.items():
        if not isinstance(ties, list):
            raise InstanceError(f"preferences of {v!r} must be a list of ties")
        corteges[str(v)] = [[str(eid) for eid in tie] for tie in ties]
    costs = None
    if "costs" in data and data["costs"] is not None:
        costs = {str(eid): parse_rational(c) for eid, c in dict(data["costs"]).items()}
    return Instance(firms, workers, edges, quota, corteges, costs)


def serialize_instance(inst: Instance) -> dict:
    doc = {
        "firms": list(inst.firms),
        "workers": list(inst.workers),
        "edges": [
            {
                "id": e.id,
                "firm": e.firm,
                "worker": e.worker,
                "capacity": format_rational(e.capacity),
            }
            for e in inst.edges
        ],
        "quotas": {v: format_rational(q) for v, q in sorted(inst.quota.items())},
        "preferences": {
            v: [list(tie) for tie in ties] for v, ties in sorted(inst.corteges.items())
        },
    }
    if inst.costs is not None:
        doc["costs"] = {e: format_rational(c) for e, c in sorted(inst.costs.items())}
    return doc


# An assignment is a plain dict: edge id -> Fraction (missing keys read as 0).

def parse_assignment(data, inst: Instance) -> dict[str, Fraction]:
    if isinstance(data, (bytes, str)):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise InstanceError(f"malformed JSON: {exc}") from exc
    if not isinstance(data, dict) or "values" not in data:
        raise InstanceError('assignment document must be {"values": {...}}')
    values = {}
    for eid, val in dict(data["values"]).items():
        if eid not in inst.edge_by_id:
            raise InstanceError(f"unknown edge id {eid!r} in assignment")
        values[str(eid)] = parse_rational(val)
    return full_assignment(inst, values)


def serialize_assignment(x: Mapping[str, Fraction]) -> dict:
    return {"values": {e: format_rational(v) for e, v in sorted(x.items())}}


def full_assignment(inst: Instance, x: Mapping[str, Fraction]) -> dict[str, Fraction]:
    """Normalize to a dict with a value for every edge (absent ids -> 0)."""
    return {eid: Fraction(x.get(eid, 0)) for eid in inst.edge_ids}


def vertex_load(inst: Instance, x: Mapping[str, Fraction], v: str) -> Fraction:
    return sum((x.get(e, Fraction(0)) for e in inst.incident[v]), Fraction(0))


@dataclass
class MembershipReport:
    in_box: bool
    quota_feasible: bool
    violations: list[str] = field(default_factory=list)


def validate_assignment(inst: Instance, x: Mapping[str, Fraction]) -> MembershipReport:
    """Box and quota admissibility of x (unknown edge ids are an error)."""
    unknown = set(x) - set(inst.edge_ids)
    if unknown:
        raise InstanceError(f"unknown edge ids in assignment: {sorted(unknown)}")
    violations = []
    in_box = True
    for e in inst.edges:
        val = x.get(e.id, Fraction(0))
        if val < 0:
            in_box = False
            violations.append(f"edge {e.id}: negative value {val}")
        elif e.capacity is not None and val > e.capacity:
            in_box = False
            violations.append(f"edge {e.id}: value {val} exceeds capacity {e.capacity}")
    quota_feasible = True
    for v in inst.vertices():
        load = vertex_load(inst, x, v)
        if load > inst.quota[v]:
            quota_feasible = False
            violations.append(f"vertex {v}: load {load} exceeds quota {inst.quota[v]}")
    return MembershipReport(in_box, quota_feasible, violations)
