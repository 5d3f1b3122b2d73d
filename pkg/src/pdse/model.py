"""Problem datum, travel-time semantics and solution representation.

Node ids follow the usual arc-based convention: 0 is the depot, 1..n are
pickups, n+1..2n the matching deliveries, and 2n+1 is a copy of the depot
used as the route terminal.  The depot copy shares the depot's region and
coordinates and is never stored explicitly; accessors map it back to node 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

TIME_TOL = 1e-6


class ModelError(ValueError):
    """Raised when an instance or solution is structurally invalid."""


def euclid(a: tuple[float, ...], b: tuple[float, ...]) -> float:
    return math.sqrt(sum((x - y) ** 2 for x, y in zip(a, b)))


@dataclass(frozen=True)
class Vehicle:
    capacity: float
    speed: float = 1.0


@dataclass(frozen=True)
class Machine:
    """A shared carrier with one station per served region.

    ``stations`` is an ordered tuple of (region, point); index 0 is the
    initial station where the machine starts its journey.
    """

    stations: tuple[tuple[int, tuple[float, ...]], ...]
    speed: float = 1.0

    def __post_init__(self):
        regions = [r for r, _ in self.stations]
        if len(set(regions)) != len(regions):
            raise ModelError("machine has two stations in one region")

    @property
    def regions(self) -> tuple[int, ...]:
        return tuple(r for r, _ in self.stations)

    @property
    def initial_region(self) -> int:
        return self.stations[0][0]

    def station(self, region: int) -> tuple[float, ...]:
        for r, pt in self.stations:
            if r == region:
                return pt
        raise ModelError(f"machine has no station in region {region}")

    def serves(self, region: int) -> bool:
        return any(r == region for r, _ in self.stations)


@dataclass(frozen=True)
class Instance:
    """Full problem datum over nodes 0..2n (depot copy 2n+1 implicit)."""

    name: str
    num_requests: int
    coords: tuple[tuple[float, ...], ...]
    region: tuple[int, ...]
    demand: tuple[float, ...]
    tw_open: tuple[float, ...]
    tw_close: tuple[float, ...]
    service: tuple[float, ...]
    vehicles: tuple[Vehicle, ...]
    machines: tuple[Machine, ...]

    def __post_init__(self):
        n = self.num_requests
        if len(self.coords) != 2 * n + 1:
            raise ModelError("expected one row per node 0..2n")
        for name in ("region", "demand", "tw_open", "tw_close", "service"):
            if len(getattr(self, name)) != 2 * n + 1:
                raise ModelError(f"field {name} has wrong length")
        dims = {len(p) for p in self.coords}
        if dims - {2, 3} or len(dims) != 1:
            raise ModelError("coordinates must be uniformly 2D or 3D")
        if self.demand[0] != 0 or self.service[0] != 0:
            raise ModelError("depot must have zero demand and service time")
        for i in self.pickups:
            if not self.demand[i] > 0:
                raise ModelError(f"pickup {i} must have positive demand")
            if self.demand[n + i] != -self.demand[i]:
                raise ModelError(f"delivery {n + i} demand must mirror pickup {i}")
        for i in range(2 * n + 1):
            if self.tw_open[i] > self.tw_close[i]:
                raise ModelError(f"window of node {i} is empty")
        if not self.vehicles:
            raise ModelError("need at least one vehicle")
        nregions = self.num_regions
        if any(r < 0 or r >= nregions for r in self.region):
            raise ModelError("region labels must be dense 0..z-1")
        if nregions >= 2:
            for h, m in enumerate(self.machines):
                if len(m.stations) < 2:
                    raise ModelError(f"machine {h} must serve at least two regions")
            if not any(
                all(m.serves(r) for r in range(nregions)) for m in self.machines
            ):
                raise ModelError("no machine serves every region")

    # -- node sets ---------------------------------------------------------

    @property
    def n(self) -> int:
        return self.num_requests

    @property
    def pickups(self) -> range:
        return range(1, self.num_requests + 1)

    @property
    def deliveries(self) -> range:
        return range(self.num_requests + 1, 2 * self.num_requests + 1)

    @property
    def depot_copy(self) -> int:
        return 2 * self.num_requests + 1

    @property
    def num_nodes(self) -> int:
        """Node count including the depot copy."""
        return 2 * self.num_requests + 2

    @property
    def num_regions(self) -> int:
        return max(self.region) + 1

    def partner(self, i: int) -> int:
        n = self.num_requests
        if 1 <= i <= n:
            return i + n
        if n < i <= 2 * n:
            return i - n
        raise ModelError(f"node {i} is not a request node")

    def real(self, i: int) -> int:
        """Map the depot copy back to node 0."""
        return 0 if i == self.depot_copy else i

    def node_region(self, i: int) -> int:
        return self.region[self.real(i)]

    def node_coord(self, i: int) -> tuple[float, ...]:
        return self.coords[self.real(i)]

    # -- travel-time families ---------------------------------------------

    def is_machine_arc(self, i: int, j: int) -> bool:
        return self.node_region(i) != self.node_region(j)

    def straight_time(self, k: int, i: int, j: int) -> float:
        return euclid(self.node_coord(i), self.node_coord(j)) / self.vehicles[k].speed

    def station_time(self, k: int, i: int, h: int) -> float:
        """Vehicle travel time between node i and machine h's station in i's region."""
        st = self.machines[h].station(self.node_region(i))
        return euclid(self.node_coord(i), st) / self.vehicles[k].speed

    def crossing_time(self, h: int, r1: int, r2: int) -> float:
        m = self.machines[h]
        return euclid(m.station(r1), m.station(r2)) / m.speed

    def eligible_machines(self, i: int, j: int) -> list[int]:
        ri, rj = self.node_region(i), self.node_region(j)
        return [
            h
            for h, m in enumerate(self.machines)
            if m.serves(ri) and m.serves(rj)
        ]

    def travel_time(self, k: int, i: int, j: int) -> float:
        """Arc time for vehicle k: direct time within a region, the schedule-free
        lower bound across regions, and 0 for the depot -> depot-copy arc."""
        if self.real(i) == self.real(j):
            return 0.0
        if not self.is_machine_arc(i, j):
            return self.straight_time(k, i, j)
        return machine_edge_bound(self, k, i, j)

    def service_of(self, i: int) -> float:
        return self.service[self.real(i)]

    def with_machines(self, machines: tuple[Machine, ...]) -> "Instance":
        return replace(self, machines=machines)


@dataclass(frozen=True)
class ArcSets:
    """Partition of the admissible arcs over V' into within-region and
    cross-region sets."""

    straight: frozenset[tuple[int, int]]
    machine: frozenset[tuple[int, int]]

    def __contains__(self, arc: tuple[int, int]) -> bool:
        return arc in self.straight or arc in self.machine


def admissible_arcs(instance: Instance):
    """All arcs (i, j) with i in V, j in V' \\ {0}, i != j."""
    end = instance.depot_copy
    for i in range(2 * instance.num_requests + 1):
        for j in range(1, end + 1):
            if i != j:
                yield (i, j)


def classify_arcs(instance: Instance) -> ArcSets:
    straight, machine = set(), set()
    for i, j in admissible_arcs(instance):
        if instance.is_machine_arc(i, j):
            machine.add((i, j))
        else:
            straight.add((i, j))
    return ArcSets(frozenset(straight), frozenset(machine))


def machine_edge_bound(instance: Instance, k: int, i: int, j: int) -> float:
    """Schedule-free lower bound on crossing (i, j): best over eligible
    carriers of approach + crossing + departure legs."""
    elig = instance.eligible_machines(i, j)
    if not elig:
        raise ModelError(f"no machine serves arc ({i}, {j})")
    ri, rj = instance.node_region(i), instance.node_region(j)
    return min(
        instance.station_time(k, i, h)
        + instance.crossing_time(h, ri, rj)
        + instance.station_time(k, j, h)
        for h in elig
    )


# -- solutions -------------------------------------------------------------


@dataclass(frozen=True)
class Visit:
    node: int
    start: float
    load: float


@dataclass(frozen=True)
class Travel:
    i: int
    j: int
    vehicle: int
    start: float


@dataclass
class Solution:
    feasible: bool
    vehicles: list[list[Visit]]
    machines: list[list[Travel]]
    cost: float

    def route_nodes(self, k: int) -> list[int]:
        return [v.node for v in self.vehicles[k]]


@dataclass(frozen=True)
class MachineTravel:
    """One carrier movement attached to an insertion candidate."""

    machine: int
    position: int
    start: float
    i: int
    j: int
    delta: float


@dataclass(frozen=True)
class InsertionCandidate:
    feasible: bool
    cost: float
    vehicle: int = -1
    p_pos: int = -1
    d_pos: int = -1
    mtrvs: tuple[MachineTravel, ...] = ()
    version: int = -1

    def __post_init__(self):
        if self.feasible and not 2 <= self.p_pos <= self.d_pos:
            raise ModelError("insertion positions out of order")


def empty_solution(instance: Instance) -> Solution:
    """All vehicles idle at the depot, departing at the window opening."""
    t0 = instance.tw_open[0]
    routes = [
        [Visit(0, t0, 0.0), Visit(instance.depot_copy, t0, 0.0)]
        for _ in instance.vehicles
    ]
    return Solution(
        feasible=True,
        vehicles=routes,
        machines=[[] for _ in instance.machines],
        cost=0.0,
    )


def solution_cost(solution: Solution) -> float:
    """Sum over vehicles of depot arrival minus depot departure."""
    total = 0.0
    for route in solution.vehicles:
        if route:
            total += route[-1].start - route[0].start
    return total
