"""Full-constraint solution validator.

Every broken rule becomes a report entry; nothing raises.  Time comparisons
use an absolute tolerance because schedules are produced by floating-point
arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import TIME_TOL, Instance, Solution, solution_cost


@dataclass(frozen=True)
class Violation:
    rule: str
    message: str

    def __str__(self) -> str:
        return f"[{self.rule}] {self.message}"


@dataclass
class ValidationReport:
    violations: list[Violation]

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, rule: str, message: str) -> None:
        self.violations.append(Violation(rule, message))

    def __str__(self) -> str:
        if self.ok:
            return "valid"
        return "\n".join(str(v) for v in self.violations)


def validate(instance: Instance, solution: Solution, tol: float = TIME_TOL) -> ValidationReport:
    rep = ValidationReport([])
    n = instance.num_requests
    end = instance.depot_copy

    if len(solution.vehicles) != len(instance.vehicles):
        rep.add("structure", "one route per vehicle required")
        return rep
    if len(solution.machines) != len(instance.machines):
        rep.add("structure", "one travel sequence per machine required")
        return rep

    # Coverage and pairing.
    seen: dict[int, tuple[int, int]] = {}
    for k, route in enumerate(solution.vehicles):
        nodes = [v.node for v in route]
        if not nodes or nodes[0] != 0 or nodes[-1] != end:
            rep.add("structure", f"route {k} must run from node 0 to node {end}")
            continue
        for pos, node in enumerate(nodes[1:-1], start=1):
            if not 1 <= node <= 2 * n:
                rep.add("structure", f"route {k} visits invalid node {node}")
            elif node in seen:
                rep.add("coverage", f"node {node} served more than once")
            else:
                seen[node] = (k, pos)
    for i in instance.pickups:
        d = i + n
        if i not in seen:
            rep.add("coverage", f"pickup {i} not served")
        if d not in seen:
            rep.add("coverage", f"delivery {d} not served")
        if i in seen and d in seen:
            if seen[i][0] != seen[d][0]:
                rep.add("pairing", f"request {i} split across vehicles")
            elif seen[i][1] >= seen[d][1]:
                rep.add("pairing", f"delivery {d} served before pickup {i}")

    # Loads.
    for k, route in enumerate(solution.vehicles):
        cap = instance.vehicles[k].capacity
        load = 0.0
        for pos, v in enumerate(route):
            load += instance.demand[instance.real(v.node)]
            if abs(v.load - load) > tol:
                rep.add("load", f"route {k} position {pos}: recorded load {v.load}, expected {load}")
                load = v.load  # keep following the recorded values
            if v.load < -tol or v.load > cap + tol:
                rep.add("capacity", f"route {k} position {pos}: load {v.load} outside [0, {cap}]")

    # Index recorded travels by (vehicle, arc); flag duplicates and orphans.
    travel_of: dict[tuple[int, int, int], tuple[int, float]] = {}
    for h, seq in enumerate(solution.machines):
        for t in seq:
            key = (t.vehicle, t.i, t.j)
            if key in travel_of:
                rep.add("machine", f"duplicate travel for vehicle {t.vehicle} on arc ({t.i}, {t.j})")
            travel_of[key] = (h, t.start)
    used_travels: set[tuple[int, int, int]] = set()

    # Times along each route.
    for k, route in enumerate(solution.vehicles):
        if not route or route[0].node != 0 or route[-1].node != end:
            continue
        t0, tend = route[0].start, route[-1].start
        if t0 < instance.tw_open[0] - tol or tend > instance.tw_close[0] + tol:
            rep.add("depot-window", f"route {k} outside depot window [{instance.tw_open[0]}, {instance.tw_close[0]}]")
        if t0 > tend + tol:
            rep.add("depot-window", f"route {k} arrives before departing")
        for v in route[1:-1]:
            i = v.node
            if v.start < instance.tw_open[i] - tol or v.start > instance.tw_close[i] + tol:
                rep.add(
                    "window",
                    f"node {i} served at {v.start}, window [{instance.tw_open[i]}, {instance.tw_close[i]}]",
                )
        for a, b in zip(route, route[1:]):
            i, j = a.node, b.node
            dep = a.start + instance.service_of(i)
            if not instance.is_machine_arc(i, j):
                need = dep + instance.travel_time(k, i, j)
                if b.start < need - tol:
                    rep.add("travel", f"route {k} arc ({i}, {j}): start {b.start} before earliest {need}")
            else:
                key = (k, i, j)
                rec = travel_of.get(key)
                if rec is None:
                    rep.add("machine", f"route {k} arc ({i}, {j}) has no recorded machine travel")
                    continue
                used_travels.add(key)
                h, alpha = rec
                if h not in instance.eligible_machines(i, j):
                    rep.add("machine-eligibility", f"machine {h} cannot serve arc ({i}, {j})")
                    continue
                if alpha < dep + instance.station_time(k, i, h) - tol:
                    rep.add("machine", f"travel ({i}, {j}) on machine {h} departs before vehicle {k} arrives")
                ri, rj = instance.node_region(i), instance.node_region(j)
                need = alpha + instance.crossing_time(h, ri, rj) + instance.station_time(k, j, h)
                if b.start < need - tol:
                    rep.add("travel", f"route {k} arc ({i}, {j}): start {b.start} before earliest {need}")

    for key in travel_of:
        if key not in used_travels:
            k, i, j = key
            rep.add("machine", f"recorded travel on arc ({i}, {j}) matches no arc of route {k}")

    # Machine exclusivity, including implicit repositioning legs.
    for h, seq in enumerate(solution.machines):
        m = instance.machines[h]
        ordered = sorted(seq, key=lambda t: t.start)
        prev = None
        for t in ordered:
            ri, rj = instance.node_region(t.i), instance.node_region(t.j)
            if not (m.serves(ri) and m.serves(rj)):
                continue  # already reported as eligibility violation
            if prev is None:
                avail = instance.crossing_time(h, m.initial_region, ri)
            else:
                pi, pj = instance.node_region(prev.i), instance.node_region(prev.j)
                avail = prev.start + instance.crossing_time(h, pi, pj) + instance.crossing_time(h, pj, ri)
            if t.start < avail - tol:
                rep.add(
                    "machine-exclusivity",
                    f"machine {h} travel ({t.i}, {t.j}) starts at {t.start}, not free before {avail}",
                )
            prev = t

    recomputed = solution_cost(solution)
    if abs(solution.cost - recomputed) > tol * max(1.0, abs(recomputed)):
        rep.add("cost", f"recorded cost {solution.cost} != recomputed {recomputed}")

    return rep
