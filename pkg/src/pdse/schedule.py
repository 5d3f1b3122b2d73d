"""Exact schedule optimization for fixed routes and carrier sequences.

With every route and every machine travel order frozen, the remaining
problem is a linear program whose rows are all difference constraints plus
box bounds.  It is solved exactly by the kernel's successive-shortest-path
solver; see ``_kernel.pure.solve_difference_lp``.
"""

from __future__ import annotations

from dataclasses import dataclass

from ._kernel import get_backend
from ._kernel.packed import INF
from .model import Instance, Solution, Travel, Visit


class ScheduleError(ValueError):
    """Routes and machine sequences do not describe one schedule."""


@dataclass(frozen=True)
class Row:
    """x[greater] >= x[lesser] + weight."""

    greater: int
    lesser: int
    weight: float
    name: str


@dataclass
class ScheduleLP:
    var_names: list[str]
    lower: list[float]
    upper: list[float]
    rows: list[Row]
    obj_plus: list[int]
    obj_minus: list[int]

    @property
    def num_vars(self) -> int:
        return len(self.var_names)


@dataclass
class ScheduleTimes:
    feasible: bool
    objective: float
    values: dict[str, float]
    completion: list[float]
    certificate: list[str]


def _route_sequences(instance: Instance, routes) -> list[list[int]]:
    end = instance.depot_copy
    seqs = []
    for k, route in enumerate(routes):
        nodes = list(route)
        if not nodes or nodes[0] != 0 or nodes[-1] != end:
            raise ScheduleError(f"route {k} must start at 0 and end at {end}")
        seqs.append(nodes)
    return seqs


def build_schedule_lp(instance: Instance, routes, machine_sequences) -> ScheduleLP:
    """routes: per vehicle, full node list 0 .. 2n+1.  machine_sequences: per
    machine, ordered (i, j, k) triples."""
    nv = len(instance.vehicles)
    if len(routes) != nv or len(machine_sequences) != len(instance.machines):
        raise ScheduleError("sequence inconsistency: wrong number of routes or machines")
    seqs = _route_sequences(instance, routes)

    names: list[str] = []
    lower: list[float] = []
    upper: list[float] = []

    def add_var(name, lb, ub):
        names.append(name)
        lower.append(lb)
        upper.append(ub)
        return len(names) - 1

    e0, l0 = instance.tw_open[0], instance.tw_close[0]
    t0 = [add_var(f"t0_{k}", e0, l0) for k in range(nv)]
    tend = [add_var(f"tend_{k}", e0, l0) for k in range(nv)]
    tvar: dict[int, int] = {}
    for k in range(nv):
        for node in seqs[k][1:-1]:
            if node in tvar:
                raise ScheduleError(f"node {node} appears in more than one route")
            tvar[node] = add_var(
                f"t_{node}", instance.tw_open[node], instance.tw_close[node]
            )

    travel_at: dict[tuple[int, int, int], tuple[int, int]] = {}
    avar: dict[tuple[int, int], int] = {}
    for h, seq in enumerate(machine_sequences):
        for pos, (i, j, k) in enumerate(seq):
            if not instance.is_machine_arc(i, j):
                raise ScheduleError(f"travel ({i}, {j}) does not cross regions")
            if h not in instance.eligible_machines(i, j):
                raise ScheduleError(f"machine {h} not eligible on arc ({i}, {j})")
            key = (k, i, j)
            if key in travel_at:
                raise ScheduleError(f"sequence inconsistency: duplicate travel {key}")
            travel_at[key] = (h, pos)
            avar[(h, pos)] = add_var(f"alpha_{h}_{pos}", 0.0, INF)

    rows: list[Row] = []
    used: set[tuple[int, int, int]] = set()
    for k in range(nv):
        rows.append(Row(tend[k], t0[k], 0.0, f"span_{k}"))
        route = seqs[k]
        for idx in range(1, len(route)):
            a, b = route[idx - 1], route[idx]
            va = t0[k] if a == 0 else tvar[a]
            vb = tend[k] if b == instance.depot_copy else tvar[b]
            sa = instance.service_of(a)
            if instance.is_machine_arc(a, b):
                key = (k, a, b)
                if key not in travel_at:
                    raise ScheduleError(
                        f"sequence inconsistency: arc ({a}, {b}) of vehicle {k} "
                        "has no machine travel"
                    )
                used.add(key)
                h, pos = travel_at[key]
                al = avar[(h, pos)]
                rows.append(
                    Row(al, va, sa + instance.station_time(k, a, h), f"board_{k}_{a}_{b}")
                )
                ra, rb = instance.node_region(a), instance.node_region(b)
                rows.append(
                    Row(
                        vb,
                        al,
                        instance.crossing_time(h, ra, rb) + instance.station_time(k, b, h),
                        f"alight_{k}_{a}_{b}",
                    )
                )
            else:
                rows.append(
                    Row(vb, va, sa + instance.travel_time(k, a, b), f"chain_{k}_{a}_{b}")
                )
    unmatched = set(travel_at) - used
    if unmatched:
        raise ScheduleError(f"sequence inconsistency: orphan travels {sorted(unmatched)}")

    for h, seq in enumerate(machine_sequences):
        m = instance.machines[h]
        for pos, (i, j, k) in enumerate(seq):
            v = avar[(h, pos)]
            ri = instance.node_region(i)
            if pos == 0:
                first = instance.crossing_time(h, m.initial_region, ri)
                if first > lower[v]:
                    lower[v] = first
            else:
                pi, pj = seq[pos - 1][0], seq[pos - 1][1]
                rpi, rpj = instance.node_region(pi), instance.node_region(pj)
                rows.append(
                    Row(
                        v,
                        avar[(h, pos - 1)],
                        instance.crossing_time(h, rpi, rpj)
                        + instance.crossing_time(h, rpj, ri),
                        f"spacing_{h}_{pos}",
                    )
                )

    return ScheduleLP(names, lower, upper, rows, list(tend), list(t0))


def solve_schedule(lp: ScheduleLP, backend=None) -> ScheduleTimes:
    kern = backend or get_backend()
    status, x, obj, cert = kern.solve_difference_lp(
        lp.num_vars,
        lp.lower,
        lp.upper,
        [(r.greater, r.lesser, r.weight) for r in lp.rows],
        lp.obj_plus,
        lp.obj_minus,
    )
    if status != 0:
        names = [lp.rows[c].name if c >= 0 else "<bound>" for c in cert]
        return ScheduleTimes(False, INF, {}, [], names)
    values = {name: x[v] for v, name in enumerate(lp.var_names)}
    completion = [x[p] - x[m] for p, m in zip(lp.obj_plus, lp.obj_minus)]
    return ScheduleTimes(True, obj, values, completion, [])


def solve_sequences(instance: Instance, routes, machine_sequences) -> ScheduleTimes:
    return solve_schedule(build_schedule_lp(instance, routes, machine_sequences))


def retime_solution(instance: Instance, solution: Solution, times: ScheduleTimes) -> Solution:
    """Copy of the solution with all start times replaced by LP values."""
    vals = times.values
    vehicles = []
    for k, route in enumerate(solution.vehicles):
        new_route = []
        for idx, v in enumerate(route):
            if idx == 0:
                st = vals[f"t0_{k}"]
            elif idx == len(route) - 1:
                st = vals[f"tend_{k}"]
            else:
                st = vals[f"t_{v.node}"]
            new_route.append(Visit(v.node, st, v.load))
        vehicles.append(new_route)
    machines = []
    for h, seq in enumerate(solution.machines):
        machines.append(
            [Travel(t.i, t.j, t.vehicle, vals[f"alpha_{h}_{pos}"]) for pos, t in enumerate(seq)]
        )
    return Solution(
        feasible=solution.feasible,
        vehicles=vehicles,
        machines=machines,
        cost=times.objective,
    )


def dump_schedule_lp(lp: ScheduleLP, path) -> None:
    """Write the schedule LP in the same text format used for MIP emission."""
    from .lpformat import LpFile, write_lp  # local import to avoid a cycle

    objective = []
    for v in lp.obj_plus:
        objective.append((1.0, lp.var_names[v]))
    for v in lp.obj_minus:
        objective.append((-1.0, lp.var_names[v]))
    constraints = [
        (
            r.name,
            [(1.0, lp.var_names[r.greater]), (-1.0, lp.var_names[r.lesser])],
            ">=",
            r.weight,
        )
        for r in lp.rows
    ]
    bounds = {
        name: (lp.lower[v], lp.upper[v]) for v, name in enumerate(lp.var_names)
    }
    write_lp(LpFile("schedule", objective, constraints, bounds, []), path)
