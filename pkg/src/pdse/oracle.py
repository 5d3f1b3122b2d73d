"""Exhaustive solver for tiny instances; ground truth for everything else.

Enumerates request-to-vehicle assignments, visit orders (pickup first,
capacity respected), carrier choices per cross-region arc, and all
interleavings of each carrier's travels, then times every discrete
combination with the exact schedule LP and keeps the minimum.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from ._kernel.packed import INF
from .model import Instance, Solution, Travel, Visit
from .preprocess import PreprocessResult
from .schedule import build_schedule_lp, solve_schedule


@dataclass(frozen=True)
class OracleLimits:
    max_requests: int = 3
    max_lp_solves: int = 2_000_000


class OracleBudgetError(RuntimeError):
    """The instance is beyond the oracle's enumeration budget."""


@dataclass
class OracleOutcome:
    feasible: bool
    cost: float
    solution: Solution | None
    lp_solves: int


def _route_orders(instance: Instance, k: int, requests, blacklist):
    """All visit orders of the given requests for vehicle k: pickup before
    delivery, capacity prefix-feasible, no blacklisted arc, and window
    prefix-feasible under earliest propagation with lower-bound arc times."""
    n = instance.num_requests
    cap = instance.vehicles[k].capacity
    nodes = []
    for r in requests:
        nodes.append(r)
        nodes.append(r + n)
    out: list[list[int]] = []
    seq: list[int] = []

    def extend(prev, load, t, remaining):
        if not remaining:
            arc = (prev, instance.depot_copy)
            if arc in blacklist:
                return
            out.append(seq + [instance.depot_copy])
            return
        for node in sorted(remaining):
            if node > n and node - n in remaining:
                continue  # delivery before its pickup
            arc = (prev, node)
            if arc in blacklist:
                continue
            new_load = load + instance.demand[node]
            if new_load > cap or new_load < 0:
                continue
            arr = t + instance.service_of(prev) + instance.travel_time(k, prev, node)
            tn = max(arr, instance.tw_open[node])
            if tn > instance.tw_close[node]:
                continue
            seq.append(node)
            extend(node, new_load, tn, remaining - {node})
            seq.pop()

    extend(0, 0.0, instance.tw_open[0], frozenset(nodes))
    return [[0] + order for order in out]


def _interleavings(chains):
    """All merges of the per-vehicle travel chains preserving chain order."""
    chains = [c for c in chains if c]
    if not chains:
        yield []
        return
    total = sum(len(c) for c in chains)
    idx = [0] * len(chains)
    seq: list = []

    def rec():
        if len(seq) == total:
            yield list(seq)
            return
        for c, chain in enumerate(chains):
            if idx[c] < len(chain):
                seq.append(chain[idx[c]])
                idx[c] += 1
                yield from rec()
                idx[c] -= 1
                seq.pop()

    yield from rec()


def _solution_from(instance, routes, seqs, times) -> Solution:
    vals = times.values
    vehicles = []
    for k, route in enumerate(routes):
        visits = []
        load = 0.0
        for idx, node in enumerate(route):
            load += instance.demand[instance.real(node)]
            if idx == 0:
                st = vals[f"t0_{k}"]
            elif idx == len(route) - 1:
                st = vals[f"tend_{k}"]
            else:
                st = vals[f"t_{node}"]
            visits.append(Visit(node, st, load))
        vehicles.append(visits)
    machines = [
        [Travel(i, j, k, vals[f"alpha_{h}_{pos}"]) for pos, (i, j, k) in enumerate(seq)]
        for h, seq in enumerate(seqs)
    ]
    return Solution(True, vehicles, machines, times.objective)


def _combinations(instance: Instance, limits: OracleLimits, pre: PreprocessResult | None):
    """Yield (routes, machine_sequences) for every discrete combination."""
    n = instance.num_requests
    if n > limits.max_requests:
        raise OracleBudgetError(
            f"{n} requests exceed the oracle limit of {limits.max_requests}"
        )
    nv = len(instance.vehicles)
    nh = len(instance.machines)
    blacklist = pre.eliminated if pre is not None else frozenset()

    def eligible(i, j):
        if pre is not None:
            return pre.eligible.get((i, j), ())
        return tuple(instance.eligible_machines(i, j))

    requests = list(instance.pickups)
    order_cache: dict[tuple[int, frozenset], list] = {}
    for assignment in itertools.product(range(nv), repeat=n):
        per_vehicle = [frozenset(r for r, a in zip(requests, assignment) if a == k) for k in range(nv)]
        options = []
        for k in range(nv):
            if not per_vehicle[k]:
                options.append([[0, instance.depot_copy]])
                continue
            key = (k, per_vehicle[k])
            if key not in order_cache:
                order_cache[key] = _route_orders(instance, k, per_vehicle[k], blacklist)
            if not order_cache[key]:
                options = None
                break
            options.append(order_cache[key])
        if options is None:
            continue
        for routes in itertools.product(*options):
            mach_arcs = []
            for k, route in enumerate(routes):
                for a, b in zip(route, route[1:]):
                    if instance.is_machine_arc(a, b):
                        mach_arcs.append((k, a, b))
            choice_sets = [eligible(a, b) for _, a, b in mach_arcs]
            if any(not c for c in choice_sets):
                continue
            for choice in itertools.product(*choice_sets):
                chains = [[] for _ in range(nh)]
                for (k, a, b), h in zip(mach_arcs, choice):
                    chains[h].append((a, b, k))
                per_machine = [
                    list(_interleavings(_split_chains(chains[h]))) for h in range(nh)
                ]
                for seqs in itertools.product(*per_machine):
                    yield [list(r) for r in routes], [list(s) for s in seqs]


def _split_chains(travels):
    """Group one machine's travels into per-vehicle chains (route order)."""
    by_vehicle: dict[int, list] = {}
    for t in travels:
        by_vehicle.setdefault(t[2], []).append(t)
    return list(by_vehicle.values())


def brute_force(
    instance: Instance,
    limits: OracleLimits = OracleLimits(),
    pre: PreprocessResult | None = None,
) -> OracleOutcome:
    best_cost = INF
    best = None
    solves = 0
    for routes, seqs in _combinations(instance, limits, pre):
        solves += 1
        if solves > limits.max_lp_solves:
            raise OracleBudgetError("LP-solve budget exceeded")
        times = solve_schedule(build_schedule_lp(instance, routes, seqs))
        if times.feasible and times.objective < best_cost:
            best_cost = times.objective
            best = _solution_from(instance, routes, seqs, times)
    return OracleOutcome(best is not None, best_cost, best, solves)


def enumerate_feasible_points(
    instance: Instance,
    limits: OracleLimits = OracleLimits(),
    pre: PreprocessResult | None = None,
):
    """Stream every feasible discrete combination, timed at its LP optimum."""
    solves = 0
    for routes, seqs in _combinations(instance, limits, pre):
        solves += 1
        if solves > limits.max_lp_solves:
            raise OracleBudgetError("LP-solve budget exceeded")
        times = solve_schedule(build_schedule_lp(instance, routes, seqs))
        if times.feasible:
            yield _solution_from(instance, routes, seqs, times)
