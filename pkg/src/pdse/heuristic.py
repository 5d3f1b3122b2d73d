"""Multi-start insertion heuristic with LP schedule re-timing.

Construction inserts requests one at a time at their cheapest feasible
position (cost = the vehicle's depot arrival after the insertion).  The
semi-greedy variant draws uniformly from the candidates within ``alpha`` of
the best.  Every feasible construction is re-timed by the fixed-sequence
schedule LP, which shifts depot departures to remove waiting.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ._kernel import PackedData, Pcg32, get_backend
from ._kernel.packed import INF
from .model import (
    Instance,
    InsertionCandidate,
    MachineTravel,
    Solution,
    Travel,
    Visit,
    empty_solution,
)


class StaleCandidateError(RuntimeError):
    """The solution changed since the candidate was analyzed."""


@dataclass(frozen=True)
class MslpConfig:
    alpha: float = 0.05
    max_iters: int = 60000
    time_limit: float = 3600.0
    seed: int = 1

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must lie in [0, 1]")


@dataclass
class MslpResult:
    solution: Solution | None
    cost: float
    iterations: int
    feasible_iterations: int
    lp_executions: int
    mean_lp_improvement: float
    time: float
    time_to_best: float
    trace: list[tuple[int, float]] = field(default_factory=list)

    @property
    def feasible_fraction(self) -> float:
        return self.feasible_iterations / self.iterations if self.iterations else 0.0


def _engine(instance: Instance, backend=None):
    kern = backend or get_backend()
    return kern.Engine(PackedData(instance))


def _state_to_solution(instance: Instance, routes, machines, cost, feasible=True) -> Solution:
    vehicles = [[Visit(n, st, ld) for n, st, ld in route] for route in routes]
    travels = [[Travel(i, j, k, st) for i, j, k, st in seq] for seq in machines]
    return Solution(feasible=feasible, vehicles=vehicles, machines=travels, cost=cost)


def _solution_to_state(solution: Solution):
    routes = [[(v.node, v.start, v.load) for v in route] for route in solution.vehicles]
    machines = [[(t.i, t.j, t.vehicle, t.start) for t in seq] for seq in solution.machines]
    return routes, machines


def _state_version(solution: Solution) -> int:
    return hash(
        (
            tuple(tuple((v.node, v.start, v.load) for v in r) for r in solution.vehicles),
            tuple(tuple((t.i, t.j, t.vehicle, t.start) for t in s) for s in solution.machines),
        )
    )


def mslp(instance: Instance, config: MslpConfig = MslpConfig(), backend=None) -> MslpResult:
    eng = _engine(instance, backend)
    res = eng.mslp(config.alpha, config.max_iters, config.time_limit, config.seed)
    solution = None
    if res["best_state"] is not None:
        routes, machines = res["best_state"]
        solution = _state_to_solution(instance, routes, machines, res["best_cost"])
    return MslpResult(
        solution=solution,
        cost=res["best_cost"],
        iterations=res["iterations"],
        feasible_iterations=res["feasible_iterations"],
        lp_executions=res["lp_executions"],
        mean_lp_improvement=res["mean_lp_improvement"],
        time=res["time"],
        time_to_best=res["time_to_best"],
        trace=list(res["trace"]),
    )


def greedy_insertion(instance: Instance, backend=None) -> Solution:
    """Insert requests in nondecreasing time-window-width order; returns the
    partial, infeasible solution if some request cannot be placed."""
    eng = _engine(instance, backend)
    ok = eng.construct(list(eng.pd.width_order))
    routes, machines = eng.export_state()
    return _state_to_solution(instance, routes, machines, eng.cost(), feasible=ok)


def semi_greedy_insertion(
    instance: Instance, alpha: float, rng: Pcg32 | int, backend=None
) -> Solution:
    if isinstance(rng, int):
        rng = Pcg32(rng)
    eng = _engine(instance, backend)
    order = list(eng.pd.width_order)
    rng.shuffle(order)
    ok = eng.construct(order, alpha, rng)
    routes, machines = eng.export_state()
    return _state_to_solution(instance, routes, machines, eng.cost(), feasible=ok)


def choose_candidate_by_quality(candidates, alpha: float, rng: Pcg32):
    """Uniform draw from the candidates within alpha of the cheapest.

    ``candidates`` is a sequence with a ``cost`` attribute each; returns None
    when empty.
    """
    if not candidates:
        return None
    costs = [c.cost for c in candidates]
    cmin, cmax = min(costs), max(costs)
    threshold = cmin + alpha * (cmax - cmin)
    rcl = [c for c in candidates if c.cost <= threshold]
    return rcl[rng.next32() % len(rcl)]


def analyze_insertion(
    instance: Instance, solution: Solution, k: int, p_pos: int, d_pos: int, p: int, d: int,
    backend=None,
) -> InsertionCandidate:
    """Feasibility and cost of inserting request (p, d) into route k at the
    given 1-based positions, against the exact current solution state."""
    eng = _engine(instance, backend)
    eng.import_state(*_solution_to_state(solution))
    ok, cost, mtrvs = eng.analyze(k, p_pos, d_pos, p, d)
    if not ok:
        return InsertionCandidate(feasible=False, cost=INF)
    return InsertionCandidate(
        feasible=True,
        cost=cost,
        vehicle=k,
        p_pos=p_pos,
        d_pos=d_pos,
        mtrvs=tuple(
            MachineTravel(h, slot, st, i, j, dt) for h, slot, st, i, j, dt in mtrvs
        ),
        version=_state_version(solution),
    )


def insertion_candidates(
    instance: Instance, solution: Solution, p: int, d: int, backend=None
) -> list[InsertionCandidate]:
    """All feasible insertion candidates for request (p, d), in scan order."""
    eng = _engine(instance, backend)
    eng.import_state(*_solution_to_state(solution))
    version = _state_version(solution)
    out = []
    for k in range(len(instance.vehicles)):
        length = len(solution.vehicles[k])
        for p_pos in range(2, length + 1):
            for d_pos in range(p_pos, length + 1):
                ok, cost, mtrvs = eng.analyze(k, p_pos, d_pos, p, d)
                if ok:
                    out.append(
                        InsertionCandidate(
                            True,
                            cost,
                            k,
                            p_pos,
                            d_pos,
                            tuple(
                                MachineTravel(h, slot, st, i, j, dt)
                                for h, slot, st, i, j, dt in mtrvs
                            ),
                            version,
                        )
                    )
    return out


def best_machine_travel(
    instance: Instance,
    solution: Solution,
    pending: list[MachineTravel],
    k: int,
    i: int,
    j: int,
    t_depart: float,
    backend=None,
) -> MachineTravel | None:
    """Cheapest non-disturbing carrier travel for vehicle k over (i, j) when
    the vehicle leaves node i at ``t_depart``; pending travels from the same
    analysis block earlier slots on their machines."""
    kern = backend or get_backend()
    from ._kernel import pure as _pure  # search helper lives in the pure module

    pd = PackedData(instance)
    best = None
    best_dt = INF
    for h in pd.elig[i][j]:
        seq = [(t.i, t.j, t.vehicle, t.start) for t in solution.machines[h]]
        start = 0
        for mt in pending:
            if mt.machine == h:
                seq.insert(mt.position, (mt.i, mt.j, k, mt.start))
                start = mt.position + 1
        k_arr = t_depart + pd.dbar[k][i][h]
        found = _pure.search_machine_travel(pd, seq, h, k, i, j, k_arr, start)
        if found is None:
            continue
        slot, alpha, arrive = found
        dt = arrive - (t_depart - instance.service_of(i))
        if dt < best_dt:
            best_dt = dt
            best = MachineTravel(h, slot, alpha, i, j, dt)
    return best


def update_solution(
    instance: Instance, solution: Solution, p: int, d: int, candidate: InsertionCandidate,
    backend=None,
) -> Solution:
    """Apply an insertion candidate produced against exactly this solution."""
    if not candidate.feasible:
        raise ValueError("cannot apply an infeasible candidate")
    if candidate.version != _state_version(solution):
        raise StaleCandidateError("candidate was analyzed against a different state")
    eng = _engine(instance, backend)
    eng.import_state(*_solution_to_state(solution))
    ok, cost, _ = eng.analyze(
        candidate.vehicle, candidate.p_pos, candidate.d_pos, p, d, commit=True
    )
    if not ok:
        raise StaleCandidateError("candidate no longer applies")
    routes, machines = eng.export_state()
    return _state_to_solution(instance, routes, machines, eng.cost())


def lp_improve(instance: Instance, solution: Solution, backend=None) -> Solution:
    """Re-time a feasible solution at the LP optimum; routes and machine
    orders are preserved and the cost never increases."""
    from .schedule import retime_solution, solve_sequences

    routes = [[v.node for v in route] for route in solution.vehicles]
    seqs = [[(t.i, t.j, t.vehicle) for t in seq] for seq in solution.machines]
    times = solve_sequences(instance, routes, seqs)
    if not times.feasible:
        return solution
    return retime_solution(instance, solution, times)
