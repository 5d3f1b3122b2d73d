import math

import pytest

from oracles import earliest_schedule, grid_search_schedule, scipy_schedule_objective
from pdse._kernel import Pcg32, get_backend
from pdse._kernel import pure
from pdse.demo import demo_instance, demo_solution
from pdse.generate import GenConfig, generate, make_synthetic_base
from pdse.heuristic import semi_greedy_insertion
from pdse.model import Vehicle
from pdse.schedule import (
    ScheduleError,
    build_schedule_lp,
    dump_schedule_lp,
    solve_schedule,
    solve_sequences,
)

INF = float("inf")


def _sequences(sol):
    routes = [[v.node for v in r] for r in sol.vehicles]
    seqs = [[(t.i, t.j, t.vehicle) for t in s] for s in sol.machines]
    return routes, seqs


def _random_solutions(count=40, seed=3, sizes=((2, 2, 1), (3, 2, 2), (3, 2, 1))):
    out = []
    rng = Pcg32(seed)
    for idx in range(count):
        n, z, m = sizes[idx % len(sizes)]
        cfg = GenConfig("island" if idx % 2 else "floor", n, z, m, seed=idx + 1)
        inst = generate(make_synthetic_base(max(n, 6), idx + 10), cfg)
        sol = semi_greedy_insertion(inst, alpha=0.3, rng=Pcg32(rng.next32()))
        if sol.feasible:
            out.append((inst, sol))
    return out


def test_empty_routes_lp_optimum_zero():
    inst = demo_instance()
    routes = [[0, inst.depot_copy], [0, inst.depot_copy]]
    times = solve_sequences(inst, routes, [[]])
    assert times.feasible
    assert times.objective == pytest.approx(0.0)


def test_demo_sequences_give_objective_at_most_480():
    inst = demo_instance()
    times = solve_sequences(inst, *_sequences(demo_solution()))
    assert times.feasible
    assert times.objective <= 480.0 + 1e-9
    # And never below the makespan forced by windows: node 4 opens at 235
    # and lies 15 from the depot, so vehicle 0 completes no earlier than
    # 250 minus its latest useful departure.
    assert times.objective >= 100.0


def test_single_request_single_region_optimum_is_path_length():
    from pdse.model import Instance

    inst = Instance(
        name="open1",
        num_requests=1,
        coords=((0.0, 0.0), (3.0, 4.0), (9.0, 12.0)),
        region=(0, 0, 0),
        demand=(0.0, 5.0, -5.0),
        tw_open=(0.0, 0.0, 0.0),
        tw_close=(1000.0, 1000.0, 1000.0),
        service=(0.0, 2.0, 7.0),
        vehicles=(Vehicle(10.0),),
        machines=(),
    )
    times = solve_sequences(inst, [[0, 1, 2, 3]], [])
    d = inst.travel_time
    direct = d(0, 0, 1) + 2.0 + d(0, 1, 2) + 7.0 + d(0, 2, 3)
    assert times.feasible
    assert times.objective == pytest.approx(direct)


def test_degenerate_equal_windows_pin_all_times():
    inst = demo_instance()
    # force every customer window to a single point compatible with the demo
    pinned = inst.__class__(
        **{
            **inst.__dict__,
            "tw_open": (0.0, 60.0, 110.0, 150.0, 235.0),
            "tw_close": (600.0, 60.0, 110.0, 150.0, 235.0),
        }
    )
    times = solve_sequences(pinned, *_sequences(demo_solution()))
    assert times.feasible
    for node, want in ((1, 60.0), (2, 110.0), (3, 150.0), (4, 235.0)):
        assert times.values[f"t_{node}"] == pytest.approx(want)


def test_inconsistent_sequences_raise():
    inst = demo_instance()
    routes, seqs = _sequences(demo_solution())
    with pytest.raises(ScheduleError):
        build_schedule_lp(inst, routes, [seqs[0][:-1]])  # missing travel
    bad = [seqs[0] + [(0, 2, 0)]]  # duplicate travel
    with pytest.raises(ScheduleError):
        build_schedule_lp(inst, routes, bad)


def test_lp_matches_scipy_on_random_solutions():
    pytest.importorskip("scipy")
    pairs = _random_solutions(count=40)
    assert len(pairs) >= 20
    for inst, sol in pairs:
        lp = build_schedule_lp(inst, *_sequences(sol))
        mine = solve_schedule(lp)
        ref = scipy_schedule_objective(lp)
        assert mine.feasible and ref is not None
        assert mine.objective == pytest.approx(ref, abs=1e-6)
        # the returned point satisfies every row
        vals = [mine.values[name] for name in lp.var_names]
        for row in lp.rows:
            assert vals[row.greater] >= vals[row.lesser] + row.weight - 1e-6
        for v, name in enumerate(lp.var_names):
            assert lp.lower[v] - 1e-9 <= vals[v] <= lp.upper[v] + 1e-9


def test_lp_matches_grid_search_oracle():
    pairs = _random_solutions(count=12, seed=8)
    for inst, sol in pairs[:8]:
        routes, seqs = _sequences(sol)
        times = solve_sequences(inst, routes, seqs)
        ref = grid_search_schedule(inst, routes, seqs)
        assert times.objective == pytest.approx(ref, abs=1e-3)


def test_optimality_sandwich():
    for inst, sol in _random_solutions(count=10, seed=21):
        routes, seqs = _sequences(sol)
        times = solve_sequences(inst, routes, seqs)
        e0 = inst.tw_open[0]
        upper, feas = earliest_schedule(inst, routes, seqs, [e0] * len(routes))
        assert feas
        assert times.objective <= upper + 1e-6
        # independent per-vehicle lower bound ignoring machine coupling
        lower = 0.0
        for k, route in enumerate(routes):
            if len(route) <= 2:
                continue
            t = e0
            for a, b in zip(route, route[1:]):
                t = max(
                    t + inst.service_of(a) + inst.travel_time(k, a, b),
                    inst.tw_open[b] if b != inst.depot_copy else e0,
                )
            span = t - inst.tw_close[0]  # latest departure is bounded by l0
            lower += max(0.0, span)
        assert times.objective >= lower - 1e-6


def test_scale_invariance():
    inst = demo_instance()
    routes, seqs = _sequences(demo_solution())
    base = solve_sequences(inst, routes, seqs).objective
    lam = 3.5
    scaled = inst.__class__(
        **{
            **inst.__dict__,
            "coords": tuple(tuple(c * lam for c in p) for p in inst.coords),
            "tw_open": tuple(v * lam for v in inst.tw_open),
            "tw_close": tuple(v * lam for v in inst.tw_close),
            "service": tuple(v * lam for v in inst.service),
            "machines": tuple(
                m.__class__(
                    stations=tuple((r, tuple(c * lam for c in pt)) for r, pt in m.stations),
                    speed=m.speed,
                )
                for m in inst.machines
            ),
        }
    )
    scaled_obj = solve_sequences(scaled, routes, seqs).objective
    assert scaled_obj == pytest.approx(lam * base, rel=1e-9)


def test_determinism():
    inst = demo_instance()
    routes, seqs = _sequences(demo_solution())
    a = solve_sequences(inst, routes, seqs)
    b = solve_sequences(inst, routes, seqs)
    assert a.objective == b.objective
    assert a.values == b.values


def test_infeasible_sequences_report_certificate():
    inst = demo_instance()
    routes, seqs = _sequences(demo_solution())
    # Order vehicle 1's return crossing before its own outbound crossing:
    # the spacing and boarding relations then form a positive cycle.
    seqs[0] = [seqs[0][0], seqs[0][3], seqs[0][1], seqs[0][2]]
    times = solve_sequences(inst, routes, seqs)
    assert not times.feasible
    assert times.certificate

    # A bound conflict (window that closes before any possible arrival) is
    # also certified.
    tight = inst.__class__(
        **{**inst.__dict__, "tw_close": (600.0, 200.0, 100.0, 250.0, 300.0)}
    )
    times = solve_sequences(tight, *_sequences(demo_solution()))
    assert not times.feasible
    assert times.certificate


def test_lp_dump_round_trips(tmp_path):
    from pdse.lpformat import read_lp

    inst = demo_instance()
    lp = build_schedule_lp(inst, *_sequences(demo_solution()))
    path = tmp_path / "schedule.lp"
    dump_schedule_lp(lp, path)
    parsed = read_lp(path)
    assert len(parsed.constraints) == len(lp.rows)
    assert {v for _, v in parsed.objective} == {
        lp.var_names[v] for v in lp.obj_plus + lp.obj_minus
    }
