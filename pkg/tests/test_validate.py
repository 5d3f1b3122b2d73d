import copy

from pdse import validate
from pdse.demo import demo_instance, demo_solution
from pdse.model import Travel, Visit


def test_demo_solution_is_clean():
    report = validate(demo_instance(), demo_solution())
    assert report.ok, str(report)


def test_delivery_before_pickup_is_a_pairing_violation():
    inst = demo_instance()
    sol = demo_solution()
    route = sol.vehicles[1]
    route[1], route[2] = (
        Visit(route[2].node, route[1].start, route[1].load),
        Visit(route[1].node, route[2].start, route[2].load),
    )
    report = validate(inst, sol)
    assert any(v.rule == "pairing" for v in report.violations)


def test_overlapping_machine_travels_flagged():
    inst = demo_instance()
    sol = demo_solution()
    sol.machines[0][1] = Travel(1, 3, 1, 31.0)  # departs while travel 1 runs
    report = validate(inst, sol)
    assert any(v.rule == "machine-exclusivity" for v in report.violations)


def test_capacity_violation_flagged():
    inst = demo_instance()
    sol = demo_solution()
    sol.vehicles[0][1] = Visit(2, 110.0, 99.0)
    report = validate(inst, sol)
    assert any(v.rule in ("capacity", "load") for v in report.violations)


def test_window_violation_flagged():
    inst = demo_instance()
    sol = demo_solution()
    sol.vehicles[0][1] = Visit(2, 2000.0, 5.0)
    report = validate(inst, sol)
    assert any(v.rule == "window" for v in report.violations)


def test_missing_machine_travel_flagged():
    inst = demo_instance()
    sol = demo_solution()
    sol.machines[0] = sol.machines[0][1:]
    report = validate(inst, sol)
    assert any(v.rule == "machine" for v in report.violations)


def test_too_early_start_after_straight_arc_flagged():
    inst = demo_instance()
    sol = demo_solution()
    sol.vehicles[1][1] = Visit(1, 30.0, 5.0)  # cannot reach node 1 at depart time
    report = validate(inst, sol)
    assert any(v.rule == "travel" for v in report.violations)


def test_double_service_flagged():
    inst = demo_instance()
    sol = demo_solution()
    sol.vehicles[0].insert(2, copy.copy(sol.vehicles[1][1]))
    report = validate(inst, sol)
    assert any(v.rule == "coverage" for v in report.violations)


def test_cost_mismatch_flagged():
    inst = demo_instance()
    sol = demo_solution()
    sol.cost = 123.0
    report = validate(inst, sol)
    assert any(v.rule == "cost" for v in report.violations)


def test_validator_agrees_with_schedule_lp(tiny_instances):
    """A clean solution's sequences admit an LP schedule at least as good;
    a time-corrupted solution stays clean only if the LP still covers it."""
    from pdse.heuristic import greedy_insertion
    from pdse.schedule import solve_sequences

    checked = 0
    for inst in tiny_instances:
        sol = greedy_insertion(inst)
        if not sol.feasible:
            continue
        assert validate(inst, sol).ok
        routes = [[v.node for v in r] for r in sol.vehicles]
        seqs = [[(t.i, t.j, t.vehicle) for t in s] for s in sol.machines]
        times = solve_sequences(inst, routes, seqs)
        assert times.feasible
        assert times.objective <= sol.cost + 1e-6
        checked += 1
    assert checked >= 10
