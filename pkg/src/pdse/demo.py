"""Hand-built two-request worked example.

Two regions separated by an obstacle, one carrier (stations at (30,0) and
(45,0), crossing time 15, initially parked in region 0), two vehicles.
Request 1 runs from region 0 into region 1, request 2 the other way, so the
two routes interleave four crossings on the single carrier.  The reference
solution below costs exactly 480 (vehicle 0 spans 250, vehicle 1 spans 230).
"""

from __future__ import annotations

from .model import Instance, Machine, Solution, Travel, Vehicle, Visit


def demo_instance() -> Instance:
    return Instance(
        name="demo2r",
        num_requests=2,
        #        depot      p1        p2         d3=n+1     d4=n+2
        coords=((0.0, 0.0), (6.0, 18.0), (110.0, 0.0), (75.0, 0.0), (15.0, 0.0)),
        region=(0, 0, 1, 1, 0),
        demand=(0.0, 5.0, 5.0, -5.0, -5.0),
        tw_open=(0.0, 60.0, 50.0, 150.0, 235.0),
        tw_close=(600.0, 200.0, 150.0, 250.0, 300.0),
        service=(0.0, 0.0, 0.0, 0.0, 0.0),
        vehicles=(Vehicle(10.0), Vehicle(10.0)),
        machines=(
            Machine(stations=((0, (30.0, 0.0)), (1, (45.0, 0.0))), speed=1.0),
        ),
    )


def demo_solution() -> Solution:
    """Reference schedule: vehicle 0 serves request 2 (nodes 2 -> 4),
    vehicle 1 serves request 1 (nodes 1 -> 3)."""
    end = 5
    vehicle0 = [
        Visit(0, 0.0, 0.0),
        Visit(2, 110.0, 5.0),
        Visit(4, 235.0, 0.0),
        Visit(end, 250.0, 0.0),
    ]
    vehicle1 = [
        Visit(0, 30.0, 0.0),
        Visit(1, 60.0, 5.0),
        Visit(3, 150.0, 0.0),
        Visit(end, 260.0, 0.0),
    ]
    travels = [
        Travel(0, 2, 0, 30.0),
        Travel(1, 3, 1, 90.0),
        Travel(2, 4, 0, 185.0),
        Travel(3, end, 1, 215.0),
    ]
    return Solution(
        feasible=True,
        vehicles=[vehicle0, vehicle1],
        machines=[travels],
        cost=480.0,
    )
