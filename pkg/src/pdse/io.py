"""Self-describing text formats for instances and solutions.

Both formats are line oriented: a header line with a format tag and version,
then `key value...` records.  Floats are written with `repr` so files
round-trip bit-exactly.
"""

from __future__ import annotations

from pathlib import Path

from .model import Instance, Machine, ModelError, Solution, Travel, Vehicle, Visit

INSTANCE_TAG = "pdse-instance"
SOLUTION_TAG = "pdse-solution"


def _fmt(x: float) -> str:
    return repr(float(x))


def dumps_instance(inst: Instance) -> str:
    dims = len(inst.coords[0])
    out = [f"{INSTANCE_TAG} 1"]
    out.append(f"name {inst.name}")
    out.append(f"requests {inst.num_requests}")
    out.append(f"regions {inst.num_regions}")
    out.append(f"dims {dims}")
    for i in range(2 * inst.num_requests + 1):
        coord = " ".join(_fmt(c) for c in inst.coords[i])
        out.append(
            f"node {i} {inst.region[i]} {coord} {_fmt(inst.demand[i])} "
            f"{_fmt(inst.tw_open[i])} {_fmt(inst.tw_close[i])} {_fmt(inst.service[i])}"
        )
    for v in inst.vehicles:
        out.append(f"vehicle {_fmt(v.capacity)} {_fmt(v.speed)}")
    for m in inst.machines:
        out.append(f"machine {_fmt(m.speed)} {len(m.stations)}")
        for r, pt in m.stations:
            out.append(f"station {r} " + " ".join(_fmt(c) for c in pt))
    return "\n".join(out) + "\n"


def write_instance(inst: Instance, path: str | Path) -> None:
    Path(path).write_text(dumps_instance(inst), encoding="utf-8")


def loads_instance(text: str) -> Instance:
    lines = [ln.split() for ln in text.splitlines() if ln and not ln.startswith("#")]
    if not lines or lines[0][0] != INSTANCE_TAG:
        raise ModelError("not an instance file")
    it = iter(lines[1:])
    name, n, dims = "", -1, 2
    nodes: dict[int, tuple] = {}
    vehicles: list[Vehicle] = []
    machines: list[Machine] = []
    pending_stations = -1
    stations: list[tuple[int, tuple[float, ...]]] = []
    mspeed = 1.0
    for tok in it:
        key = tok[0]
        if key == "name":
            name = tok[1]
        elif key == "requests":
            n = int(tok[1])
        elif key == "regions":
            pass  # recomputed from node labels
        elif key == "dims":
            dims = int(tok[1])
        elif key == "node":
            i = int(tok[1])
            region = int(tok[2])
            coord = tuple(float(x) for x in tok[3 : 3 + dims])
            q, e, l, s = (float(x) for x in tok[3 + dims : 7 + dims])
            nodes[i] = (region, coord, q, e, l, s)
        elif key == "vehicle":
            vehicles.append(Vehicle(float(tok[1]), float(tok[2])))
        elif key == "machine":
            if pending_stations > 0:
                raise ModelError("machine record with missing stations")
            if stations:
                machines.append(Machine(tuple(stations), mspeed))
                stations = []
            mspeed = float(tok[1])
            pending_stations = int(tok[2])
        elif key == "station":
            stations.append((int(tok[1]), tuple(float(x) for x in tok[2 : 2 + dims])))
            pending_stations -= 1
        else:
            raise ModelError(f"unknown record {key!r}")
    if stations:
        machines.append(Machine(tuple(stations), mspeed))
    if n < 0 or len(nodes) != 2 * n + 1:
        raise ModelError("instance file is missing node rows")
    order = [nodes[i] for i in range(2 * n + 1)]
    return Instance(
        name=name,
        num_requests=n,
        coords=tuple(r[1] for r in order),
        region=tuple(r[0] for r in order),
        demand=tuple(r[2] for r in order),
        tw_open=tuple(r[3] for r in order),
        tw_close=tuple(r[4] for r in order),
        service=tuple(r[5] for r in order),
        vehicles=tuple(vehicles),
        machines=tuple(machines),
    )


def read_instance(path: str | Path) -> Instance:
    return loads_instance(Path(path).read_text(encoding="utf-8"))


def dumps_solution(sol: Solution, instance_name: str = "") -> str:
    out = [f"{SOLUTION_TAG} 1"]
    if instance_name:
        out.append(f"instance {instance_name}")
    out.append(f"feasible {int(sol.feasible)}")
    out.append(f"cost {_fmt(sol.cost)}")
    for k, route in enumerate(sol.vehicles):
        out.append(f"vehicle {k} {len(route)}")
        for v in route:
            out.append(f"visit {v.node} {_fmt(v.start)} {_fmt(v.load)}")
    for h, seq in enumerate(sol.machines):
        out.append(f"machine {h} {len(seq)}")
        for t in seq:
            out.append(f"travel {t.i} {t.j} {t.vehicle} {_fmt(t.start)}")
    return "\n".join(out) + "\n"


def write_solution(sol: Solution, path: str | Path, instance_name: str = "") -> None:
    Path(path).write_text(dumps_solution(sol, instance_name), encoding="utf-8")


def loads_solution(text: str) -> Solution:
    lines = [ln.split() for ln in text.splitlines() if ln and not ln.startswith("#")]
    if not lines or lines[0][0] != SOLUTION_TAG:
        raise ModelError("not a solution file")
    feasible, cost = True, 0.0
    vehicles: list[list[Visit]] = []
    machines: list[list[Travel]] = []
    target: list | None = None
    kind = ""
    for tok in lines[1:]:
        key = tok[0]
        if key == "instance":
            continue
        if key == "feasible":
            feasible = bool(int(tok[1]))
        elif key == "cost":
            cost = float(tok[1])
        elif key == "vehicle":
            target = []
            vehicles.append(target)
            kind = "visit"
        elif key == "machine":
            target = []
            machines.append(target)
            kind = "travel"
        elif key == "visit":
            if kind != "visit" or target is None:
                raise ModelError("visit outside a vehicle block")
            target.append(Visit(int(tok[1]), float(tok[2]), float(tok[3])))
        elif key == "travel":
            if kind != "travel" or target is None:
                raise ModelError("travel outside a machine block")
            target.append(Travel(int(tok[1]), int(tok[2]), int(tok[3]), float(tok[4])))
        else:
            raise ModelError(f"unknown record {key!r}")
    return Solution(feasible=feasible, vehicles=vehicles, machines=machines, cost=cost)


def read_solution(path: str | Path) -> Solution:
    return loads_solution(Path(path).read_text(encoding="utf-8"))
