"""Reader/writer for the whitespace benchmark format used by the classic
paired pickup-and-delivery instances.

Header: ``num_vehicles capacity speed``.  One row per task:
``id x y demand open close service pickup_partner delivery_partner`` where a
pickup row names its delivery in the last column and a delivery row names
its pickup in column 8.  Row 0 is the depot.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path


@dataclass(frozen=True)
class BaseTask:
    x: float
    y: float
    demand: float
    tw_open: float
    tw_close: float
    service: float


@dataclass
class BasePdptw:
    name: str
    num_vehicles: int
    capacity: float
    depot: BaseTask
    tasks: dict[int, BaseTask]
    pairs: list[tuple[int, int]]  # (pickup id, delivery id) in file order

    @property
    def num_requests(self) -> int:
        return len(self.pairs)


def parse_lilim(path_or_text, name: str = "", is_text: bool = False) -> BasePdptw:
    if is_text:
        text = path_or_text
    else:
        p = Path(path_or_text)
        text = p.read_text(encoding="utf-8")
        name = name or p.stem
    rows = [ln.split() for ln in text.splitlines() if ln.strip()]
    header = rows[0]
    num_vehicles, capacity = int(header[0]), float(header[1])
    tasks: dict[int, BaseTask] = {}
    partner: dict[int, tuple[int, int]] = {}
    for row in rows[1:]:
        tid = int(row[0])
        tasks[tid] = BaseTask(
            x=float(row[1]),
            y=float(row[2]),
            demand=float(row[3]),
            tw_open=float(row[4]),
            tw_close=float(row[5]),
            service=float(row[6]),
        )
        partner[tid] = (int(row[7]), int(row[8]))
    if 0 not in tasks:
        raise ValueError("missing depot row (id 0)")
    depot = tasks.pop(0)
    partner.pop(0, None)
    pairs = []
    for tid in sorted(partner):
        pickup_ref, delivery_ref = partner[tid]
        if pickup_ref == 0 and delivery_ref != 0:
            if partner.get(delivery_ref, (None, None))[0] != tid:
                raise ValueError(f"pairing mismatch between {tid} and {delivery_ref}")
            pairs.append((tid, delivery_ref))
    matched = {t for pair in pairs for t in pair}
    if matched != set(tasks):
        raise ValueError("pairing is not a perfect matching over the tasks")
    return BasePdptw(name or "base", num_vehicles, capacity, depot, tasks, pairs)


def dumps_lilim(base: BasePdptw) -> str:
    out = [f"{base.num_vehicles}\t{base.capacity:g}\t1"]

    def row(tid, t: BaseTask, pickup_ref, delivery_ref):
        return (
            f"{tid}\t{t.x:g}\t{t.y:g}\t{t.demand:g}\t{t.tw_open:g}"
            f"\t{t.tw_close:g}\t{t.service:g}\t{pickup_ref}\t{delivery_ref}"
        )

    out.append(row(0, base.depot, 0, 0))
    ref: dict[int, tuple[int, int]] = {}
    for p, d in base.pairs:
        ref[p] = (0, d)
        ref[d] = (p, 0)
    for tid in sorted(base.tasks):
        out.append(row(tid, base.tasks[tid], *ref[tid]))
    return "\n".join(out) + "\n"


def truncate_requests(base: BasePdptw, n: int, drop_dummies: bool = True) -> BasePdptw:
    """Keep the first n pickups (file order) with their deliveries; zero
    demand pairs are padding in the source benchmark and are dropped first."""
    pairs = base.pairs
    if drop_dummies:
        pairs = [(p, d) for p, d in pairs if base.tasks[p].demand != 0]
    if len(pairs) < n:
        raise ValueError(f"base instance has only {len(pairs)} real requests")
    pairs = pairs[:n]
    keep = {t for pair in pairs for t in pair}
    return BasePdptw(
        name=base.name,
        num_vehicles=base.num_vehicles,
        capacity=base.capacity,
        depot=base.depot,
        tasks={tid: base.tasks[tid] for tid in sorted(keep)},
        pairs=pairs,
    )
