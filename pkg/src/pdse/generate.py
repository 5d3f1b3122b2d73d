"""Benchmark instance generation: island and floor families, heterogeneous
vehicle fleets, and the feasibility-ensuring repair construction.

Both families start from a paired pickup-delivery base instance.  Islands
partition the plane with k-means and place carrier stations on convex-hull
edges; floors lift tasks into 3D with stacked stations.  Repairs shift time
windows right (keeping their width) and bump vehicle capacities to the next
type, so a repaired instance always admits the constructed solution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from ._kernel.packed import INF, PackedData
from ._kernel.pure import search_machine_travel
from ._kernel.rng import Pcg32
from .geometry import convex_hull, kmeans, min_weight_clique
from .lilim import BasePdptw, BaseTask, truncate_requests
from .model import Instance, Machine, Solution, Travel, Vehicle, Visit

ISLAND_MACHINE_SPEED = 1.0
FLOOR_MACHINE_SPEED = 0.2
VEHICLE_TYPES = 3
CAPACITY_SPREAD = 0.2


@dataclass(frozen=True)
class GenConfig:
    family: str  # "island" | "floor"
    n: int
    z: int
    machines: int
    seed: int

    def __post_init__(self):
        if self.family not in ("island", "floor"):
            raise ValueError("family must be 'island' or 'floor'")
        if self.n < 1 or self.z < 1 or self.machines < 0:
            raise ValueError("n and z must be positive, machines nonnegative")


def _round_half_away(x: float) -> int:
    return int(math.floor(x + 0.5)) if x >= 0 else -int(math.floor(-x + 0.5))


def gen_vehicles(base: BasePdptw, n: int, rng: Pcg32) -> tuple[Vehicle, ...]:
    """One vehicle per request.  Capacities sit on a three-type grid around
    max demand / 0.6; the first three vehicles realize the three types."""
    max_q = max(base.tasks[p].demand for p, _ in base.pairs)
    bq = max_q / 0.6
    step = _round_half_away(CAPACITY_SPREAD * bq)
    fixed = [bq - step, bq, bq + step]
    caps = []
    for k in range(n):
        if k < min(3, n):
            caps.append(fixed[k])
        else:
            caps.append(bq + (rng.below(3) - 1) * step)
    return tuple(Vehicle(c, 1.0) for c in caps)


def vehicle_types(instance: Instance) -> list[float]:
    return sorted({v.capacity for v in instance.vehicles})


def _node_rows(base: BasePdptw):
    """Depot + interleaved pickup/delivery rows in request order."""
    rows = [base.depot]
    for p, _ in base.pairs:
        rows.append(base.tasks[p])
    for _, d in base.pairs:
        rows.append(base.tasks[d])
    return rows


def _instance_fields(base: BasePdptw, coords, regions, vehicles, machines, name):
    rows = _node_rows(base)
    n = base.num_requests
    demand = [0.0]
    for i in range(1, n + 1):
        demand.append(abs(rows[i].demand))
    for i in range(1, n + 1):
        demand.append(-abs(rows[i].demand))
    return Instance(
        name=name,
        num_requests=n,
        coords=tuple(coords),
        region=tuple(regions),
        demand=tuple(demand),
        tw_open=tuple(r.tw_open for r in rows),
        tw_close=tuple(r.tw_close for r in rows),
        service=tuple(r.service for r in rows),
        vehicles=vehicles,
        machines=machines,
    )


def _region_hulls(points_by_region, rng: Pcg32):
    """One hull per region; regions with too few or collinear points get
    scaffold points around their centroid until a hull exists."""
    hulls = []
    for region, source in enumerate(points_by_region):
        pts = [tuple(p) for p in source]
        centroid = (
            sum(p[0] for p in pts) / len(pts),
            sum(p[1] for p in pts) / len(pts),
        )
        guard = 0
        while True:
            try:
                hulls.append(convex_hull(pts))
                break
            except ValueError:
                guard += 1
                if guard > 200:
                    raise RuntimeError(f"cannot build a hull for region {region}")
                dx, dy = rng.below(9) - 4, rng.below(9) - 4
                if dx == 0 and dy == 0:
                    dx = 1
                pts.append((centroid[0] + dx, centroid[1] + dy))
    return hulls


def _probe_edge(v, u, occupied, others):
    """First integer point at least two units along the edge from v that is
    free; returns (point, sum of distances to the other anchors) or None."""
    length = math.dist(v, u)
    t = 2.0
    while t < length:
        lam = t / length
        cand = (
            _round_half_away(v[0] + lam * (u[0] - v[0])),
            _round_half_away(v[1] + lam * (u[1] - v[1])),
        )
        if cand not in occupied and math.dist(cand, v) >= 2.0:
            return cand, sum(math.dist(cand, o) for o in others)
        t += 0.5
    return None


def _island_stations(points_by_region, all_points, num_machines, rng: Pcg32):
    """Hull-edge station placement: one anchor vertex per island (minimum
    weight clique over hull vertices), then per machine the first integer
    point at least two units along an incident edge, preferring the edge
    whose point sits closest to the other anchors.  Regions whose hull edges
    run out of free points get extra scaffold points and a fresh hull."""
    z = len(points_by_region)
    scaffold = [list(map(tuple, pts)) for pts in points_by_region]
    for _attempt in range(60):
        hulls = _region_hulls(scaffold, rng)
        anchors = min_weight_clique(hulls)
        occupied = {tuple(p) for p in all_points}
        stations_per_machine = []
        failed_region = -1
        for _ in range(num_machines):
            stations = []
            for region in range(z):
                hull = hulls[region]
                v = anchors[region]
                vi = hull.index(v)
                edges = [hull[(vi + 1) % len(hull)], hull[(vi - 1) % len(hull)]]
                others = [a for r, a in enumerate(anchors) if r != region]
                best_point, best_score = None, INF
                for u in edges:
                    found = _probe_edge(v, u, occupied, others)
                    if found and found[1] < best_score:
                        best_point, best_score = found
                if best_point is None:
                    failed_region = region
                    break
                occupied.add(best_point)
                stations.append(
                    (region, (float(best_point[0]), float(best_point[1])))
                )
            if failed_region >= 0:
                break
            stations_per_machine.append(tuple(stations))
        if failed_region < 0:
            return stations_per_machine
        centroid = (
            sum(p[0] for p in scaffold[failed_region]) / len(scaffold[failed_region]),
            sum(p[1] for p in scaffold[failed_region]) / len(scaffold[failed_region]),
        )
        spread = 5 + 2 * _attempt
        dx = rng.below(2 * spread + 1) - spread
        dy = rng.below(2 * spread + 1) - spread
        if dx == 0 and dy == 0:
            dx = spread
        scaffold[failed_region].append((centroid[0] + dx, centroid[1] + dy))
    raise RuntimeError("island station placement did not converge")


def gen_multi_island(base: BasePdptw, cfg: GenConfig, name: str = "") -> Instance:
    rng = Pcg32(cfg.seed)
    rows = _node_rows(base)
    customer_pts = [(t.x, t.y) for t in rows[1:]]
    labels = kmeans(customer_pts, cfg.z, rng)
    centroids = []
    for region in range(cfg.z):
        members = [p for p, lab in zip(customer_pts, labels) if lab == region]
        centroids.append(
            (
                sum(p[0] for p in members) / len(members),
                sum(p[1] for p in members) / len(members),
            )
            if members
            else (base.depot.x, base.depot.y)
        )
    depot_pt = (base.depot.x, base.depot.y)
    depot_region = min(
        range(cfg.z), key=lambda r: (math.dist(depot_pt, centroids[r]), r)
    )
    regions = [depot_region] + labels
    coords = [depot_pt] + customer_pts
    machines: tuple[Machine, ...] = ()
    if cfg.z >= 2 and cfg.machines > 0:
        points_by_region = [
            [p for p, r in zip(coords, regions) if r == region]
            for region in range(cfg.z)
        ]
        stations = _island_stations(points_by_region, coords, cfg.machines, rng)
        machines = tuple(Machine(s, ISLAND_MACHINE_SPEED) for s in stations)
    vehicles = gen_vehicles(base, cfg.n, rng)
    return _instance_fields(base, coords, regions, vehicles, machines, name or base.name)


def gen_multi_floor(base: BasePdptw, cfg: GenConfig, name: str = "") -> Instance:
    rng = Pcg32(cfg.seed)
    rows = _node_rows(base)
    floors = [0] + [rng.below(cfg.z) for _ in rows[1:]]
    coords = [(rows[0].x, rows[0].y, 0.0)] + [
        (t.x, t.y, float(f)) for t, f in zip(rows[1:], floors[1:])
    ]
    machines: tuple[Machine, ...] = ()
    if cfg.z >= 2 and cfg.machines > 0:
        xs = [c[0] for c in coords]
        ys = [c[1] for c in coords]
        cx = _round_half_away((min(xs) + max(xs)) / 2.0)
        cy = _round_half_away((min(ys) + max(ys)) / 2.0)
        taken = {(c[0], c[1]) for c in coords}
        stacks = []
        offset = 0
        for _ in range(cfg.machines):
            while True:
                x = cx + ((offset + 1) // 2 if offset % 2 == 1 else -(offset // 2))
                offset += 1
                if (float(x), float(cy)) not in taken:
                    break
            taken.add((float(x), float(cy)))
            stacks.append(
                tuple(
                    (f, (float(x), float(cy), float(f))) for f in range(cfg.z)
                )
            )
        machines = tuple(Machine(s, FLOOR_MACHINE_SPEED) for s in stacks)
    vehicles = gen_vehicles(base, cfg.n, rng)
    return _instance_fields(base, coords, regions=floors, vehicles=vehicles,
                            machines=machines, name=name or base.name)


# ---------------------------------------------------------------------------
# Feasibility-ensuring construction
# ---------------------------------------------------------------------------


@dataclass
class EnsureResult:
    instance: Instance
    changed: bool
    solution: Solution


class _RepairBuilder:
    """Greedy construction that records the best infeasible candidate and
    repairs the instance (window shifts, capacity bumps) when no feasible
    candidate exists.  Machine search never stops on a window violation here;
    violations become repair costs instead."""

    def __init__(self, instance: Instance, usable_machines: int, types):
        self.inst = instance
        self.pd = PackedData(instance, usable_machines)
        self.e = list(self.pd.e)
        self.l = list(self.pd.l)
        self.cap = list(self.pd.cap)
        self.types = sorted(types)
        self.widths = [
            instance.tw_close[instance.real(i)] - instance.tw_open[instance.real(i)]
            for i in range(self.pd.nn)
        ]
        t0 = self.e[0]
        self.routes = [[0, self.pd.depot_copy] for _ in range(self.pd.nv)]
        self.sts = [[t0, t0] for _ in range(self.pd.nv)]
        self.loads = [[0.0, 0.0] for _ in range(self.pd.nv)]
        self.mach = [[] for _ in range(self.pd.nh)]
        self.changed = False

    def _walk(self, k, g, h0, p, d):
        """Forward simulation of the insertion; returns None when rejected
        (capacity beyond the largest type, or depot close overrun), else
        (arrival, tw_shift_sum, cap_excess, sts, mtrvs)."""
        pd = self.pd
        route, st, load = self.routes[k], self.sts[k], self.loads[k]
        qp = pd.q[p]
        peak = load[g - 1]
        for r in range(g, h0):
            if load[r] > peak:
                peak = load[r]
        peak += qp
        excess = peak - self.cap[k]
        if excess > 0 and (not self.types or peak > self.types[-1]):
            return None

        node_pos = {node: idx for idx, node in enumerate(route)}
        cut = g - 1

        def disregarded(trv):
            return trv[2] == k and node_pos.get(trv[0], -1) >= cut

        work: dict[int, list] = {}
        next_slot = [0] * pd.nh

        def work_seq(h):
            seq = work.get(h)
            if seq is None:
                seq = [t for t in self.mach[h] if not disregarded(t)]
                work[h] = seq
            return seq

        new_nodes = route[:g] + [p] + route[g:h0] + [d] + route[h0:]
        new_sts = st[:g]
        mtrvs = []
        tw_shift = 0.0
        t_cur = st[g - 1]
        a = route[g - 1]
        for b in new_nodes[g:]:
            dep = t_cur + pd.s[a]
            if pd.is_mach[a][b]:
                best = None
                best_dt = INF
                for h in pd.elig[a][b]:
                    k_arr = dep + pd.dbar[k][a][h]
                    found = search_machine_travel(
                        pd, work_seq(h), h, k, a, b, k_arr, next_slot[h],
                        stop_on_lj=False, e_arr=self.e, l_arr=self.l,
                    )
                    if found is None:
                        continue
                    slot, alpha, arrive = found
                    dt = arrive - t_cur
                    if dt < best_dt:
                        best_dt = dt
                        best = (h, slot, alpha, arrive)
                if best is None:
                    return None
                h, slot, alpha, arrive = best
                work_seq(h).insert(slot, (a, b, k, alpha))
                next_slot[h] = slot + 1
                mtrvs.append((h, slot, alpha, a, b))
                t_b = arrive
            else:
                t_b = dep + pd.trav[k][a][b]
            if b == pd.depot_copy:
                if t_b > self.l[b]:
                    return None  # the depot window is never repaired
            else:
                if t_b < self.e[b]:
                    t_b = self.e[b]
                if t_b > self.l[b]:
                    tw_shift += t_b - self.l[b]
            new_sts.append(t_b)
            t_cur = t_b
            a = b
        return new_sts[-1], tw_shift, max(0.0, excess), new_sts, mtrvs, work, disregarded

    def insert_request(self, p, d):
        pd = self.pd
        best_f = None
        best_f_cost = INF
        best_i = None
        best_i_cost = INF
        for k in range(pd.nv):
            L = len(self.routes[k])
            for p_pos in range(2, L + 1):
                for d_pos in range(p_pos, L + 1):
                    res = self._walk(k, p_pos - 1, d_pos - 1, p, d)
                    if res is None:
                        continue
                    arrival, tw_shift, excess, *_ = res
                    if tw_shift == 0.0 and excess <= 0.0:
                        if arrival < best_f_cost:
                            best_f_cost = arrival
                            best_f = (k, p_pos, d_pos)
                    else:
                        cost = tw_shift + excess * self.cap[k]
                        if cost < best_i_cost:
                            best_i_cost = cost
                            best_i = (k, p_pos, d_pos)
        chosen = best_f if best_f is not None else best_i
        if chosen is None:
            raise RuntimeError(f"request {p} cannot be placed on any vehicle")
        self._commit(*chosen, p, d, repair=best_f is None)
        return best_f is not None

    def _commit(self, k, p_pos, d_pos, p, d, repair):
        pd = self.pd
        g, h0 = p_pos - 1, d_pos - 1
        res = self._walk(k, g, h0, p, d)
        arrival, tw_shift, excess, new_sts, mtrvs, work, disregarded = res
        route = self.routes[k]
        new_nodes = route[:g] + [p] + route[g:h0] + [d] + route[h0:]
        if repair:
            self.changed = True
            if excess > 0:
                peak = self.loads[k][g - 1] + pd.q[p]
                for r in range(g, h0):
                    if self.loads[k][r] + pd.q[p] > peak:
                        peak = self.loads[k][r] + pd.q[p]
                self.cap[k] = next(t for t in self.types if t >= peak)
            # Raising a window's opening (width is preserved) can push later
            # visits past their close, so repair until the walk is clean.
            for _ in range(200):
                if tw_shift == 0.0:
                    break
                for node, t in zip(new_nodes[1:-1], new_sts[1:-1]):
                    if t > self.l[node]:
                        self.l[node] = float(math.ceil(t))
                        self.e[node] = self.l[node] - self.widths[node]
                res = self._walk(k, g, h0, p, d)
                if res is None:
                    raise RuntimeError("window repair overran the depot window")
                arrival, tw_shift, _, new_sts, mtrvs, work, disregarded = res
            else:
                raise RuntimeError("window repair did not converge")
        new_loads = self.loads[k][:g]
        ld = self.loads[k][g - 1]
        for b in new_nodes[g:]:
            ld = ld + pd.q[b]
            new_loads.append(ld)
        self.routes[k] = new_nodes
        self.sts[k] = new_sts
        self.loads[k] = new_loads
        for h in range(pd.nh):
            if h in work:
                self.mach[h] = work[h]
            else:
                kept = [t for t in self.mach[h] if not disregarded(t)]
                if len(kept) != len(self.mach[h]):
                    self.mach[h] = kept

    def build(self):
        order = sorted(
            self.pd.instance.pickups,
            key=lambda p: (
                self.pd.instance.tw_close[p] - self.pd.instance.tw_open[p],
                p,
            ),
        )
        for p in order:
            self.insert_request(p, p + self.pd.n)

    def repaired_instance(self) -> Instance:
        inst = self.inst
        n = inst.num_requests
        return replace(
            inst,
            tw_open=tuple(self.e[: 2 * n + 1]),
            tw_close=tuple(self.l[: 2 * n + 1]),
            vehicles=tuple(
                Vehicle(c, v.speed) for c, v in zip(self.cap, inst.vehicles)
            ),
        )

    def solution(self) -> Solution:
        vehicles = [
            [Visit(nd, st, ld) for nd, st, ld in zip(r, s, l)]
            for r, s, l in zip(self.routes, self.sts, self.loads)
        ]
        machines = [[Travel(i, j, k, st) for i, j, k, st in seq] for seq in self.mach]
        cost = sum(s[-1] - s[0] for s in self.sts)
        return Solution(True, vehicles, machines, cost)


def ensure_feasibility(
    instance: Instance,
    usable_machines: int | None = None,
    types=None,
) -> EnsureResult:
    """Repair an instance until the greedy construction (restricted to the
    first ``usable_machines`` carriers; the last one stays a spare) succeeds.
    Window widths never shrink, capacities never decrease."""
    if usable_machines is None:
        usable_machines = max(1, len(instance.machines) - 1) if instance.machines else 0
    if types is None:
        types = vehicle_types(instance)
    current = instance
    changed = False
    for _ in range(2 * instance.num_requests + 2):
        builder = _RepairBuilder(current, usable_machines, types)
        builder.build()
        if not builder.changed:
            return EnsureResult(current, changed, builder.solution())
        changed = True
        current = builder.repaired_instance()
    raise RuntimeError("instance repair did not converge")


def generate(base: BasePdptw, cfg: GenConfig) -> Instance:
    """Full pipeline: truncate, place regions and machines, add vehicles,
    repair for feasibility, and name by the group convention."""
    base = truncate_requests(base, cfg.n)
    fam = "I" if cfg.family == "island" else "F"
    name = (
        f"{cfg.n:02d}R_{cfg.n:02d}V_{cfg.z:02d}{fam}_{cfg.machines:02d}M"
        f"_{base.name}_s{cfg.seed}"
    )
    if cfg.family == "island":
        inst = gen_multi_island(base, cfg, name)
    else:
        inst = gen_multi_floor(base, cfg, name)
    return ensure_feasibility(inst).instance


def make_synthetic_base(
    num_requests: int, seed: int, horizon: float = 1000.0, name: str = ""
) -> BasePdptw:
    """Small random paired base instance in the benchmark layout; handy for
    demos and tests when the public files are not on disk."""
    rng = Pcg32(seed, stream=97)
    tasks: dict[int, BaseTask] = {}
    pairs = []
    for r in range(num_requests):
        pid, did = 2 * r + 1, 2 * r + 2
        px, py = rng.below(101), rng.below(101)
        dx, dy = rng.below(101), rng.below(101)
        q = 5 + rng.below(36)
        ep = rng.below(int(horizon * 0.5))
        wp = 60 + rng.below(int(horizon * 0.25))
        ed = ep + 20 + rng.below(int(horizon * 0.25))
        wd = 60 + rng.below(int(horizon * 0.25))
        tasks[pid] = BaseTask(float(px), float(py), float(q), float(ep),
                              float(min(ep + wp, horizon)), 10.0)
        tasks[did] = BaseTask(float(dx), float(dy), float(-q), float(ed),
                              float(min(ed + wd, horizon)), 10.0)
        pairs.append((pid, did))
    depot = BaseTask(50.0, 50.0, 0.0, 0.0, float(horizon * 3), 0.0)
    return BasePdptw(
        name or f"syn{num_requests}s{seed}",
        num_vehicles=num_requests,
        capacity=200.0,
        depot=depot,
        tasks=tasks,
        pairs=pairs,
    )
