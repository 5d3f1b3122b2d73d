"""Flat numeric view of an instance, shared by both kernel backends.

All derived travel times are precomputed once so the inner loops only index
into nested lists (pure backend) or C arrays copied from them (compiled
backend).  Node indexing includes the depot copy at ``2n + 1``.
"""

from __future__ import annotations

from ..model import Instance, machine_edge_bound

INF = float("inf")


class PackedData:
    def __init__(self, instance: Instance, usable_machines: int | None = None):
        self.instance = instance
        n = instance.num_requests
        nh_all = len(instance.machines)
        nh = nh_all if usable_machines is None else min(usable_machines, nh_all)
        nv = len(instance.vehicles)
        nn = 2 * n + 2
        nz = instance.num_regions
        self.n, self.nn, self.nv, self.nh, self.nz = n, nn, nv, nh, nz
        self.depot_copy = nn - 1

        self.e = [instance.tw_open[instance.real(i)] for i in range(nn)]
        self.l = [instance.tw_close[instance.real(i)] for i in range(nn)]
        self.s = [instance.service[instance.real(i)] for i in range(nn)]
        self.q = [instance.demand[instance.real(i)] for i in range(nn)]
        self.region = [instance.node_region(i) for i in range(nn)]
        self.cap = [v.capacity for v in instance.vehicles]

        self.is_mach = [
            [
                1 if (i != j and instance.node_region(i) != instance.node_region(j)) else 0
                for j in range(nn)
            ]
            for i in range(nn)
        ]
        self.trav = [
            [[self._arc_time(k, i, j) for j in range(nn)] for i in range(nn)]
            for k in range(nv)
        ]
        self.dbar = [
            [
                [
                    instance.station_time(k, i, h)
                    if instance.machines[h].serves(instance.node_region(i))
                    else INF
                    for h in range(nh)
                ]
                for i in range(nn)
            ]
            for k in range(nv)
        ]
        self.ocross = [
            [
                [
                    instance.crossing_time(h, r1, r2)
                    if instance.machines[h].serves(r1) and instance.machines[h].serves(r2)
                    else INF
                    for r2 in range(nz)
                ]
                for r1 in range(nz)
            ]
            for h in range(nh)
        ]
        self.init_region = [instance.machines[h].initial_region for h in range(nh)]
        self.elig = [
            [
                tuple(
                    h
                    for h in range(nh)
                    if self.is_mach[i][j]
                    and self.ocross[h][self.region[i]][self.region[j]] < INF
                )
                for j in range(nn)
            ]
            for i in range(nn)
        ]
        widths = sorted(
            (instance.tw_close[p] - instance.tw_open[p], p) for p in instance.pickups
        )
        self.width_order = [p for _, p in widths]
        self.max_travels = 2 * n + nv + 2

    def _arc_time(self, k: int, i: int, j: int) -> float:
        inst = self.instance
        if inst.real(i) == inst.real(j):
            return 0.0
        if inst.node_region(i) == inst.node_region(j):
            return inst.straight_time(k, i, j)
        return machine_edge_bound(inst, k, i, j)
