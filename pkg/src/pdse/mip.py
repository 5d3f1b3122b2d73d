"""Mixed-integer model of the full problem, plus the optional cut families,
emitted as LP text for external solvers.

Variables follow the naming scheme ``x_k_i_j``, ``z_k_i``, ``t_i``,
``t0_k``, ``tend_k``, ``C_k``, ``phi_h_i_j``, ``alp_h_i_j`` and
``gam_h_i_j_i2_j2`` so solutions can be recovered from solver output.
Index sets honour the preprocessing result: no variable references an
eliminated arc, a filtered machine, or a dropped precedence pair.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

from .lpformat import INF, LpFile, dumps_lp, loads_lp, write_lp
from .model import Instance, Solution
from .preprocess import PreprocessResult, preprocess


@dataclass(frozen=True)
class BigM:
    """Constraint activation constants; each is just large enough for the
    worst case term it relaxes."""

    m1: float
    m2: float
    m3: float
    m4: float
    m5: float
    m6: float
    m7: float
    m8: float


def compute_big_m(instance: Instance) -> BigM:
    nv = range(len(instance.vehicles))
    nodes = range(2 * instance.num_requests + 2)
    l0 = instance.tw_close[0]
    max_q = max(instance.demand[i] for i in instance.pickups)
    max_cap = max(v.capacity for v in instance.vehicles)
    max_s = max(instance.service)
    max_d = max(
        instance.travel_time(k, i, j)
        for k in nv
        for i in nodes
        for j in nodes
        if instance.real(i) != instance.real(j)
    )
    dbar_vals = [
        instance.station_time(k, i, h)
        for k in nv
        for i in nodes
        for h in range(len(instance.machines))
        if instance.machines[h].serves(instance.node_region(i))
    ]
    max_dbar = max(dbar_vals, default=0.0)
    ocross_vals = [
        instance.crossing_time(h, r1, r2)
        for h, m in enumerate(instance.machines)
        for r1 in m.regions
        for r2 in m.regions
    ]
    max_o = max(ocross_vals, default=0.0)
    return BigM(
        m1=max_cap + max_q + 1.0,
        m2=l0 + max_s + max_d + 1.0,
        m3=l0 + max_d + 1.0,
        m4=l0 + max_s + max_dbar + 1.0,
        m5=l0 + max_dbar + 1.0,
        m6=l0 + max_o + max_dbar + 1.0,
        m7=l0 + 2.0 * max_o + 1.0,
        m8=max_o + 1.0,
    )


VI_IDS = tuple(range(35, 47))


@dataclass(frozen=True)
class ViConfig:
    """One switch per cut family (ids 35..46).  The default enables the
    top-ranked configuration: everything except the machine-path cuts (40)."""

    vi35: bool = True
    vi36: bool = True
    vi37: bool = True
    vi38: bool = True
    vi39: bool = True
    vi40: bool = False
    vi41: bool = True
    vi42: bool = True
    vi43: bool = True
    vi44: bool = True
    vi45: bool = True
    vi46: bool = True

    def enabled(self, vid: int) -> bool:
        return getattr(self, f"vi{vid}")

    @classmethod
    def none(cls) -> "ViConfig":
        return cls(**{f.name: False for f in fields(cls)})

    @classmethod
    def all(cls) -> "ViConfig":
        return cls(**{f.name: True for f in fields(cls)})

    @classmethod
    def paper_top1(cls) -> "ViConfig":
        return cls()

    @classmethod
    def from_spec(cls, spec: str) -> "ViConfig":
        """Parse ``none``, ``all``, ``paper-top1`` or a comma list like
        ``35,36,41``."""
        spec = spec.strip().lower()
        if spec == "none":
            return cls.none()
        if spec == "all":
            return cls.all()
        if spec in ("paper-top1", "top1", "default"):
            return cls.paper_top1()
        chosen = {int(tok) for tok in spec.replace(" ", "").split(",") if tok}
        bad = chosen - set(VI_IDS)
        if bad:
            raise ValueError(f"unknown cut families: {sorted(bad)}")
        return cls(**{f"vi{vid}": vid in chosen for vid in VI_IDS})


@dataclass(frozen=True)
class Row:
    name: str
    terms: tuple[tuple[float, str], ...]
    sense: str
    rhs: float


@dataclass
class MipModel:
    name: str
    variables: dict[str, tuple[float, float, str]]  # name -> (lb, ub, kind C|B)
    rows: list[Row]
    objective: tuple[tuple[float, str], ...]

    def binaries(self) -> list[str]:
        return [v for v, (_, _, kind) in self.variables.items() if kind == "B"]


class _Builder:
    def __init__(self, instance: Instance, pre: PreprocessResult, vi: ViConfig):
        self.inst = instance
        self.pre = pre
        self.vi = vi
        self.M = compute_big_m(instance)
        self.vars: dict[str, tuple[float, float, str]] = {}
        self.rows: list[Row] = []
        n = instance.num_requests
        self.end = instance.depot_copy
        self.customers = list(range(1, 2 * n + 1))
        self.K = range(len(instance.vehicles))
        # Surviving arcs in deterministic order.
        self.arcs = [
            (i, j)
            for i in range(2 * n + 1)
            for j in range(1, self.end + 1)
            if i != j and (i, j) not in pre.eliminated
        ]
        self.arc_set = set(self.arcs)
        self.in_arcs: dict[int, list[int]] = {j: [] for j in range(self.end + 1)}
        self.out_arcs: dict[int, list[int]] = {i: [] for i in range(self.end + 1)}
        for i, j in self.arcs:
            self.in_arcs[j].append(i)
            self.out_arcs[i].append(j)
        self.mach_arcs = [a for a in self.arcs if instance.is_machine_arc(*a)]
        self.helig = {a: pre.eligible.get(a, ()) for a in self.mach_arcs}
        self.gammas: set[tuple[int, tuple, tuple]] = set()

    # -- helpers -----------------------------------------------------------

    def var(self, name, lb, ub, kind):
        if name not in self.vars:
            self.vars[name] = (lb, ub, kind)
        return name

    def row(self, name, terms, sense, rhs):
        self.rows.append(Row(name, tuple(terms), sense, rhs))

    def x(self, k, i, j):
        return self.var(f"x_{k}_{i}_{j}", 0.0, 1.0, "B")

    def z(self, k, i):
        return self.var(f"z_{k}_{i}", 0.0, INF, "C")

    def t(self, i):
        return self.var(f"t_{i}", self.pre.tw_open[i], self.pre.tw_close[i], "C")

    def t0(self, k):
        return self.var(f"t0_{k}", self.inst.tw_open[0], self.inst.tw_close[0], "C")

    def tend(self, k):
        return self.var(f"tend_{k}", self.inst.tw_open[0], self.inst.tw_close[0], "C")

    def C(self, k):
        return self.var(f"C_{k}", 0.0, INF, "C")

    def phi(self, h, i, j):
        return self.var(f"phi_{h}_{i}_{j}", 0.0, 1.0, "B")

    def alp(self, h, i, j):
        return self.var(f"alp_{h}_{i}_{j}", 0.0, INF, "C")

    def gam(self, h, a, b):
        self.gammas.add((h, a, b))
        return self.var(f"gam_{h}_{a[0]}_{a[1]}_{b[0]}_{b[1]}", 0.0, 1.0, "B")

    def dropped(self, h, a, b) -> bool:
        return (h, a, b) in self.pre.dropped_pairs

    def d(self, k, i, j):
        return self.inst.travel_time(k, i, j)

    def dbar_min(self, i, h):
        return min(
            self.inst.station_time(k, i, h) for k in self.K
        )

    def ocross(self, h, i, j):
        return self.inst.crossing_time(
            h, self.inst.node_region(i), self.inst.node_region(j)
        )

    def e_shrunk(self, i):
        return self.inst.tw_open[0] if i == 0 or i == self.end else self.pre.tw_open[i]

    def l_shrunk(self, i):
        return self.inst.tw_close[0] if i == 0 or i == self.end else self.pre.tw_close[i]

    # -- core constraint families -------------------------------------------

    def build_routing(self):
        inst, n = self.inst, self.inst.num_requests
        for k in self.K:
            terms = [
                (1.0, self.x(k, 0, j))
                for j in self.out_arcs[0]
                if j in set(inst.pickups) | {self.end}
            ]
            self.row(f"depart_{k}", terms, "=", 1.0)
        for k in self.K:
            for i in self.customers:
                terms = [(1.0, self.x(k, j, i)) for j in self.in_arcs[i]]
                terms += [(-1.0, self.x(k, i, j)) for j in self.out_arcs[i]]
                self.row(f"balance_{k}_{i}", terms, "=", 0.0)
        for k in self.K:
            terms = [
                (1.0, self.x(k, j, self.end))
                for j in self.in_arcs[self.end]
                if j in set(inst.deliveries) | {0}
            ]
            self.row(f"return_{k}", terms, "=", 1.0)
        for i in self.customers:
            terms = [(1.0, self.x(k, j, i)) for k in self.K for j in self.in_arcs[i]]
            self.row(f"cover_{i}", terms, "=", 1.0)
        for k in self.K:
            for i in inst.pickups:
                terms = [(1.0, self.x(k, j, i)) for j in self.in_arcs[i]]
                terms += [(-1.0, self.x(k, j, n + i)) for j in self.in_arcs[n + i]]
                self.row(f"pair_{k}_{i}", terms, "=", 0.0)
        m1 = self.M.m1
        for k in self.K:
            self.vars[self.z(k, 0)] = (0.0, 0.0, "C")
            for i, j in self.arcs:
                q_j = inst.demand[inst.real(j)]
                self.row(
                    f"loadlb_{k}_{i}_{j}",
                    [(1.0, self.z(k, j)), (-1.0, self.z(k, i)), (-m1, self.x(k, i, j))],
                    ">=",
                    q_j - m1,
                )
                self.row(
                    f"loadub_{k}_{i}_{j}",
                    [(1.0, self.z(k, j)), (-1.0, self.z(k, i)), (m1, self.x(k, i, j))],
                    "<=",
                    q_j + m1,
                )
            cap = inst.vehicles[k].capacity
            for i in self.customers:
                bound = min(cap, max(0.0, cap + inst.demand[i]))
                terms = [(1.0, self.z(k, i))]
                terms += [(-bound, self.x(k, j, i)) for j in self.in_arcs[i]]
                self.row(f"cap_{k}_{i}", terms, "<=", 0.0)
            for i in inst.pickups:
                terms = [(1.0, self.z(k, i))]
                terms += [(-inst.demand[i], self.x(k, j, i)) for j in self.in_arcs[i]]
                self.row(f"pickuplb_{k}_{i}", terms, ">=", 0.0)

    def build_scheduling(self):
        inst, n = self.inst, self.inst.num_requests
        M = self.M
        for k in self.K:
            for i, j in self.arcs:
                if i == 0 or j == self.end:
                    continue
                self.row(
                    f"time_{k}_{i}_{j}",
                    [(1.0, self.t(j)), (-1.0, self.t(i)), (-M.m2, self.x(k, i, j))],
                    ">=",
                    inst.service[i] + self.d(k, i, j) - M.m2,
                )
            for j in self.out_arcs[0]:
                if j == self.end or j not in set(inst.pickups):
                    continue
                self.row(
                    f"timedep_{k}_{j}",
                    [(1.0, self.t(j)), (-1.0, self.t0(k)), (-M.m3, self.x(k, 0, j))],
                    ">=",
                    self.d(k, 0, j) - M.m3,
                )
        for i in inst.pickups:
            terms = [(1.0, self.t(n + i)), (-1.0, self.t(i))]
            for k in self.K:
                dk = self.d(k, i, n + i)
                for l in self.in_arcs[i]:
                    terms.append((-dk, self.x(k, l, i)))
            self.row(f"prec_{i}", terms, ">=", inst.service[i])

        for i, j in self.mach_arcs:
            terms = [(1.0, self.phi(h, i, j)) for h in self.helig[(i, j)]]
            terms += [(-1.0, self.x(k, i, j)) for k in self.K]
            self.row(f"machuse_{i}_{j}", terms, "=", 0.0)
        for i, j in self.mach_arcs:
            for h in self.helig[(i, j)]:
                al = self.alp(h, i, j)
                for k in self.K:
                    board = inst.service[inst.real(i)] + inst.station_time(k, i, h)
                    if i == 0:
                        self.row(
                            f"boarddep_{h}_{k}_{j}",
                            [
                                (1.0, al),
                                (-1.0, self.t0(k)),
                                (-M.m5, self.phi(h, i, j)),
                                (-M.m5, self.x(k, i, j)),
                            ],
                            ">=",
                            inst.station_time(k, 0, h) - 2.0 * M.m5,
                        )
                    else:
                        self.row(
                            f"board_{h}_{k}_{i}_{j}",
                            [
                                (1.0, al),
                                (-1.0, self.t(i)),
                                (-M.m4, self.phi(h, i, j)),
                                (-M.m4, self.x(k, i, j)),
                            ],
                            ">=",
                            board - 2.0 * M.m4,
                        )
                    alight = self.ocross(h, i, j) + inst.station_time(k, j, h)
                    if j == self.end:
                        self.row(
                            f"arrivem_{h}_{k}_{i}",
                            [
                                (1.0, self.tend(k)),
                                (-1.0, al),
                                (-M.m4, self.phi(h, i, j)),
                                (-M.m4, self.x(k, i, j)),
                            ],
                            ">=",
                            alight - 2.0 * M.m4,
                        )
                    else:
                        self.row(
                            f"alight_{h}_{k}_{i}_{j}",
                            [
                                (1.0, self.t(j)),
                                (-1.0, al),
                                (-M.m6, self.phi(h, i, j)),
                                (-M.m6, self.x(k, i, j)),
                            ],
                            ">=",
                            alight - 2.0 * M.m6,
                        )
                self.row(
                    f"initial_{h}_{i}_{j}",
                    [(1.0, al), (-M.m8, self.phi(h, i, j))],
                    ">=",
                    self.inst.crossing_time(
                        h,
                        self.inst.machines[h].initial_region,
                        self.inst.node_region(i),
                    )
                    - M.m8,
                )

        # Precedence between two travels of the same machine.
        for a in self.mach_arcs:
            for b in self.mach_arcs:
                if a == b:
                    continue
                common = [h for h in self.helig[a] if h in self.helig[b]]
                for h in common:
                    if a < b:
                        terms = []
                        if not self.dropped(h, a, b):
                            terms.append((1.0, self.gam(h, a, b)))
                        if not self.dropped(h, b, a):
                            terms.append((1.0, self.gam(h, b, a)))
                        terms += [(-1.0, self.phi(h, *a)), (-1.0, self.phi(h, *b))]
                        self.row(
                            f"order_{h}_{a[0]}_{a[1]}_{b[0]}_{b[1]}", terms, ">=", -1.0
                        )
                    if self.dropped(h, a, b):
                        continue
                    g = self.gam(h, a, b)
                    self.row(
                        f"ord1_{h}_{a[0]}_{a[1]}_{b[0]}_{b[1]}",
                        [(1.0, g), (-1.0, self.phi(h, *a))],
                        "<=",
                        0.0,
                    )
                    self.row(
                        f"ord2_{h}_{a[0]}_{a[1]}_{b[0]}_{b[1]}",
                        [(1.0, g), (-1.0, self.phi(h, *b))],
                        "<=",
                        0.0,
                    )
                    spacing = self.ocross(h, *a) + self.inst.crossing_time(
                        h,
                        self.inst.node_region(a[1]),
                        self.inst.node_region(b[0]),
                    )
                    self.row(
                        f"spacing_{h}_{a[0]}_{a[1]}_{b[0]}_{b[1]}",
                        [(1.0, self.alp(h, *b)), (-1.0, self.alp(h, *a)), (-M.m7, g)],
                        ">=",
                        spacing - M.m7,
                    )

        for k in self.K:
            for i in self.in_arcs[self.end]:
                if i == 0 or i not in set(self.inst.deliveries):
                    continue
                self.row(
                    f"arrive_{k}_{i}",
                    [
                        (1.0, self.tend(k)),
                        (-1.0, self.t(i)),
                        (-M.m2, self.x(k, i, self.end)),
                    ],
                    ">=",
                    self.inst.service[i] + self.d(k, i, self.end) - M.m2,
                )
            self.row(
                f"completion_{k}",
                [(1.0, self.C(k)), (-1.0, self.tend(k)), (1.0, self.t0(k))],
                ">=",
                0.0,
            )
            self.row(
                f"span_{k}", [(1.0, self.tend(k)), (-1.0, self.t0(k))], ">=", 0.0
            )

    # -- cut families --------------------------------------------------------

    def build_cuts(self):
        inst = self.inst
        vi = self.vi
        if vi.enabled(35):
            for k in self.K:
                if (0, self.end) not in self.arc_set:
                    break
                for i in self.customers:
                    terms = [(1.0, self.x(k, 0, self.end))]
                    terms += [(1.0, self.x(k, j, i)) for j in self.in_arcs[i]]
                    self.row(f"vi35_{k}_{i}", terms, "<=", 1.0)
        if vi.enabled(36):
            for i, j in self.arcs:
                if i < j and (j, i) in self.arc_set:
                    terms = [(1.0, self.x(k, i, j)) for k in self.K]
                    terms += [(1.0, self.x(k, j, i)) for k in self.K]
                    self.row(f"vi36_{i}_{j}", terms, "<=", 1.0)
        if vi.enabled(37):
            for i, j in self.mach_arcs:
                if i < j and (j, i) in set(self.mach_arcs):
                    terms = [(1.0, self.phi(h, i, j)) for h in self.helig[(i, j)]]
                    terms += [(1.0, self.phi(h, j, i)) for h in self.helig[(j, i)]]
                    if terms:
                        self.row(f"vi37_{i}_{j}", terms, "<=", 1.0)
        if vi.enabled(38):
            for a in self.mach_arcs:
                for b in self.mach_arcs:
                    if not a < b:
                        continue
                    for h in self.helig[a]:
                        if h not in self.helig[b]:
                            continue
                        terms = []
                        if not self.dropped(h, a, b):
                            terms.append((1.0, self.gam(h, a, b)))
                        if not self.dropped(h, b, a):
                            terms.append((1.0, self.gam(h, b, a)))
                        if len(terms) == 2:
                            self.row(
                                f"vi38_{h}_{a[0]}_{a[1]}_{b[0]}_{b[1]}",
                                terms,
                                "<=",
                                1.0,
                            )
        if vi.enabled(39) or vi.enabled(40):
            self._build_path_cuts()
        if vi.enabled(41):
            for j in self.customers:
                terms = [(1.0, self.t(j))]
                for i in self.in_arcs[j]:
                    ei = self.e_shrunk(i)
                    si = inst.service[inst.real(i)]
                    for k in self.K:
                        terms.append((-(ei + si + self.d(k, i, j)), self.x(k, i, j)))
                self.row(f"vi41_{j}", terms, ">=", 0.0)
        for i, j in self.mach_arcs:
            for h in self.helig[(i, j)]:
                al = self.alp(h, i, j)
                ei = self.e_shrunk(i)
                lj = self.l_shrunk(j)
                si = inst.service[inst.real(i)]
                if vi.enabled(42):
                    self.row(
                        f"vi42_{h}_{i}_{j}",
                        [(1.0, al)],
                        ">=",
                        ei + si + self.dbar_min(i, h),
                    )
                if vi.enabled(43):
                    self.row(
                        f"vi43_{h}_{i}_{j}",
                        [(1.0, al)],
                        "<=",
                        lj - self.dbar_min(j, h) - self.ocross(h, i, j),
                    )
                if vi.enabled(44):
                    terms = [(1.0, al)]
                    terms += [
                        (-inst.station_time(k, i, h), self.x(k, i, j)) for k in self.K
                    ]
                    self.row(f"vi44_{h}_{i}_{j}", terms, ">=", ei + si)
                if vi.enabled(45):
                    terms = [(1.0, al)]
                    terms += [
                        (
                            inst.station_time(k, j, h) + self.ocross(h, i, j),
                            self.x(k, i, j),
                        )
                        for k in self.K
                    ]
                    self.row(f"vi45_{h}_{i}_{j}", terms, "<=", lj)
        if vi.enabled(46):
            for a in self.mach_arcs:
                for b in self.mach_arcs:
                    if a == b:
                        continue
                    for h in self.helig[a]:
                        if h not in self.helig[b]:
                            continue
                        if mu_indicator(self.inst, self.pre, h, a, b[0]):
                            spacing = self.ocross(h, *a) + self.inst.crossing_time(
                                h,
                                self.inst.node_region(a[1]),
                                self.inst.node_region(b[0]),
                            )
                            self.row(
                                f"vi46_{h}_{a[0]}_{a[1]}_{b[0]}_{b[1]}",
                                [(1.0, self.alp(h, *b)), (-1.0, self.alp(h, *a))],
                                ">=",
                                spacing,
                            )

    def _path_feasible_for(self, k, path):
        """Earliest service times along a 2-arc path from the shrunk opening
        of its first node; False when the last node's close is overrun."""
        inst = self.inst
        t = self.e_shrunk(path[0])
        prev = path[0]
        for node in path[1:]:
            arr = t + inst.service[inst.real(prev)] + self.d(k, prev, node)
            eo = self.e_shrunk(node)
            t = arr if arr >= eo else eo
            if t > self.l_shrunk(node):
                return False
            prev = node
        return True

    def _build_path_cuts(self):
        for i, j in self.arcs:
            if j == self.end:
                continue
            for v3 in self.out_arcs[j]:
                if v3 == i:
                    continue
                path = [i, j, v3]
                infeasible_k = [
                    k for k in self.K if not self._path_feasible_for(k, path)
                ]
                if self.vi.enabled(39):
                    for k in infeasible_k:
                        self.row(
                            f"vi39_{k}_{i}_{j}_{v3}",
                            [(1.0, self.x(k, i, j)), (1.0, self.x(k, j, v3))],
                            "<=",
                            1.0,
                        )
                if (
                    self.vi.enabled(40)
                    and len(infeasible_k) == len(self.inst.vehicles)
                    and (i, j) in self.helig
                    and (j, v3) in self.helig
                ):
                    terms = [(1.0, self.phi(h, i, j)) for h in self.helig[(i, j)]]
                    terms += [(1.0, self.phi(h, j, v3)) for h in self.helig[(j, v3)]]
                    if terms:
                        self.row(f"vi40_{i}_{j}_{v3}", terms, "<=", 1.0)

    def build(self) -> MipModel:
        self.build_routing()
        self.build_scheduling()
        self.build_cuts()
        objective = tuple((1.0, self.C(k)) for k in self.K)
        return MipModel(
            name=self.inst.name,
            variables=dict(sorted(self.vars.items())),
            rows=self.rows,
            objective=objective,
        )


def mu_indicator(instance: Instance, pre: PreprocessResult, h: int, arc, i2) -> int:
    """1 when any vehicle coming from node i2 reaches machine h's station no
    earlier than the machine can be back from carrying ``arc``."""
    i, j = arc
    end = instance.depot_copy
    e_i2 = instance.tw_open[0] if i2 == 0 else pre.tw_open[i2]
    l_j = instance.tw_close[0] if j == end else pre.tw_close[j]
    K = range(len(instance.vehicles))
    earliest = (
        e_i2
        + instance.service_of(i2)
        + min(instance.station_time(k, i2, h) for k in K)
    )
    latest_back = (
        l_j
        - min(instance.station_time(k, j, h) for k in K)
        + instance.crossing_time(h, instance.node_region(j), instance.node_region(i2))
    )
    return 1 if earliest >= latest_back else 0


def build_mip(
    instance: Instance,
    pre: PreprocessResult | None = None,
    vi: ViConfig = ViConfig(),
) -> MipModel:
    if pre is None:
        pre = preprocess(instance)  # raises when shrinking proves infeasibility
    return _Builder(instance, pre, vi).build()


def model_to_lpfile(model: MipModel) -> LpFile:
    return LpFile(
        name=model.name,
        objective=list(model.objective),
        constraints=[(r.name, list(r.terms), r.sense, r.rhs) for r in model.rows],
        bounds={v: (lb, ub) for v, (lb, ub, _) in model.variables.items()},
        binaries=model.binaries(),
    )


def emit_lp_text(model: MipModel, path) -> None:
    write_lp(model_to_lpfile(model), path)


def parse_lp_text(path_or_text, is_text=False) -> LpFile:
    if is_text:
        return loads_lp(path_or_text)
    from pathlib import Path

    return loads_lp(Path(path_or_text).read_text(encoding="utf-8"))


def dumps_model(model: MipModel) -> str:
    return dumps_lp(model_to_lpfile(model))


# -- lifting solutions onto the variable space -------------------------------


def lift_solution(
    instance: Instance, pre: PreprocessResult, model: MipModel, solution: Solution
) -> dict[str, float]:
    """Values for every model variable realized by a feasible solution.
    Start times of unused carrier slots sit at their earliest valid value."""
    values = {name: 0.0 for name in model.variables}
    end = instance.depot_copy
    for k, route in enumerate(solution.vehicles):
        t0, tend = route[0].start, route[-1].start
        values[f"t0_{k}"] = t0
        values[f"tend_{k}"] = tend
        values[f"C_{k}"] = tend - t0
        for a, b in zip(route, route[1:]):
            name = f"x_{k}_{a.node}_{b.node}"
            if name not in values:
                raise KeyError(f"solution uses eliminated arc ({a.node}, {b.node})")
            values[name] = 1.0
        for v in route[1:-1]:
            values[f"t_{v.node}"] = v.start
            values[f"z_{k}_{v.node}"] = v.load
    order_of: dict[tuple[int, int, int], int] = {}
    for h, seq in enumerate(solution.machines):
        for pos, trv in enumerate(seq):
            name = f"phi_{h}_{trv.i}_{trv.j}"
            if name not in values:
                raise KeyError(f"solution uses filtered machine {h} on ({trv.i}, {trv.j})")
            values[name] = 1.0
            values[f"alp_{h}_{trv.i}_{trv.j}"] = trv.start
            order_of[(h, trv.i, trv.j)] = pos
    for name in model.variables:
        if name.startswith("gam_"):
            h, i, j, i2, j2 = (int(tok) for tok in name.split("_")[1:])
            pa = order_of.get((h, i, j))
            pb = order_of.get((h, i2, j2))
            if pa is not None and pb is not None and pa < pb:
                values[name] = 1.0
        elif name.startswith("alp_"):
            h, i, j = (int(tok) for tok in name.split("_")[1:])
            if (h, i, j) not in order_of:
                e_i = instance.tw_open[0] if i == 0 else pre.tw_open[i]
                values[name] = (
                    e_i
                    + instance.service_of(i)
                    + min(
                        instance.station_time(k, i, h)
                        for k in range(len(instance.vehicles))
                    )
                )
    return values


def evaluate_rows(model: MipModel, values: dict[str, float]):
    """Yield (row name, slack); slack >= 0 means satisfied (equalities yield
    the negated absolute residual)."""
    for row in model.rows:
        lhs = 0.0
        for coef, var in row.terms:
            lhs += coef * values[var]
        if row.sense == ">=":
            yield row.name, lhs - row.rhs
        elif row.sense == "<=":
            yield row.name, row.rhs - lhs
        else:
            yield row.name, -abs(lhs - row.rhs)
