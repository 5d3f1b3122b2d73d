"""Independent reference computations used only by the tests.

Nothing here calls the package's LP solver or construction engine; schedules
are recomputed from the instance data with plain fixed-point iteration so
they can serve as oracles for those paths.
"""

from __future__ import annotations

import math

INF = float("inf")


def earliest_schedule(instance, routes, seqs, t0_vec):
    """Earliest-start schedule with the depot departures pinned at t0_vec.

    Returns (objective, feasible).  Times are tightened by round-robin
    relaxation of the chain/boarding/alighting/spacing relations until a
    fixpoint; any window overrun makes the subproblem infeasible.
    """
    end = instance.depot_copy
    t = {}
    for k, route in enumerate(routes):
        for node in route[1:-1]:
            t[node] = instance.tw_open[node]
    tend = [instance.tw_open[0]] * len(routes)
    alpha = {}
    for h, seq in enumerate(seqs):
        m = instance.machines[h]
        for pos, (i, j, k) in enumerate(seq):
            alpha[(h, pos)] = (
                instance.crossing_time(h, m.initial_region, instance.node_region(i))
                if pos == 0
                else 0.0
            )
    travel_of = {}
    for h, seq in enumerate(seqs):
        for pos, (i, j, k) in enumerate(seq):
            travel_of[(k, i, j)] = (h, pos)

    for _ in range(len(t) + len(alpha) + len(routes) + 2):
        changed = False

        def raise_to(kind, key, val):
            nonlocal changed
            store = {"t": t, "a": alpha}.get(kind)
            if kind == "tend":
                if val > tend[key]:
                    tend[key] = val
                    changed = True
            elif val > store[key]:
                store[key] = val
                changed = True

        for k, route in enumerate(routes):
            for a, b in zip(route, route[1:]):
                ta = t0_vec[k] if a == 0 else t[a]
                dep = ta + instance.service_of(a)
                if instance.is_machine_arc(a, b):
                    h, pos = travel_of[(k, a, b)]
                    raise_to("a", (h, pos), dep + instance.station_time(k, a, h))
                    arr = (
                        alpha[(h, pos)]
                        + instance.crossing_time(
                            h, instance.node_region(a), instance.node_region(b)
                        )
                        + instance.station_time(k, b, h)
                    )
                else:
                    arr = dep + instance.travel_time(k, a, b)
                if b == end:
                    raise_to("tend", k, arr)
                else:
                    raise_to("t", b, arr)
        for h, seq in enumerate(seqs):
            for pos in range(1, len(seq)):
                pi, pj, _ = seq[pos - 1]
                i, j, _k = seq[pos]
                raise_to(
                    "a",
                    (h, pos),
                    alpha[(h, pos - 1)]
                    + instance.crossing_time(
                        h, instance.node_region(pi), instance.node_region(pj)
                    )
                    + instance.crossing_time(
                        h, instance.node_region(pj), instance.node_region(i)
                    ),
                )
        if not changed:
            break
    else:
        return INF, False

    for node, val in t.items():
        if val > instance.tw_close[node] + 1e-12:
            return INF, False
    for k in range(len(routes)):
        if t0_vec[k] < instance.tw_open[0] - 1e-12 or tend[k] > instance.tw_close[0] + 1e-12:
            return INF, False
        if tend[k] < t0_vec[k]:
            tend[k] = t0_vec[k]
    return sum(tend[k] - t0_vec[k] for k in range(len(routes))), True


def grid_search_schedule(instance, routes, seqs, final_step=5e-5):
    """Pattern search over depot departure vectors; the objective is convex
    in the departures, so shrinking steps converge to the optimum."""
    nv = len(routes)
    e0, l0 = instance.tw_open[0], instance.tw_close[0]

    def f(vec):
        return earliest_schedule(instance, routes, seqs, vec)[0]

    best = [e0] * nv
    best_val = f(best)
    if best_val == INF:
        return INF
    h = (l0 - e0) / 8.0 or 1.0
    while h > final_step:
        improved = False
        offsets = (-2.0 * h, -h, 0.0, h, 2.0 * h)
        for combo in _product(offsets, nv):
            cand = [min(max(b + o, e0), l0) for b, o in zip(best, combo)]
            val = f(cand)
            if val < best_val - 1e-15:
                best, best_val = cand, val
                improved = True
        if not improved:
            h /= 2.0
    return best_val


def _product(options, repeat):
    if repeat == 0:
        yield ()
        return
    for rest in _product(options, repeat - 1):
        for o in options:
            yield (o,) + rest


def scipy_schedule_objective(lp):
    """Solve a ScheduleLP with scipy's HiGHS; independent of the kernel."""
    import numpy as np
    from scipy.optimize import linprog

    nv = lp.num_vars
    c = np.zeros(nv)
    for v in lp.obj_plus:
        c[v] += 1.0
    for v in lp.obj_minus:
        c[v] -= 1.0
    rows = len(lp.rows)
    a_ub = np.zeros((rows, nv))
    b_ub = np.zeros(rows)
    for r, row in enumerate(lp.rows):
        a_ub[r, row.greater] = -1.0
        a_ub[r, row.lesser] = 1.0
        b_ub[r] = -row.weight
    bounds = [
        (lo if lo > -INF else None, hi if hi < INF else None)
        for lo, hi in zip(lp.lower, lp.upper)
    ]
    res = linprog(c, A_ub=a_ub, b_ub=b_ub, bounds=bounds, method="highs")
    if not res.success:
        return None
    return float(res.fun)


def brute_force_hull(points):
    """O(n^3) hull check: a point is a vertex iff it is not strictly inside
    the hull; returns vertices sorted for set comparison."""
    pts = sorted(set((float(x), float(y)) for x, y in points))
    verts = []
    for p in pts:
        inside = False
        for a in pts:
            for b in pts:
                for c in pts:
                    if p in (a, b, c):
                        continue
                    if _in_triangle(p, a, b, c):
                        inside = True
        if not inside:
            verts.append(p)
    return sorted(verts)


def _sign(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _in_triangle(p, a, b, c):
    d1, d2, d3 = _sign(p, a, b), _sign(p, b, c), _sign(p, c, a)
    has_neg = d1 < 0 or d2 < 0 or d3 < 0
    has_pos = d1 > 0 or d2 > 0 or d3 > 0
    return not (has_neg and has_pos)


def exhaustive_min_clique(groups):
    """Product enumeration of one vertex per group, minimizing pairwise sums."""
    best, best_cost = None, INF
    for combo in _combo(groups, 0):
        cost = 0.0
        for a in range(len(combo)):
            for b in range(a + 1, len(combo)):
                cost += math.dist(combo[a], combo[b])
        if cost < best_cost:
            best, best_cost = combo, cost
    return best, best_cost


def _combo(groups, idx):
    if idx == len(groups):
        yield ()
        return
    for v in groups[idx]:
        for rest in _combo(groups, idx + 1):
            yield (v,) + rest
