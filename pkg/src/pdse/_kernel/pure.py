"""Pure-Python kernel: insertion analysis, constructions, schedule LP, and
the multi-start loop.

This is the reference implementation; the compiled backend mirrors it
operation for operation so that fixed-seed runs are bit-identical across
backends.  Keep arithmetic expression order in sync with ``_speedups.pyx``.
"""

from __future__ import annotations

import time

from .packed import INF, PackedData
from .rng import Pcg32

BACKEND_NAME = "pure"


# ---------------------------------------------------------------------------
# Generic solver for LPs whose rows are all difference constraints
# x[j] >= x[i] + w with box bounds, minimizing
# sum(x[v] for v in obj_pos) - sum(x[v] for v in obj_neg).
#
# Solved exactly as the dual of an uncapacitated min-cost flow by successive
# shortest paths; node potentials are primal variable values throughout.
# ---------------------------------------------------------------------------

FEASIBLE = 0
INFEASIBLE = 1


def solve_difference_lp(nvar, lb, ub, rows, obj_pos, obj_neg):
    """Returns (status, x, objective, certificate_rows).

    rows: list of (j, i, w) meaning x[j] >= x[i] + w.  certificate_rows is a
    list of row indices (-1 marks a bound) witnessing infeasibility.
    """
    x = list(lb)
    pred = [-1] * nvar
    # Longest-path propagation from the lower bounds; a positive cycle keeps
    # relaxing past nvar passes.
    for _pass in range(nvar + 1):
        changed = False
        for ridx, (j, i, w) in enumerate(rows):
            cand = x[i] + w
            if cand > x[j]:
                x[j] = cand
                pred[j] = ridx
                changed = True
        if not changed:
            break
    else:
        return INFEASIBLE, None, INF, _cycle_certificate(rows, pred)
    for v in range(nvar):
        if x[v] > ub[v]:
            return INFEASIBLE, None, INF, _chain_certificate(rows, pred, v, nvar)

    nnode = nvar + 1
    root = nvar
    tails, heads, costs, flows = [], [], [], []
    out_arcs = [[] for _ in range(nnode)]
    in_arcs = [[] for _ in range(nnode)]

    def add_arc(t, h, c):
        a = len(tails)
        tails.append(t)
        heads.append(h)
        costs.append(c)
        flows.append(0)
        out_arcs[t].append(a)
        in_arcs[h].append(a)

    for j, i, w in rows:
        add_arc(i, j, -w)
    for v in range(nvar):
        if lb[v] > -INF:
            add_arc(root, v, -lb[v])
        if ub[v] < INF:
            add_arc(v, root, ub[v])

    pi = [-xv for xv in x] + [0.0]
    demand = [0] * nnode
    for v in obj_pos:
        demand[v] += 1
    supplies = list(obj_neg)

    dist = [INF] * nnode
    done = [False] * nnode
    pred_arc = [-1] * nnode
    pred_back = [False] * nnode

    for s in supplies:
        for v in range(nnode):
            dist[v] = INF
            done[v] = False
            pred_arc[v] = -1
        dist[s] = 0.0
        target = -1
        while True:
            u, best = -1, INF
            for v in range(nnode):
                if not done[v] and dist[v] < best:
                    u, best = v, dist[v]
            if u < 0:
                break
            done[u] = True
            if demand[u] > 0:
                target = u
                break
            pu = pi[u]
            for a in out_arcs[u]:
                h = heads[a]
                if done[h]:
                    continue
                nd = best + (costs[a] + pu - pi[h])
                if nd < dist[h]:
                    dist[h] = nd
                    pred_arc[h] = a
                    pred_back[h] = False
            for a in in_arcs[u]:
                if flows[a] <= 0:
                    continue
                t = tails[a]
                if done[t]:
                    continue
                nd = best - (costs[a] + pi[t] - pu)
                if nd < dist[t]:
                    dist[t] = nd
                    pred_arc[t] = a
                    pred_back[t] = True
        if target < 0:
            # Bounded primal guarantees a path; treat as infeasible defensively.
            return INFEASIBLE, None, INF, []
        dt = dist[target]
        for v in range(nnode):
            dv = dist[v]
            pi[v] += dv if dv < dt else dt
        v = target
        while v != s:
            a = pred_arc[v]
            if pred_back[v]:
                flows[a] -= 1
                v = heads[a]
            else:
                flows[a] += 1
                v = tails[a]
        demand[target] -= 1

    proot = pi[root]
    xopt = [proot - pi[v] for v in range(nvar)]
    obj = 0.0
    for v in obj_pos:
        obj += xopt[v]
    for v in obj_neg:
        obj -= xopt[v]
    return FEASIBLE, xopt, obj, []


def _chain_certificate(rows, pred, v, nvar):
    cert = []
    seen = set()
    while v not in seen and pred[v] >= 0 and len(cert) <= nvar:
        seen.add(v)
        cert.append(pred[v])
        v = rows[pred[v]][1]
    cert.append(-1)  # anchored at a bound
    return cert


def _cycle_certificate(rows, pred, nvar=None):
    # Walk predecessors until a vertex repeats, then emit the loop.
    v = next((j for j in range(len(pred)) if pred[j] >= 0), 0)
    for _ in range(len(pred)):
        v = rows[pred[v]][1] if pred[v] >= 0 else v
    cert, start = [], v
    while True:
        cert.append(pred[v])
        v = rows[pred[v]][1]
        if v == start or len(cert) > len(pred):
            break
    return cert


# ---------------------------------------------------------------------------
# Construction engine
# ---------------------------------------------------------------------------


def search_machine_travel(
    pd: PackedData, work_seq, h, k, a, b, k_arr, start_pos, stop_on_lj=True,
    e_arr=None, l_arr=None,
):
    """First-fit slot for carrying vehicle k over (a, b) on machine h.

    work_seq is machine h's working sequence of (i, j, k, start) tuples; the
    scan begins at slot ``start_pos`` and never disturbs existing travels
    (including their implicit repositioning legs).  Returns
    (slot, alpha, arrive_b) or None.  With ``stop_on_lj`` the machine is
    abandoned once the earliest possible service at b exceeds its window
    close, since later slots are only worse.  e_arr/l_arr override the packed
    windows (used by the instance-repair construction).
    """
    e = e_arr if e_arr is not None else pd.e
    l = l_arr if l_arr is not None else pd.l
    ra = pd.region[a]
    rb = pd.region[b]
    och = pd.ocross[h]
    cross = och[ra][rb]
    nseq = len(work_seq)
    lb_b = l[b]
    dbar_b = pd.dbar[k][b][h]
    pos = start_pos
    while pos <= nseq:
        if pos == 0:
            avail = och[pd.init_region[h]][ra]
        else:
            pi, pj, _, pst = work_seq[pos - 1]
            avail = pst + och[pd.region[pi]][pd.region[pj]] + och[pd.region[pj]][ra]
        alpha = k_arr if k_arr >= avail else avail
        arrive = alpha + cross + dbar_b
        t_b = arrive if b == pd.depot_copy or arrive >= e[b] else e[b]
        if stop_on_lj and t_b > lb_b:
            return None
        if pos < nseq:
            ni = work_seq[pos][0]
            nst = work_seq[pos][3]
            if alpha + cross + och[rb][pd.region[ni]] > nst:
                pos += 1
                continue
        return pos, alpha, arrive
    return None


class Engine:
    """Owns one mutable partial solution over a packed instance."""

    def __init__(self, pd: PackedData):
        self.pd = pd
        self.version = 0
        self.reset()

    # -- state ----------------------------------------------------------

    def reset(self):
        pd = self.pd
        t0 = pd.e[0]
        self.routes = [[0, pd.depot_copy] for _ in range(pd.nv)]
        self.sts = [[t0, t0] for _ in range(pd.nv)]
        self.loads = [[0.0, 0.0] for _ in range(pd.nv)]
        self.mach = [[] for _ in range(pd.nh)]
        self.version += 1

    def import_state(self, routes, machines):
        pd = self.pd
        self.routes = [[v[0] for v in r] for r in routes]
        self.sts = [[v[1] for v in r] for r in routes]
        self.loads = [[v[2] for v in r] for r in routes]
        self.mach = [[tuple(t) for t in seq] for seq in machines]
        self.version += 1

    def export_state(self):
        routes = [
            [(n, st, ld) for n, st, ld in zip(r, s, l)]
            for r, s, l in zip(self.routes, self.sts, self.loads)
        ]
        machines = [list(seq) for seq in self.mach]
        return routes, machines

    def cost(self):
        total = 0.0
        for k in range(self.pd.nv):
            total += self.sts[k][-1] - self.sts[k][0]
        return total

    # -- insertion analysis ----------------------------------------------

    def analyze(self, k, p_pos, d_pos, p, d, commit=False):
        """Insertion of p at p_pos and d at d_pos (1-based positions in the
        route's visit list).  Returns (feasible, cost, mtrvs) where mtrvs is
        a list of (h, slot, alpha, i, j, delta).

        Existing carrier travels of this vehicle from the insertion point on
        are dropped and rescheduled; travels of other vehicles are never
        moved.
        """
        pd = self.pd
        route = self.routes[k]
        st = self.sts[k]
        load = self.loads[k]
        L = len(route)
        g = p_pos - 1
        h0 = d_pos - 1
        if not (1 <= g <= h0 <= L - 1):
            return False, INF, None

        qp = pd.q[p]
        peak = load[g - 1]
        for r in range(g, h0):
            if load[r] > peak:
                peak = load[r]
        if peak + qp > pd.cap[k]:
            return False, INF, None

        # Travels of vehicle k whose boarding node sits at or past the
        # insertion point are rescheduled.
        node_pos = {node: idx for idx, node in enumerate(route)}
        cut = g - 1

        def disregarded(trv):
            return trv[2] == k and node_pos.get(trv[0], -1) >= cut

        work: dict[int, list] = {}
        next_slot = [0] * pd.nh
        touched = []

        def work_seq(h):
            seq = work.get(h)
            if seq is None:
                seq = [t for t in self.mach[h] if not disregarded(t)]
                work[h] = seq
                touched.append(h)
            return seq

        new_nodes = route[: g] + [p] + route[g:h0] + [d] + route[h0:]
        new_sts = st[: g]
        mtrvs = []
        t_cur = st[g - 1]
        a = route[g - 1]
        feasible = True
        for b in new_nodes[g:]:
            dep = t_cur + pd.s[a]
            if pd.is_mach[a][b]:
                best = None
                best_dt = INF
                for h in pd.elig[a][b]:
                    k_arr = dep + pd.dbar[k][a][h]
                    found = search_machine_travel(
                        pd, work_seq(h), h, k, a, b, k_arr, next_slot[h]
                    )
                    if found is None:
                        continue
                    slot, alpha, arrive = found
                    dt = arrive - t_cur
                    if dt < best_dt:
                        best_dt = dt
                        best = (h, slot, alpha, arrive)
                if best is None:
                    feasible = False
                    break
                h, slot, alpha, arrive = best
                seq = work_seq(h)
                seq.insert(slot, (a, b, k, alpha))
                next_slot[h] = slot + 1
                mtrvs.append((h, slot, alpha, a, b, best_dt))
                t_b = arrive
            else:
                t_b = dep + pd.trav[k][a][b]
            if b == pd.depot_copy:
                if t_b > pd.l[b]:
                    feasible = False
                    break
            else:
                if t_b < pd.e[b]:
                    t_b = pd.e[b]
                if t_b > pd.l[b]:
                    feasible = False
                    break
            new_sts.append(t_b)
            t_cur = t_b
            a = b
        if not feasible:
            return False, INF, None
        cost = new_sts[-1]

        if commit:
            new_loads = load[: g]
            ld = load[g - 1]
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
            self.version += 1
        return True, cost, mtrvs

    # -- constructions ----------------------------------------------------

    def construct(self, order, alpha=None, rng: Pcg32 | None = None):
        """Insert requests in the given pickup order.  With alpha None the
        choice is purely greedy (first strict minimum in scan order);
        otherwise a uniform draw from the restricted candidate list."""
        pd = self.pd
        for p in order:
            d = p + pd.n
            cands = []
            best_cost = INF
            best = None
            for k in range(pd.nv):
                L = len(self.routes[k])
                for p_pos in range(2, L + 1):
                    for d_pos in range(p_pos, L + 1):
                        ok, cost, _ = self.analyze(k, p_pos, d_pos, p, d)
                        if not ok:
                            continue
                        if alpha is None:
                            if cost < best_cost:
                                best_cost = cost
                                best = (k, p_pos, d_pos)
                        else:
                            cands.append((cost, k, p_pos, d_pos))
            if alpha is not None and cands:
                cmin = cands[0][0]
                cmax = cands[0][0]
                for c in cands:
                    if c[0] < cmin:
                        cmin = c[0]
                    if c[0] > cmax:
                        cmax = c[0]
                threshold = cmin + alpha * (cmax - cmin)
                rcl = [c for c in cands if c[0] <= threshold]
                best = rcl[rng.next32() % len(rcl)][1:]
            if best is None:
                return False
            k, p_pos, d_pos = best
            ok, _, _ = self.analyze(k, p_pos, d_pos, p, d, commit=True)
            if not ok:
                raise RuntimeError("committing a candidate that was feasible")
        return True

    # -- schedule LP over the current state -------------------------------

    def lp_rows_from_state(self):
        """Variable map and difference rows for the fixed-sequence schedule
        LP of the current state.

        Variables: t0_k (0..nv-1), tend_k (nv..2nv-1), then one per customer
        visit in route order, then one per machine travel in sequence order.
        """
        pd = self.pd
        nv = pd.nv
        nvar = 2 * nv
        tvar = {}
        for k in range(nv):
            for node in self.routes[k][1:-1]:
                tvar[node] = nvar
                nvar += 1
        avar = {}
        for h in range(pd.nh):
            for pos in range(len(self.mach[h])):
                avar[(h, pos)] = nvar
                nvar += 1

        lb = [0.0] * nvar
        ub = [INF] * nvar
        for k in range(nv):
            lb[k] = pd.e[0]
            ub[k] = pd.l[0]
            lb[nv + k] = pd.e[0]
            ub[nv + k] = pd.l[0]
        for node, v in tvar.items():
            lb[v] = pd.e[node]
            ub[v] = pd.l[node]

        travel_at = {}
        for h in range(pd.nh):
            for pos, (i, j, k, _) in enumerate(self.mach[h]):
                travel_at[(k, i, j)] = (h, pos)

        rows = []
        for k in range(nv):
            rows.append((nv + k, k, 0.0))
            route = self.routes[k]
            for idx in range(1, len(route)):
                a, b = route[idx - 1], route[idx]
                va = k if a == 0 else tvar[a]
                vb = nv + k if b == pd.depot_copy else tvar[b]
                if pd.is_mach[a][b]:
                    h, pos = travel_at[(k, a, b)]
                    alph = avar[(h, pos)]
                    rows.append((alph, va, pd.s[a] + pd.dbar[k][a][h]))
                    ra, rb = pd.region[a], pd.region[b]
                    rows.append((vb, alph, pd.ocross[h][ra][rb] + pd.dbar[k][b][h]))
                else:
                    rows.append((vb, va, pd.s[a] + pd.trav[k][a][b]))
        for h in range(pd.nh):
            seq = self.mach[h]
            for pos, (i, j, k, _) in enumerate(seq):
                v = avar[(h, pos)]
                ri = pd.region[i]
                if pos == 0:
                    first = pd.ocross[h][pd.init_region[h]][ri]
                    if first > lb[v]:
                        lb[v] = first
                else:
                    pi, pj = seq[pos - 1][0], seq[pos - 1][1]
                    rpi, rpj = pd.region[pi], pd.region[pj]
                    rows.append(
                        (v, avar[(h, pos - 1)], pd.ocross[h][rpi][rpj] + pd.ocross[h][rpj][ri])
                    )
        obj_neg = list(range(nv))
        obj_pos = list(range(nv, 2 * nv))
        return nvar, lb, ub, rows, obj_pos, obj_neg, tvar, avar

    def lp_improve_state(self):
        """Re-time the current state at the LP optimum.  Returns (feasible,
        objective)."""
        pd = self.pd
        nvar, lb, ub, rows, obj_pos, obj_neg, tvar, avar = self.lp_rows_from_state()
        status, x, obj, _ = solve_difference_lp(nvar, lb, ub, rows, obj_pos, obj_neg)
        if status != FEASIBLE:
            return False, INF
        nv = pd.nv
        for k in range(nv):
            st = self.sts[k]
            st[0] = x[k]
            st[-1] = x[nv + k]
            route = self.routes[k]
            for idx in range(1, len(route) - 1):
                st[idx] = x[tvar[route[idx]]]
        for h in range(pd.nh):
            seq = self.mach[h]
            for pos, (i, j, k, _) in enumerate(seq):
                seq[pos] = (i, j, k, x[avar[(h, pos)]])
        self.version += 1
        return True, obj

    # -- multi-start loop --------------------------------------------------

    def mslp(self, alpha, max_iters, time_limit, seed):
        """Greedy start then semi-greedy restarts with LP re-timing.

        Returns a dict with the best state, iteration statistics, and the
        incumbent trace as (iteration, cost) pairs.
        """
        pd = self.pd
        rng = Pcg32(seed)
        t_start = time.monotonic()
        best_cost = INF
        best_state = None
        trace = []
        feasible_iters = 0
        lp_execs = 0
        lp_impr_sum = 0.0
        ttb = 0.0

        self.reset()
        if self.construct(list(pd.width_order)):
            before = self.cost()
            ok, obj = self.lp_improve_state()
            if ok:
                lp_execs += 1
                if before > 0.0:
                    lp_impr_sum += 100.0 * (before - obj) / before
                best_cost = obj
                best_state = self.export_state()
                ttb = time.monotonic() - t_start
                trace.append((0, best_cost))

        it = 0
        base_order = list(pd.width_order)
        while it < max_iters and time.monotonic() - t_start < time_limit:
            it += 1
            self.reset()
            order = list(base_order)
            rng.shuffle(order)
            if not self.construct(order, alpha, rng):
                continue
            feasible_iters += 1
            before = self.cost()
            ok, obj = self.lp_improve_state()
            if not ok:
                continue
            lp_execs += 1
            if before > 0.0:
                lp_impr_sum += 100.0 * (before - obj) / before
            if obj < best_cost:
                best_cost = obj
                best_state = self.export_state()
                ttb = time.monotonic() - t_start
                trace.append((it, best_cost))

        return {
            "best_cost": best_cost,
            "best_state": best_state,
            "iterations": it,
            "feasible_iterations": feasible_iters,
            "lp_executions": lp_execs,
            "mean_lp_improvement": (lp_impr_sum / lp_execs) if lp_execs else 0.0,
            "time": time.monotonic() - t_start,
            "time_to_best": ttb,
            "trace": trace,
        }
