"""Window shrinking, arc elimination, machine filtering, and ordered-pair
dropping applied before emitting the MIP.

Arc times on cross-region arcs use the schedule-free lower bound throughout,
so every rule is conservative: no arc used by a feasible solution is ever
removed (exercised against the brute-force oracle in the tests).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .model import Instance, ModelError

INF = float("inf")


class InfeasibleInstanceError(ModelError):
    """Shrinking emptied some time window: the instance cannot be served."""


@dataclass
class PreprocessResult:
    tw_open: tuple[float, ...]
    tw_close: tuple[float, ...]
    eliminated: frozenset[tuple[int, int]]
    eligible: dict[tuple[int, int], tuple[int, ...]]
    dropped_pairs: frozenset[tuple[int, tuple[int, int], tuple[int, int]]]
    rule_counts: dict[str, int] = field(default_factory=dict)


def _min_time(instance: Instance, i: int, j: int) -> float:
    return min(
        instance.travel_time(k, i, j) for k in range(len(instance.vehicles))
    )


def _min_station_time(instance: Instance, i: int, h: int) -> float:
    return min(
        instance.station_time(k, i, h) for k in range(len(instance.vehicles))
    )


def shrink_windows(instance: Instance) -> tuple[list[float], list[float]]:
    """Tighten every request window using the depot window and the direct
    pickup-delivery legs; idempotent because each bound update feeds on the
    already-updated values."""
    n = instance.num_requests
    e = list(instance.tw_open)
    l = list(instance.tw_close)
    end = instance.depot_copy
    for i in instance.pickups:
        d = i + n
        l[d] = min(l[d], l[0] - _min_time(instance, d, end) - instance.service[d])
        l[i] = min(l[i], l[d] - _min_time(instance, i, d) - instance.service[i])
        e[i] = max(e[i], e[0] + _min_time(instance, 0, i))
        e[d] = max(e[d], e[i] + instance.service[i] + _min_time(instance, i, d))
    for i in list(instance.pickups) + list(instance.deliveries):
        if e[i] > l[i]:
            raise InfeasibleInstanceError(
                f"window of node {i} is empty after shrinking"
            )
    return e, l


def path_earliest_arrival(
    instance: Instance,
    k: int,
    path: list[int],
    t_start: float,
    tw_open=None,
    tw_close=None,
):
    """Earliest service-start recurrence along a node path for one vehicle.

    Returns (arrival at the last node, feasible flag); the path is infeasible
    as soon as any node's computed start exceeds its window close.  Window
    arrays default to the instance's; pass shrunk ones to tighten.
    """
    e = tw_open if tw_open is not None else instance.tw_open
    l = tw_close if tw_close is not None else instance.tw_close
    end = instance.depot_copy

    def close(i):
        return instance.tw_close[0] if i == end else l[i]

    t = t_start
    prev = path[0]
    if t > close(prev):
        return t, False
    for node in path[1:]:
        arr = t + instance.service_of(prev) + instance.travel_time(k, prev, node)
        eo = instance.tw_open[0] if node == end else e[node]
        t = arr if arr >= eo else eo
        if t > close(node):
            return t, False
        prev = node
    return t, True


def _path_infeasible_for_all(instance, path, t_start, e, l) -> bool:
    return all(
        not path_earliest_arrival(instance, k, path, t_start, e, l)[1]
        for k in range(len(instance.vehicles))
    )


def eliminate_arcs(instance: Instance, shrunk) -> tuple[frozenset, dict[str, int]]:
    """The six elimination rules; returns the blacklist and per-rule counts
    (an arc removed by several rules is counted once per rule)."""
    e, l = shrunk
    n = instance.num_requests
    end = instance.depot_copy
    out: set[tuple[int, int]] = set()
    counts = {f"rule{r}": 0 for r in range(1, 7)}

    def add(rule, arc):
        counts[rule] += 1
        out.add(arc)

    # 1. priority: deliveries cannot precede pickups, nothing may re-enter
    # the depot mid-route.
    for i in instance.pickups:
        d = i + n
        for arc in ((0, d), (d, i), (i, 0), (d, 0), (end, 0), (end, i), (end, d)):
            add("rule1", arc)
    # 2. pairing: a pickup is never the last customer.
    for i in instance.pickups:
        add("rule2", (i, end))
    # 3. vehicle capacity.
    max_cap = max(v.capacity for v in instance.vehicles)
    for i in instance.pickups:
        for j in instance.pickups:
            if i < j and instance.demand[i] + instance.demand[j] > max_cap:
                for arc in (
                    (i, j),
                    (j, i),
                    (i, n + j),
                    (j, n + i),
                    (n + i, n + j),
                    (n + j, n + i),
                ):
                    add("rule3", arc)
    # 4. time windows on the direct arc.
    customers = list(instance.pickups) + list(instance.deliveries)
    for i in customers:
        for j in customers:
            if i != j and e[i] + instance.service[i] + _min_time(instance, i, j) > l[j]:
                add("rule4", (i, j))
    # 5. time windows and pairing: a surviving arc between two requests
    # implies some interleaving of both requests is schedulable.
    for i in instance.pickups:
        for j in instance.pickups:
            if i == j:
                continue
            di, dj = n + i, n + j
            if _path_infeasible_for_all(instance, [j, i, dj, di], e[j], e, l):
                add("rule5", (i, dj))
            if _path_infeasible_for_all(instance, [i, di, j, dj], e[i], e, l):
                add("rule5", (di, j))
            if _path_infeasible_for_all(
                instance, [i, j, di, dj], e[i], e, l
            ) and _path_infeasible_for_all(instance, [i, j, dj, di], e[i], e, l):
                add("rule5", (i, j))
            if _path_infeasible_for_all(
                instance, [i, j, di, dj], e[i], e, l
            ) and _path_infeasible_for_all(instance, [j, i, di, dj], e[j], e, l):
                add("rule5", (di, dj))
    # 6. time windows and indirect request service.
    for i in instance.pickups:
        di = n + i
        for j in customers:
            if j != i and j != di and _path_infeasible_for_all(
                instance, [i, j, di], e[i], e, l
            ):
                add("rule6", (i, j))

    return frozenset(out), counts


def filter_machines(instance: Instance, shrunk, eliminated=frozenset()):
    """Per surviving cross-region arc, drop carriers that cannot complete the
    crossing inside the destination window even at the earliest departure."""
    e, l = shrunk
    end = instance.depot_copy
    eligible: dict[tuple[int, int], tuple[int, ...]] = {}
    extra_eliminated: set[tuple[int, int]] = set()
    for i in range(2 * instance.num_requests + 1):
        for j in range(1, end + 1):
            if i == j or (i, j) in eliminated:
                continue
            if not instance.is_machine_arc(i, j):
                continue
            ri, rj = instance.node_region(i), instance.node_region(j)
            ei = instance.tw_open[0] if i == 0 else e[i]
            lj = instance.tw_close[0] if j == end else l[j]
            keep = []
            for h in instance.eligible_machines(i, j):
                t = (
                    ei
                    + instance.service_of(i)
                    + _min_station_time(instance, i, h)
                    + instance.crossing_time(h, ri, rj)
                    + _min_station_time(instance, j, h)
                )
                if t <= lj:
                    keep.append(h)
            eligible[(i, j)] = tuple(keep)
            if not keep:
                extra_eliminated.add((i, j))
    return eligible, frozenset(extra_eliminated)


def drop_gamma_pairs(instance: Instance, shrunk, eligible):
    """Ordered machine-arc pairs that can never occur back to back on the
    same carrier; the corresponding precedence variables are fixed to zero."""
    e, l = shrunk
    end = instance.depot_copy
    arcs = sorted(eligible)
    dropped = set()
    for i, j in arcs:
        ri, rj = instance.node_region(i), instance.node_region(j)
        ei = instance.tw_open[0] if i == 0 else e[i]
        base = ei + instance.service_of(i)
        for i2, j2 in arcs:
            if (i2, j2) == (i, j):
                continue
            ri2, rj2 = instance.node_region(i2), instance.node_region(j2)
            lj2 = instance.tw_close[0] if j2 == end else l[j2]
            for h in eligible[(i, j)]:
                if h not in eligible[(i2, j2)]:
                    continue
                t = (
                    base
                    + _min_station_time(instance, i, h)
                    + instance.crossing_time(h, ri, rj)
                    + instance.crossing_time(h, rj, ri2)
                    + instance.crossing_time(h, ri2, rj2)
                    + _min_station_time(instance, j2, h)
                )
                if t > lj2:
                    dropped.add((h, (i, j), (i2, j2)))
    return frozenset(dropped)


def preprocess(instance: Instance) -> PreprocessResult:
    e, l = shrink_windows(instance)
    eliminated, counts = eliminate_arcs(instance, (e, l))
    eligible, more = filter_machines(instance, (e, l), eliminated)
    counts["machine-filter"] = len(more)
    eliminated = eliminated | more
    eligible = {arc: hs for arc, hs in eligible.items() if arc not in more}
    dropped = drop_gamma_pairs(instance, (e, l), eligible)
    counts["gamma-pairs"] = len(dropped)
    return PreprocessResult(
        tw_open=tuple(e),
        tw_close=tuple(l),
        eliminated=eliminated,
        eligible=eligible,
        dropped_pairs=dropped,
        rule_counts=counts,
    )


def dumps_preprocess(result: PreprocessResult) -> str:
    """Sidecar text consumed by the MIP emitter."""
    out = ["pdse-preprocess 1"]
    for i, (eo, lc) in enumerate(zip(result.tw_open, result.tw_close)):
        out.append(f"window {i} {eo!r} {lc!r}")
    for i, j in sorted(result.eliminated):
        out.append(f"eliminated {i} {j}")
    for (i, j), hs in sorted(result.eligible.items()):
        out.append(f"eligible {i} {j} " + " ".join(str(h) for h in hs))
    for h, (i, j), (i2, j2) in sorted(result.dropped_pairs):
        out.append(f"dropped {h} {i} {j} {i2} {j2}")
    for rule, cnt in sorted(result.rule_counts.items()):
        out.append(f"count {rule} {cnt}")
    return "\n".join(out) + "\n"


def loads_preprocess(text: str) -> PreprocessResult:
    windows: dict[int, tuple[float, float]] = {}
    eliminated = set()
    eligible = {}
    dropped = set()
    counts = {}
    lines = [ln.split() for ln in text.splitlines() if ln]
    if not lines or lines[0][0] != "pdse-preprocess":
        raise ModelError("not a preprocess sidecar file")
    for tok in lines[1:]:
        if tok[0] == "window":
            windows[int(tok[1])] = (float(tok[2]), float(tok[3]))
        elif tok[0] == "eliminated":
            eliminated.add((int(tok[1]), int(tok[2])))
        elif tok[0] == "eligible":
            eligible[(int(tok[1]), int(tok[2]))] = tuple(int(h) for h in tok[3:])
        elif tok[0] == "dropped":
            dropped.add((int(tok[1]), (int(tok[2]), int(tok[3])), (int(tok[4]), int(tok[5]))))
        elif tok[0] == "count":
            counts[tok[1]] = int(tok[2])
    order = range(len(windows))
    return PreprocessResult(
        tw_open=tuple(windows[i][0] for i in order),
        tw_close=tuple(windows[i][1] for i in order),
        eliminated=frozenset(eliminated),
        eligible=eligible,
        dropped_pairs=frozenset(dropped),
        rule_counts=counts,
    )
