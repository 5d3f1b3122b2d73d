"""Clustering and computational-geometry helpers for instance generation.

k-means is implemented here (k-means++ seeding, Lloyd iterations, seeded RNG)
rather than taken from a library so generation is reproducible from the seed
alone.
"""

from __future__ import annotations

import math

from ._kernel.rng import Pcg32


def _dist2(a, b) -> float:
    return sum((x - y) ** 2 for x, y in zip(a, b))


def kmeans(points, z: int, rng: Pcg32, max_iters: int = 300):
    """Lloyd's algorithm with k-means++ seeding; returns labels per point."""
    if z <= 0:
        raise ValueError("need at least one cluster")
    pts = [tuple(p) for p in points]
    if z >= len(pts):
        return list(range(len(pts)))

    centers = [pts[rng.below(len(pts))]]
    while len(centers) < z:
        d2 = [min(_dist2(p, c) for c in centers) for p in pts]
        total = sum(d2)
        if total <= 0.0:
            centers.append(pts[rng.below(len(pts))])
            continue
        # Inverse-CDF draw over squared distances with 32-bit resolution.
        r = (rng.next32() / 4294967296.0) * total
        acc = 0.0
        for p, w in zip(pts, d2):
            acc += w
            if acc >= r:
                centers.append(p)
                break
        else:
            centers.append(pts[-1])

    labels = [0] * len(pts)
    for _ in range(max_iters):
        changed = False
        for idx, p in enumerate(pts):
            best, bestd = labels[idx], _dist2(p, centers[labels[idx]])
            for c in range(z):
                d = _dist2(p, centers[c])
                if d < bestd:
                    best, bestd = c, d
            if best != labels[idx]:
                labels[idx] = best
                changed = True
        sums = [[0.0] * len(pts[0]) for _ in range(z)]
        counts = [0] * z
        for p, lab in zip(pts, labels):
            counts[lab] += 1
            for d, x in enumerate(p):
                sums[lab][d] += x
        for c in range(z):
            if counts[c]:
                centers[c] = tuple(x / counts[c] for x in sums[c])
            else:
                centers[c] = pts[rng.below(len(pts))]
        if not changed:
            break
    return labels


def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points):
    """Monotone-chain hull; returns the vertex cycle counter-clockwise.
    Raises ValueError for fewer than 3 non-collinear points."""
    pts = sorted(set((float(p[0]), float(p[1])) for p in points))
    if len(pts) < 3:
        raise ValueError("hull needs at least three distinct points")
    lower: list[tuple[float, float]] = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[tuple[float, float]] = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:
        raise ValueError("points are collinear")
    return hull


def min_weight_clique(vertex_groups):
    """Pick one vertex per group minimizing the total pairwise distance.

    Exact backtracking with partial-sum pruning; fine for the handful of
    groups and hull vertices seen in generation.
    """
    if not vertex_groups:
        return []
    best_choice: list | None = None
    best_cost = math.inf
    choice: list = []

    def recurse(g: int, cost: float):
        nonlocal best_choice, best_cost
        if cost >= best_cost:
            return
        if g == len(vertex_groups):
            best_choice, best_cost = list(choice), cost
            return
        for v in vertex_groups[g]:
            extra = sum(math.dist(v, u) for u in choice)
            if cost + extra < best_cost:
                choice.append(v)
                recurse(g + 1, cost + extra)
                choice.pop()

    recurse(0, 0.0)
    return best_choice
