"""Evaluation metrics and report aggregation.

RPD compares a solution value against a reference as a percentage of the
reference; ARPD averages RPDs; the solver gap compares an incumbent with its
bound.  Configuration ranking mirrors the min-max-normalized composite of
feasibility rate, complemented ARPD, and complemented gap.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path


def rpd(sol: float, ref: float) -> float:
    """Relative percentage deviation of sol from ref."""
    return 100.0 * (sol - ref) / ref


def arpd(values, ref: float) -> float:
    vals = list(values)
    return sum(rpd(v, ref) for v in vals) / len(vals)


def solver_gap(incumbent: float, bound: float) -> float:
    """Percentage gap between an incumbent value and its best bound."""
    if incumbent == 0.0:
        return 0.0
    return 100.0 * abs(incumbent - bound) / abs(incumbent)


def min_max_scale(values) -> list[float]:
    vals = list(values)
    lo, hi = min(vals), max(vals)
    if hi == lo:
        return [100.0 for _ in vals]
    return [100.0 * (v - lo) / (hi - lo) for v in vals]


def rank_configurations(rows) -> list[dict]:
    """rows: dicts with config, feasibility_rate (0..1), arpd, gap.  Returns
    rows sorted by the average of feasibility (in %), complemented min-max
    scaled ARPD, and complemented min-max scaled gap."""
    rows = [dict(r) for r in rows]
    arpd_scaled = min_max_scale([-r["arpd"] for r in rows])
    gap_scaled = min_max_scale([-r["gap"] for r in rows])
    for r, a, g in zip(rows, arpd_scaled, gap_scaled):
        r["feas_pct"] = 100.0 * r["feasibility_rate"]
        r["arpd_scaled"] = a
        r["gap_scaled"] = g
        r["score"] = (r["feas_pct"] + a + g) / 3.0
    rows.sort(key=lambda r: (-r["score"], str(r["config"])))
    for pos, r in enumerate(rows, start=1):
        r["rank"] = pos
    return rows


RUN_FIELDS = [
    "instance",
    "group",
    "family",
    "seed",
    "run",
    "feasible",
    "cost",
    "time",
    "time_to_best",
    "iterations",
    "feasible_fraction",
    "mean_lp_improvement",
]


@dataclass
class RunRecord:
    instance: str
    group: str
    family: str
    seed: int
    run: int
    feasible: bool
    cost: float
    time: float
    time_to_best: float
    iterations: int
    feasible_fraction: float
    mean_lp_improvement: float

    def row(self) -> dict:
        return {f: getattr(self, f) for f in RUN_FIELDS}


def write_records(records, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=RUN_FIELDS)
        writer.writeheader()
        for rec in records:
            writer.writerow(rec.row() if isinstance(rec, RunRecord) else rec)


def read_records(path) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        out = []
        for row in csv.DictReader(fh):
            row["seed"] = int(row["seed"])
            row["run"] = int(row["run"])
            row["feasible"] = row["feasible"] in ("1", "True", "true")
            for f in ("cost", "time", "time_to_best", "feasible_fraction", "mean_lp_improvement"):
                row[f] = float(row[f])
            row["iterations"] = int(row["iterations"])
            out.append(row)
        return out


def read_references(path) -> dict[str, dict]:
    """CSV with columns instance, ref[, bound]; e.g. external-solver results."""
    refs: dict[str, dict] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            entry = {"ref": float(row["ref"])}
            if row.get("bound") not in (None, ""):
                entry["bound"] = float(row["bound"])
            refs[row["instance"]] = entry
    return refs


@dataclass
class GroupSummary:
    group: str
    instances: int = 0
    ref_sol: float = math.nan
    min_sol: float = math.nan
    mean_sol: float = math.nan
    mean_time: float = math.nan
    mean_ttb: float = math.nan
    arpd_vs_ref: float = math.nan
    mean_gap: float = math.nan
    feasible_fraction: float = math.nan
    mean_lp_improvement: float = math.nan
    extras: dict = field(default_factory=dict)


def summarize(records: list[dict], refs: dict[str, dict] | None = None):
    """Per-group means in the benchmark-table layout (reference value,
    min/mean best costs, time, time-to-best), plus harness metrics."""
    refs = refs or {}
    by_group: dict[str, dict[str, list[dict]]] = {}
    for rec in records:
        by_group.setdefault(rec["group"], {}).setdefault(rec["instance"], []).append(rec)
    known = [r["instance"] for r in records if r["instance"] in refs]
    missing = sorted({r["instance"] for r in records} - set(refs)) if refs else []
    if refs and missing and known:
        raise ValueError(f"references missing for instances: {missing}")

    summaries = []
    for group in sorted(by_group):
        per_inst = by_group[group]
        mins, means, times, ttbs, feas, lpi, rpds, gaps, refvals = ([] for _ in range(9))
        for inst, recs in sorted(per_inst.items()):
            costs = [r["cost"] for r in recs if r["feasible"]]
            times.extend(r["time"] for r in recs)
            ttbs.extend(r["time_to_best"] for r in recs if r["feasible"])
            feas.extend(r["feasible_fraction"] for r in recs)
            lpi.extend(r["mean_lp_improvement"] for r in recs if r["feasible"])
            if costs:
                mins.append(min(costs))
                means.append(sum(costs) / len(costs))
            ref = refs.get(inst)
            if ref and costs:
                refvals.append(ref["ref"])
                rpds.extend(rpd(c, ref["ref"]) for c in costs)
                if "bound" in ref:
                    gaps.append(solver_gap(ref["ref"], ref["bound"]))

        def avg(xs):
            return sum(xs) / len(xs) if xs else math.nan

        summaries.append(
            GroupSummary(
                group=group,
                instances=len(per_inst),
                ref_sol=avg(refvals),
                min_sol=avg(mins),
                mean_sol=avg(means),
                mean_time=avg(times),
                mean_ttb=avg(ttbs),
                arpd_vs_ref=avg(rpds),
                mean_gap=avg(gaps),
                feasible_fraction=avg(feas),
                mean_lp_improvement=avg(lpi),
            )
        )
    return summaries


SUMMARY_FIELDS = [
    "group",
    "instances",
    "ref_sol",
    "min_sol",
    "mean_sol",
    "mean_time",
    "mean_ttb",
    "arpd_vs_ref",
    "mean_gap",
    "feasible_fraction",
    "mean_lp_improvement",
]


def write_summary(summaries, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(SUMMARY_FIELDS)
        for s in summaries:
            writer.writerow([getattr(s, f) for f in SUMMARY_FIELDS])


def format_summary(summaries) -> str:
    head = f"{'group':<28}{'#':>3}{'ref':>10}{'min':>10}{'mean':>10}{'time':>9}{'ttb':>9}{'ARPD':>8}"
    lines = [head, "-" * len(head)]
    for s in summaries:
        def num(x, w=10, p=2):
            return f"{x:>{w}.{p}f}" if not math.isnan(x) else " " * (w - 3) + "n/a"

        lines.append(
            f"{s.group:<28}{s.instances:>3}"
            + num(s.ref_sol)
            + num(s.min_sol)
            + num(s.mean_sol)
            + num(s.mean_time, 9)
            + num(s.mean_ttb, 9)
            + num(s.arpd_vs_ref, 8)
        )
    return "\n".join(lines)
