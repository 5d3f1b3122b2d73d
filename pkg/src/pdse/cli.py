"""Unified command-line entry point.

Exit codes: 0 success, 1 infeasible input or failed validation, 2 usage
error, 3 internal error.  ``PDSE_DATA_DIR`` supplies the default instance
directory for ``bench``.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import os
import sys
import time
from pathlib import Path

from . import io as pio
from ._kernel import available_backends, get_backend
from .generate import GenConfig, generate, make_synthetic_base
from .heuristic import MslpConfig, mslp
from .lilim import parse_lilim
from .metrics import (
    RunRecord,
    format_summary,
    read_records,
    read_references,
    summarize,
    write_records,
    write_summary,
)
from .mip import ViConfig, build_mip, emit_lp_text
from .model import solution_cost
from .oracle import OracleLimits, brute_force
from .preprocess import dumps_preprocess, preprocess
from .validate import validate

EXIT_OK = 0
EXIT_INFEASIBLE = 1
EXIT_USAGE = 2
EXIT_INTERNAL = 3


def _cmd_gen(args) -> int:
    if args.base:
        base = parse_lilim(args.base)
    else:
        base = make_synthetic_base(max(args.n, args.synthetic_requests), args.seed)
    cfg = GenConfig(args.family, args.n, args.z, args.machines, args.seed)
    inst = generate(base, cfg)
    out = Path(args.out)
    if out.is_dir() or not out.suffix:
        out.mkdir(parents=True, exist_ok=True)
        out = out / f"{inst.name}.txt"
    pio.write_instance(inst, out)
    print(out)
    return EXIT_OK


def _cmd_preprocess(args) -> int:
    inst = pio.read_instance(args.instance)
    result = preprocess(inst)
    for rule, count in sorted(result.rule_counts.items()):
        print(f"{rule}: {count}")
    print(f"eliminated-arcs: {len(result.eliminated)}")
    if args.out:
        Path(args.out).write_text(dumps_preprocess(result), encoding="utf-8")
        print(f"sidecar: {args.out}")
    return EXIT_OK


def _cmd_emit_mip(args) -> int:
    from .preprocess import loads_preprocess

    inst = pio.read_instance(args.instance)
    pre = None
    if args.pre:
        pre = loads_preprocess(Path(args.pre).read_text(encoding="utf-8"))
    model = build_mip(inst, pre, ViConfig.from_spec(args.vi))
    emit_lp_text(model, args.out)
    print(f"{args.out}: {len(model.variables)} variables, {len(model.rows)} rows")
    return EXIT_OK


def _run_heur(inst, args, run_idx, seed):
    cfg = MslpConfig(
        alpha=args.alpha, max_iters=args.iters, time_limit=args.time_limit, seed=seed
    )
    return mslp(inst, cfg)


def _cmd_heur(args) -> int:
    inst = pio.read_instance(args.instance)
    any_feasible = False
    records = []
    for run_idx in range(args.runs):
        seed = args.seed + run_idx
        res = _run_heur(inst, args, run_idx, seed)
        feasible = res.solution is not None
        any_feasible |= feasible
        print(
            f"run {run_idx}: seed={seed} cost={res.cost:.6f} time={res.time:.2f}s "
            f"ttb={res.time_to_best:.2f}s feasible_iter_frac={res.feasible_fraction:.4f} "
            f"mean_lp_improvement={res.mean_lp_improvement:.3f}%"
        )
        records.append(
            RunRecord(
                instance=inst.name,
                group="_".join(inst.name.split("_")[:4]),
                family="island" if "I_" in inst.name else "floor",
                seed=seed,
                run=run_idx,
                feasible=feasible,
                cost=res.cost,
                time=res.time,
                time_to_best=res.time_to_best,
                iterations=res.iterations,
                feasible_fraction=res.feasible_fraction,
                mean_lp_improvement=res.mean_lp_improvement,
            )
        )
        if feasible and args.solution_out and run_idx == 0:
            pio.write_solution(res.solution, args.solution_out, inst.name)
    if args.out:
        write_records(records, args.out)
    return EXIT_OK if any_feasible else EXIT_INFEASIBLE


def _cmd_oracle(args) -> int:
    inst = pio.read_instance(args.instance)
    limits = OracleLimits(max_requests=args.max_requests)
    outcome = brute_force(inst, limits)
    if not outcome.feasible:
        print("infeasible")
        return EXIT_INFEASIBLE
    print(f"optimal cost: {outcome.cost!r} ({outcome.lp_solves} schedules examined)")
    if args.out:
        pio.write_solution(outcome.solution, args.out, inst.name)
    return EXIT_OK


def _cmd_validate(args) -> int:
    inst = pio.read_instance(args.instance)
    sol = pio.read_solution(args.solution)
    report = validate(inst, sol)
    if report.ok:
        print(f"valid (cost {solution_cost(sol)!r})")
        return EXIT_OK
    print(report)
    return EXIT_INFEASIBLE


def _bench_one(path, alpha, iters, time_limit, seed, runs):
    inst = pio.read_instance(path)
    out = []
    for run_idx in range(runs):
        res = mslp(
            inst,
            MslpConfig(alpha=alpha, max_iters=iters, time_limit=time_limit,
                       seed=seed + run_idx),
        )
        out.append(
            RunRecord(
                instance=inst.name,
                group="_".join(inst.name.split("_")[:4]),
                family="island" if "I_" in inst.name else "floor",
                seed=seed + run_idx,
                run=run_idx,
                feasible=res.solution is not None,
                cost=res.cost,
                time=res.time,
                time_to_best=res.time_to_best,
                iterations=res.iterations,
                feasible_fraction=res.feasible_fraction,
                mean_lp_improvement=res.mean_lp_improvement,
            )
        )
    return out


def _cmd_bench(args) -> int:
    data_dir = Path(args.data or os.environ.get("PDSE_DATA_DIR", "."))
    paths = sorted(data_dir.glob("*.txt"))
    records = []
    if args.jobs > 1 and paths:
        with concurrent.futures.ProcessPoolExecutor(max_workers=args.jobs) as pool:
            futures = [
                pool.submit(_bench_one, str(p), args.alpha, args.iters,
                            args.time_limit, args.seed, args.runs)
                for p in paths
            ]
            for fut in futures:
                records.extend(fut.result())
    else:
        for p in paths:
            records.extend(_bench_one(str(p), args.alpha, args.iters,
                                      args.time_limit, args.seed, args.runs))
    write_records(records, args.out)
    print(f"{len(records)} run records over {len(paths)} instances -> {args.out}")
    return EXIT_OK


def _cmd_report(args) -> int:
    records = read_records(args.records)
    refs = read_references(args.refs) if args.refs else None
    summaries = summarize(records, refs)
    print(format_summary(summaries))
    if args.out:
        write_summary(summaries, args.out)
        print(f"summary: {args.out}")
    return EXIT_OK


def _cmd_bench_backends(args) -> int:
    from ._kernel import PackedData

    base = make_synthetic_base(args.n, args.seed)
    cfg = GenConfig("island", args.n, 2, 2, args.seed)
    inst = generate(base, cfg)
    print(f"instance: {inst.name} ({args.iters} heuristic iterations per backend)")
    results = {}
    for name in available_backends():
        kern = get_backend(name)
        eng = kern.Engine(PackedData(inst))
        t0 = time.perf_counter()
        res = eng.mslp(args.alpha, args.iters, 3600.0, args.seed)
        elapsed = time.perf_counter() - t0
        results[name] = (elapsed, res["best_cost"])
        rate = res["iterations"] / elapsed if elapsed > 0 else float("inf")
        print(f"  {name:>8}: {elapsed:8.3f}s  ({rate:10.0f} iters/s)  best={res['best_cost']:.6f}")
    if len(results) == 2:
        pure_t = results["pure"][0]
        comp_t = results["compiled"][0]
        print(f"  speedup: {pure_t / comp_t:.1f}x")
        if abs(results["pure"][1] - results["compiled"][1]) > 0:
            print("  WARNING: backends disagree on the best cost")
            return EXIT_INTERNAL
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="pdse",
        description="Pickup-and-delivery with time windows and scheduled "
        "inter-region carriers: generation, preprocessing, MIP emission, "
        "heuristic, oracle, validation, benchmarking.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a benchmark instance")
    p.add_argument("--family", choices=("island", "floor"), required=True)
    p.add_argument("--base", help="paired pickup-delivery base file")
    p.add_argument("--synthetic-requests", type=int, default=16,
                   help="size of the synthetic base when no --base is given")
    p.add_argument("--n", type=int, required=True, help="number of requests")
    p.add_argument("--z", type=int, required=True, help="number of regions")
    p.add_argument("--machines", type=int, required=True)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--out", required=True, help="output file or directory")
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("preprocess", help="shrink windows and eliminate arcs")
    p.add_argument("instance")
    p.add_argument("--out", help="sidecar file consumed by emit-mip")
    p.set_defaults(func=_cmd_preprocess)

    p = sub.add_parser("emit-mip", help="emit the MIP as LP text")
    p.add_argument("instance")
    p.add_argument("--vi", default="paper-top1",
                   help="none | all | paper-top1 | comma list of family ids 35..46")
    p.add_argument("--pre", help="preprocess sidecar (recomputed when omitted)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_emit_mip)

    p = sub.add_parser("heur", help="run the multi-start heuristic")
    p.add_argument("instance")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--iters", type=int, default=60000)
    p.add_argument("--time-limit", type=float, default=3600.0)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--runs", type=int, default=1)
    p.add_argument("--out", help="write run records CSV")
    p.add_argument("--solution-out", help="write the first run's best solution")
    p.set_defaults(func=_cmd_heur)

    p = sub.add_parser("oracle", help="exact solve of a tiny instance")
    p.add_argument("instance")
    p.add_argument("--max-requests", type=int, default=3)
    p.add_argument("--out", help="write the optimal solution file")
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("validate", help="check a solution file")
    p.add_argument("instance")
    p.add_argument("solution")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("bench", help="run the heuristic over a directory")
    p.add_argument("--data", help="instance directory (default $PDSE_DATA_DIR)")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--iters", type=int, default=60000)
    p.add_argument("--time-limit", type=float, default=3600.0)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--runs", type=int, default=10)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", required=True, help="records CSV")
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("report", help="summarize run records")
    p.add_argument("--records", required=True)
    p.add_argument("--refs", help="CSV with instance,ref[,bound] columns")
    p.add_argument("--out", help="summary CSV")
    p.set_defaults(func=_cmd_report)

    p = sub.add_parser("bench-backends", help="compare kernel backends")
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--z", type=int, default=2)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--iters", type=int, default=2000)
    p.add_argument("--seed", type=int, default=1)
    p.set_defaults(func=_cmd_bench_backends)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
