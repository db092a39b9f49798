"""Command-line front end.

Subcommands: ``run`` (one simulation), ``sweep`` (one axis over the
pattern suite, CSV + JSON out), ``compare`` (schemes x mitigation
levels), ``rate`` (the analytic sampling-rate calculator), and
``report`` (all reference tables plus the self-check report).

Config files are flat JSON objects whose keys mirror the flag names;
precedence is CLI flag > config file > built-in default.  Output files
are written to a temp name and renamed, so an interrupted run never
leaves a partial CSV behind.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
import time
from pathlib import Path

from . import __version__
from .acceptance import FIGURE_CRITERIA, AcceptanceRunner, figure_tables
from .dram import DramTimings, MitigationSchedule, derive_budgets
from .engine import SimConfig, simulate
from .experiments import (
    DEFAULT_P_GRID,
    SweepSpec,
    analytic_sampling_rate,
    compare_schemes,
    default_workers,
    run_sweep,
)
from .patterns import nonuniform_pattern, standard_suite, trace_pattern, uniform_pattern
from .policies import Baseline, Dsac, Graphene, Para, Pmss, Prohit, Proteas
from .tracker import EvictionRule

SWEEP_CSV_COLUMNS = (
    "pattern_id", "kind", "j", "x", "k_decoys", "aligned", "policy", "eviction",
    "sampling_p", "tracker_size", "mitigs_per_trefi", "blast_radius", "seeds",
    "max_dist_mean", "max_dist_ci95", "avg_dist_mean", "avg_dist_ci95",
    "mitigations_mean", "occupancy_mean", "extra_act_fraction", "master_seed",
)

_POLICY_NAMES = ("baseline", "proteas", "pmss", "dsac", "prohit", "para", "graphene")


def _fmt(v) -> str:
    """Fixed 6-significant-digit formatting so reruns are byte-identical."""
    if v is None or v == "":
        return ""
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def write_csv(path: Path, columns, rows) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "w") as f:
        f.write(",".join(columns) + "\n")
        for row in rows:
            f.write(",".join(_fmt(v) for v in row) + "\n")
    os.replace(tmp, path)


def write_json(path: Path, obj) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "w") as f:
        json.dump(obj, f, indent=2, sort_keys=True)
        f.write("\n")
    os.replace(tmp, path)


def parse_pattern(spec: str, aligned: bool):
    """``uniform:j=20``, ``nonuniform:j=8,x=3,k=20``, or ``trace:FILE``."""
    kind, _, rest = spec.partition(":")
    if kind == "trace":
        return trace_pattern(rest, aligned=aligned)
    kv = {}
    for part in rest.split(","):
        if part:
            key, _, val = part.partition("=")
            kv[key.strip()] = int(val)
    if kind == "uniform":
        return uniform_pattern(kv["j"], aligned=aligned)
    if kind == "nonuniform":
        return nonuniform_pattern(kv["j"], kv["x"], kv["k"], aligned=aligned)
    raise ValueError(f"pattern: unknown kind {kind!r} (uniform/nonuniform/trace)")


def build_policy(name: str, p: float | None, eviction: str | None, trh: int):
    if name not in _POLICY_NAMES:
        raise ValueError(f"policy: unknown name {name!r}")
    rule = EvictionRule(eviction) if eviction else None
    if name == "baseline":
        return Baseline(eviction=rule) if rule else Baseline()
    if name == "proteas":
        kw = {"sampling_p": p} if p is not None else {}
        if rule:
            kw["eviction"] = rule
        return Proteas(**kw)
    if name == "pmss":
        kw = {"sampling_p": p} if p is not None else {}
        if rule:
            kw["eviction"] = rule
        return Pmss(**kw)
    if name == "dsac":
        return Dsac()
    if name == "prohit":
        return Prohit()
    if name == "para":
        return Para(mitigate_p=p) if p is not None else Para()
    return Graphene(trh=trh)


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    with open(path) as f:
        cfg = json.load(f)
    if not isinstance(cfg, dict):
        raise ValueError("config: top level must be a JSON object")
    return cfg


def _setting(args, cfg: dict, key: str, default=None):
    """CLI flag > config file > default."""
    val = getattr(args, key.replace("-", "_"), None)
    if val is not None:
        return val
    return cfg.get(key, default)


def _resolve_run(args):
    cfg = _load_config(args.config)
    policy = build_policy(
        _setting(args, cfg, "policy", "proteas"),
        _setting(args, cfg, "p"),
        _setting(args, cfg, "eviction"),
        int(_setting(args, cfg, "trh", 500)),
    )
    aligned = bool(_setting(args, cfg, "aligned", False))
    pattern = parse_pattern(_setting(args, cfg, "pattern", "uniform:j=20"), aligned)
    timings = DramTimings(**cfg.get("timings", {}))
    schedule = MitigationSchedule(
        mitigations_per_trefi=int(_setting(args, cfg, "k", 1)),
        blast_radius=int(_setting(args, cfg, "blast", 2)),
    )
    return SimConfig(
        policy=policy,
        pattern=pattern,
        timings=timings,
        schedule=schedule,
        tracker_capacity=int(_setting(args, cfg, "tracker_size", 16)),
        master_seed=int(_setting(args, cfg, "seed", 0)),
        seed_index=int(_setting(args, cfg, "seed_index", 0)),
    )


def _manifest(config_dict: dict, outputs: list[str]) -> dict:
    return {
        "tool": "hammersim",
        "version": __version__,
        "config": config_dict,
        "outputs": outputs,
        "generated_at": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
    }


def _config_dict(cfg: SimConfig) -> dict:
    return {
        "policy": {"name": cfg.policy.name, **{k: v for k, v in dataclasses.asdict(cfg.policy).items()
                                               if not isinstance(v, dict) or k != "eviction"}},
        "eviction": getattr(cfg.policy, "eviction", None) and getattr(cfg.policy, "eviction").kind,
        "pattern": cfg.pattern.pattern_id,
        "timings": dataclasses.asdict(cfg.timings),
        "schedule": dataclasses.asdict(cfg.schedule),
        "tracker_capacity": cfg.tracker_capacity,
        "master_seed": cfg.master_seed,
        "seed_index": cfg.seed_index,
    }


def cmd_run(args) -> int:
    cfg = _resolve_run(args)
    result = simulate(cfg, use_compiled=False if args.pure else None)
    print(f"pattern          {cfg.pattern.pattern_id}")
    print(f"policy           {cfg.policy.name}")
    print(f"max disturbance  {result.max_disturbance}")
    print(f"avg disturbance  {result.avg_disturbance:.1f}")
    print(f"mitigations      {result.mitigations_issued}")
    print(f"empty slots      {result.empty_mitigation_slots} / {result.scheduled_slots}")
    print(f"mean occupancy   {result.mean_tracker_occupancy:.2f}")
    print(f"extra activations {100 * result.extra_activation_fraction:.2f}%")
    if args.csv:
        path = Path(args.csv)
        pat, pol = cfg.pattern, cfg.policy
        nu = pat.kind == "nonuniform"
        row = (pat.pattern_id, pat.kind, pat.j, pat.x if nu else "", pat.k if nu else "", pat.aligned,
               pol.name, getattr(pol, "eviction", None) and pol.eviction.kind or "",
               getattr(pol, "sampling_p", getattr(pol, "mitigate_p", "")),
               cfg.tracker_capacity, cfg.schedule.mitigations_per_trefi,
               cfg.schedule.blast_radius, 1,
               float(result.max_disturbance), 0.0, result.avg_disturbance, 0.0,
               float(result.mitigations_issued), result.mean_tracker_occupancy,
               result.extra_activation_fraction, cfg.master_seed)
        write_csv(path, SWEEP_CSV_COLUMNS, [row])
        write_json(path.with_suffix(".manifest.json"),
                   _manifest(_config_dict(cfg), [str(path)]))
    return 0


def _sweep_rows(rows):
    for sweep_row in rows:
        pol = sweep_row.policy
        for ps in sweep_row.per_pattern:
            pat = ps.pattern
            nu = pat.kind == "nonuniform"
            yield (
                pat.pattern_id, pat.kind, pat.j, pat.x if nu else "", pat.k if nu else "", pat.aligned,
                pol.name, getattr(pol, "eviction", None) and pol.eviction.kind or "",
                getattr(pol, "sampling_p", getattr(pol, "mitigate_p", "")),
                sweep_row.tracker_capacity, sweep_row.schedule.mitigations_per_trefi,
                sweep_row.schedule.blast_radius, sweep_row.seeds,
                ps.max_disturbance.mean, ps.max_disturbance.ci95,
                ps.avg_disturbance.mean, ps.avg_disturbance.ci95,
                ps.mitigations.mean, ps.occupancy.mean,
                ps.extra_activation_fraction, sweep_row.master_seed,
            )


def cmd_sweep(args) -> int:
    cfg = _load_config(args.config)
    axis = _setting(args, cfg, "axis")
    if not axis:
        raise ValueError("axis: required (one of sampling_p, tracker_size, "
                         "mitigations_per_trefi, eviction_rule, policy)")
    raw_values = _setting(args, cfg, "values")
    if isinstance(raw_values, str):
        raw_values = raw_values.split(",")
    if not raw_values:
        values = DEFAULT_P_GRID if axis == "sampling_p" else None
        if values is None:
            raise ValueError("values: required for this axis")
    elif axis in ("sampling_p",):
        values = tuple(float(v) for v in raw_values)
    elif axis in ("tracker_size", "mitigations_per_trefi"):
        values = tuple(int(v) for v in raw_values)
    elif axis == "eviction_rule":
        values = tuple(str(v) for v in raw_values)
    else:
        values = tuple(build_policy(str(v), None, None, 500) for v in raw_values)

    policy = build_policy(
        _setting(args, cfg, "policy", "proteas"),
        _setting(args, cfg, "p"),
        _setting(args, cfg, "eviction"),
        int(_setting(args, cfg, "trh", 500)),
    )
    seeds = 10 if args.quick else int(_setting(args, cfg, "seeds", 100))
    patterns = tuple(standard_suite())
    only = _setting(args, cfg, "patterns")
    if only:
        patterns = tuple(p for p in patterns if p.pattern_id in set(only))
    spec = SweepSpec(
        axis=axis,
        axis_values=values,
        policy=policy,
        schedule=MitigationSchedule(
            mitigations_per_trefi=int(_setting(args, cfg, "k", 1)),
            blast_radius=int(_setting(args, cfg, "blast", 2)),
        ),
        tracker_capacity=int(_setting(args, cfg, "tracker_size", 16)),
        patterns=patterns,
        seeds=seeds,
        master_seed=int(_setting(args, cfg, "seed", 0)),
        workers=args.workers or default_workers(),
    )
    rows = run_sweep(spec)

    out = Path(_setting(args, cfg, "out", "sweep.csv"))
    write_csv(out, SWEEP_CSV_COLUMNS, _sweep_rows(rows))
    summary = {
        "axis": axis,
        "per_value": [
            {
                "value": getattr(r.axis_value, "name", r.axis_value),
                "suite_max": r.suite_max,
                "suite_max_ci95": r.suite_max_ci,
                "suite_avg": r.suite_avg,
                "suite_avg_ci95": r.suite_avg_ci,
            }
            for r in rows
        ],
    }
    manifest = _manifest(
        {
            "axis": axis,
            "values": [getattr(v, "name", v) for v in values],
            "policy": policy.name,
            "seeds": seeds,
            "patterns": len(patterns),
            "tracker_capacity": spec.tracker_capacity,
            "schedule": dataclasses.asdict(spec.schedule),
            "master_seed": spec.master_seed,
        },
        [str(out)],
    )
    write_json(out.with_suffix(".json"), {"manifest": manifest, "summary": summary})
    print(f"wrote {out} ({len(rows)} axis values x {len(patterns)} patterns)")
    for entry in summary["per_value"]:
        print(f"  {axis}={entry['value']}: suite_max={entry['suite_max']:.6g}")
    return 0


def cmd_compare(args) -> int:
    schemes = args.schemes.split(",")
    k_values = [int(k) for k in args.k.split(",")]
    patterns = standard_suite()
    table = compare_schemes(schemes, k_values, patterns, args.seeds,
                            master_seed=args.seed, workers=args.workers or default_workers())
    out = Path(args.out)
    write_csv(out, ("scheme", "k", "suite_max", "suite_max_ci95", "suite_avg", "suite_avg_ci95"),
              [(t["scheme"], t["k"], t["suite_max"], t["suite_max_ci"],
                t["suite_avg"], t["suite_avg_ci"]) for t in table])
    for t in table:
        print(f"{t['scheme']:10s} k={t['k']}: max={t['suite_max']:.6g} avg={t['suite_avg']:.6g}")
    print(f"wrote {out}")
    return 0


def cmd_rate(args) -> int:
    m = args.mitigations_per_act
    if m is None:
        if args.k < 1:
            raise ValueError("k must be >= 1")
        budgets = derive_budgets(DramTimings())
        m = args.k / (budgets.acts_per_trefi + 1)
    rate = analytic_sampling_rate(m, args.miss_rate)
    print(f"{rate:.6g}")
    return 0


def cmd_report(args) -> int:
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    only = None
    if args.only:
        if args.only not in FIGURE_CRITERIA:
            raise ValueError(f"only: unknown table {args.only!r} "
                             f"(choose from {', '.join(FIGURE_CRITERIA)})")
        only = set(FIGURE_CRITERIA[args.only])
    runner = AcceptanceRunner(seeds=args.seeds, workers=args.workers or default_workers(),
                              verbose=True)
    results = runner.run(only=only)
    for name, (columns, rows) in figure_tables(runner).items():
        write_csv(outdir / f"{name}.csv", columns, rows)
    lines = [f"[{'PASS' if r.passed else 'FAIL'}] {r.cid:2d} {r.name}: {r.detail}"
             for r in results]
    failed = sum(not r.passed for r in results)
    lines.append(f"{len(results) - failed}/{len(results)} criteria passed")
    report = outdir / "report.txt"
    tmp = report.with_suffix(".tmp")
    tmp.write_text("\n".join(lines) + "\n")
    os.replace(tmp, report)
    print("\n".join(lines))
    print(f"wrote {outdir}/")
    return 1 if failed else 0


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hammersim",
        description="Trace-driven simulator for in-DRAM aggressor-row trackers.",
    )
    parser.add_argument("--version", action="version", version=f"hammersim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="single simulation",
                         description="Run one pattern against one policy for a full "
                                     "refresh window. Patterns: uniform:j=N, "
                                     "nonuniform:j=N,x=N,k=N, or trace:FILE "
                                     "(one row-id per line, repeated cyclically).")
    run.add_argument("--config", help="JSON config file (flags override it)")
    run.add_argument("--policy", choices=_POLICY_NAMES)
    run.add_argument("--p", type=float, help="sampling/mitigation probability")
    run.add_argument("--eviction", choices=("lfu", "lru", "random", "bip"))
    run.add_argument("--trh", type=int, help="graphene mitigation threshold basis")
    run.add_argument("--pattern", help="pattern spec, e.g. uniform:j=20")
    run.add_argument("--aligned", action="store_const", const=True,
                     help="restart the pattern at each tREFI boundary")
    run.add_argument("--k", type=int, help="mitigations per tREFI (1, 2, 4, 8)")
    run.add_argument("--blast", type=int, help="blast radius")
    run.add_argument("--tracker-size", type=int)
    run.add_argument("--seed", type=int, help="master seed")
    run.add_argument("--seed-index", type=int)
    run.add_argument("--pure", action="store_true", help="force the pure-Python kernel")
    run.add_argument("--csv", help="also write a one-row CSV")
    run.set_defaults(func=cmd_run)

    sweep = sub.add_parser("sweep", help="axis sweep over the pattern suite")
    sweep.add_argument("--config", help="JSON sweep spec (flags override it)")
    sweep.add_argument("--axis", choices=("sampling_p", "tracker_size",
                                          "mitigations_per_trefi", "eviction_rule", "policy"))
    sweep.add_argument("--values", help="comma-separated axis values")
    sweep.add_argument("--policy", choices=_POLICY_NAMES)
    sweep.add_argument("--p", type=float)
    sweep.add_argument("--eviction", choices=("lfu", "lru", "random", "bip"))
    sweep.add_argument("--trh", type=int)
    sweep.add_argument("--k", type=int)
    sweep.add_argument("--blast", type=int)
    sweep.add_argument("--tracker-size", type=int)
    sweep.add_argument("--seeds", type=int)
    sweep.add_argument("--quick", action="store_true", help="10 seeds instead of 100")
    sweep.add_argument("--seed", type=int)
    sweep.add_argument("--out", help="CSV path (default sweep.csv)")
    sweep.add_argument("--workers", type=int,
                       help="parallel workers (default: HAMMERSIM_WORKERS or CPU count)")
    sweep.set_defaults(func=cmd_sweep)

    comp = sub.add_parser("compare", help="schemes x mitigation levels")
    comp.add_argument("--schemes", default="baseline,proteas,dsac,prohit,para")
    comp.add_argument("--k", default="1")
    comp.add_argument("--seeds", type=int, default=10)
    comp.add_argument("--seed", type=int, default=0)
    comp.add_argument("--out", default="compare.csv")
    comp.add_argument("--workers", type=int)
    comp.set_defaults(func=cmd_compare)

    rate = sub.add_parser("rate", help="analytic sampling-rate calculator")
    group = rate.add_mutually_exclusive_group(required=True)
    group.add_argument("--mitigations-per-act", type=float,
                       help="mitigations per activation, e.g. 1/166")
    group.add_argument("--k", type=int,
                       help="mitigations per tREFI (shorthand for k/166 per act)")
    rate.add_argument("--miss-rate", type=float, default=0.5)
    rate.set_defaults(func=cmd_rate)

    report = sub.add_parser("report", help="all reference tables + self-check report")
    report.add_argument("--out", default="report")
    report.add_argument("--seeds", type=int,
                        help="seeds per run for every check (100 = full fidelity)")
    report.add_argument("--only", help="restrict to one table, e.g. --only bathtub")
    report.add_argument("--workers", type=int)
    report.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
