"""Command-line front end: ``python -m glad <command> ...``.

Commands: ``synth``, ``trace``, ``optimize``, ``evolve``, ``sweep``,
``validate``.  Each run writes CSV output plus a JSON manifest next to it
holding the arguments, seed and input hashes, so it can be replayed.

Exit codes: 0 success, 2 validation/usage error, 3 infeasible (a layout needs
an unreachable server pair), 4 oracle size guard.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from pathlib import Path

from . import io
from .baselines import DEFAULT_MAX_STATES, brute_force_optimal, greedy_layout, random_layout
from .cost import BREAKDOWN_COLUMNS, total_cost
from .dynamic import run_timeline
from .errors import NoConnectedPairs, PairNotConnected, TooLarge, UnreachablePair, ValidationError
from .mincut import to_dimacs
from .scenario import ChurnConfig, SynthesisConfig, generate_trace, synthesize_instance
from .static import GladConfig, _auxiliary, glad_s, init_layout

EXIT_OK, EXIT_INVALID, EXIT_INFEASIBLE, EXIT_TOO_LARGE = 0, 2, 3, 4
POLICY_NAMES = {"no-adjustment": "no_adjustment", "greedy": "greedy", "glad-e": "glad_e",
                "adaptive": "adaptive", "glad-s": "glad_s"}


def _r_value(text):
    if text == "exhaustive":
        return text
    try:
        r = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"R must be a positive integer or 'exhaustive', got {text!r}") from None
    if r < 1:
        raise argparse.ArgumentTypeError("R must be >= 1")
    return r


def _theta(text):
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _file_hash(path):
    return io.sha256(Path(path).read_text())


def _write_manifest(out_path, payload):
    path = Path(str(out_path) + ".json") if not str(out_path).endswith(".json") else Path(out_path)
    path.write_text(json.dumps(payload, sort_keys=True, indent=2, default=str) + "\n")
    return path


def _write_rows(path, columns, rows):
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=columns)
        w.writeheader()
        w.writerows(rows)


def _glad_config(args, **over):
    return GladConfig(r_max=over.get("r_max", args.R), init=args.init, seed=args.seed,
                      max_iterations=args.max_iterations)


def cmd_synth(args):
    doc = json.loads(Path(args.config).read_text())
    if not isinstance(doc, dict):
        raise ValidationError("config file must hold a JSON object")
    churn_doc = doc.pop("churn", None)
    if args.seed is not None:
        doc["seed"] = args.seed
    cfg = SynthesisConfig.from_dict(doc)
    churn = ChurnConfig.from_dict(churn_doc, "churn.") if churn_doc is not None else None
    inst = synthesize_instance(cfg, name=Path(args.out).stem)
    prov = {"seed": cfg.seed, "config": cfg.to_dict(), "config_sha256": io.sha256(io.dumps(cfg.to_dict()))}
    io.save_instance(inst, args.out, prov)
    if churn is not None and args.trace_out:
        trace = generate_trace(inst.graph, churn, inst.network.coords, cfg.distance_factor_upload)
        io.save_trace(trace, args.trace_out)
    print(f"wrote {args.out}: {inst.n_vertices} vertices, {inst.graph.n_links} links, {inst.n_servers} servers")
    return EXIT_OK


def cmd_trace(args):
    inst = io.load_instance(args.instance)
    churn = ChurnConfig(args.link_pct, args.vertex_pct, args.slots, args.seed)
    trace = generate_trace(inst.graph, churn, inst.network.coords, args.upload_factor)
    io.save_trace(trace, args.out)
    print(f"wrote {args.out}: {len(trace)} slots, {sum(len(s.events) for s in trace)} events")
    return EXIT_OK


def _run_algo(inst, args, config):
    log = None
    t0 = time.perf_counter()
    if args.algo == "glad-s":
        layout, log = glad_s(inst, config)
    elif args.algo == "greedy":
        layout = greedy_layout(inst)
    elif args.algo == "random":
        layout = random_layout(inst, args.seed)
    else:
        layout = brute_force_optimal(inst, args.max_states).optimal_layout
    return layout, log, (time.perf_counter() - t0) * 1e3


def cmd_optimize(args):
    inst = io.load_instance(args.instance)
    config = _glad_config(args)
    if args.dump_dimacs:
        lab = init_layout(inst, config.init, config.seed).assignment
        pairs = inst.network.connected_pairs
        if not pairs:
            raise NoConnectedPairs("edge network has no connected server pair")
        i, j = pairs[0]
        Path(args.dump_dimacs).write_text(to_dimacs(_auxiliary(inst, i, j, lab).network))
    layout, log, wall = _run_algo(inst, args, config)
    io.save_layout(layout, inst.graph, args.out)
    layout = io.load_layout(args.out, inst)  # rows are built from the file as written
    cost = total_cost(layout, inst)
    row = cost.as_row(Path(args.instance).stem, Path(args.out).stem)
    row.update(algo=args.algo, iterations=log.n_iterations if log else 0, wall_ms=wall, seed=args.seed,
               r=config.resolve_r(inst.n_servers))
    report = args.report or str(Path(args.out).with_suffix(".csv"))
    _write_rows(report, BREAKDOWN_COLUMNS + ["algo", "iterations", "wall_ms", "seed", "r"], [row])
    if log is not None:
        log.write_csv(args.log or str(Path(args.out).with_suffix(".iterations.csv")))
    _write_manifest(report, {"experiment": "optimize", "args": vars(args), "seed": args.seed,
                             "instance_sha256": _file_hash(args.instance), "rows": [row]})
    print(f"{args.algo}: total {cost.total:.6f} (c_u {cost.c_u:.4f}, c_p {cost.c_p:.4f}, "
          f"c_t {cost.c_t:.4f}, c_m {cost.c_m:.4f})")
    return EXIT_OK


def _timeline(inst, trace, policy, theta, args, r_max=None):
    config = GladConfig(r_max=args.R if r_max is None else r_max, init=args.init, seed=args.seed,
                        max_iterations=args.max_iterations)
    return run_timeline(inst, trace, POLICY_NAMES[policy], config, theta)


def cmd_evolve(args):
    inst = io.load_instance(args.instance)
    trace = io.load_trace(args.trace)
    report = _timeline(inst, trace, args.policy, args.theta, args)
    report.write_csv(args.out)
    _write_manifest(args.out, {"experiment": "evolve", "args": vars(args), "seed": args.seed,
                               "instance_sha256": _file_hash(args.instance), "trace_sha256": _file_hash(args.trace),
                               "summary": {"slots": len(report.records), "mean_total": report.mean_cost(),
                                           "glad_s_invocations": report.glad_s_invocations}})
    print(f"{args.policy}: {len(report.records)} slots, mean total {report.mean_cost():.6f}, "
          f"GLAD-S runs {report.glad_s_invocations}")
    return EXIT_OK


def cmd_sweep(args):
    inst = io.load_instance(args.instance)
    rows = []
    if args.parameter == "R":
        values = [_r_value(v) for v in args.values]
        for v in values:
            cfg = GladConfig(r_max=v, init=args.init, seed=args.seed, max_iterations=args.max_iterations)
            t0 = time.perf_counter()
            layout, log = glad_s(inst, cfg)
            wall = (time.perf_counter() - t0) * 1e3
            rows.append({"parameter": "R", "value": v, "final_cost": total_cost(layout, inst).total,
                         "iterations": log.n_iterations, "glad_s_invocations": "", "wall_ms": wall})
    else:
        if not args.trace:
            raise ValidationError("a theta sweep needs --trace")
        trace = io.load_trace(args.trace)
        values = sorted(_theta(v) for v in args.values)
        for v in values:
            t0 = time.perf_counter()
            rep = _timeline(inst, trace, "adaptive", v, args)
            wall = (time.perf_counter() - t0) * 1e3
            rows.append({"parameter": "theta", "value": v, "final_cost": rep.mean_cost(), "iterations": "",
                         "glad_s_invocations": rep.glad_s_invocations, "wall_ms": wall})
    _write_rows(args.out, ["parameter", "value", "final_cost", "iterations", "glad_s_invocations", "wall_ms"], rows)
    _write_manifest(args.out, {"experiment": "sweep", "args": vars(args), "seed": args.seed,
                               "instance_sha256": _file_hash(args.instance), "rows": rows})
    for r in rows:
        print(f"{r['parameter']}={r['value']}: cost {r['final_cost']:.6f}")
    return EXIT_OK


def cmd_validate(args):
    inst = io.load_instance(args.instance)
    print(f"instance ok: {inst.n_vertices} vertices, {inst.graph.n_links} links, {inst.n_servers} servers")
    if args.layout:
        layout = io.load_layout(args.layout, inst)
        print(f"layout ok: total {total_cost(layout, inst).total:.6f}")
    if args.trace:
        from .dynamic import advance_instance

        cur = inst
        trace = io.load_trace(args.trace)
        for slot in trace:
            cur = advance_instance(cur, slot.events)
        print(f"trace ok: {len(trace)} slots, final graph {cur.n_vertices} vertices, {cur.graph.n_links} links")
    return EXIT_OK


def _common(p):
    p.add_argument("--R", type=_r_value, default=3, help="consecutive rejections before stopping, or 'exhaustive'")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--init", choices=("random", "upload_first"), default="random")
    p.add_argument("--max-iterations", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="glad", description="GNN layout placement over edge servers")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="synthesise an instance from a JSON config")
    p.add_argument("config")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.add_argument("--trace-out", help="also write a churn trace (needs a 'churn' section in the config)")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("trace", help="generate a churn trace for an instance")
    p.add_argument("instance")
    p.add_argument("--out", required=True)
    p.add_argument("--link-pct", type=float, default=0.01)
    p.add_argument("--vertex-pct", type=float, default=0.0)
    p.add_argument("--slots", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--upload-factor", type=float, default=10.0)
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("optimize", help="compute a layout for an instance")
    p.add_argument("instance")
    p.add_argument("--algo", choices=("glad-s", "greedy", "random", "oracle"), default="glad-s")
    p.add_argument("--out", required=True, help="layout JSON")
    p.add_argument("--report", help="cost CSV (default: <out>.csv)")
    p.add_argument("--log", help="iteration CSV for glad-s (default: <out>.iterations.csv)")
    p.add_argument("--dump-dimacs", help="write the first auxiliary flow network in DIMACS format")
    p.add_argument("--max-states", type=int, default=DEFAULT_MAX_STATES)
    _common(p)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("evolve", help="run a policy over a churn trace")
    p.add_argument("instance")
    p.add_argument("trace")
    p.add_argument("--policy", choices=tuple(POLICY_NAMES), default="adaptive")
    p.add_argument("--theta", type=_theta, default=math.inf)
    p.add_argument("--out", required=True)
    _common(p)
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("sweep", help="sweep R (static) or theta (adaptive timeline)")
    p.add_argument("instance")
    p.add_argument("--parameter", choices=("R", "theta"), required=True)
    p.add_argument("--values", nargs="+", required=True)
    p.add_argument("--trace")
    p.add_argument("--out", required=True)
    _common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("validate", help="check instance, layout and trace files")
    p.add_argument("instance")
    p.add_argument("--layout")
    p.add_argument("--trace")
    p.set_defaults(func=cmd_validate)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UnreachablePair, PairNotConnected, NoConnectedPairs) as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except TooLarge as exc:
        print(f"too large: {exc}", file=sys.stderr)
        return EXIT_TOO_LARGE
    except (ValidationError, OSError, json.JSONDecodeError, argparse.ArgumentTypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
