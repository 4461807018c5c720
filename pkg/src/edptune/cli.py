"""Command-line frontend: ``edptune gen|simulate|sweep|plan|train|run|report|replay``.

Every command writes its data file plus a JSON summary that embeds a run
manifest (parameters, input paths and their SHA-256). ``replay`` re-executes
a manifest and reproduces the outputs byte-for-byte.

Exit codes: 0 success, 1 usage error, 2 input validation error,
3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
from pathlib import Path

from edptune import __version__
from edptune.autotune import DEDUPE_EPS, load_model, run_production, save_model, train
from edptune.machine import MachineModel, ModelError, load_machine, load_region
from edptune.metrics import Measurement, check_weight, edp, improvement
from edptune.simulate import (
    ProcessConfig,
    SimulationResult,
    check_invariants,
    read_schedule,
    simulate,
    uniform_schedule,
    write_schedule,
    write_slices,
    write_summary,
)
from edptune.tuner_dynamic import default_reference, plan_trace
from edptune.tuner_static import reference_config, sweep, write_sweep
from edptune.workload import GeneratorParams, WorkloadTrace, generate, read_trace, write_trace

EXIT_USAGE, EXIT_INPUT, EXIT_INVARIANT = 1, 2, 3

# argument names holding input file paths
INPUT_ARGS = ("machine", "region", "trace", "schedule", "model", "summaries")


class InvariantViolation(RuntimeError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def sha256_file(path: str | Path) -> str:
    try:
        return hashlib.sha256(Path(path).read_bytes()).hexdigest()
    except FileNotFoundError as exc:
        raise ModelError(f"file not found: {path}") from exc


def manifest(args: argparse.Namespace) -> dict:
    params = {k: v for k, v in sorted(vars(args).items()) if k != "func"}
    hashes = {}
    for name in INPUT_ARGS:
        value = params.get(name)
        if value is None:
            continue
        if isinstance(value, list):
            for i, path in enumerate(value):
                hashes[f"{name}[{i}]"] = sha256_file(path)
        else:
            hashes[name] = sha256_file(value)
    return {"tool": "edptune", "version": __version__, "args": params, "input_sha256": hashes}


def _summary_path(args) -> str:
    return args.summary if args.summary else f"{args.out}.summary.json"


def _verify(m: MachineModel, res: SimulationResult) -> None:
    bad = check_invariants(m, res)
    if bad:
        raise InvariantViolation("; ".join(bad))


def _reference(args, m, r, trace) -> ProcessConfig:
    if args.ref_pstate is None and args.ref_cores is None:
        return default_reference(m, r, trace, args.weight)
    cfg = ProcessConfig(
        m.fastest if args.ref_pstate is None else args.ref_pstate,
        m.max_cores if args.ref_cores is None else args.ref_cores,
    )
    cfg.check(m)
    return cfg


def _run_summary(m, res: SimulationResult, args, **extra) -> dict:
    _verify(m, res)
    out = res.summary(args.weight)
    out.update(extra)
    out["manifest"] = manifest(args)
    return out


def cmd_gen(args) -> int:
    params = GeneratorParams(
        n_steps=args.steps,
        n_procs=args.procs,
        initial_workload=args.initial,
        drift=args.drift,
        min_factor=args.min_factor,
        max_factor=args.max_factor,
        seed=args.seed,
    )
    trace = generate(params)
    write_trace(trace, args.out)
    summary = {
        "n_steps": trace.n_steps,
        "n_procs": trace.n_procs,
        "mean_imbalance": trace.mean_imbalance(),
        "manifest": manifest(args),
    }
    write_summary(summary, _summary_path(args))
    print(f"n_steps={trace.n_steps} n_procs={trace.n_procs} "
          f"mean_imbalance={summary['mean_imbalance']:.4f}")
    return 0


def _load_mrt(args):
    return load_machine(args.machine), load_region(args.region), read_trace(args.trace)


def cmd_simulate(args) -> int:
    m, r, trace = _load_mrt(args)
    if args.schedule:
        sched = read_schedule(m, args.schedule)
    else:
        sched = uniform_schedule(trace, reference_config(m))
    res = simulate(m, r, trace, sched)
    write_summary(_run_summary(m, res, args), args.out)
    if args.slices:
        write_slices(m, res, args.slices)
    print(f"E={res.total_energy:.6g} J T={res.total_time:.6g} s EDP(w={args.weight})={res.edp(args.weight):.6g}")
    return 0


def cmd_sweep(args) -> int:
    m, r, trace = _load_mrt(args)
    result = sweep(m, r, trace, args.weight)
    write_sweep(m, result, args.out)
    best = result.best_row
    summary = {
        "total_energy_j": best.energy,
        "total_time_s": best.time,
        "edp": best.edp,
        "weight": args.weight,
        "n_steps": trace.n_steps,
        "n_procs": trace.n_procs,
        "best": {"f_ghz": m.pstates[best.config.pstate].frequency, "cores": best.config.cores},
        "manifest": manifest(args),
    }
    write_summary(summary, _summary_path(args))
    print(f"best f={m.pstates[best.config.pstate].frequency} GHz cores={best.config.cores} "
          f"EDP={best.edp:.6g}")
    return 0


def cmd_plan(args) -> int:
    m, r, trace = _load_mrt(args)
    ref = _reference(args, m, r, trace)
    plan = plan_trace(m, r, trace, ref)
    write_schedule(m, plan.schedule, args.out)
    res = simulate(m, r, trace, plan.schedule)
    ref_info = {"f_ghz": m.pstates[ref.pstate].frequency, "cores": ref.cores}
    write_summary(_run_summary(m, res, args, reference=ref_info), _summary_path(args))
    print(f"planned {trace.n_steps} steps; E={res.total_energy:.6g} J T={res.total_time:.6g} s")
    return 0


def cmd_train(args) -> int:
    m, r = load_machine(args.machine), load_region(args.region)
    traces = [read_trace(p) for p in args.trace]
    if len({t.n_procs for t in traces}) != 1:
        raise ModelError("training traces must share n_procs")
    joined = WorkloadTrace(tuple(row for t in traces for row in t.workloads))
    ref = _reference(args, m, r, joined)
    model = train(m, r, traces, ref, args.weight, args.dedupe_eps)
    save_model(model, args.out)
    summary = {
        "n_entries": len(model.entries),
        "n_procs": model.n_procs,
        "weight": args.weight,
        "fingerprint": model.fingerprint,
        "manifest": manifest(args),
    }
    write_summary(summary, _summary_path(args))
    print(f"trained {len(model.entries)} situations from {sum(t.n_steps for t in traces)} steps")
    return 0


def cmd_run(args) -> int:
    m, r, trace = _load_mrt(args)
    model = load_model(args.model, m, r)
    res = run_production(m, r, trace, model)
    write_summary(_run_summary(m, res, args), args.out)
    if args.slices:
        write_slices(m, res, args.slices)
    print(f"E={res.total_energy:.6g} J T={res.total_time:.6g} s EDP(w={args.weight})={res.edp(args.weight):.6g}")
    return 0


def _load_summary(path: str) -> dict:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise ModelError(f"file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ModelError(f"{path}: invalid JSON ({exc})") from exc
    if "total_energy_j" not in data or "manifest" not in data:
        raise ModelError(f"{path}: not a run summary")
    return data


def cmd_report(args) -> int:
    if len(args.summaries) < 2:
        raise ModelError("report needs at least two summary files")
    runs = [_load_summary(p) for p in args.summaries]
    base_hashes = runs[0]["manifest"]["input_sha256"]
    mismatched = []
    for path, run in zip(args.summaries[1:], runs[1:]):
        hashes = run["manifest"]["input_sha256"]
        for key in ("machine", "region", "trace", "trace[0]"):
            if key in base_hashes and key in hashes and base_hashes[key] != hashes[key]:
                mismatched.append(f"{path}: {key} {hashes[key][:12]} != {base_hashes[key][:12]}")
    if mismatched:
        raise ModelError("incompatible manifests: " + "; ".join(mismatched))

    w = check_weight(runs[0]["weight"] if args.weight is None else args.weight)
    base = Measurement(runs[0]["total_energy_j"], runs[0]["total_time_s"])
    rows, text = [], [f"model-internal comparison, baseline={args.summaries[0]}, EDP weight w={w}"]
    for path, run in zip(args.summaries, runs):
        cand = Measurement(run["total_energy_j"], run["total_time_s"])
        imp = improvement(base, cand, w)
        rows.append((path, cand.energy, cand.time, edp(cand, w),
                     imp.energy_saving, imp.time_change, imp.edp_saving))
        text.append(f"{path}: energy saving {imp.energy_saving:+.2%}, "
                    f"time change {imp.time_change:+.2%}, EDP saving {imp.edp_saving:+.2%}")
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("run", "energy_j", "time_s", "edp", "energy_saving", "time_change", "edp_saving"))
        for row in rows:
            writer.writerow((row[0], *map(repr, row[1:])))
    body = "\n".join(text) + "\n"
    if args.text:
        Path(args.text).write_text(body, encoding="utf-8")
    write_summary({"weight": w, "n_runs": len(runs), "manifest": manifest(args)}, _summary_path(args))
    sys.stdout.write(body)
    return 0


def cmd_replay(args) -> int:
    data = json.loads(Path(args.file).read_text(encoding="utf-8"))
    try:
        recorded = data["manifest"]["args"]
    except (KeyError, TypeError) as exc:
        raise ModelError(f"{args.file}: no manifest") from exc
    ns = argparse.Namespace(**recorded)
    ns.func = COMMANDS[recorded["command"]]
    return ns.func(ns)


def _add_common(p, trace=True):
    p.add_argument("--machine", required=True, help="machine model JSON")
    p.add_argument("--region", required=True, help="region model JSON")
    if trace:
        p.add_argument("--trace", required=True, help="trace CSV")
    p.add_argument("--weight", type=int, default=1, help="EDP weight w (default 1)")
    p.add_argument("--out", required=True)


def _add_reference(p):
    p.add_argument("--ref-pstate", type=int, default=None,
                   help="reference P-state index (default: static-tuning winner)")
    p.add_argument("--ref-cores", type=int, default=None)


def _add_summary(p):
    p.add_argument("--summary", default=None, help="summary JSON (default <out>.summary.json)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="edptune", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen", help="generate a workload trace")
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--procs", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--drift", type=float, default=0.05)
    p.add_argument("--initial", type=float, default=1000.0)
    p.add_argument("--min-factor", type=float, default=0.5)
    p.add_argument("--max-factor", type=float, default=2.0)
    p.add_argument("--out", required=True)
    _add_summary(p)

    p = sub.add_parser("simulate", help="simulate a schedule (default: fastest uniform)")
    _add_common(p)
    p.add_argument("--schedule", default=None, help="plan CSV")
    p.add_argument("--slices", default=None, help="per-slice CSV output")

    p = sub.add_parser("sweep", help="static tuning sweep")
    _add_common(p)
    _add_summary(p)

    p = sub.add_parser("plan", help="dynamic per-step plan")
    _add_common(p)
    _add_reference(p)
    _add_summary(p)

    p = sub.add_parser("train", help="design-time training of a tuning model")
    p.add_argument("--machine", required=True)
    p.add_argument("--region", required=True)
    p.add_argument("--trace", required=True, action="append", help="training trace (repeatable)")
    p.add_argument("--weight", type=int, default=1)
    p.add_argument("--dedupe-eps", type=float, default=DEDUPE_EPS)
    p.add_argument("--out", required=True)
    _add_reference(p)
    _add_summary(p)

    p = sub.add_parser("run", help="production run with a tuning model")
    _add_common(p)
    p.add_argument("--model", required=True)
    p.add_argument("--slices", default=None)

    p = sub.add_parser("report", help="compare run summaries (first = baseline)")
    p.add_argument("summaries", nargs="+")
    p.add_argument("--weight", type=int, default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--text", default=None)
    _add_summary(p)

    p = sub.add_parser("replay", help="re-execute the manifest embedded in a summary")
    p.add_argument("file")
    return parser


COMMANDS = {
    "gen": cmd_gen,
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "plan": cmd_plan,
    "train": cmd_train,
    "run": cmd_run,
    "report": cmd_report,
    "replay": cmd_replay,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    args.func = COMMANDS[args.command]
    try:
        if getattr(args, "weight", None) is not None:
            check_weight(args.weight)
        return args.func(args)
    except InvariantViolation as exc:
        print(f"edptune: invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (ModelError, OSError) as exc:
        print(f"edptune: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
