"""Compare un-tuned, static, dynamic and situation-matching tuning on a generated trace.

    python scripts/compare_tuners.py [--seed 42] [--weight 1] [--noise-seeds 20]

All savings are model-internal (fixture machine), not hardware measurements.
"""

import argparse
from pathlib import Path

import numpy as np

from edptune.autotune import run_production, train
from edptune.machine import load_machine, load_region
from edptune.metrics import improvement
from edptune.simulate import simulate, uniform_schedule
from edptune.tuner_dynamic import plan_trace
from edptune.tuner_static import reference_config, sweep
from edptune.workload import GeneratorParams, WorkloadTrace, generate

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--machine", default=str(FIXTURES / "fig1_machine.json"))
    ap.add_argument("--region", default=str(FIXTURES / "compute_bound_region.json"))
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--steps", type=int, default=100)
    ap.add_argument("--procs", type=int, default=4)
    ap.add_argument("--drift", type=float, default=0.05)
    ap.add_argument("--weight", type=int, default=1)
    ap.add_argument("--noise-seeds", type=int, default=20)
    args = ap.parse_args()

    m, r = load_machine(args.machine), load_region(args.region)
    trace = generate(GeneratorParams(args.steps, args.procs, 1000.0, args.drift, 0.5, 2.0, args.seed))
    print(f"mean imbalance {trace.mean_imbalance():.4f}")

    default = simulate(m, r, trace, uniform_schedule(trace, reference_config(m)))
    ref = sweep(m, r, trace, args.weight).best_config
    static = simulate(m, r, trace, uniform_schedule(trace, ref))
    dynamic = simulate(m, r, trace, plan_trace(m, r, trace, ref).schedule)
    model = train(m, r, trace, ref, args.weight)
    auto = run_production(m, r, trace, model)

    print(f"static reference: {m.pstates[ref.pstate].frequency} GHz x {ref.cores} cores; "
          f"model has {len(model.entries)} situations")
    for name, res in (("static", static), ("dynamic", dynamic), ("autotune", auto)):
        imp = improvement(default.measurement, res.measurement, args.weight)
        print(f"{name:>9} vs un-tuned: energy saving {imp.energy_saving:+.2%}  time change {imp.time_change:+.2%}  "
              f"EDP saving {imp.edp_saving:+.2%}")

    gaps = []
    for seed in range(args.noise_seeds):
        noise = np.random.default_rng(1000 + seed).uniform(0.95, 1.05, (trace.n_steps, trace.n_procs))
        noisy = WorkloadTrace.from_array(trace.as_array() * noise)
        got = run_production(m, r, noisy, model).edp(args.weight)
        oracle = simulate(m, r, noisy, plan_trace(m, r, noisy, ref).schedule).edp(args.weight)
        gaps.append(got / oracle - 1)
    if gaps:
        print(f"autotune vs per-step oracle on noisy traces: EDP gap min {min(gaps):+.4%} "
              f"max {max(gaps):+.4%}")


if __name__ == "__main__":
    main()
