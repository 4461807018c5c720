"""Reference energy-to-solution saving of dynamic tuning on the seed-42 imbalance fixture.

Recomputes everything with plain arithmetic (only the trace comes from the
package generator): the static-tuning winner at w=1, the all-reference
baseline run and the per-step plan with idle-power-aware slack filling. The
printed saving is frozen into tests/test_acceptance.py.
"""

import json
from pathlib import Path

from edptune.workload import GeneratorParams, generate

ROOT = Path(__file__).resolve().parent.parent

machine = json.loads((ROOT / "fixtures" / "fig1_machine.json").read_text())
region = json.loads((ROOT / "fixtures" / "compute_bound_region.json").read_text())
PST = [(p["ghz"], p["volt"]) for p in machine["pstates"]]
P_ST, COEFF = machine["static_power_w"], machine["dyn_coeff"]
CYCLES = region["compute_cost_cycles"]


def t_of(w, i):
    return w * (CYCLES / (PST[i][0] * 1e9))


def p_of(i):
    return P_ST + COEFF * PST[i][1] ** 2 * PST[i][0]


def run(rows, cfg_rows):
    energy = time = 0.0
    for loads, cfgs in zip(rows, cfg_rows):
        ts = [t_of(w, i) for w, i in zip(loads, cfgs)]
        span = max(ts)
        time += span
        energy += sum(p_of(i) * t + P_ST * (span - t) for t, i in zip(ts, cfgs))
    return energy, time


def main():
    rows = generate(GeneratorParams(100, 4, 1000.0, 0.05, 0.5, 2.0, 42)).workloads
    n = len(PST)
    edps = []
    for i in range(n):
        e, t = run(rows, [[i] * 4] * len(rows))
        edps.append(e * t)
    ref = min(range(n), key=lambda i: (edps[i], i))

    plan = []
    for loads in rows:
        crit = loads.index(max(loads))
        finish = t_of(loads[crit], ref)
        cfgs = []
        for p, w in enumerate(loads):
            if p == crit:
                cfgs.append(ref)
                continue
            costs = [(p_of(i) * t_of(w, i) + P_ST * (finish - t_of(w, i)), i)
                     for i in range(n) if t_of(w, i) <= finish]
            cfgs.append(min(costs)[1])
        plan.append(cfgs)

    e_base, t_base = run(rows, [[ref] * 4] * len(rows))
    e_dyn, t_dyn = run(rows, plan)
    imb = sum(max(r) / (sum(r) / len(r)) for r in rows) / len(rows)
    print(f"reference_pstate={ref} ({PST[ref][0]} GHz)")
    print(f"mean_imbalance={imb!r}")
    print(f"baseline E={e_base!r} T={t_base!r}")
    print(f"dynamic  E={e_dyn!r} T={t_dyn!r}")
    print(f"energy_saving={1 - e_dyn / e_base!r}")
    print(f"time_change={t_dyn / t_base - 1!r}")


if __name__ == "__main__":
    main()
