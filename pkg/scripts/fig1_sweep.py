"""Static-tuning sweep on the Fig.-1-shape fixture machine; writes plot data for relative energy/time.

    python scripts/fig1_sweep.py [--weight 0] [--out fig1_sweep.csv]
"""

import argparse
from pathlib import Path

from edptune.machine import load_machine, load_region
from edptune.tuner_static import sweep, write_sweep
from edptune.workload import WorkloadTrace

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--weight", type=int, default=0)
    ap.add_argument("--out", default="fig1_sweep.csv")
    args = ap.parse_args()

    m = load_machine(FIXTURES / "fig1_machine.json")
    r = load_region(FIXTURES / "compute_bound_region.json")
    res = sweep(m, r, WorkloadTrace(((1000.0,),)), args.weight)
    write_sweep(m, res, args.out)
    print(f"{'f_ghz':>6} {'rel_energy':>10} {'rel_time':>9} {'edp':>10}")
    for i, row in enumerate(res.rows):
        mark = "  <- best" if i == res.best else ""
        print(f"{m.pstates[row.config.pstate].frequency:6.2f} {row.rel_energy:10.4f} "
              f"{row.rel_time:9.4f} {row.edp:10.4f}{mark}")


if __name__ == "__main__":
    main()
