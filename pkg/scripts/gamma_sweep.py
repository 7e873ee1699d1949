"""Sensitivity of AntiJam throughput to the step factor gamma (and optionally p_hat)."""

from antijam_sim import AdversaryConfig, SimConfig, Strategy
from antijam_sim.cli import SweepSpec, run_sweep, write_rows

from _common import parser, setup, summarize, write_csv


def main():
    p = parser(__doc__)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--axis", choices=("gamma", "p_hat"), default="gamma")
    p.add_argument("--values", default="0.05,0.1,0.2,0.3,0.4")
    args = p.parse_args()
    setup(args)
    base = SimConfig(n=args.n, steps=args.steps, adversary=AdversaryConfig(strategy=Strategy.BUSY_DET))
    values = [float(v) for v in args.values.split(",")]
    rows = run_sweep(SweepSpec(base, args.axis, values, args.reps, args.seed), workers=args.workers)
    write_rows(rows, args.out / f"{args.axis}_sweep_runs.csv")
    write_csv(args.out / f"{args.axis}_sweep.csv", (args.axis, "throughput_mean", "throughput_std"),
              [(k, m, s) for k, (m, s) in summarize(rows, "value").items()])


if __name__ == "__main__":
    main()
