"""Throughput of AntiJam against BusyDet as the network grows, one curve per epsilon."""

from antijam_sim import AdversaryConfig, SimConfig, Strategy
from antijam_sim.cli import SweepSpec, run_sweep, write_rows

from _common import parser, setup, summarize, write_csv


def main():
    p = parser(__doc__)
    p.add_argument("--n", default="50,100,200,500,1000")
    p.add_argument("--epsilon", default="0.3,0.5")
    args = p.parse_args()
    setup(args)
    ns = [int(x) for x in args.n.split(",")]
    table, rows_all = [], []
    for eps in (float(x) for x in args.epsilon.split(",")):
        base = SimConfig(steps=args.steps, adversary=AdversaryConfig(epsilon=eps, strategy=Strategy.BUSY_DET))
        rows = run_sweep(SweepSpec(base, "n", ns, args.reps, args.seed), workers=args.workers)
        rows_all += rows
        for n, (m, s) in summarize(rows, "value").items():
            table.append((eps, n, m, s))
    write_rows(rows_all, args.out / "throughput_vs_n_runs.csv")
    write_csv(args.out / "throughput_vs_n.csv", ("epsilon", "n", "throughput_mean", "throughput_std"), table)


if __name__ == "__main__":
    main()
