"""AntiJam against the simplified 802.11 DCF baseline across jamming budgets."""

from antijam_sim import AdversaryConfig, Protocol, SimConfig, Strategy
from antijam_sim.cli import SweepSpec, run_sweep, write_rows

from _common import parser, setup, summarize, write_csv


def main():
    p = parser(__doc__, steps=100_000)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--epsilon", default="0.05,0.1,0.2,0.3,0.5,0.7,0.9")
    args = p.parse_args()
    setup(args)
    values = [float(x) for x in args.epsilon.split(",")]
    table, rows_all = [], []
    for protocol in Protocol:
        base = SimConfig(n=args.n, steps=args.steps, protocol=protocol,
                         adversary=AdversaryConfig(strategy=Strategy.BUSY_DET))
        rows = run_sweep(SweepSpec(base, "epsilon", values, args.reps, args.seed), workers=args.workers)
        rows_all += rows
        table += [(protocol.value, eps, m, s) for eps, (m, s) in summarize(rows, "value").items()]
    write_rows(rows_all, args.out / "dcf_comparison_runs.csv")
    write_csv(args.out / "dcf_comparison.csv", ("protocol", "epsilon", "throughput_mean", "throughput_std"), table)


if __name__ == "__main__":
    main()
