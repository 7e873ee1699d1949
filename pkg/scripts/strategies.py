"""AntiJam throughput under each jamming strategy at fixed n and epsilon."""

from antijam_sim import AdversaryConfig, SimConfig
from antijam_sim.cli import SweepSpec, run_sweep, write_rows

from _common import parser, setup, summarize, write_csv


def main():
    p = parser(__doc__, steps=200_000)
    p.add_argument("--n", type=int, default=500)
    p.add_argument("--epsilon", type=float, default=0.5)
    args = p.parse_args()
    setup(args)
    base = SimConfig(n=args.n, steps=args.steps, adversary=AdversaryConfig(epsilon=args.epsilon))
    spec = SweepSpec(base, "strategy", ("none", "busy-prob", "busy-det", "idle-det"), args.reps, args.seed)
    rows = run_sweep(spec, workers=args.workers)
    write_rows(rows, args.out / "strategies_runs.csv")
    write_csv(args.out / "strategies.csv", ("strategy", "throughput_mean", "throughput_std"),
              [(k, m, s) for k, (m, s) in summarize(rows, "value").items()])


if __name__ == "__main__":
    main()
