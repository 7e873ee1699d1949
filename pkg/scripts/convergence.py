"""Cumulative transmit probability over time for several epsilons, plus band occupancy."""

import numpy as np

from antijam_sim import AdversaryConfig, SimConfig, Strategy, run
from antijam_sim.metrics import band_fraction, convergence_slot

from _common import parser, setup, write_csv


def main():
    p = parser(__doc__, steps=100_000, reps=1)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--epsilon", default="0.2,0.5,0.8")
    p.add_argument("--stride", type=int, default=100, help="keep every k-th slot in the series")
    args = p.parse_args()
    setup(args)
    series, summary = [], []
    for eps in (float(x) for x in args.epsilon.split(",")):
        cfg = SimConfig(n=args.n, steps=args.steps, seed=args.seed,
                        adversary=AdversaryConfig(epsilon=eps, strategy=Strategy.BUSY_DET))
        trace = run(cfg)
        cum = trace.cumulative_p
        for t in range(0, len(cum), args.stride):
            series.append((eps, t, cum[t]))
        summary.append((eps, convergence_slot(trace), band_fraction(trace, eps), float(np.mean(cum))))
    write_csv(args.out / "cumulative_p.csv", ("epsilon", "t", "cumulative_p"), series)
    write_csv(args.out / "convergence.csv", ("epsilon", "convergence_slot", "band_fraction", "mean_cumulative_p"),
              summary)


if __name__ == "__main__":
    main()
