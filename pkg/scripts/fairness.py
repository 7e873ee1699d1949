"""Per-node success histogram of one long AntiJam run."""

from antijam_sim import AdversaryConfig, SimConfig, Strategy, run
from antijam_sim.metrics import coefficient_of_variation, fairness_histogram, jain_index

from _common import parser, setup, write_csv


def main():
    p = parser(__doc__, reps=1)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--epsilon", type=float, default=0.5)
    p.add_argument("--bin", type=int, default=20)
    args = p.parse_args()
    setup(args)
    cfg = SimConfig(n=args.n, steps=args.steps, seed=args.seed,
                    adversary=AdversaryConfig(epsilon=args.epsilon, strategy=Strategy.BUSY_DET))
    trace = run(cfg)
    hist = fairness_histogram(trace, args.bin)
    write_csv(args.out / "fairness_histogram.csv", ("successes_from", "successes_to", "nodes"),
              [(lo, hi, c) for (lo, hi), c in sorted(hist.items())])
    print(f"jain index {jain_index(trace):.4f}, cv {coefficient_of_variation(trace):.4f}")


if __name__ == "__main__":
    main()
