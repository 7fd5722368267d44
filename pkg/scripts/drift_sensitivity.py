"""Sweep the generator's acceptance probabilities and measure the AHT gain after drift.

For each (favored, unfavored) pair and seed, prints post-drift avg F-measure of
clustering HT and AHT and counts seeds where AHT leads by at least --margin.
"""
import argparse
import itertools

from incppm.drift_gen import ClaimProcessConfig, generate_drift1
from incppm.evaluation import run_scenario3
from incppm.ltl import parse_formula
from incppm.pipelines import PipelineConfig

PHI = parse_formula('F("Accept Claim")')


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--cases", type=int, default=2000)
    ap.add_argument("--seeds", type=int, default=5)
    ap.add_argument("--margin", type=float, default=0.05)
    ap.add_argument("--favored", type=float, nargs="+", default=[0.8, 0.9])
    ap.add_argument("--unfavored", type=float, nargs="+", default=[0.4, 0.2, 0.1])
    args = ap.parse_args()

    half = args.cases // 2
    for fav, unfav in itertools.product(args.favored, args.unfavored):
        wins, rows = 0, []
        for seed in range(args.seeds):
            g = generate_drift1(ClaimProcessConfig(n_cases_baseline=half, n_cases_drift=args.cases - half,
                                                   seed=seed, accept_favored=fav, accept_unfavored=unfav))
            r = run_scenario3(g.log, PHI, PipelineConfig(seed=seed), g.drift_index, approaches=("clustering",))
            ht = r.results["clustering/ht"]["post_drift"]["avg_f_measure"]
            aht = r.results["clustering/aht"]["post_drift"]["avg_f_measure"]
            wins += aht >= ht + args.margin
            rows.append(f"{ht:.3f}/{aht:.3f}")
        print(f"favored={fav:.2f} unfavored={unfav:.2f}  wins={wins}/{args.seeds}  ht/aht: {' '.join(rows)}")


if __name__ == "__main__":
    main()
