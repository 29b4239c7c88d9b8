#!/usr/bin/env python3
"""Paired-seed comparison: SA-chosen initialization vs plain random init.

Trains the penetration-rate surrogate from both starting points on the
same synthetic dataset and prints the final training MSE per seed plus
medians. Mirrors the claim that annealing the initial weights improves
the trained network.

Usage: python scripts/sa_benefit_experiment.py [--seeds N] [--noise PCT]
"""

import argparse
import statistics

import numpy as np

from tbmopt.preprocess import fit_preprocessor, transform_many
from tbmopt.sabpnn import (default_train_setup, fit_target_scaler, gd_train,
                           random_network, sa_init)
from tbmopt.synth import GroundTruth, generate_dataset, prcr_scenario


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seeds", type=int, default=10)
    parser.add_argument("--noise", type=float, default=8.0)
    args = parser.parse_args()

    gt = GroundTruth(noise_sigma_pct=args.noise)
    train, _ = generate_dataset(prcr_scenario(seed=0), gt)
    pre = fit_preprocessor(train)
    X = transform_many(pre, train)
    y = np.array([r.pr for r in train])
    scaler = fit_target_scaler(y)
    y_n = scaler.normalize(y)

    sa_final, rand_final = [], []
    print(f"{'seed':>4}  {'SA init -> GD':>14}  {'random -> GD':>13}")
    for seed in range(args.seeds):
        cfg, arch = default_train_setup("pr", seed=seed)
        net_sa = sa_init(X, y_n, cfg, arch, energy_scale=scaler.std ** 2)
        _, trace_sa = gd_train(net_sa, X, y_n, cfg)
        net_rand = random_network(arch, np.random.default_rng(seed))
        _, trace_rand = gd_train(net_rand, X, y_n, cfg)
        sa_final.append(trace_sa[-1])
        rand_final.append(trace_rand[-1])
        print(f"{seed:>4}  {trace_sa[-1]:>14.5f}  {trace_rand[-1]:>13.5f}")
    print(f"\nmedian final training MSE: SA {statistics.median(sa_final):.5f}  "
          f"random {statistics.median(rand_final):.5f}")


if __name__ == "__main__":
    main()
