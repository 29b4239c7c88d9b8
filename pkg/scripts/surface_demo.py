#!/usr/bin/env python3
"""End-to-end demo: synthesize data, train both surrogates, write the cost
surface for the field rock state and (optionally) a heatmap PNG.

Usage: python scripts/surface_demo.py [--seed S] [--mgt {2,3,4}] [--png FILE]
"""

import argparse
from pathlib import Path

from tbmopt.bundle import save_surface
from tbmopt.decision import cost_surface, optimize
from tbmopt.synth import GroundTruth, field_rock_state, train_field_surrogates


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--mgt", type=int, default=2, choices=(2, 3, 4))
    parser.add_argument("--out", default="surface.json")
    parser.add_argument("--png", default=None)
    args = parser.parse_args()

    gt = GroundTruth(noise_sigma_pct=8.0)
    print("training surrogates (stock hyperparameters)...")
    pr_model, ef_model, pr_cv, ef_cv = train_field_surrogates(gt, seed=args.seed)
    print(f"  pr model: fold MAPEs {[round(r.mape, 1) for r in pr_cv.reports]}")
    print(f"  ef model: fold MAPEs {[round(r.mape, 1) for r in ef_cv.reports]}")

    rock = field_rock_state(args.mgt)
    surface = cost_surface(rock, pr_model.predict, ef_model.predict)
    rec = optimize(rock, pr_model.predict, ef_model.predict)
    Path(args.out).write_bytes(save_surface(surface))
    print(f"optimum: Th {rec.th:.0f} kN, Tor {rec.tor:.0f} kN*m, "
          f"predicted PR {rec.pr:.2f} mm/min, Ef {rec.ef:.2f} m^3/mm, "
          f"cost {rec.cost:.2f} RMB/m")
    print(f"wrote {args.out}")

    if args.png:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        fig, ax = plt.subplots(figsize=(7, 5))
        mesh = ax.pcolormesh(surface.tor_values, surface.th_values, surface.cost,
                             shading="nearest", cmap="viridis")
        i, j = surface.optimum
        ax.plot(surface.tor_values[j], surface.th_values[i], "ro", mfc="none",
                markersize=12, markeredgewidth=2, label="optimal cost")
        ax.set_xlabel("torque (kN*m)")
        ax.set_ylabel("thrust (kN)")
        ax.set_title(f"cost surface, muck geometry type {args.mgt}")
        fig.colorbar(mesh, label="cost (RMB/m)")
        ax.legend()
        fig.tight_layout()
        fig.savefig(args.png, dpi=130)
        print(f"wrote {args.png}")


if __name__ == "__main__":
    main()
