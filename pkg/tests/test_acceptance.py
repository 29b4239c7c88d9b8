"""Acceptance suite: one test per release criterion, with a PASS/FAIL line
printed per criterion (run with ``pytest tests/test_acceptance.py -v -s``).

Budgets are generous on a laptop-class machine; the heavy criteria
(learning pipeline, SA benefit, field replication) each train the full
pipeline at stock hyperparameters.
"""

import json
import statistics
import time
from contextlib import contextmanager

import numpy as np
import pytest
from click.testing import CliRunner

from tbmopt.bundle import load_surface, save_model, save_surface, train_model_bundle
from tbmopt.cli import main as tbm_cli
from tbmopt.dataio import emit_records_csv, parse_records_csv
from tbmopt.decision import CostParams, GridSpec, cost, cost_surface, grid_points, optimize
from tbmopt.domain import MachineSetting, RockMassState
from tbmopt.preprocess import fit_preprocessor, transform_many
from tbmopt.sabpnn import (check_gradient, cross_validate, default_train_setup, evaluate,
                           fit_target_scaler, gd_train, random_network, sa_init)
from tbmopt.synth import (GroundTruth, ccr_scenario, ef_truth, generate_dataset,
                          pr_truth, prcr_scenario)


@contextmanager
def criterion(name: str, budget_s: float):
    start = time.time()
    try:
        yield
    except BaseException:
        print(f"[ACCEPTANCE] FAIL  {name}  ({time.time() - start:.1f}s)")
        raise
    elapsed = time.time() - start
    status = "PASS" if elapsed <= budget_s else "PASS (over budget)"
    print(f"[ACCEPTANCE] {status}  {name}  ({elapsed:.1f}s / budget {budget_s:.0f}s)")
    assert elapsed <= budget_s, f"{name}: {elapsed:.1f}s exceeded {budget_s:.0f}s budget"


def test_cost_model_golden_values():
    with criterion("cost-model golden values", budget_s=1.0):
        for pr, ef, want in [(60.42, 38.63, 10532.50), (68.04, 45.21, 9323.98),
                             (70.74, 40.22, 9089.32), (68.98, 32.03, 9515.31)]:
            total, cutter, period = cost(pr, ef, CostParams())
            assert total == pytest.approx(want, abs=1.0), (pr, ef)
            assert total == cutter + period


def test_grid_census():
    with criterion("grid census", budget_s=1.0):
        points = grid_points(GridSpec())
        assert len(points) == 2187
        assert (points[0].th, points[0].tor) == (2000.0, 200.0)
        assert (points[-1].th, points[-1].tor) == (10000.0, 1500.0)


def test_optimizer_oracle_equivalence():
    with criterion("optimizer oracle equivalence (20 random rock states)", budget_s=5.0):
        params, grid = CostParams(), GridSpec()
        rng = np.random.default_rng(2026)
        for _ in range(20):
            rock = RockMassState(src=int(rng.choice([2, 3, 4, 5])),
                                 ucs=rng.uniform(31, 149), rqd=rng.uniform(5, 93),
                                 cai=rng.uniform(2.2, 5.3), q=rng.uniform(44, 95),
                                 ci=rng.uniform(230, 590), m=rng.uniform(1.4, 36),
                                 mgt=int(rng.choice([1, 2, 3, 4])))
            rec = optimize(rock, pr_truth, ef_truth, params, grid)
            # independent exhaustive double loop
            best = None
            th = grid.th_min
            while th <= grid.th_max + 1e-9:
                tor = grid.tor_min
                while tor <= grid.tor_max + 1e-9:
                    setting = MachineSetting(th, tor)
                    total = cost(pr_truth(rock, setting), ef_truth(rock, setting),
                                 params).total
                    if best is None or total < best[0] - 1e-15:
                        best = (total, th, tor)
                    tor += grid.tor_step
                th += grid.th_step
            assert (rec.th, rec.tor) == (best[1], best[2])
            assert rec.cost == pytest.approx(best[0], abs=1e-9)


def _pipeline_metrics(target: str, seed: int, gt: GroundTruth):
    scenario = prcr_scenario(seed) if target == "pr" else ccr_scenario(seed)
    folds = 3 if target == "pr" else 4
    train, test = generate_dataset(scenario, gt)
    cfg, arch = default_train_setup(target, seed=seed)
    cv = cross_validate(train, folds, cfg, arch, target)
    model = cv.selected_model
    ordered = sorted(test, key=lambda r: r.chainage)
    truth = [getattr(r, target) for r in ordered]
    pred = [model.predict(r.rock, r.machine) for r in ordered]
    return evaluate(pred, truth, ordered=True)


def test_learning_pipeline():
    with criterion("learning pipeline (5 seeds, both targets)", budget_s=300.0):
        gt = GroundTruth(noise_sigma_pct=8.0)
        for target in ("pr", "ef"):
            reports = [_pipeline_metrics(target, seed, gt) for seed in range(5)]
            mape = statistics.median(r.mape for r in reports)
            trend = statistics.median(r.trend_accuracy for r in reports)
            print(f"    {target}: median test MAPE {mape:.2f}% "
                  f"(seeds {[round(r.mape, 1) for r in reports]}), "
                  f"median trend {trend:.1f}%")
            assert mape <= 20.0, f"{target} median MAPE {mape:.2f}% > 20%"
            assert trend >= 70.0, f"{target} median trend {trend:.1f}% < 70%"


def test_sa_initialization_benefit():
    with criterion("SA initialization benefit (10 paired seeds)", budget_s=600.0):
        gt = GroundTruth(noise_sigma_pct=8.0)
        train, _ = generate_dataset(prcr_scenario(seed=0), gt)
        pre = fit_preprocessor(train)
        X = transform_many(pre, train)
        y = np.array([r.pr for r in train])
        scaler = fit_target_scaler(y)
        y_n = scaler.normalize(y)
        energy_scale = scaler.std ** 2
        sa_final, random_final = [], []
        for seed in range(10):
            cfg, arch = default_train_setup("pr", seed=seed)
            net_sa = sa_init(X, y_n, cfg, arch, energy_scale=energy_scale)
            _, trace_sa = gd_train(net_sa, X, y_n, cfg)
            net_rand = random_network(arch, np.random.default_rng(seed))
            _, trace_rand = gd_train(net_rand, X, y_n, cfg)
            sa_final.append(trace_sa[-1])
            random_final.append(trace_rand[-1])
        med_sa = statistics.median(sa_final)
        med_rand = statistics.median(random_final)
        print(f"    median final training MSE: SA {med_sa:.4f} vs random {med_rand:.4f}")
        assert med_sa <= med_rand


def test_gradient_correctness():
    with criterion("gradient correctness (20 random instances)", budget_s=10.0):
        rng = np.random.default_rng(99)
        from tbmopt.sabpnn import NetworkArch
        for _ in range(20):
            arch = NetworkArch(int(rng.integers(2, 12)), int(rng.integers(2, 12)))
            net = random_network(arch, rng)
            X = rng.normal(size=(int(rng.integers(4, 24)), arch.input_dim))
            target = rng.normal(size=len(X))
            assert check_gradient(net, X, target) < 1e-6


def test_field_test_replication():
    with criterion("field-test replication (tbm replicate --seeds 5)", budget_s=600.0):
        runner = CliRunner()
        result = runner.invoke(tbm_cli, ["replicate", "--seeds", "5", "--json"])
        assert result.exit_code == 0, result.output
        report = json.loads(result.output)
        pr_med = report["median_avg_pr_change_pct"]
        ef_med = report["median_avg_ef_change_pct"]
        cost_med = report["median_avg_cost_change_pct"]
        print(f"    medians over 5 seeds: PR {pr_med:+.2f}%  Ef {ef_med:+.2f}%  "
              f"cost reduction {cost_med:+.2f}%")
        assert cost_med >= 3.0, f"median cost reduction {cost_med:.2f}% < 3%"
        assert pr_med >= 0.0, f"median PR change {pr_med:.2f}% negative"
        assert ef_med >= 0.0, f"median Ef change {ef_med:.2f}% negative"


def test_determinism_and_round_trips(tmp_path):
    with criterion("determinism and serialization round trips", budget_s=60.0):
        gt = GroundTruth(noise_sigma_pct=8.0)
        train, _ = generate_dataset(prcr_scenario(seed=1, n_train=60, n_test=0), gt)

        # equal seeds -> bit-identical serialized models
        kwargs = dict(folds=3, seed=1, created_at="2026-01-01T00:00:00Z")
        bundle_a = train_model_bundle(train, "pr", **kwargs)
        bundle_b = train_model_bundle(train, "pr", **kwargs)
        assert save_model(bundle_a) == save_model(bundle_b)

        # equal seeds -> identical recommendations and surfaces
        rock = train[0].rock
        surf_a = cost_surface(rock, bundle_a.predict, ef_truth)
        surf_b = cost_surface(rock, bundle_b.predict, ef_truth)
        assert save_surface(surf_a) == save_surface(surf_b)
        rec_a = optimize(rock, bundle_a.predict, ef_truth)
        rec_b = optimize(rock, bundle_b.predict, ef_truth)
        assert rec_a == rec_b

        # serialization round trips exactly
        model_bytes = save_model(bundle_a)
        from tbmopt.bundle import load_model
        assert save_model(load_model(model_bytes)) == model_bytes
        surf_bytes = save_surface(surf_a)
        assert save_surface(load_surface(surf_bytes)) == surf_bytes
        csv_text = emit_records_csv(train)
        assert parse_records_csv(csv_text) == train
        assert emit_records_csv(parse_records_csv(csv_text)) == csv_text
