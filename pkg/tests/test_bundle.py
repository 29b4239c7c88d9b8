import json

import numpy as np
import pytest

from tbmopt.bundle import (SCHEMA_VERSION, ModelBundle, canonical_json, load_model,
                           load_surface, save_model, save_surface, train_model_bundle)
from tbmopt.decision import cost_surface
from tbmopt.errors import BundleFormatError, UnsupportedSchemaError
from tbmopt.sabpnn import TrainConfig
from tbmopt.synth import GroundTruth, field_rock_state, generate_dataset, prcr_scenario


@pytest.fixture(scope="module")
def small_bundle():
    gt = GroundTruth(noise_sigma_pct=5.0)
    train, _ = generate_dataset(prcr_scenario(seed=30, n_train=36, n_test=0), gt)
    cfg = TrainConfig(learn_rate=0.1, gd_iterations=120, sa_initial_temp=10.0,
                      sa_drop_ratio=0.9, sa_inner_loops=5, sa_iterations=30, seed=30)
    return train_model_bundle(train, "pr", folds=3, seed=30, cfg=cfg,
                              created_at="2026-01-01T00:00:00Z"), train


def random_inputs(n=100, seed=0):
    rng = np.random.default_rng(seed)
    from tbmopt.domain import MachineSetting, RockMassState
    pairs = []
    for _ in range(n):
        rock = RockMassState(src=int(rng.choice([2, 3, 4, 5])), ucs=rng.uniform(31, 149),
                             rqd=rng.uniform(5, 93), cai=rng.uniform(2.2, 5.3),
                             q=rng.uniform(50, 95), ci=rng.uniform(258, 590),
                             m=rng.uniform(1.4, 30), mgt=int(rng.choice([1, 2, 3, 4])))
        pairs.append((rock, MachineSetting(rng.uniform(2106, 9127), rng.uniform(223, 1327))))
    return pairs


def test_canonical_json_is_sorted_and_17g():
    doc = {"b": 0.1, "a": [1.0, 2, None, True], "c": "x"}
    text = canonical_json(doc)
    assert text == '{"a":[1,2,null,true],"b":0.10000000000000001,"c":"x"}'
    assert json.loads(text) == {"a": [1, 2, None, True], "b": 0.1, "c": "x"}


def test_model_round_trip_reproduces_predictions(small_bundle):
    bundle, _ = small_bundle
    data = save_model(bundle)
    restored = load_model(data)
    for rock, machine in random_inputs(100, seed=1):
        assert restored.predict(rock, machine) == bundle.predict(rock, machine)


def test_model_serialization_is_stable(small_bundle):
    bundle, _ = small_bundle
    data = save_model(bundle)
    assert save_model(load_model(data)) == data  # byte-identical re-save


def test_truncated_model_file_rejected(small_bundle):
    bundle, _ = small_bundle
    data = save_model(bundle)
    with pytest.raises(BundleFormatError):
        load_model(data[: len(data) // 2])


def test_unsupported_schema_version(small_bundle):
    bundle, _ = small_bundle
    doc = json.loads(save_model(bundle))
    doc["schema_version"] = "0"
    with pytest.raises(UnsupportedSchemaError) as err:
        load_model(json.dumps(doc))
    assert err.value.found == "0"
    assert err.value.supported == SCHEMA_VERSION


def test_bundle_metadata_carries_training_provenance(small_bundle):
    bundle, _ = small_bundle
    meta = bundle.training_meta
    assert meta.folds == 3
    assert len(meta.fold_reports) == 3
    assert meta.selected_fold == min(
        range(3), key=lambda i: (meta.fold_reports[i].mape, meta.fold_reports[i].mae, i))
    assert bundle.selected_report == meta.fold_reports[meta.selected_fold]
    assert bundle.created_at == "2026-01-01T00:00:00Z"


def test_bundle_rejects_dim_mismatch(small_bundle):
    bundle, _ = small_bundle
    doc = json.loads(save_model(bundle))
    doc["network"]["weights_ih"] = [row[:-1] for row in doc["network"]["weights_ih"]]
    with pytest.raises(BundleFormatError):
        load_model(json.dumps(doc))


def test_surface_round_trip_bit_exact(small_bundle):
    bundle, _ = small_bundle
    def patchy_pr(rock, setting):
        return bundle.predict(rock, setting) if setting.th >= 4000 else -1.0
    from tbmopt.synth import ef_truth
    surface = cost_surface(field_rock_state(2), patchy_pr, ef_truth)
    data = save_surface(surface)
    restored = load_surface(data)
    assert (restored.th_values == surface.th_values).all()
    assert (restored.tor_values == surface.tor_values).all()
    for name in ("cost", "pr", "ef"):
        a, b = getattr(surface, name), getattr(restored, name)
        assert ((a == b) | (np.isnan(a) & np.isnan(b))).all()
    assert restored.optimum == surface.optimum
    assert save_surface(restored) == data


def test_surface_schema_gate():
    with pytest.raises(BundleFormatError):
        load_surface(b"not json at all")
    with pytest.raises(UnsupportedSchemaError):
        load_surface(json.dumps({"schema_version": "9"}))
