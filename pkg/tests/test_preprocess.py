import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tbmopt.domain import MachineSetting, RockMassState, TunnelingRecord
from tbmopt.errors import InvalidInputError
from tbmopt.preprocess import (FEATURE_NAMES, PEARSON_FEATURES, FoldPlan, PreprocessorState,
                               fit_preprocessor, kfold_split, one_hot, pearson_matrix,
                               transform, transform_many)


def make_record(ucs=78.43, rqd=35.17, cai=3.28, q=75.14, ci=432.92, m=12.69,
                th=6183.67, tor=749.67, src=3, mgt=2, pr=60.0):
    rock = RockMassState(src=src, ucs=ucs, rqd=rqd, cai=cai, q=q, ci=ci, m=m, mgt=mgt)
    return TunnelingRecord(rock=rock, machine=MachineSetting(th, tor), pr=pr)


def random_records(n, seed=0):
    rng = np.random.default_rng(seed)
    records = []
    for _ in range(n):
        records.append(make_record(
            ucs=rng.uniform(31, 149), rqd=rng.uniform(5, 93), cai=rng.uniform(2.2, 5.3),
            q=rng.uniform(50, 95), ci=rng.uniform(258, 590), m=rng.uniform(1.4, 30),
            th=rng.uniform(2106, 9127), tor=rng.uniform(223, 1327),
            src=int(rng.choice([2, 3, 4, 5])), mgt=int(rng.choice([1, 2, 3, 4]))))
    return records


# ---------------------------------------------------------------------------
# one-hot
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("mgt,want", [
    (1, [1, 0, 0, 0]), (2, [0, 1, 0, 0]), (3, [0, 0, 1, 0]), (4, [0, 0, 0, 1]),
])
def test_one_hot(mgt, want):
    assert one_hot(mgt).tolist() == want


def test_one_hot_rejects_out_of_range():
    with pytest.raises(InvalidInputError):
        one_hot(5)


# ---------------------------------------------------------------------------
# pearson matrix
# ---------------------------------------------------------------------------


def test_pearson_diagonal_and_antisymmetry():
    report = pearson_matrix(random_records(12, seed=1))
    assert report.feature_names == PEARSON_FEATURES
    assert report.constant_columns == ()
    n = len(PEARSON_FEATURES)
    for i in range(n):
        assert report.matrix[i, i] == pytest.approx(1.0)
    assert np.abs(report.matrix).max() <= 1 + 1e-12
    assert np.allclose(report.matrix, report.matrix.T, equal_nan=True)


def test_pearson_exact_negative_relation():
    recs = [make_record(ucs=u, rqd=r) for u, r in [(31, 3), (32, 2), (33, 1)]]
    report = pearson_matrix(recs)
    i, j = PEARSON_FEATURES.index("ucs"), PEARSON_FEATURES.index("rqd")
    assert report.matrix[i, j] == pytest.approx(-1.0)


def test_pearson_hand_covariance_value():
    # x=[1,2,3] vs y=[1,2,4]: r = (3/2) / (1 * sqrt(7/3))
    recs = [make_record(ucs=30 + x, rqd=y) for x, y in [(1, 1), (2, 2), (3, 4)]]
    report = pearson_matrix(recs)
    i, j = PEARSON_FEATURES.index("ucs"), PEARSON_FEATURES.index("rqd")
    want = 1.5 / math.sqrt(7.0 / 3.0)
    assert report.matrix[i, j] == pytest.approx(want, rel=1e-12)
    assert round(report.matrix[i, j], 3) == 0.982


def test_pearson_constant_column_flagged():
    recs = [make_record(ucs=u, cai=3.0) for u in (40, 80, 120)]
    report = pearson_matrix(recs)
    assert "cai" in report.constant_columns
    i, j = PEARSON_FEATURES.index("cai"), PEARSON_FEATURES.index("ucs")
    assert math.isnan(report.matrix[i, j])


def test_pearson_requires_three_records():
    with pytest.raises(InvalidInputError):
        pearson_matrix(random_records(2))


@settings(max_examples=20)
@given(seed=st.integers(0, 10_000))
def test_pearson_matches_brute_force(seed):
    recs = random_records(30, seed=seed)
    report = pearson_matrix(recs)
    raw = {name: [] for name in PEARSON_FEATURES}
    for r in recs:
        vals = dict(ucs=r.rock.ucs, rqd=r.rock.rqd, cai=r.rock.cai, q=r.rock.q,
                    ci=r.rock.ci, m=r.rock.m, th=r.machine.th, tor=r.machine.tor)
        for name in PEARSON_FEATURES:
            raw[name].append(vals[name])
    n = len(recs)
    for i, a in enumerate(PEARSON_FEATURES):
        for j, b in enumerate(PEARSON_FEATURES):
            xa, xb = raw[a], raw[b]
            ma, mb = sum(xa) / n, sum(xb) / n
            cov = sum((u - ma) * (v - mb) for u, v in zip(xa, xb)) / (n - 1)
            sa = math.sqrt(sum((u - ma) ** 2 for u in xa) / (n - 1))
            sb = math.sqrt(sum((v - mb) ** 2 for v in xb) / (n - 1))
            assert report.matrix[i, j] == pytest.approx(cov / (sa * sb), abs=1e-12)


# ---------------------------------------------------------------------------
# fit / transform
# ---------------------------------------------------------------------------


def test_fit_identical_standardized_pair():
    # th affine in ucs -> correlation 1 -> eigenvalues (2, 0), loading (1,1)/sqrt(2)
    base = random_records(5, seed=2)
    recs = [TunnelingRecord(rock=r.rock,
                            machine=MachineSetting(50 * r.rock.ucs + 100, r.machine.tor),
                            pr=r.pr)
            for r in base]
    state = fit_preprocessor(recs)
    root_half = 1 / math.sqrt(2)
    assert state.pca_ucs_th.loading == pytest.approx((root_half, root_half), abs=1e-9)
    assert state.pca_ucs_th.eigenvalues == pytest.approx((2.0, 0.0), abs=1e-9)
    assert state.pca_ucs_th.explained_share == pytest.approx(1.0, abs=1e-9)


@given(r=st.floats(-0.95, 0.95))
@settings(max_examples=30)
def test_fit_eigenvalues_follow_correlation(r):
    # brute-force eigendecomposition of [[1, r], [r, 1]]
    want = np.sort(np.linalg.eigvalsh(np.array([[1.0, r], [r, 1.0]])))[::-1]
    assert want == pytest.approx((1 + abs(r), 1 - abs(r)), abs=1e-12)


def test_fit_stores_sample_moments():
    recs = random_records(50, seed=3)
    state = fit_preprocessor(recs)
    raw = np.array([[r.rock.src, r.rock.ucs, r.rock.rqd, r.rock.cai, r.rock.q,
                     r.rock.ci, r.rock.m, r.machine.th, r.machine.tor] for r in recs])
    assert np.asarray(state.means) == pytest.approx(raw.mean(axis=0), rel=1e-12)
    assert np.asarray(state.stds) == pytest.approx(raw.std(axis=0, ddof=1), rel=1e-12)


def test_fit_rejects_constant_column():
    recs = [TunnelingRecord(rock=RockMassState(src=r.rock.src, ucs=r.rock.ucs,
                                               rqd=r.rock.rqd, cai=3.0, q=r.rock.q,
                                               ci=r.rock.ci, m=r.rock.m, mgt=r.rock.mgt),
                            machine=r.machine, pr=r.pr)
            for r in random_records(10, seed=4)]
    with pytest.raises(InvalidInputError) as err:
        fit_preprocessor(recs)
    assert err.value.field == "cai"


def test_zscored_columns_have_unit_sample_std():
    recs = random_records(80, seed=5)
    state = fit_preprocessor(recs)
    raw = np.array([[r.rock.src, r.rock.ucs, r.rock.rqd, r.rock.cai, r.rock.q,
                     r.rock.ci, r.rock.m, r.machine.th, r.machine.tor] for r in recs])
    z = (raw - np.asarray(state.means)) / np.asarray(state.stds)
    assert np.abs(z.mean(axis=0)).max() < 1e-9
    assert np.abs(z.std(axis=0, ddof=1) - 1).max() < 1e-9


def test_loadings_unit_norm_nonnegative_first_coordinate():
    for seed in range(5):
        state = fit_preprocessor(random_records(40, seed=seed))
        for pair in (state.pca_ucs_th, state.pca_ci_m):
            assert np.hypot(*pair.loading) == pytest.approx(1.0, abs=1e-12)
            assert pair.loading[0] >= 0
            assert sum(pair.eigenvalues) == pytest.approx(2.0, abs=1e-9)


def test_transform_at_training_means_is_zero():
    recs = random_records(60, seed=7)
    state = fit_preprocessor(recs)
    means = dict(zip(("src", "ucs", "rqd", "cai", "q", "ci", "m", "th", "tor"), state.means))
    rock = RockMassState(src=3, ucs=means["ucs"], rqd=means["rqd"], cai=means["cai"],
                         q=means["q"], ci=means["ci"], m=means["m"], mgt=1)
    machine = MachineSetting(means["th"], means["tor"])
    x = transform(state, rock, machine)
    # src differs from its mean; zero it for the check
    numeric = x[:7].copy()
    numeric[0] = 0.0
    assert numeric == pytest.approx(np.zeros(7), abs=1e-9)
    assert x[7:].tolist() == [1, 0, 0, 0]
    assert len(x) == state.output_dim == 11
    assert state.feature_names == FEATURE_NAMES


def test_transform_th_only_changes_merged_component():
    recs = random_records(60, seed=9)
    state = fit_preprocessor(recs)
    rock = recs[0].rock
    a = transform(state, rock, MachineSetting(4000.0, 800.0))
    b = transform(state, rock, MachineSetting(6000.0, 800.0))
    diff = np.nonzero(a != b)[0].tolist()
    assert diff == [FEATURE_NAMES.index("pc_ucs_th")]


def test_state_dict_round_trip_is_bit_exact():
    recs = random_records(60, seed=11)
    state = fit_preprocessor(recs)
    restored = PreprocessorState.from_dict(state.to_dict())
    x0 = transform(state, recs[0].rock, recs[0].machine)
    x1 = transform(restored, recs[0].rock, recs[0].machine)
    assert (x0 == x1).all()


# ---------------------------------------------------------------------------
# k-fold split
# ---------------------------------------------------------------------------


def fold_sizes(plan: FoldPlan) -> list:
    return [plan.assignments.count(f) for f in range(plan.k)]


def test_kfold_reference_sizes():
    assert fold_sizes(kfold_split(160, 3, seed=0)) == [54, 53, 53]
    assert fold_sizes(kfold_split(90, 4, seed=0)) == [23, 23, 22, 22]


def test_kfold_deterministic():
    assert kfold_split(160, 3, seed=42) == kfold_split(160, 3, seed=42)
    assert kfold_split(160, 3, seed=1) != kfold_split(160, 3, seed=2)


def test_kfold_rejects_bad_k():
    with pytest.raises(InvalidInputError):
        kfold_split(5, 6, seed=0)
    with pytest.raises(InvalidInputError):
        kfold_split(5, 1, seed=0)


@given(n=st.integers(2, 200), k=st.integers(2, 10), seed=st.integers(0, 1000))
@settings(max_examples=100)
def test_kfold_partitions_indices(n, k, seed):
    if k > n:
        return
    plan = kfold_split(n, k, seed)
    assert len(plan.assignments) == n
    sizes = fold_sizes(plan)
    assert sum(sizes) == n
    assert max(sizes) - min(sizes) <= 1
    for fold in range(k):
        train, val = plan.fold_indices(fold)
        assert sorted(train + val) == list(range(n))
