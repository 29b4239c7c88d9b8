"""Deterministic feature pipeline: one-hot, z-score, pairwise PCA merges.

The network input layout is fixed at 11 features:

    [src_z, rqd_z, cai_z, q_z, pc_ucs_th, pc_ci_m, tor_z,
     mgt_1, mgt_2, mgt_3, mgt_4]

The two historically correlated pairs (UCS, Th) and (CI, M) are each
collapsed to the first principal component of their 2x2 correlation
matrix, so the eigenvalues of a standardized pair with correlation r are
exactly (1 + r, 1 - r). Because Th feeds one of the merged components,
the PC score must be recomputed for every candidate thrust during
optimization; :func:`transform` therefore takes the machine setting.

Conventions: z-scores use the sample standard deviation (ddof=1);
Pearson correlations use sample covariance. PC1 loadings are unit-norm
with a non-negative first coordinate so serialized models are comparable
across runs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .domain import MGT_CATEGORIES, MachineSetting, RockMassState, TunnelingRecord
from .errors import InvalidInputError

#: Raw numeric features, in storage order.
RAW_NUMERIC = ("src", "ucs", "rqd", "cai", "q", "ci", "m", "th", "tor")

#: Features entering the correlation report, in display order.
PEARSON_FEATURES = ("ucs", "rqd", "cai", "q", "ci", "m", "th", "tor")

#: Final model input names, in order.
FEATURE_NAMES = ("src_z", "rqd_z", "cai_z", "q_z", "pc_ucs_th", "pc_ci_m",
                 "tor_z", "mgt_1", "mgt_2", "mgt_3", "mgt_4")

MGT_ONE_HOT: Mapping[int, tuple[float, ...]] = {
    1: (1.0, 0.0, 0.0, 0.0),
    2: (0.0, 1.0, 0.0, 0.0),
    3: (0.0, 0.0, 1.0, 0.0),
    4: (0.0, 0.0, 0.0, 1.0),
}


def one_hot(mgt: int) -> np.ndarray:
    """Unit basis vector for a muck geometry category."""
    if mgt not in MGT_CATEGORIES:
        raise InvalidInputError("mgt", f"must be one of {MGT_CATEGORIES}, got {mgt}")
    return np.array(MGT_ONE_HOT[mgt], dtype=float)


def _raw_values(rock: RockMassState, machine: MachineSetting) -> np.ndarray:
    return np.array([rock.src, rock.ucs, rock.rqd, rock.cai, rock.q,
                     rock.ci, rock.m, machine.th, machine.tor], dtype=float)


def _records_matrix(records: Sequence[TunnelingRecord]) -> np.ndarray:
    return np.array([_raw_values(r.rock, r.machine) for r in records], dtype=float)


@dataclass(frozen=True)
class PcaPair:
    """First principal component of one standardized feature pair."""

    loading: tuple[float, float]      # unit norm, first coordinate >= 0
    eigenvalues: tuple[float, float]  # descending

    @property
    def explained_share(self) -> float:
        return self.eigenvalues[0] / (self.eigenvalues[0] + self.eigenvalues[1])


@dataclass(frozen=True)
class PreprocessorState:
    """Fitted, immutable pipeline state; shareable across threads."""

    feature_names: tuple[str, ...]
    means: tuple[float, ...]   # per RAW_NUMERIC feature
    stds: tuple[float, ...]    # sample std, per RAW_NUMERIC feature
    pca_ucs_th: PcaPair
    pca_ci_m: PcaPair
    mgt_categories: Mapping[int, tuple[float, ...]]
    output_dim: int

    def to_dict(self) -> dict:
        return {
            "feature_names": list(self.feature_names),
            "means": {name: m for name, m in zip(RAW_NUMERIC, self.means)},
            "stds": {name: s for name, s in zip(RAW_NUMERIC, self.stds)},
            "pca_ucs_th": {"loading": list(self.pca_ucs_th.loading),
                           "eigenvalues": list(self.pca_ucs_th.eigenvalues)},
            "pca_ci_m": {"loading": list(self.pca_ci_m.loading),
                         "eigenvalues": list(self.pca_ci_m.eigenvalues)},
            "mgt_categories": {str(k): list(v) for k, v in sorted(self.mgt_categories.items())},
            "output_dim": self.output_dim,
        }

    @staticmethod
    def from_dict(data: dict) -> "PreprocessorState":
        means = tuple(float(data["means"][name]) for name in RAW_NUMERIC)
        stds = tuple(float(data["stds"][name]) for name in RAW_NUMERIC)
        def pair(d: dict) -> PcaPair:
            return PcaPair(loading=tuple(float(x) for x in d["loading"]),
                           eigenvalues=tuple(float(x) for x in d["eigenvalues"]))
        return PreprocessorState(
            feature_names=tuple(data["feature_names"]),
            means=means,
            stds=stds,
            pca_ucs_th=pair(data["pca_ucs_th"]),
            pca_ci_m=pair(data["pca_ci_m"]),
            mgt_categories={int(k): tuple(float(x) for x in v)
                            for k, v in data["mgt_categories"].items()},
            output_dim=int(data["output_dim"]),
        )


def _pearson(x: np.ndarray, y: np.ndarray) -> float:
    xc = x - x.mean()
    yc = y - y.mean()
    sx = float(np.sqrt((xc * xc).sum() / (len(x) - 1)))
    sy = float(np.sqrt((yc * yc).sum() / (len(y) - 1)))
    if sx == 0.0 or sy == 0.0:
        return float("nan")
    cov = float((xc * yc).sum() / (len(x) - 1))
    return cov / (sx * sy)


@dataclass(frozen=True)
class PearsonReport:
    """Symmetric correlation matrix over :data:`PEARSON_FEATURES`."""

    feature_names: tuple[str, ...]
    matrix: np.ndarray
    constant_columns: tuple[str, ...]  # undefined (NaN) correlations


def pearson_matrix(records: Sequence[TunnelingRecord]) -> PearsonReport:
    """Pairwise Pearson correlations of the numeric model inputs.

    Constant columns are flagged and their pairwise entries left NaN.
    """
    if len(records) < 3:
        raise InvalidInputError("records", f"need >= 3 records, got {len(records)}")
    raw = _records_matrix(records)
    cols = {name: raw[:, RAW_NUMERIC.index(name)] for name in PEARSON_FEATURES}
    constant = tuple(name for name in PEARSON_FEATURES
                     if float(np.std(cols[name], ddof=1)) == 0.0)
    n = len(PEARSON_FEATURES)
    mat = np.full((n, n), np.nan)
    for i, a in enumerate(PEARSON_FEATURES):
        for j, b in enumerate(PEARSON_FEATURES):
            if a in constant or b in constant:
                continue
            mat[i, j] = 1.0 if i == j else _pearson(cols[a], cols[b])
    return PearsonReport(PEARSON_FEATURES, mat, constant)


def _fit_pair(za: np.ndarray, zb: np.ndarray, name: str) -> PcaPair:
    r = _pearson(za, zb)
    corr = np.array([[1.0, r], [r, 1.0]])
    eigvals, eigvecs = np.linalg.eigh(corr)  # ascending
    order = np.argsort(eigvals)[::-1]
    eigvals = eigvals[order]
    pc1 = eigvecs[:, order[0]]
    if pc1[0] < 0 or (pc1[0] == 0 and pc1[1] < 0):
        pc1 = -pc1
    return PcaPair(loading=(float(pc1[0]), float(pc1[1])),
                   eigenvalues=(float(eigvals[0]), float(eigvals[1])))


def fit_preprocessor(records: Sequence[TunnelingRecord]) -> PreprocessorState:
    """Fit means/stds and the two pairwise PCAs on training records."""
    if len(records) < 2:
        raise InvalidInputError("records", f"need >= 2 records, got {len(records)}")
    raw = _records_matrix(records)
    means = raw.mean(axis=0)
    stds = raw.std(axis=0, ddof=1)
    for idx, name in enumerate(RAW_NUMERIC):
        if stds[idx] == 0.0:
            raise InvalidInputError(name, "column is constant; cannot z-score")
    z = (raw - means) / stds
    col = {name: z[:, i] for i, name in enumerate(RAW_NUMERIC)}
    return PreprocessorState(
        feature_names=FEATURE_NAMES,
        means=tuple(float(v) for v in means),
        stds=tuple(float(v) for v in stds),
        pca_ucs_th=_fit_pair(col["ucs"], col["th"], "ucs/th"),
        pca_ci_m=_fit_pair(col["ci"], col["m"], "ci/m"),
        mgt_categories=dict(MGT_ONE_HOT),
        output_dim=len(FEATURE_NAMES),
    )


def transform(state: PreprocessorState, rock: RockMassState,
              machine: MachineSetting) -> np.ndarray:
    """Map one (rock, machine) pair to the 11-dimensional model input."""
    raw = _raw_values(rock, machine)
    z = (raw - np.asarray(state.means)) / np.asarray(state.stds)
    zi = {name: z[i] for i, name in enumerate(RAW_NUMERIC)}
    a1, b1 = state.pca_ucs_th.loading
    a2, b2 = state.pca_ci_m.loading
    numeric = [zi["src"], zi["rqd"], zi["cai"], zi["q"],
               a1 * zi["ucs"] + b1 * zi["th"],
               a2 * zi["ci"] + b2 * zi["m"],
               zi["tor"]]
    return np.concatenate([np.asarray(numeric, dtype=float), one_hot(rock.mgt)])


def transform_many(state: PreprocessorState,
                   records: Sequence[TunnelingRecord]) -> np.ndarray:
    return np.array([transform(state, r.rock, r.machine) for r in records], dtype=float)


@dataclass(frozen=True)
class FoldPlan:
    """Assignment of record indices to cross-validation folds."""

    k: int
    assignments: tuple[int, ...]
    seed: int

    def fold_indices(self, fold: int) -> tuple[list[int], list[int]]:
        """(train_indices, validation_indices) for one held-out fold."""
        val = [i for i, f in enumerate(self.assignments) if f == fold]
        train = [i for i, f in enumerate(self.assignments) if f != fold]
        return train, val


def kfold_split(n: int, k: int, seed: int) -> FoldPlan:
    """Seeded shuffle then contiguous fold assignment; sizes differ by <= 1."""
    if k < 2:
        raise InvalidInputError("k", f"must be >= 2, got {k}")
    if k > n:
        raise InvalidInputError("k", f"must be <= record count {n}, got {k}")
    perm = np.random.default_rng(seed).permutation(n)
    assignments = np.empty(n, dtype=int)
    base, extra = divmod(n, k)
    start = 0
    for fold in range(k):
        size = base + (1 if fold < extra else 0)
        assignments[perm[start:start + size]] = fold
        start += size
    return FoldPlan(k=k, assignments=tuple(int(a) for a in assignments), seed=seed)
