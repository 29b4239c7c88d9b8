"""Model and cost-surface persistence as canonical JSON.

Canonical form: sorted object keys, floats rendered with 17 significant
digits (exact round trip for IEEE doubles), matrices as nested row-major
arrays, NaN cells as ``null``. Serialization is therefore byte-stable
across platforms and ``load(save(x))`` reproduces predictions bit-exactly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Optional, Sequence

import numpy as np

from .decision import CostSurface
from .domain import MachineSetting, RockMassState, TunnelingRecord
from .errors import BundleFormatError, InvalidInputError, UnsupportedSchemaError
from .preprocess import PreprocessorState
from .sabpnn import (CrossValResult, EvalReport, FittedModel, NetworkParams,
                     TargetScaler, TrainConfig, cross_validate, default_train_setup)

SCHEMA_VERSION = "1"


# ---------------------------------------------------------------------------
# canonical JSON
# ---------------------------------------------------------------------------


def _format_float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        raise BundleFormatError("non-finite float cannot be serialized; use None")
    return format(x, ".17g")


def canonical_json(value) -> str:
    """Deterministic JSON with sorted keys and 17-digit floats."""
    if value is None:
        return "null"
    if value is True:
        return "true"
    if value is False:
        return "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return _format_float(float(value))
    if isinstance(value, str):
        return json.dumps(value, ensure_ascii=True)
    if isinstance(value, np.ndarray):
        return canonical_json(value.tolist())
    if isinstance(value, (list, tuple)):
        return "[" + ",".join(canonical_json(v) for v in value) + "]"
    if isinstance(value, dict):
        items = sorted(value.items(), key=lambda kv: kv[0])
        return "{" + ",".join(f"{json.dumps(str(k))}:{canonical_json(v)}"
                              for k, v in items) + "}"
    raise BundleFormatError(f"cannot serialize {type(value).__name__}")


def _loads(data: bytes | str) -> dict:
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise BundleFormatError(f"malformed JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise BundleFormatError("top-level JSON value must be an object")
    return doc


def _check_version(doc: dict) -> None:
    version = str(doc.get("schema_version"))
    if version != SCHEMA_VERSION:
        raise UnsupportedSchemaError(found=version, supported=SCHEMA_VERSION)


# ---------------------------------------------------------------------------
# model bundles
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TrainingMeta:
    """Provenance of a trained bundle: seed, config, per-fold reports."""

    seed: int
    config: TrainConfig
    folds: int
    fold_reports: tuple[EvalReport, ...]
    selected_fold: int

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "config": {
                "learn_rate": self.config.learn_rate,
                "gd_iterations": self.config.gd_iterations,
                "sa_initial_temp": self.config.sa_initial_temp,
                "sa_drop_ratio": self.config.sa_drop_ratio,
                "sa_inner_loops": self.config.sa_inner_loops,
                "sa_iterations": self.config.sa_iterations,
                "sa_final_temp": self.config.sa_final_temp,
                "seed": self.config.seed,
                "target_normalization": self.config.target_normalization,
            },
            "folds": self.folds,
            "fold_reports": [r.to_dict() for r in self.fold_reports],
            "selected_fold": self.selected_fold,
        }

    @staticmethod
    def from_dict(data: dict) -> "TrainingMeta":
        cfg = data["config"]
        return TrainingMeta(
            seed=int(data["seed"]),
            config=TrainConfig(
                learn_rate=float(cfg["learn_rate"]),
                gd_iterations=int(cfg["gd_iterations"]),
                sa_initial_temp=float(cfg["sa_initial_temp"]),
                sa_drop_ratio=float(cfg["sa_drop_ratio"]),
                sa_inner_loops=int(cfg["sa_inner_loops"]),
                sa_iterations=int(cfg["sa_iterations"]),
                sa_final_temp=float(cfg["sa_final_temp"]),
                seed=int(cfg["seed"]),
                target_normalization=bool(cfg["target_normalization"]),
            ),
            folds=int(data["folds"]),
            fold_reports=tuple(
                EvalReport(mae=float(r["mae"]), mape=float(r["mape"]),
                           trend_accuracy=None if r["trend_accuracy"] is None
                           else float(r["trend_accuracy"]),
                           n=int(r["n"]))
                for r in data["fold_reports"]),
            selected_fold=int(data["selected_fold"]),
        )


@dataclass(frozen=True)
class ModelBundle:
    """A persisted surrogate: preprocessor, network, scaler, provenance."""

    target: str
    preprocessor: PreprocessorState
    network: NetworkParams
    target_scaler: TargetScaler
    training_meta: TrainingMeta
    created_at: str
    schema_version: str = SCHEMA_VERSION

    def __post_init__(self) -> None:
        if self.preprocessor.output_dim != self.network.input_dim:
            raise BundleFormatError(
                f"preprocessor output_dim {self.preprocessor.output_dim} != "
                f"network input_dim {self.network.input_dim}")
        if self.target not in ("pr", "ef"):
            raise BundleFormatError(f"target must be 'pr' or 'ef', got {self.target!r}")

    def predict(self, rock: RockMassState, machine: MachineSetting) -> float:
        return self.fitted.predict(rock, machine)

    @property
    def fitted(self) -> FittedModel:
        return FittedModel(self.target, self.preprocessor, self.network,
                           self.target_scaler)

    @property
    def selected_report(self) -> EvalReport:
        return self.training_meta.fold_reports[self.training_meta.selected_fold]


def _utc_now() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def bundle_from_cross_validation(cv: CrossValResult, target: str,
                                 cfg: TrainConfig, folds: int,
                                 created_at: Optional[str] = None) -> ModelBundle:
    model = cv.selected_model
    return ModelBundle(
        target=target,
        preprocessor=model.preprocessor,
        network=model.network,
        target_scaler=model.target_scaler,
        training_meta=TrainingMeta(seed=cfg.seed, config=cfg, folds=folds,
                                   fold_reports=cv.reports, selected_fold=cv.selected),
        created_at=created_at if created_at is not None else _utc_now(),
    )


def train_model_bundle(records: Sequence[TunnelingRecord], target: str,
                       folds: Optional[int] = None, seed: int = 0,
                       cfg: Optional[TrainConfig] = None,
                       created_at: Optional[str] = None) -> ModelBundle:
    """Cross-validate on the records and wrap the selected fold's model."""
    default_cfg, arch = default_train_setup(target, seed=seed)
    cfg = cfg if cfg is not None else default_cfg
    if folds is None:
        folds = 3 if target == "pr" else 4
    cv = cross_validate(records, folds, cfg, arch, target)
    return bundle_from_cross_validation(cv, target, cfg, folds, created_at)


def save_model(bundle: ModelBundle) -> bytes:
    doc = {
        "schema_version": bundle.schema_version,
        "target": bundle.target,
        "created_at": bundle.created_at,
        "preprocessor": bundle.preprocessor.to_dict(),
        "network": {
            "input_dim": bundle.network.input_dim,
            "hidden_nodes": bundle.network.hidden_nodes,
            "weights_ih": bundle.network.weights_ih,
            "bias_h": bundle.network.bias_h,
            "weights_ho": bundle.network.weights_ho,
            "bias_o": bundle.network.bias_o,
            "hidden_activation": bundle.network.hidden_activation,
            "output_activation": bundle.network.output_activation,
        },
        "target_scaler": {"mean": bundle.target_scaler.mean,
                          "std": bundle.target_scaler.std},
        "training_meta": bundle.training_meta.to_dict(),
    }
    return canonical_json(doc).encode("utf-8")


def load_model(data: bytes | str) -> ModelBundle:
    doc = _loads(data)
    _check_version(doc)
    try:
        net = doc["network"]
        network = NetworkParams(
            input_dim=int(net["input_dim"]),
            hidden_nodes=int(net["hidden_nodes"]),
            weights_ih=net["weights_ih"],
            bias_h=net["bias_h"],
            weights_ho=net["weights_ho"],
            bias_o=float(net["bias_o"]),
            hidden_activation=str(net["hidden_activation"]),
            output_activation=str(net["output_activation"]),
        )
        scaler = doc["target_scaler"]
        return ModelBundle(
            target=str(doc["target"]),
            preprocessor=PreprocessorState.from_dict(doc["preprocessor"]),
            network=network,
            target_scaler=TargetScaler(mean=float(scaler["mean"]),
                                       std=float(scaler["std"])),
            training_meta=TrainingMeta.from_dict(doc["training_meta"]),
            created_at=str(doc["created_at"]),
        )
    except (KeyError, TypeError, ValueError, InvalidInputError) as exc:
        raise BundleFormatError(f"bad model document: {exc}") from None


def save_model_file(bundle: ModelBundle, path) -> None:
    with open(path, "wb") as fh:
        fh.write(save_model(bundle))


def load_model_file(path) -> ModelBundle:
    with open(path, "rb") as fh:
        return load_model(fh.read())


# ---------------------------------------------------------------------------
# cost surfaces
# ---------------------------------------------------------------------------


def _matrix_to_nullable(mat: np.ndarray) -> list[list]:
    return [[None if not math.isfinite(v) else float(v) for v in row]
            for row in mat.tolist()]


def _matrix_from_nullable(rows: list, shape: tuple[int, int], name: str) -> np.ndarray:
    mat = np.full(shape, np.nan)
    if len(rows) != shape[0]:
        raise BundleFormatError(f"{name}: expected {shape[0]} rows, got {len(rows)}")
    for i, row in enumerate(rows):
        if len(row) != shape[1]:
            raise BundleFormatError(f"{name}: row {i} has {len(row)} cells, "
                                    f"expected {shape[1]}")
        for j, v in enumerate(row):
            if v is not None:
                mat[i, j] = float(v)
    return mat


def surface_payload(surface: CostSurface) -> dict:
    """The wire/file form of a cost surface (NaN cells as null)."""
    return {
        "th_values": [float(v) for v in surface.th_values],
        "tor_values": [float(v) for v in surface.tor_values],
        "cost": _matrix_to_nullable(surface.cost),
        "pr": _matrix_to_nullable(surface.pr),
        "ef": _matrix_to_nullable(surface.ef),
        "optimum": [surface.optimum[0], surface.optimum[1]],
    }


def save_surface(surface: CostSurface) -> bytes:
    doc = {"schema_version": SCHEMA_VERSION}
    doc.update(surface_payload(surface))
    return canonical_json(doc).encode("utf-8")


def load_surface(data: bytes | str) -> CostSurface:
    doc = _loads(data)
    _check_version(doc)
    try:
        th_values = np.asarray([float(v) for v in doc["th_values"]])
        tor_values = np.asarray([float(v) for v in doc["tor_values"]])
        shape = (len(th_values), len(tor_values))
        return CostSurface(
            th_values=th_values,
            tor_values=tor_values,
            cost=_matrix_from_nullable(doc["cost"], shape, "cost"),
            pr=_matrix_from_nullable(doc["pr"], shape, "pr"),
            ef=_matrix_from_nullable(doc["ef"], shape, "ef"),
            optimum=(int(doc["optimum"][0]), int(doc["optimum"][1])),
        )
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise BundleFormatError(f"bad surface document: {exc}") from None
