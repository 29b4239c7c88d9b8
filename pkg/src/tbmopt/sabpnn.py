"""Single-hidden-layer tanh regressor trained by gradient descent, with
simulated-annealing search for the initial weights and biases.

Training is deterministic: every entry point is a pure function of
(data, config, seed). The annealer random-walks the flattened parameter
vector under a Metropolis rule with geometric cooling and returns the
best-energy parameters seen (energy = training MSE). Gradient descent is
full-batch on mean-squared error with a backtracking safeguard: a step
that would increase the loss is rejected and the learning rate halved
(floor 1e-4), so the recorded loss trace never increases.

Targets are z-scored for training (improves conditioning with tanh
hidden units) and predictions are de-normalized on the way out; for a
constant-target dataset the stored std is zero and de-normalization
returns the constant exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from .domain import MachineSetting, RockMassState, TunnelingRecord
from .errors import InvalidInputError, MapeUndefinedError, TrainingDivergedError
from .preprocess import PreprocessorState, fit_preprocessor, kfold_split, transform, transform_many

_MIN_LEARN_RATE = 1e-4
_MIN_TEMPERATURE = 1e-8
#: Plain random initialization draws weights uniformly from this range.
_INIT_WIDTH = 1.0
#: The annealer proposes initializations inside this box; beyond it tanh
#: units saturate and gradient descent starts from a flat region.
_SA_BOX = 0.5


@dataclass(frozen=True)
class NetworkArch:
    """Layer sizes of the regressor."""

    input_dim: int
    hidden_nodes: int

    @property
    def n_params(self) -> int:
        return self.hidden_nodes * self.input_dim + self.hidden_nodes + self.hidden_nodes + 1


def _frozen_array(values, shape) -> np.ndarray:
    arr = np.array(values, dtype=float).reshape(shape)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class NetworkParams:
    """Immutable weights/biases of a fitted network."""

    input_dim: int
    hidden_nodes: int
    weights_ih: np.ndarray   # hidden x input
    bias_h: np.ndarray       # hidden
    weights_ho: np.ndarray   # 1 x hidden
    bias_o: float
    hidden_activation: str = "tanh"
    output_activation: str = "linear"

    def __post_init__(self) -> None:
        h, d = self.hidden_nodes, self.input_dim
        object.__setattr__(self, "weights_ih", _frozen_array(self.weights_ih, (h, d)))
        object.__setattr__(self, "bias_h", _frozen_array(self.bias_h, (h,)))
        object.__setattr__(self, "weights_ho", _frozen_array(self.weights_ho, (1, h)))
        object.__setattr__(self, "bias_o", float(self.bias_o))
        for name in ("weights_ih", "bias_h", "weights_ho"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise InvalidInputError(name, "entries must be finite")
        if not math.isfinite(self.bias_o):
            raise InvalidInputError("bias_o", "must be finite")
        if self.hidden_activation != "tanh" or self.output_activation != "linear":
            raise InvalidInputError("activation",
                                    "only tanh hidden / linear output supported")

    @property
    def arch(self) -> NetworkArch:
        return NetworkArch(self.input_dim, self.hidden_nodes)

    def to_flat(self) -> np.ndarray:
        return np.concatenate([self.weights_ih.ravel(), self.bias_h,
                               self.weights_ho.ravel(), [self.bias_o]])

    @staticmethod
    def from_flat(flat: np.ndarray, arch: NetworkArch) -> "NetworkParams":
        h, d = arch.hidden_nodes, arch.input_dim
        w_ih = flat[:h * d]
        b_h = flat[h * d:h * d + h]
        w_ho = flat[h * d + h:h * d + 2 * h]
        b_o = flat[-1]
        return NetworkParams(d, h, w_ih, b_h, w_ho, float(b_o))


@dataclass(frozen=True)
class TrainConfig:
    """Hyperparameters for SA initialization and gradient descent."""

    learn_rate: float
    gd_iterations: int
    sa_initial_temp: float
    sa_drop_ratio: float
    sa_inner_loops: int
    sa_iterations: int
    sa_final_temp: float = 0.0
    seed: int = 0
    target_normalization: bool = True

    def __post_init__(self) -> None:
        if self.learn_rate <= 0:
            raise InvalidInputError("learn_rate", f"must be > 0, got {self.learn_rate}")
        if not 0 < self.sa_drop_ratio < 1:
            raise InvalidInputError("sa_drop_ratio",
                                    f"must be in (0, 1), got {self.sa_drop_ratio}")
        for name in ("gd_iterations", "sa_inner_loops", "sa_iterations"):
            if getattr(self, name) < 1:
                raise InvalidInputError(name, f"must be >= 1, got {getattr(self, name)}")
        if self.sa_initial_temp <= 0:
            raise InvalidInputError("sa_initial_temp",
                                    f"must be > 0, got {self.sa_initial_temp}")


#: Hyperparameters of the penetration-rate model.
PRCR_ARCH = NetworkArch(input_dim=11, hidden_nodes=11)
#: Hyperparameters of the cutter-life model.
CCR_ARCH = NetworkArch(input_dim=11, hidden_nodes=12)


def default_train_setup(target: str, seed: int = 0) -> tuple[TrainConfig, NetworkArch]:
    """Stock (config, architecture) for the 'pr' and 'ef' surrogates."""
    if target == "pr":
        cfg = TrainConfig(learn_rate=0.1, gd_iterations=2000, sa_initial_temp=100.0,
                          sa_drop_ratio=0.99, sa_inner_loops=50, sa_iterations=1000,
                          sa_final_temp=0.0, seed=seed)
        return cfg, PRCR_ARCH
    if target == "ef":
        cfg = TrainConfig(learn_rate=0.15, gd_iterations=1000, sa_initial_temp=80.0,
                          sa_drop_ratio=0.99, sa_inner_loops=30, sa_iterations=1000,
                          sa_final_temp=0.0, seed=seed)
        return cfg, CCR_ARCH
    raise InvalidInputError("target", f"must be 'pr' or 'ef', got {target!r}")


# ---------------------------------------------------------------------------
# forward pass and gradients
# ---------------------------------------------------------------------------


def forward(net: NetworkParams, x: np.ndarray) -> float:
    """out = W_ho . tanh(W_ih . x + b_h) + b_o"""
    x = np.asarray(x, dtype=float)
    if x.shape != (net.input_dim,):
        raise InvalidInputError("x", f"expected shape ({net.input_dim},), got {x.shape}")
    hidden = np.tanh(net.weights_ih @ x + net.bias_h)
    return float(net.weights_ho[0] @ hidden + net.bias_o)


def forward_batch(net: NetworkParams, X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != net.input_dim:
        raise InvalidInputError("X", f"expected (n, {net.input_dim}), got {X.shape}")
    hidden = np.tanh(X @ net.weights_ih.T + net.bias_h)
    return hidden @ net.weights_ho[0] + net.bias_o


def _views(flat: np.ndarray, arch: NetworkArch):
    h, d = arch.hidden_nodes, arch.input_dim
    return (flat[:h * d].reshape(h, d), flat[h * d:h * d + h],
            flat[h * d + h:h * d + 2 * h], flat[-1])


def _mse_flat(flat: np.ndarray, arch: NetworkArch, X: np.ndarray, y: np.ndarray) -> float:
    w_ih, b_h, w_ho, b_o = _views(flat, arch)
    a = np.tanh(X @ w_ih.T + b_h)
    err = a @ w_ho + b_o - y
    return float(err @ err) / len(y)


def _grad_flat(flat: np.ndarray, arch: NetworkArch, X: np.ndarray,
               y: np.ndarray) -> tuple[np.ndarray, float]:
    """Analytic gradient of the mean-squared error; returns (grad, loss)."""
    w_ih, b_h, w_ho, b_o = _views(flat, arch)
    n = len(y)
    a = np.tanh(X @ w_ih.T + b_h)              # n x h
    err = a @ w_ho + b_o - y                   # n
    loss = float(err @ err) / n
    e = (2.0 / n) * err
    g_who = e @ a                              # h
    g_bo = float(e.sum())
    dz = np.outer(e, w_ho) * (1.0 - a * a)     # n x h
    g_wih = dz.T @ X                           # h x d
    g_bh = dz.sum(axis=0)
    grad = np.concatenate([g_wih.ravel(), g_bh, g_who, [g_bo]])
    return grad, loss


def gd_train(net: NetworkParams, X: np.ndarray, y: np.ndarray,
             cfg: TrainConfig) -> tuple[NetworkParams, np.ndarray]:
    """Full-batch gradient descent on MSE; returns (net, loss trace).

    Steps that would increase the loss are rejected and the learning rate
    halved, so the trace is non-strictly decreasing. A NaN loss raises,
    carrying the iteration index.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    arch = net.arch
    p = net.to_flat()
    trace = np.empty(cfg.gd_iterations)
    loss = _mse_flat(p, arch, X, y)
    if math.isnan(loss):
        raise TrainingDivergedError(0)
    lr = cfg.learn_rate
    for it in range(cfg.gd_iterations):
        grad, _ = _grad_flat(p, arch, X, y)
        candidate = p - lr * grad
        new_loss = _mse_flat(candidate, arch, X, y)
        if math.isnan(new_loss):
            raise TrainingDivergedError(it)
        if new_loss <= loss:
            p = candidate
            loss = new_loss
        else:
            lr = max(lr / 2.0, _MIN_LEARN_RATE)
        trace[it] = loss
    return NetworkParams.from_flat(p, arch), trace


def check_gradient(net: NetworkParams, X: np.ndarray, y: np.ndarray,
                   eps: float = 1e-5) -> float:
    """Relative error between analytic and central-difference gradients."""
    arch = net.arch
    p = net.to_flat()
    analytic, _ = _grad_flat(p, arch, X, y)
    fd = np.empty_like(analytic)
    for i in range(len(p)):
        plus = p.copy(); plus[i] += eps
        minus = p.copy(); minus[i] -= eps
        fd[i] = (_mse_flat(plus, arch, X, y) - _mse_flat(minus, arch, X, y)) / (2 * eps)
    denom = max(float(np.linalg.norm(analytic)), float(np.linalg.norm(fd)), 1e-12)
    return float(np.linalg.norm(analytic - fd)) / denom


# ---------------------------------------------------------------------------
# simulated annealing initialization
# ---------------------------------------------------------------------------


def random_network(arch: NetworkArch, rng: np.random.Generator) -> NetworkParams:
    """Uniform(-1, 1) weights and biases (the plain initialization)."""
    return NetworkParams.from_flat(rng.uniform(-_INIT_WIDTH, _INIT_WIDTH,
                                               size=arch.n_params), arch)


def sa_init(X: np.ndarray, y: np.ndarray, cfg: TrainConfig, arch: NetworkArch,
            return_trace: bool = False, energy_scale: float = 1.0):
    """Metropolis annealing over the flattened parameter vector.

    Energy is the training MSE in original target units: when the
    targets passed in are z-scored, ``energy_scale`` (the squared target
    std) restores the original scale, which is what the stock initial
    temperatures are calibrated against. One randomly chosen parameter
    is perturbed per proposal with a Gaussian of std 0.5*(t/t0) + 0.01;
    proposals leaving the small-weight box |p| <= 0.5 are rejected, so
    the walk cannot wander into tanh saturation. Cooling is geometric
    (t *= drop ratio), stopping after the configured number of
    temperature steps or once t < max(final temp, 1e-8). Returns the
    best-energy parameters seen; with ``return_trace`` also the
    per-temperature-step best-energy trace (non-increasing).
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if energy_scale <= 0:
        raise InvalidInputError("energy_scale", f"must be > 0, got {energy_scale}")
    rng = np.random.default_rng(cfg.seed)
    p = random_network(arch, rng).to_flat()
    energy = energy_scale * _mse_flat(p, arch, X, y)
    best = p.copy()
    best_energy = energy
    t0 = cfg.sa_initial_temp
    t = t0
    stop_temp = max(cfg.sa_final_temp, _MIN_TEMPERATURE)
    trace = []
    for _ in range(cfg.sa_iterations):
        if t < stop_temp:
            break
        sigma = 0.5 * (t / t0) + 0.01
        for _ in range(cfg.sa_inner_loops):
            i = int(rng.integers(len(p)))
            old = p[i]
            p[i] = old + rng.normal(0.0, sigma)
            if abs(p[i]) > _SA_BOX:
                p[i] = old
                continue
            new_energy = energy_scale * _mse_flat(p, arch, X, y)
            accept = (new_energy <= energy
                      or rng.random() < math.exp(-(new_energy - energy) / t))
            if accept:
                energy = new_energy
                if energy < best_energy:
                    best_energy = energy
                    best = p.copy()
            else:
                p[i] = old
        trace.append(best_energy)
        t *= cfg.sa_drop_ratio
    net = NetworkParams.from_flat(best, arch)
    if return_trace:
        return net, np.asarray(trace)
    return net


# ---------------------------------------------------------------------------
# target scaling, evaluation, full training
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TargetScaler:
    """z-score scaler for targets; std 0 encodes a constant target."""

    mean: float
    std: float

    def normalize(self, y: np.ndarray) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        if self.std == 0.0:
            return np.zeros_like(y)
        return (y - self.mean) / self.std

    def denormalize(self, y: np.ndarray):
        return np.asarray(y, dtype=float) * self.std + self.mean


def fit_target_scaler(y: np.ndarray, enabled: bool = True) -> TargetScaler:
    y = np.asarray(y, dtype=float)
    if not enabled:
        return TargetScaler(0.0, 1.0)
    mean = float(y.mean())
    std = float(y.std(ddof=1)) if len(y) >= 2 else 0.0
    if not math.isfinite(std) or std < 1e-12:
        std = 0.0
    return TargetScaler(mean, std)


@dataclass(frozen=True)
class EvalReport:
    """MAE (target units), MAPE (%), trend accuracy (%) over n samples."""

    mae: float
    mape: float
    trend_accuracy: Optional[float]
    n: int

    def __post_init__(self) -> None:
        if self.mae < 0:
            raise InvalidInputError("mae", f"must be >= 0, got {self.mae}")
        if self.trend_accuracy is not None and not 0 <= self.trend_accuracy <= 100:
            raise InvalidInputError("trend_accuracy",
                                    f"must be in [0, 100], got {self.trend_accuracy}")

    def to_dict(self) -> dict:
        return {"mae": self.mae, "mape": self.mape,
                "trend_accuracy": self.trend_accuracy, "n": self.n}


def evaluate(pred: np.ndarray, truth: np.ndarray, ordered: bool = False) -> EvalReport:
    """MAE, MAPE and (for ordered series) direction-of-change accuracy.

    Trend accuracy counts consecutive pairs whose predicted and measured
    changes share a sign, over n-1 pairs.
    """
    pred = np.asarray(pred, dtype=float)
    truth = np.asarray(truth, dtype=float)
    if pred.shape != truth.shape or pred.ndim != 1 or len(pred) < 1:
        raise InvalidInputError("pred/truth",
                                f"need equal-length 1-d arrays, got {pred.shape} vs {truth.shape}")
    zero_idx = [int(i) for i in np.nonzero(truth == 0.0)[0]]
    if zero_idx:
        raise MapeUndefinedError(zero_idx)
    abs_err = np.abs(pred - truth)
    mae = float(abs_err.mean())
    mape = float((abs_err / np.abs(truth)).mean() * 100.0)
    trend = None
    if ordered and len(pred) >= 2:
        same = np.sign(np.diff(pred)) == np.sign(np.diff(truth))
        trend = float(100.0 * same.sum() / (len(pred) - 1))
    return EvalReport(mae=mae, mape=mape, trend_accuracy=trend, n=len(pred))


def train_sa_bpnn(X: np.ndarray, y: np.ndarray, Xv: np.ndarray, yv: np.ndarray,
                  cfg: TrainConfig, arch: NetworkArch,
                  ordered_validation: bool = False
                  ) -> tuple[NetworkParams, TargetScaler, EvalReport]:
    """SA initialization followed by gradient descent; report on validation."""
    scaler = fit_target_scaler(y, enabled=cfg.target_normalization)
    y_n = scaler.normalize(y)
    energy_scale = scaler.std * scaler.std if scaler.std > 0 else 1.0
    net = sa_init(X, y_n, cfg, arch, energy_scale=energy_scale)
    net, _ = gd_train(net, X, y_n, cfg)
    pred_v = scaler.denormalize(forward_batch(net, Xv))
    report = evaluate(pred_v, yv, ordered=ordered_validation)
    return net, scaler, report


@dataclass(frozen=True)
class FittedModel:
    """A trained surrogate: preprocessor + network + target scaler."""

    target: str  # "pr" or "ef"
    preprocessor: PreprocessorState
    network: NetworkParams
    target_scaler: TargetScaler

    def predict(self, rock: RockMassState, machine: MachineSetting) -> float:
        x = transform(self.preprocessor, rock, machine)
        return float(self.target_scaler.denormalize(forward(self.network, x)))


def _target_values(records: Sequence[TunnelingRecord], target: str) -> np.ndarray:
    values = []
    for i, rec in enumerate(records):
        value = rec.pr if target == "pr" else rec.ef
        if value is None:
            raise InvalidInputError(target, f"record {i} is missing the {target} target")
        values.append(value)
    return np.asarray(values, dtype=float)


def _sorted_by_chainage(records: Sequence[TunnelingRecord]) -> tuple[list[TunnelingRecord], bool]:
    if all(r.chainage is not None for r in records):
        return sorted(records, key=lambda r: r.chainage), True
    return list(records), False


@dataclass(frozen=True)
class CrossValResult:
    """Per-fold models and reports plus the selected best fold."""

    models: tuple[FittedModel, ...]
    reports: tuple[EvalReport, ...]
    selected: int
    plan_seed: int

    @property
    def selected_model(self) -> FittedModel:
        return self.models[self.selected]

    @property
    def selected_report(self) -> EvalReport:
        return self.reports[self.selected]


def cross_validate(records: Sequence[TunnelingRecord], k: int, cfg: TrainConfig,
                   arch: NetworkArch, target: str) -> CrossValResult:
    """Train k models, each with one fold held out; select lowest MAPE.

    Ties break toward lower MAE, then lower fold index. Every fold trains
    with the same seed so results depend only on the data split.
    """
    if target not in ("pr", "ef"):
        raise InvalidInputError("target", f"must be 'pr' or 'ef', got {target!r}")
    plan = kfold_split(len(records), k, cfg.seed)
    models: list[FittedModel] = []
    reports: list[EvalReport] = []
    for fold in range(k):
        train_idx, val_idx = plan.fold_indices(fold)
        train = [records[i] for i in train_idx]
        val = [records[i] for i in val_idx]
        val, ordered = _sorted_by_chainage(val)
        pre = fit_preprocessor(train)
        X = transform_many(pre, train)
        Xv = transform_many(pre, val)
        y = _target_values(train, target)
        yv = _target_values(val, target)
        net, scaler, report = train_sa_bpnn(X, y, Xv, yv, cfg, arch,
                                            ordered_validation=ordered)
        models.append(FittedModel(target, pre, net, scaler))
        reports.append(report)
    selected = min(range(k), key=lambda i: (reports[i].mape, reports[i].mae, i))
    return CrossValResult(tuple(models), tuple(reports), selected, cfg.seed)
