"""Cost objective over (thrust, torque) and the exhaustive grid search.

The per-metre cost of a control setting splits into a cutter-consumption
term and a schedule term::

    cost = c1 * pi * D^2 * L / (4 * Ef * W_max)  +  c2 * L / (PR * 0.06 * T)

``0.06 * T`` converts a penetration rate in mm/min into advance in m/day
over T effective tunneling hours (PR * 60 * T / 1000). With the stock
coefficients (c1 = 30000 RMB/cutter, c2 = 350000 RMB/day, D = 6 m,
W_max = 25 mm, T = 10 h, L = 1 m) costs come out per metre of tunnel.

The optimizer evaluates both surrogates at every point of an inclusive
arithmetic grid (recomputing the merged UCS/Th feature per candidate
thrust), drops points with non-positive predictions, and returns the
cheapest; ties break toward lower thrust, then lower torque. Grid
evaluation is pure and index-ordered, so results do not depend on any
internal parallelism.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .domain import MachineSetting, RockMassState
from .errors import InvalidInputError, NoFeasiblePointError

#: A fitted surrogate (or ground-truth function): (rock, machine) -> value.
Surrogate = Callable[[RockMassState, MachineSetting], float]


@dataclass(frozen=True)
class CostParams:
    """Economic and machine constants of the cost model."""

    c1: float = 30000.0      # RMB per cutter
    c2: float = 350000.0     # RMB per day of tunneling
    d_tbm: float = 6.0       # cutterhead diameter, m
    w_max: float = 25.0      # cutter wear limit, mm
    t_daily: float = 10.0    # effective tunneling hours per day
    l: float = 1.0           # reference length, m

    def __post_init__(self) -> None:
        for name in ("c1", "c2", "d_tbm", "w_max", "t_daily", "l"):
            if getattr(self, name) <= 0:
                raise InvalidInputError(name, f"must be > 0, got {getattr(self, name)}")

    def to_dict(self) -> dict:
        return {"c1": self.c1, "c2": self.c2, "d_tbm": self.d_tbm,
                "w_max": self.w_max, "t_daily": self.t_daily, "l": self.l}


@dataclass(frozen=True)
class GridSpec:
    """Inclusive arithmetic grid over thrust (kN) and torque (kN*m)."""

    th_min: float = 2000.0
    th_max: float = 10000.0
    th_step: float = 100.0
    tor_min: float = 200.0
    tor_max: float = 1500.0
    tor_step: float = 50.0

    def __post_init__(self) -> None:
        if self.th_min >= self.th_max and not math.isclose(self.th_min, self.th_max):
            raise InvalidInputError("th_min", "must be <= th_max")
        if self.tor_min >= self.tor_max and not math.isclose(self.tor_min, self.tor_max):
            raise InvalidInputError("tor_min", "must be <= tor_max")
        if self.th_step <= 0:
            raise InvalidInputError("th_step", f"must be > 0, got {self.th_step}")
        if self.tor_step <= 0:
            raise InvalidInputError("tor_step", f"must be > 0, got {self.tor_step}")

    def to_dict(self) -> dict:
        return {"th_min": self.th_min, "th_max": self.th_max, "th_step": self.th_step,
                "tor_min": self.tor_min, "tor_max": self.tor_max, "tor_step": self.tor_step}


class CostBreakdown(NamedTuple):
    total: float
    cutter: float
    period: float


def cost(pr: float, ef: float, p: CostParams = CostParams()) -> CostBreakdown:
    """Total, cutter and schedule cost (RMB) for a predicted (PR, Ef)."""
    if not (pr > 0):
        raise InvalidInputError("pr", f"must be > 0, got {pr}")
    if not (ef > 0):
        raise InvalidInputError("ef", f"must be > 0, got {ef}")
    cutter = p.c1 * math.pi * p.d_tbm * p.d_tbm * p.l / (4.0 * ef * p.w_max)
    advance_m_per_day = pr * 0.06 * p.t_daily
    period = p.c2 * p.l / advance_m_per_day
    return CostBreakdown(cutter + period, cutter, period)


def _axis(lo: float, hi: float, step: float) -> np.ndarray:
    n = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return lo + step * np.arange(n)


def grid_axes(g: GridSpec) -> tuple[np.ndarray, np.ndarray]:
    """(thrust values, torque values) of the inclusive grid."""
    return _axis(g.th_min, g.th_max, g.th_step), _axis(g.tor_min, g.tor_max, g.tor_step)


def grid_points(g: GridSpec) -> list[MachineSetting]:
    """All grid settings, row-major (thrust outer, torque inner)."""
    th_values, tor_values = grid_axes(g)
    return [MachineSetting(float(th), float(tor)) for th in th_values for tor in tor_values]


@dataclass(frozen=True)
class Recommendation:
    """The cheapest feasible grid setting with its predictions and cost."""

    th: float
    tor: float
    pr: float
    ef: float
    cost: float
    cutter_cost: float
    period_cost: float
    feasible_fraction: float

    def to_dict(self) -> dict:
        return {"th": self.th, "tor": self.tor, "pr": self.pr, "ef": self.ef,
                "cost": self.cost, "cutter_cost": self.cutter_cost,
                "period_cost": self.period_cost,
                "feasible_fraction": self.feasible_fraction}


@dataclass(frozen=True)
class CostSurface:
    """Dense cost/PR/Ef matrices over the grid; infeasible cells are NaN."""

    th_values: np.ndarray
    tor_values: np.ndarray
    cost: np.ndarray  # th x tor
    pr: np.ndarray
    ef: np.ndarray
    optimum: tuple[int, int]

    def __post_init__(self) -> None:
        shape = (len(self.th_values), len(self.tor_values))
        for name in ("cost", "pr", "ef"):
            if getattr(self, name).shape != shape:
                raise InvalidInputError(name, f"expected shape {shape}")
            getattr(self, name).setflags(write=False)
        self.th_values.setflags(write=False)
        self.tor_values.setflags(write=False)

    @property
    def feasible_fraction(self) -> float:
        return float(np.isfinite(self.cost).sum()) / self.cost.size


def _evaluate_grid(rock: RockMassState, pr_model: Surrogate, ef_model: Surrogate,
                   p: CostParams, g: GridSpec):
    th_values, tor_values = grid_axes(g)
    shape = (len(th_values), len(tor_values))
    pr_mat = np.full(shape, np.nan)
    ef_mat = np.full(shape, np.nan)
    cost_mat = np.full(shape, np.nan)
    for i, th in enumerate(th_values):
        for j, tor in enumerate(tor_values):
            setting = MachineSetting(float(th), float(tor))
            pr = pr_model(rock, setting)
            ef = ef_model(rock, setting)
            pr_mat[i, j] = pr
            ef_mat[i, j] = ef
            if pr > 0 and ef > 0 and math.isfinite(pr) and math.isfinite(ef):
                cost_mat[i, j] = cost(pr, ef, p).total
    return th_values, tor_values, pr_mat, ef_mat, cost_mat


def cost_surface(rock: RockMassState, pr_model: Surrogate, ef_model: Surrogate,
                 p: CostParams = CostParams(), g: GridSpec = GridSpec()) -> CostSurface:
    """Evaluate both surrogates and the cost at every grid point."""
    th_values, tor_values, pr_mat, ef_mat, cost_mat = _evaluate_grid(
        rock, pr_model, ef_model, p, g)
    finite = np.isfinite(cost_mat)
    if not finite.any():
        raise NoFeasiblePointError(feasible_fraction=0.0)
    # first occurrence in row-major order = lowest th, then lowest tor
    flat = np.where(finite, cost_mat, np.inf).ravel()
    idx = int(np.argmin(flat))
    optimum = (idx // len(tor_values), idx % len(tor_values))
    return CostSurface(th_values=th_values, tor_values=tor_values,
                       cost=cost_mat, pr=pr_mat, ef=ef_mat, optimum=optimum)


def recommendation_from_surface(surface: CostSurface, p: CostParams) -> Recommendation:
    i, j = surface.optimum
    pr = float(surface.pr[i, j])
    ef = float(surface.ef[i, j])
    breakdown = cost(pr, ef, p)
    return Recommendation(th=float(surface.th_values[i]), tor=float(surface.tor_values[j]),
                          pr=pr, ef=ef, cost=breakdown.total, cutter_cost=breakdown.cutter,
                          period_cost=breakdown.period,
                          feasible_fraction=surface.feasible_fraction)


def optimize(rock: RockMassState, pr_model: Surrogate, ef_model: Surrogate,
             p: CostParams = CostParams(), g: GridSpec = GridSpec()) -> Recommendation:
    """Exhaustive search for the cheapest feasible (thrust, torque)."""
    return recommendation_from_surface(cost_surface(rock, pr_model, ef_model, p, g), p)
