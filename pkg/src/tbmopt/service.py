"""Read-only HTTP API over two loaded model bundles.

The service is a trusted local operator tool: plain JSON over HTTP, no
auth, no state beyond the immutable bundles loaded at startup. Request
validation failures return 4xx with a structured ``errors`` list of
``{field, message}`` objects; an optimization with no feasible grid
point returns 422 with the feasible fraction. Responses are pure
functions of (bundles, request body), so replays are byte-identical.
"""

from __future__ import annotations

import math
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .bundle import ModelBundle, surface_payload
from .decision import CostParams, GridSpec, cost, cost_surface, grid_axes, recommendation_from_surface
from .domain import MachineSetting, RockMassState
from .errors import InvalidInputError, NoFeasiblePointError, TbmError


class RockBody(BaseModel):
    src: int
    ucs: float
    rqd: float
    cai: float
    q: float
    ci: float
    m: float
    mgt: int

    def to_domain(self) -> RockMassState:
        return RockMassState(src=self.src, ucs=self.ucs, rqd=self.rqd, cai=self.cai,
                             q=self.q, ci=self.ci, m=self.m, mgt=self.mgt)


class CostBody(BaseModel):
    c1: Optional[float] = None
    c2: Optional[float] = None
    d_tbm: Optional[float] = None
    w_max: Optional[float] = None
    t_daily: Optional[float] = None
    l: Optional[float] = None

    def to_domain(self) -> CostParams:
        defaults = CostParams()
        return CostParams(**{name: getattr(self, name) if getattr(self, name) is not None
                             else getattr(defaults, name)
                             for name in ("c1", "c2", "d_tbm", "w_max", "t_daily", "l")})


class GridBody(BaseModel):
    th_min: Optional[float] = None
    th_max: Optional[float] = None
    th_step: Optional[float] = None
    tor_min: Optional[float] = None
    tor_max: Optional[float] = None
    tor_step: Optional[float] = None

    def to_domain(self) -> GridSpec:
        defaults = GridSpec()
        names = ("th_min", "th_max", "th_step", "tor_min", "tor_max", "tor_step")
        return GridSpec(**{name: getattr(self, name) if getattr(self, name) is not None
                           else getattr(defaults, name) for name in names})


class BaselineBody(BaseModel):
    th: float
    tor: float


class PredictBody(BaseModel):
    rock: RockBody
    th: float
    tor: float
    cost: Optional[CostBody] = None


class RecommendBody(BaseModel):
    rock: RockBody
    cost: Optional[CostBody] = None
    grid: Optional[GridBody] = None
    baseline: Optional[BaselineBody] = None


class SurfaceBody(BaseModel):
    rock: RockBody
    cost: Optional[CostBody] = None
    grid: Optional[GridBody] = None


def _resolve_cost(body: Optional[CostBody]) -> CostParams:
    return body.to_domain() if body is not None else CostParams()


def _resolve_grid(body: Optional[GridBody]) -> GridSpec:
    return body.to_domain() if body is not None else GridSpec()


def _bundle_meta(bundle: ModelBundle) -> dict:
    report = bundle.selected_report
    return {
        "target": bundle.target,
        "created_at": bundle.created_at,
        "schema_version": bundle.schema_version,
        "seed": bundle.training_meta.seed,
        "folds": bundle.training_meta.folds,
        "selected_fold": bundle.training_meta.selected_fold,
        "metrics": report.to_dict(),
        "fold_reports": [r.to_dict() for r in bundle.training_meta.fold_reports],
    }


def _is_on_grid(value: float, lo: float, hi: float, step: float) -> bool:
    if not lo <= value <= hi:
        return False
    k = (value - lo) / step
    return math.isclose(k, round(k), abs_tol=1e-9)


def _evaluate_point(pr_bundle: ModelBundle, ef_bundle: ModelBundle,
                    rock: RockMassState, setting: MachineSetting,
                    params: CostParams) -> dict:
    pr = pr_bundle.predict(rock, setting)
    ef = ef_bundle.predict(rock, setting)
    body = {"th": setting.th, "tor": setting.tor, "pr": pr, "ef": ef}
    if pr > 0 and ef > 0:
        breakdown = cost(pr, ef, params)
        body["cost"] = {"total": breakdown.total, "cutter": breakdown.cutter,
                        "period": breakdown.period}
    else:
        body["cost"] = None
    return body


def create_app(pr_bundle: ModelBundle, ef_bundle: ModelBundle) -> FastAPI:
    """Build the API over two immutable, already-loaded bundles."""
    if pr_bundle.target != "pr" or ef_bundle.target != "ef":
        raise InvalidInputError("bundles",
                                f"expected targets (pr, ef), got "
                                f"({pr_bundle.target}, {ef_bundle.target})")
    app = FastAPI(title="tbmopt", docs_url=None, redoc_url=None)

    @app.exception_handler(RequestValidationError)
    async def _validation_handler(request: Request, exc: RequestValidationError):
        errors = [{"field": ".".join(str(part) for part in err["loc"] if part != "body"),
                   "message": err["msg"]} for err in exc.errors()]
        return JSONResponse(status_code=422, content={"code": "invalid_request",
                                                      "errors": errors})

    @app.exception_handler(InvalidInputError)
    async def _domain_handler(request: Request, exc: InvalidInputError):
        return JSONResponse(status_code=400,
                            content={"code": exc.code,
                                     "errors": [{"field": exc.field, "message": str(exc)}]})

    @app.exception_handler(NoFeasiblePointError)
    async def _infeasible_handler(request: Request, exc: NoFeasiblePointError):
        return JSONResponse(status_code=422,
                            content={"code": exc.code,
                                     "feasible_fraction": exc.feasible_fraction,
                                     "errors": [{"field": "grid", "message": str(exc)}]})

    @app.exception_handler(TbmError)
    async def _tbm_handler(request: Request, exc: TbmError):
        return JSONResponse(status_code=400,
                            content={"code": exc.code,
                                     "errors": [{"field": "", "message": str(exc)}]})

    @app.get("/api/v1/health")
    def health():
        return {"status": "ok", "models": ["pr", "ef"]}

    @app.get("/api/v1/models")
    def models():
        return {"pr": _bundle_meta(pr_bundle), "ef": _bundle_meta(ef_bundle)}

    @app.post("/api/v1/predict")
    def predict(body: PredictBody):
        rock = body.rock.to_domain()
        setting = MachineSetting(th=body.th, tor=body.tor)
        return _evaluate_point(pr_bundle, ef_bundle, rock, setting,
                               _resolve_cost(body.cost))

    @app.post("/api/v1/recommend")
    def recommend(body: RecommendBody):
        rock = body.rock.to_domain()
        params = _resolve_cost(body.cost)
        grid = _resolve_grid(body.grid)
        surface = cost_surface(rock, pr_bundle.predict, ef_bundle.predict, params, grid)
        rec = recommendation_from_surface(surface, params)
        response = {"recommendation": rec.to_dict(),
                    "params": {"cost": params.to_dict(), "grid": grid.to_dict()}}
        if body.baseline is not None:
            setting = MachineSetting(th=body.baseline.th, tor=body.baseline.tor)
            point = _evaluate_point(pr_bundle, ef_bundle, rock, setting, params)
            point["on_grid"] = (_is_on_grid(setting.th, grid.th_min, grid.th_max, grid.th_step)
                                and _is_on_grid(setting.tor, grid.tor_min, grid.tor_max,
                                                grid.tor_step))
            response["baseline"] = point
        else:
            response["baseline"] = None
        return response

    @app.post("/api/v1/surface")
    def surface(body: SurfaceBody):
        rock = body.rock.to_domain()
        params = _resolve_cost(body.cost)
        grid = _resolve_grid(body.grid)
        surf = cost_surface(rock, pr_bundle.predict, ef_bundle.predict, params, grid)
        payload = surface_payload(surf)
        payload["params"] = {"cost": params.to_dict(), "grid": grid.to_dict()}
        return payload

    return app
