"""``tbm`` command-line driver.

Exit codes: 0 ok, 2 validation error (bad arguments, malformed input,
domain invariant violations), 3 runtime/training error. ``TBM_SEED``
provides the default seed everywhere one is accepted.
"""

from __future__ import annotations

import functools
import json
import sys
from pathlib import Path

import click

from . import bundle as bundle_io
from . import dataio, synth
from .decision import CostParams, GridSpec, cost, cost_surface, recommendation_from_surface
from .domain import MachineSetting, RockMassState, coarseness_index, mean_grain_size
from .errors import (CsvFormatError, InvalidInputError, TbmError,
                     UnsupportedMuckComboError)
from .sabpnn import evaluate

_VALIDATION_ERRORS = (InvalidInputError, CsvFormatError, UnsupportedMuckComboError)


def _tbm_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except _VALIDATION_ERRORS as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(2)
        except TbmError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(3)
    return wrapper


def _json_arg(value, name: str):
    if value is None:
        return None
    text = Path(value[1:]).read_text() if value.startswith("@") else value
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInputError(name, f"not valid JSON: {exc}") from None


def _rock_from_json(value) -> RockMassState:
    data = _json_arg(value, "rock")
    if not isinstance(data, dict):
        raise InvalidInputError("rock", "expected a JSON object")
    required = {"src", "ucs", "rqd", "cai", "q", "ci", "m", "mgt"}
    missing = required - set(data)
    if missing:
        raise InvalidInputError("rock", f"missing keys: {sorted(missing)}")
    extra = set(data) - required
    if extra:
        raise InvalidInputError("rock", f"unknown keys: {sorted(extra)}")
    return RockMassState(src=int(data["src"]), ucs=float(data["ucs"]),
                         rqd=float(data["rqd"]), cai=float(data["cai"]),
                         q=float(data["q"]), ci=float(data["ci"]),
                         m=float(data["m"]), mgt=int(data["mgt"]))


def _overridden(cls, overrides, name: str):
    if overrides is None:
        return cls()
    data = _json_arg(overrides, name)
    if not isinstance(data, dict):
        raise InvalidInputError(name, "expected a JSON object")
    defaults = cls()
    unknown = set(data) - set(defaults.to_dict())
    if unknown:
        raise InvalidInputError(name, f"unknown keys: {sorted(unknown)}")
    merged = {**defaults.to_dict(), **{k: float(v) for k, v in data.items()}}
    return cls(**merged)


def _baseline_from_text(value) -> MachineSetting | None:
    if value is None:
        return None
    parts = value.split(",")
    if len(parts) != 2:
        raise InvalidInputError("baseline", f"expected 'TH,TOR', got {value!r}")
    return MachineSetting(th=float(parts[0]), tor=float(parts[1]))


seed_option = click.option("--seed", type=int, default=0, envvar="TBM_SEED",
                           show_default=True, help="RNG seed (env TBM_SEED).")


@click.group()
def main():
    """Decision support for TBM thrust/torque control parameters."""


@main.command()
@click.option("--preset", type=click.Choice(["prcr", "ccr"]), required=True,
              help="Sampling ranges and target of the generated dataset.")
@click.option("--n", type=int, default=None, help="Record count (default: preset size).")
@click.option("--noise", type=float, default=8.0, show_default=True,
              help="Relative target noise, percent.")
@seed_option
@click.option("--out", type=click.Path(dir_okay=False), required=True)
@_tbm_errors
def synth_cmd(preset, n, noise, seed, out):
    """Generate a synthetic records CSV."""
    gt = synth.GroundTruth(noise_sigma_pct=noise)
    scenario = synth.prcr_scenario(seed) if preset == "prcr" else synth.ccr_scenario(seed)
    if n is not None:
        scenario = synth.ScenarioSpec(ranges=scenario.ranges, n_train=n, n_test=0,
                                      seed=seed, target=scenario.target)
    train, test = synth.generate_dataset(scenario, gt)
    Path(out).write_text(dataio.emit_records_csv(train + test))
    click.echo(f"wrote {len(train) + len(test)} records to {out}")


main.add_command(synth_cmd, name="synth")


@main.command()
@click.option("--data", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--target", type=click.Choice(["pr", "ef"]), required=True)
@click.option("--folds", type=int, default=None,
              help="Cross-validation folds (default: 3 for pr, 4 for ef).")
@seed_option
@click.option("--out", type=click.Path(dir_okay=False), required=True)
@_tbm_errors
def train(data, target, folds, seed, out):
    """Train a surrogate model bundle from a records CSV."""
    records = dataio.parse_records_csv(Path(data).read_bytes())
    bundle = bundle_io.train_model_bundle(records, target, folds=folds, seed=seed)
    bundle_io.save_model_file(bundle, out)
    report = bundle.selected_report
    click.echo(f"trained {target} model on {len(records)} records "
               f"(fold {bundle.training_meta.selected_fold}: "
               f"MAE {report.mae:.3f}, MAPE {report.mape:.2f}%) -> {out}")


@main.command("evaluate")
@click.option("--model", "model_path", type=click.Path(exists=True, dir_okay=False),
              required=True)
@click.option("--data", type=click.Path(exists=True, dir_okay=False), required=True)
@_tbm_errors
def evaluate_cmd(model_path, data):
    """Evaluate a model bundle against records with measured targets."""
    bundle = bundle_io.load_model_file(model_path)
    records = dataio.parse_records_csv(Path(data).read_bytes())
    target = bundle.target
    rows = [r for r in records
            if (r.pr if target == "pr" else r.ef) is not None]
    if not rows:
        raise InvalidInputError(target, "no records carry the model's target")
    ordered = all(r.chainage is not None for r in rows)
    if ordered:
        rows = sorted(rows, key=lambda r: r.chainage)
    truth = [r.pr if target == "pr" else r.ef for r in rows]
    pred = [bundle.predict(r.rock, r.machine) for r in rows]
    report = evaluate(pred, truth, ordered=ordered)
    click.echo(json.dumps(report.to_dict()))


@main.group()
def muck():
    """Muck sieve analytics."""


@muck.command("ci")
@click.option("--sieve", type=click.Path(exists=True, dir_okay=False), required=True)
@_tbm_errors
def muck_ci(sieve):
    """Coarseness index per sample."""
    for analysis in dataio.parse_sieve_csv(Path(sieve).read_bytes()):
        click.echo(f"{analysis.sample_id}: CI = {coarseness_index(analysis):.2f}")


@muck.command("mgs")
@click.option("--sieve", type=click.Path(exists=True, dir_okay=False), required=True)
@_tbm_errors
def muck_mgs(sieve):
    """Mean grain size per sample."""
    for analysis in dataio.parse_sieve_csv(Path(sieve).read_bytes()):
        result = mean_grain_size(analysis)
        suffix = " (clamped)" if result.clamped else ""
        click.echo(f"{analysis.sample_id}: M = {result.value:.3f} mm{suffix}")


def _load_two_bundles(pr_model, ef_model):
    pr_bundle = bundle_io.load_model_file(pr_model)
    ef_bundle = bundle_io.load_model_file(ef_model)
    if pr_bundle.target != "pr":
        raise InvalidInputError("pr-model", f"bundle target is {pr_bundle.target!r}")
    if ef_bundle.target != "ef":
        raise InvalidInputError("ef-model", f"bundle target is {ef_bundle.target!r}")
    return pr_bundle, ef_bundle


def _surface_inputs(pr_model, ef_model, rock, cost_json, grid_json):
    pr_bundle, ef_bundle = _load_two_bundles(pr_model, ef_model)
    return (pr_bundle, ef_bundle, _rock_from_json(rock),
            _overridden(CostParams, cost_json, "cost"),
            _overridden(GridSpec, grid_json, "grid"))


@main.command()
@click.option("--pr-model", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--ef-model", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--rock", required=True, help="Rock state as JSON (or @file).")
@click.option("--cost", "cost_json", default=None, help="Cost overrides as JSON.")
@click.option("--grid", "grid_json", default=None, help="Grid overrides as JSON.")
@click.option("--baseline", default=None, help="Operator setting 'TH,TOR' to compare.")
@_tbm_errors
def recommend(pr_model, ef_model, rock, cost_json, grid_json, baseline):
    """Recommend the cost-minimizing thrust/torque for a rock state."""
    pr_bundle, ef_bundle, rock_state, params, grid = _surface_inputs(
        pr_model, ef_model, rock, cost_json, grid_json)
    surface = cost_surface(rock_state, pr_bundle.predict, ef_bundle.predict, params, grid)
    rec = recommendation_from_surface(surface, params)
    out = {"recommendation": rec.to_dict(),
           "params": {"cost": params.to_dict(), "grid": grid.to_dict()}}
    setting = _baseline_from_text(baseline)
    if setting is not None:
        pr = pr_bundle.predict(rock_state, setting)
        ef = ef_bundle.predict(rock_state, setting)
        point = {"th": setting.th, "tor": setting.tor, "pr": pr, "ef": ef,
                 "cost": None}
        if pr > 0 and ef > 0:
            breakdown = cost(pr, ef, params)
            point["cost"] = {"total": breakdown.total, "cutter": breakdown.cutter,
                             "period": breakdown.period}
        out["baseline"] = point
    click.echo(json.dumps(out))


@main.command("surface")
@click.option("--pr-model", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--ef-model", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--rock", required=True, help="Rock state as JSON (or @file).")
@click.option("--cost", "cost_json", default=None)
@click.option("--grid", "grid_json", default=None)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
@_tbm_errors
def surface_cmd(pr_model, ef_model, rock, cost_json, grid_json, out):
    """Write the full cost surface for a rock state to a JSON file."""
    pr_bundle, ef_bundle, rock_state, params, grid = _surface_inputs(
        pr_model, ef_model, rock, cost_json, grid_json)
    surf = cost_surface(rock_state, pr_bundle.predict, ef_bundle.predict, params, grid)
    Path(out).write_bytes(bundle_io.save_surface(surf))
    click.echo(f"wrote {surf.cost.shape[0]}x{surf.cost.shape[1]} surface to {out}")


@main.command()
@click.option("--seeds", type=int, default=5, show_default=True,
              help="Number of replication seeds.")
@click.option("--noise", type=float, default=8.0, show_default=True)
@seed_option
@click.option("--truth", is_flag=True, help="Skip training; use the ground truth.")
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Also write the text report to a file.")
@_tbm_errors
def replicate(seeds, noise, seed, truth, as_json, out):
    """Synthetic re-run of the field tunneling comparison."""
    gt = synth.GroundTruth(noise_sigma_pct=noise)
    report = synth.replicate_field_test(gt, seeds=[seed + i for i in range(seeds)],
                                        use_truth_surrogates=truth)
    text = synth.format_replication_report(report)
    if out is not None:
        Path(out).write_text(text + "\n")
    click.echo(json.dumps(report.to_dict()) if as_json else text)


@main.command()
@click.option("--pr-model", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--ef-model", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--console", type=click.Path(exists=True, file_okay=False), default=None,
              help="Static directory to serve at / (the operator console build).")
@_tbm_errors
def serve(pr_model, ef_model, host, port, console):
    """Run the HTTP service over two trained bundles."""
    import uvicorn
    from .service import create_app

    pr_bundle, ef_bundle = _load_two_bundles(pr_model, ef_model)
    app = create_app(pr_bundle, ef_bundle)
    if console is not None:
        from fastapi.staticfiles import StaticFiles
        app.mount("/", StaticFiles(directory=console, html=True), name="console")
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
