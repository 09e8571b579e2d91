"""Command-line pipeline: generate | exact | scenario | report | serve.

All artifacts land under --out with fixed names and are byte-identical
across runs on identical inputs.  Exit codes: 0 success, 1 input error,
2 budget exceeded.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import constraints as _constraints
from . import exact as _exact
from . import hullsplit as _hullsplit
from . import reports as _reports
from . import scenarios as _scenarios
from .model import (
    DatasetError,
    TemplateError,
    bundled_league_ids,
    default_template,
    resolve_dataset,
    resolve_template,
)
from .surrogate import build_game_matrix, weighted_distance
from .geodesy import distance_matrix


class CliError(click.ClickException):
    exit_code = 1


def _load_inputs(dataset_ref, template_ref, constraint_refs):
    try:
        dataset = resolve_dataset(dataset_ref)
    except DatasetError as e:
        raise CliError(str(e)) from e
    try:
        template = (
            resolve_template(template_ref, dataset)
            if template_ref
            else default_template(dataset)
        )
    except TemplateError as e:
        raise CliError(str(e)) from e
    predicates = []
    for ref in constraint_refs:
        try:
            if ref in _constraints.PRESET_NAMES:
                predicates.extend(_constraints.preset(ref, dataset))
            else:
                predicates.extend(_constraints.load_constraints(ref, dataset))
        except _constraints.PredicateError as e:
            raise CliError(str(e)) from e
    return dataset, template, tuple(predicates)


def _check_jobs(jobs: int) -> None:
    if jobs < 1:
        raise CliError("--jobs must be at least 1")


def _write(out_dir: Path, name: str, text: str) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / name).write_text(text, encoding="utf-8")


def _emit_candidate_artifacts(out: Path, candidates, top: int) -> None:
    ranked = _hullsplit.rank(candidates, top)
    if not ranked:
        raise CliError("no candidate satisfies the constraints")
    _write(out, "candidates.csv", _reports.candidates_to_csv(ranked))
    rows = [(f"#{k}", scored) for k, scored in enumerate(ranked, start=1)]
    _write(out, "summary.csv", _reports.summary_to_csv(_reports.summary_table(rows)))
    _write(
        out,
        "best.geojson",
        _reports.hull_geojson(ranked[0].structure, candidates.dataset),
    )


@click.group()
def main() -> None:
    """League realignment toolkit."""


@main.command("generate")
@click.option("--dataset", "dataset_ref", required=True,
              help=f"bundled id ({', '.join(bundled_league_ids())}) or dataset file")
@click.option("--template", "template_ref", default=None,
              help="template name (e.g. 6x5) or template file")
@click.option("--constraints", "constraint_refs", multiple=True,
              help="constraint file or preset name; repeatable")
@click.option("--top", default=10_000, show_default=True, help="candidates to keep")
@click.option("--keep-all", is_flag=True, help="disable the bounded retention heap")
@click.option("--filter-angle", default=35.0, show_default=True,
              help="reject top-level cut lines flatter than this many degrees")
@click.option("--seed-free", is_flag=True, hidden=True)
@click.option("--jobs", default=1, show_default=True, help="worker cap")
@click.option("--out", "out_dir", default="out", show_default=True, type=Path)
def cmd_generate(dataset_ref, template_ref, constraint_refs, top, keep_all,
                 filter_angle, seed_free, jobs, out_dir):
    """Enumerate and rank candidate structures."""
    if seed_free:
        raise CliError("--seed-free is reserved: generation has no randomness to seed")
    _check_jobs(jobs)
    dataset, template, predicates = _load_inputs(
        dataset_ref, template_ref, constraint_refs
    )
    options = _hullsplit.GenerateOptions(
        filter_angle_deg=filter_angle,
        top_k=top,
        keep_all=keep_all,
        predicates=predicates,
    )
    try:
        candidates = _hullsplit.generate(dataset, template, options)
    except (_hullsplit.GenerationError, TemplateError) as e:
        raise CliError(str(e)) from e
    _emit_candidate_artifacts(out_dir, candidates, top)
    stats = candidates.stats
    click.echo(
        f"{stats.retained} structures retained "
        f"({stats.candidates_raw} raw, {stats.candidates_distinct} distinct); "
        f"best D = {round(candidates.entries[0].D)} miles"
    )


@main.command("exact")
@click.option("--dataset", "dataset_ref", required=True)
@click.option("--template", "template_ref", default=None)
@click.option("--constraints", "constraint_refs", multiple=True)
@click.option("--export-only", is_flag=True,
              help="write model.lp and warm start instead of solving")
@click.option("--exclude-over", default=None, type=float,
              help="exclude same-division pairs farther than this many miles")
@click.option("--time-limit", default=None, type=float, help="budget in seconds")
@click.option("--jobs", default=1, show_default=True)
@click.option("--out", "out_dir", default="out", show_default=True, type=Path)
def cmd_exact(dataset_ref, template_ref, constraint_refs, export_only,
              exclude_over, time_limit, jobs, out_dir):
    """Certify heuristic output on desk-scale instances, or export the MIP."""
    _check_jobs(jobs)
    dataset, template, predicates = _load_inputs(
        dataset_ref, template_ref, constraint_refs
    )
    options = _hullsplit.GenerateOptions(top_k=1, predicates=predicates)
    heuristic = _hullsplit.generate(dataset, template, options)
    heuristic_best = heuristic.entries[0] if heuristic.entries else None

    if export_only or dataset.size > _exact.BRANCH_AND_BOUND_TEAM_LIMIT:
        warm = heuristic_best.structure if heuristic_best else None
        model = _exact.build_mip(dataset, template, warm_start=warm)
        if exclude_over is not None:
            model = _exact.add_exclusions(
                model, _exact.exclusions_over(dataset, exclude_over)
            )
        _write(out_dir, "model.lp", _exact.export_lp(model))
        if warm is not None:
            _write(out_dir, "warmstart.txt", _exact.export_warm_start(model))
        click.echo(
            f"exported {model.x_count + model.y_count} binaries to "
            f"{out_dir / 'model.lp'}"
        )
        return

    exclusions = (
        _exact.exclusions_over(dataset, exclude_over) if exclude_over is not None else ()
    )
    try:
        result = _exact.solve_exact(
            dataset,
            template,
            predicates=predicates,
            budget_seconds=time_limit,
            exclusions=exclusions,
        )
    except _exact.InfeasibleError as e:
        raise CliError(str(e)) from e
    except _exact.BudgetExceededError as e:
        if e.incumbent is not None:
            _write(out_dir, "certificate.json", _certificate(e.incumbent, heuristic_best, final=False))
        click.echo(str(e), err=True)
        sys.exit(2)
    _write(out_dir, "certificate.json", _certificate(result, heuristic_best, final=True))
    click.echo(
        f"exact D = {round(result.objective_D)} miles ({result.proof}, "
        f"{result.nodes} nodes)"
    )


def _certificate(result, heuristic_best, final: bool) -> str:
    payload = {
        "final": final,
        "proof": result.proof,
        "exact_D": result.objective_D,
        "nodes": result.nodes,
        "partitions": result.partitions,
        "structure": result.structure.to_nested(),
    }
    if heuristic_best is not None:
        cert = _exact.certify(heuristic_best, result)
        payload["heuristic_D"] = heuristic_best.D
        payload["gap"] = cert.gap
        payload["optimal"] = cert.optimal
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


@main.command("scenario")
@click.option("--file", "scenario_path", required=True, type=Path)
@click.option("--top", default=None, type=int, help="override the scenario's top_k")
@click.option("--jobs", default=1, show_default=True)
@click.option("--out", "out_dir", default="out", show_default=True, type=Path)
def cmd_scenario(scenario_path, top, jobs, out_dir):
    """Apply franchise moves / expansion and rank the edited league."""
    _check_jobs(jobs)
    try:
        scenario = _scenarios.load_scenario(scenario_path)
        candidates = _scenarios.run_scenario(scenario, top_k=top)
    except (_scenarios.ScenarioError, _constraints.PredicateError,
            DatasetError, TemplateError, _hullsplit.GenerationError) as e:
        raise CliError(str(e)) from e
    _emit_candidate_artifacts(out_dir, candidates, top or scenario.top_k)
    click.echo(
        f"scenario {scenario.name or scenario_path.stem}: best D = "
        f"{round(candidates.entries[0].D)} miles"
    )


@main.command("report")
@click.option("--dataset", "dataset_ref", required=True)
@click.option("--template", "template_ref", default=None)
@click.option("--constraints", "constraint_refs", multiple=True)
@click.option("--gallons-per-mile", default=5.0, show_default=True)
@click.option("--jobs", default=1, show_default=True)
@click.option("--out", "out_dir", default="out", show_default=True, type=Path)
def cmd_report(dataset_ref, template_ref, constraint_refs, gallons_per_mile,
               jobs, out_dir):
    """Compare the current alignment against the constrained best."""
    _check_jobs(jobs)
    dataset, template, predicates = _load_inputs(
        dataset_ref, template_ref, constraint_refs
    )
    if dataset.current_structure is None:
        raise CliError(f"dataset {dataset.league_id} has no current structure")
    options = _hullsplit.GenerateOptions(top_k=1, predicates=predicates)
    candidates = _hullsplit.generate(dataset, template, options)
    if not candidates.entries:
        raise CliError("no candidate satisfies the constraints")
    best = candidates.entries[0]
    matrix = build_game_matrix(template)
    current = weighted_distance(
        dataset.current_structure, matrix, distance_matrix(dataset)
    )
    diff = _reports.travel_diff(current, best)
    _write(out_dir, "diff.csv", _reports.diff_to_csv(diff))
    rows = _reports.summary_table([("Best", best), ("Current", current)])
    _write(out_dir, "summary.csv", _reports.summary_to_csv(rows))
    _write(out_dir, "best.geojson", _reports.hull_geojson(best.structure, dataset))
    saved = current.D - best.D
    gallons = _reports.fuel_estimate(saved, gallons_per_mile)
    click.echo(
        f"current {round(current.D)} mi vs best {round(best.D)} mi: "
        f"saving {round(saved)} mi/season (~{round(gallons)} gal at "
        f"{gallons_per_mile} gal/mi)"
    )


@main.command("serve")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
def cmd_serve(host, port):
    """Run the HTTP API."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=host, port=port, log_level="info")


if __name__ == "__main__":
    main()
