"""Stateless HTTP API over the pipeline.

Candidate pools and distance matrices are cached in-process per
(dataset, template, options) key; cache population is single-flight, and a
request that would duplicate an in-flight build gets 202 with a token to
retry.  Identical requests against a warm cache return identical bodies.
"""

from __future__ import annotations

import hashlib
import json
import threading
from typing import Any

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import constraints as _constraints
from . import exact as _exact
from . import hullsplit as _hullsplit
from . import reports as _reports
from . import scenarios as _scenarios
from .geodesy import distance_matrix
from .model import (
    DatasetError,
    LeagueDataset,
    LeagueStructure,
    TemplateError,
    TEMPLATES,
    bundled_dataset,
    bundled_league_ids,
    dataset_from_dict,
    dataset_to_dict,
    default_template,
    resolve_template,
    validate_structure,
)
from .surrogate import build_game_matrix, weighted_distance

POOL_SIZE = 10_000


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str, details: Any = None):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message
        self.details = details


class SolveRequest(BaseModel):
    dataset: str | dict
    template: str | dict | None = None
    predicates: list[dict | str] = Field(default_factory=list)
    edits: list[dict] = Field(default_factory=list)
    top_k: int = 100
    page: int = 1
    page_size: int = 20
    filter_angle_deg: float = 35.0
    include_geojson: bool = True


class DiffRequest(BaseModel):
    dataset: str | dict
    template: str | dict | None = None
    a: str | list = "current"
    b: str | list = "current"


class ExactRequest(BaseModel):
    dataset: str | dict
    template: str | dict | None = None
    predicates: list[dict | str] = Field(default_factory=list)
    time_limit: float | None = None


def _resolve_request_dataset(ref: str | dict) -> LeagueDataset:
    try:
        if isinstance(ref, str):
            return bundled_dataset(ref)
        return dataset_from_dict(ref)
    except DatasetError as e:
        raise ApiError(400, "bad_dataset", str(e)) from e


def _resolve_request_template(ref, dataset: LeagueDataset):
    from .model import template_from_dict

    try:
        if ref is None:
            return default_template(dataset)
        if isinstance(ref, dict):
            return template_from_dict(ref)
        return resolve_template(ref, dataset)
    except TemplateError as e:
        raise ApiError(400, "bad_template", str(e)) from e


def _resolve_predicates(raw_list, dataset: LeagueDataset):
    preds: list[_constraints.Predicate] = []
    try:
        for raw in raw_list:
            if isinstance(raw, str):
                preds.extend(_constraints.preset(raw, dataset))
            else:
                preds.append(_constraints.predicate_from_dict(raw))
        for p in preds:
            _constraints.check_predicate(p, dataset)
    except _constraints.PredicateError as e:
        raise ApiError(400, "bad_predicate", str(e)) from e
    return tuple(preds)


def _apply_edits(dataset: LeagueDataset, edits: list[dict], template) -> LeagueDataset:
    if not edits:
        return dataset
    scenario_raw = {
        "base": dataset.league_id,
        "edits": edits,
        "template": template.name,
        "name": "inline",
    }
    try:
        scenario = _scenarios.scenario_from_dict(scenario_raw)
        return _scenarios.apply_scenario(scenario)
    except _scenarios.ScenarioError as e:
        raise ApiError(400, "bad_edits", str(e)) from e


def _structure_from_payload(
    payload, dataset: LeagueDataset, template
) -> LeagueStructure:
    if payload == "current":
        if dataset.current_structure is None:
            raise ApiError(
                400, "no_current_structure",
                f"dataset {dataset.league_id} has no current structure",
            )
        structure = dataset.current_structure
    else:
        try:
            structure = LeagueStructure.from_nested(payload)
        except (TypeError, ValueError) as e:
            raise ApiError(400, "bad_structure", f"malformed structure: {e}") from e
    violations = validate_structure(structure, dataset, template)
    if violations:
        raise ApiError(
            400, "invalid_structure", "structure fails validation", violations
        )
    return structure


class _PoolCache:
    def __init__(self) -> None:
        self._pools: dict[str, _hullsplit.CandidateSet] = {}
        self._building: set[str] = set()
        self._mutex = threading.Lock()

    @staticmethod
    def key(dataset: LeagueDataset, template, filter_angle: float) -> str:
        blob = json.dumps(
            {
                "dataset": dataset_to_dict(dataset),
                "template": template.name,
                "angle": filter_angle,
                "pool": POOL_SIZE,
            },
            sort_keys=True,
        )
        return hashlib.sha256(blob.encode()).hexdigest()

    def get_or_build(
        self, dataset: LeagueDataset, template, filter_angle: float
    ) -> _hullsplit.CandidateSet:
        key = self.key(dataset, template, filter_angle)
        with self._mutex:
            pool = self._pools.get(key)
            if pool is not None:
                return pool
            if key in self._building:
                raise ApiError(
                    202, "pending",
                    "candidate pool is being generated; retry shortly",
                    {"token": key, "retry_after_seconds": 2},
                )
            self._building.add(key)
        try:
            options = _hullsplit.GenerateOptions(
                filter_angle_deg=filter_angle, top_k=POOL_SIZE
            )
            pool = _hullsplit.generate(dataset, template, options)
            with self._mutex:
                self._pools[key] = pool
            return pool
        finally:
            with self._mutex:
                self._building.discard(key)


def create_app() -> FastAPI:
    app = FastAPI(title="realign", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    cache = _PoolCache()

    @app.exception_handler(ApiError)
    async def _api_error(_req: Request, exc: ApiError) -> JSONResponse:
        return JSONResponse(
            status_code=exc.status,
            content={"code": exc.code, "message": exc.message, "details": exc.details},
        )

    @app.exception_handler(RequestValidationError)
    async def _validation_error(_req: Request, exc: RequestValidationError) -> JSONResponse:
        return JSONResponse(
            status_code=400,
            content={
                "code": "validation_error",
                "message": "request body failed validation",
                "details": exc.errors(),
            },
        )

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok"}

    @app.get("/leagues")
    def leagues() -> list[dict]:
        out = []
        for league_id in bundled_league_ids():
            ds = bundled_dataset(league_id)
            league = league_id.split("-")[0]
            out.append(
                {
                    "id": league_id,
                    "team_count": ds.size,
                    "default_template": default_template(ds).name,
                    "templates": [t.name for t in TEMPLATES[league].values()],
                }
            )
        return out

    @app.get("/leagues/{league_id}")
    def league_detail(league_id: str) -> dict:
        try:
            ds = bundled_dataset(league_id)
        except DatasetError as e:
            raise ApiError(404, "not_found", str(e)) from e
        league = league_id.split("-")[0]
        return {
            "id": league_id,
            "team_count": ds.size,
            "default_template": default_template(ds).name,
            "templates": [t.name for t in TEMPLATES[league].values()],
            "dataset": dataset_to_dict(ds),
        }

    @app.post("/solve")
    def solve(req: SolveRequest) -> dict:
        if req.top_k < 1:
            raise ApiError(400, "bad_top_k", "top_k must be at least 1")
        if req.page < 1 or req.page_size < 1:
            raise ApiError(400, "bad_page", "page and page_size must be at least 1")
        dataset = _resolve_request_dataset(req.dataset)
        template = _resolve_request_template(req.template, dataset)
        dataset = _apply_edits(dataset, req.edits, template)
        if template.team_count != dataset.size:
            raise ApiError(
                400, "size_mismatch",
                f"template {template.name} needs {template.team_count} teams, "
                f"dataset has {dataset.size}",
            )
        predicates = _resolve_predicates(req.predicates, dataset)

        pool = cache.get_or_build(dataset, template, req.filter_angle_deg)
        filtered = _constraints.filter_candidates(pool, predicates)
        entries = list(filtered.entries[: req.top_k])
        if not entries:
            raise ApiError(
                422, "unsatisfiable",
                "no candidate satisfies the predicates",
                {
                    "rejections": dict(filtered.stats.predicate_rejections),
                    "pool_size": len(pool.entries),
                },
            )

        best_d = entries[0].D
        start = (req.page - 1) * req.page_size
        page_entries = entries[start: start + req.page_size]
        results = []
        for offset, scored in enumerate(page_entries):
            item = {
                "rank": start + offset + 1,
                "D": scored.D,
                "miles_over_best": scored.D - best_d,
                "structure": scored.structure.to_nested(),
            }
            if req.include_geojson:
                item["geojson"] = json.loads(
                    _reports.hull_geojson(scored.structure, dataset)
                )
            results.append(item)

        summary = [
            {
                "label": f"#{start + offset + 1}",
                "D": scored.D,
                "miles_over_minimum": scored.D - best_d,
            }
            for offset, scored in enumerate(page_entries)
        ]
        if dataset.current_structure is not None and not validate_structure(
            dataset.current_structure, dataset, template
        ):
            current = weighted_distance(
                dataset.current_structure,
                build_game_matrix(template),
                distance_matrix(dataset),
            )
            summary.append(
                {
                    "label": "Current",
                    "D": current.D,
                    "miles_over_minimum": current.D - best_d,
                }
            )

        stats = filtered.stats
        return {
            "dataset": dataset.league_id,
            "template": template.name,
            "total": len(entries),
            "page": req.page,
            "page_size": req.page_size,
            "best_D": best_d,
            "stats": {
                "top_lines": stats.top_lines,
                "top_lines_retained": stats.top_lines_retained,
                "candidates_raw": stats.candidates_raw,
                "candidates_distinct": stats.candidates_distinct,
                "rejections": dict(stats.predicate_rejections),
            },
            "summary": summary,
            "results": results,
        }

    @app.post("/diff")
    def diff(req: DiffRequest) -> dict:
        dataset = _resolve_request_dataset(req.dataset)
        template = _resolve_request_template(req.template, dataset)
        matrix = build_game_matrix(template)
        dm = distance_matrix(dataset)
        a = _structure_from_payload(req.a, dataset, template)
        b = _structure_from_payload(req.b, dataset, template)
        scored_a = weighted_distance(a, matrix, dm)
        scored_b = weighted_distance(b, matrix, dm)
        payload = _reports.travel_diff(scored_a, scored_b)
        return {
            "dataset": dataset.league_id,
            "teams": [
                {
                    "team_id": r.team_id,
                    "current": r.current,
                    "alternative": r.alternative,
                    "delta": r.delta,
                    "direction": r.direction,
                }
                for r in payload.rows
            ],
            "totals": {
                "current": payload.current_total,
                "alternative": payload.alternative_total,
                "delta": payload.delta_total,
            },
        }

    @app.post("/exact")
    def exact_endpoint(req: ExactRequest) -> dict:
        dataset = _resolve_request_dataset(req.dataset)
        template = _resolve_request_template(req.template, dataset)
        if dataset.size > _exact.BRANCH_AND_BOUND_TEAM_LIMIT:
            raise ApiError(
                413, "too_large",
                f"{dataset.size} teams exceeds the desk-scale limit "
                f"({_exact.BRANCH_AND_BOUND_TEAM_LIMIT}); use the CLI LP export",
            )
        predicates = _resolve_predicates(req.predicates, dataset)
        try:
            result = _exact.solve_exact(
                dataset, template,
                predicates=predicates,
                budget_seconds=req.time_limit,
            )
        except _exact.InfeasibleError as e:
            raise ApiError(422, "unsatisfiable", str(e)) from e
        except _exact.BudgetExceededError as e:
            raise ApiError(
                408, "budget_exceeded", str(e),
                {"incumbent_D": e.incumbent.objective_D if e.incumbent else None},
            ) from e
        except _exact.ExactError as e:
            raise ApiError(400, "exact_error", str(e)) from e
        return {
            "dataset": dataset.league_id,
            "template": template.name,
            "objective_D": result.objective_D,
            "proof": result.proof,
            "nodes": result.nodes,
            "partitions": result.partitions,
            "structure": result.structure.to_nested(),
        }

    return app


app = create_app()
