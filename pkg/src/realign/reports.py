"""Per-team travel diffs, summary tables, hull GeoJSON, and the fuel
estimate.  Everything is emitted as data (CSV / GeoJSON); rendering is the
explorer's job."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

from .geodesy import project
from .model import LeagueDataset, LeagueStructure
from .planar import convex_hull
from .surrogate import IDENTITY_MODEL, ScoredStructure, TravelModel, predict_travel


class ReportError(ValueError):
    pass


@dataclass(frozen=True)
class TravelDiffRow:
    team_id: str
    current: float
    alternative: float
    delta: float
    direction: str  # better | worse | same


@dataclass(frozen=True)
class TravelDiff:
    rows: tuple[TravelDiffRow, ...]
    current_total: float
    alternative_total: float
    delta_total: float


def travel_diff(
    a: ScoredStructure,
    b: ScoredStructure,
    model: TravelModel = IDENTITY_MODEL,
) -> TravelDiff:
    """Predicted travel under each structure and signed deltas
    (alternative minus current); the identity model yields raw surrogate
    diffs."""
    if set(a.per_team) != set(b.per_team):
        raise ReportError("structures cover different team sets")
    current = predict_travel(model, a.per_team)
    alternative = predict_travel(model, b.per_team)
    rows = []
    for tid in sorted(current):
        delta = alternative[tid] - current[tid]
        direction = "same" if delta == 0 else ("worse" if delta > 0 else "better")
        rows.append(TravelDiffRow(tid, current[tid], alternative[tid], delta, direction))
    return TravelDiff(
        rows=tuple(rows),
        current_total=sum(r.current for r in rows),
        alternative_total=sum(r.alternative for r in rows),
        delta_total=sum(r.delta for r in rows),
    )


def diff_to_csv(diff: TravelDiff) -> str:
    lines = ["team_id,current,alternative,delta"]
    for r in diff.rows:
        lines.append(f"{r.team_id},{r.current!r},{r.alternative!r},{r.delta!r}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class SummaryRow:
    label: str
    D: float
    miles_over_minimum: float


def summary_table(rows: Sequence[tuple[str, ScoredStructure]]) -> list[SummaryRow]:
    """Label, objective, and miles over the minimum of each template block
    (structures sharing a conference/division shape form one block)."""
    def shape(s: ScoredStructure) -> tuple:
        return tuple(
            sorted(tuple(sorted(len(d) for d in conf)) for conf in s.structure.conferences)
        )

    minima: dict[tuple, float] = {}
    for _, scored in rows:
        key = shape(scored)
        minima[key] = min(minima.get(key, float("inf")), scored.D)
    return [
        SummaryRow(label, scored.D, scored.D - minima[shape(scored)])
        for label, scored in rows
    ]


def summary_to_csv(rows: Sequence[SummaryRow]) -> str:
    lines = ["label,travel_miles,miles_over_minimum"]
    for r in rows:
        lines.append(f"{r.label},{round(r.D)},{round(r.miles_over_minimum)}")
    return "\n".join(lines) + "\n"


def hull_geojson(structure: LeagueStructure, dataset: LeagueDataset) -> str:
    """FeatureCollection with one hull feature per division (point / line /
    polygon by member count) and one point feature per team."""
    points = project(dataset)
    geo = {t.id: (t.location.lon, t.location.lat) for t in dataset.teams}
    features = []
    for ci, conf in enumerate(structure.conferences):
        for di, div in enumerate(conf):
            members = sorted(div)
            proj_to_geo = {}
            for tid in members:
                p = points[tid]
                proj_to_geo[(p.x, p.y)] = geo[tid]
            hull = convex_hull(list(proj_to_geo))
            ring = [list(proj_to_geo[p]) for p in hull]
            if len(ring) == 1:
                geometry = {"type": "Point", "coordinates": ring[0]}
            elif len(ring) == 2:
                geometry = {"type": "LineString", "coordinates": ring}
            else:
                geometry = {"type": "Polygon", "coordinates": [ring + [ring[0]]]}
            features.append(
                {
                    "type": "Feature",
                    "geometry": geometry,
                    "properties": {
                        "kind": "division-hull",
                        "conference": ci,
                        "division": di,
                        "teams": members,
                    },
                }
            )
    for team in dataset.teams:
        conf_idx = div_idx = None
        for ci, conf in enumerate(structure.conferences):
            for di, div in enumerate(conf):
                if team.id in div:
                    conf_idx, div_idx = ci, di
        features.append(
            {
                "type": "Feature",
                "geometry": {
                    "type": "Point",
                    "coordinates": [team.location.lon, team.location.lat],
                },
                "properties": {
                    "kind": "team",
                    "team_id": team.id,
                    "name": team.name,
                    "city": team.city,
                    "conference": conf_idx,
                    "division": div_idx,
                },
            }
        )
    return json.dumps({"type": "FeatureCollection", "features": features}, indent=2)


def fuel_estimate(delta_miles: float, gallons_per_mile: float = 5.0) -> float:
    """Jet-fuel gallons corresponding to a mileage change."""
    return delta_miles * gallons_per_mile


def candidates_to_csv(entries: Sequence[ScoredStructure]) -> str:
    lines = ["rank,travel_miles,structure"]
    for k, scored in enumerate(entries, start=1):
        flat = "|".join(
            ";".join(
                "+".join(sorted(div)) for div in conf
            )
            for conf in scored.structure.conferences
        )
        lines.append(f"{k},{scored.D!r},{flat}")
    return "\n".join(lines) + "\n"
