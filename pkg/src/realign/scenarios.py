"""What-if machinery: franchise relocations, expansion teams, and
alternative templates, each producing a fresh dataset to optimize."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

from . import constraints as _constraints
from .hullsplit import CandidateSet, GenerateOptions, generate
from .model import (
    DATA_DIR,
    DatasetError,
    GeoPoint,
    LeagueDataset,
    StructureTemplate,
    Team,
    resolve_dataset,
    resolve_template,
)


class ScenarioError(ValueError):
    pass


def load_gazetteer() -> dict[str, dict]:
    return json.loads((DATA_DIR / "gazetteer.json").read_text(encoding="utf-8"))


@dataclass(frozen=True)
class Place:
    city: str
    location: GeoPoint
    country: str
    tz_offset_hours: int


def _resolve_place(spec, gazetteer: Mapping[str, dict]) -> Place:
    """A place is a gazetteer key or an inline object with coordinates."""
    if isinstance(spec, str):
        entry = gazetteer.get(spec)
        if entry is None:
            raise ScenarioError(
                f"unknown gazetteer city {spec!r}; known: {', '.join(sorted(gazetteer))}"
            )
        return Place(
            city=entry["city"],
            location=GeoPoint(entry["lat"], entry["lon"]),
            country=entry["country"],
            tz_offset_hours=int(entry["tz_offset"]),
        )
    try:
        return Place(
            city=str(spec["city"]),
            location=GeoPoint(float(spec["lat"]), float(spec["lon"])),
            country=str(spec["country"]),
            tz_offset_hours=int(spec["tz_offset"]),
        )
    except (KeyError, TypeError, ValueError) as e:
        raise ScenarioError(f"bad place spec {spec!r}: {e}") from e


@dataclass(frozen=True)
class MoveEdit:
    team: str
    place: Place


@dataclass(frozen=True)
class AddEdit:
    team_id: str
    name: str
    place: Place


@dataclass(frozen=True)
class Scenario:
    base: str
    edits: tuple[MoveEdit | AddEdit, ...]
    template: StructureTemplate
    predicates: tuple[_constraints.Predicate, ...] = ()
    top_k: int = 10_000
    name: str = ""


def scenario_from_dict(raw: Mapping) -> Scenario:
    gazetteer = load_gazetteer()
    try:
        base = str(raw["base"])
        base_dataset = resolve_dataset(base)
        edits: list[MoveEdit | AddEdit] = []
        for entry in raw.get("edits", ()):
            if "move" in entry:
                spec = entry["move"]
                edits.append(
                    MoveEdit(str(spec["team"]), _resolve_place(spec["to"], gazetteer))
                )
            elif "add" in entry:
                spec = entry["add"]
                edits.append(
                    AddEdit(
                        str(spec["id"]),
                        str(spec.get("name", spec["id"])),
                        _resolve_place(spec["to"], gazetteer),
                    )
                )
            else:
                raise ScenarioError(f"edit must be a move or an add: {entry!r}")
        template = resolve_template(raw["template"], base_dataset)
        predicates: list[_constraints.Predicate] = []
        for p in raw.get("predicates", ()):
            if isinstance(p, str):
                predicates.extend(_constraints.preset(p, base_dataset))
            else:
                predicates.append(_constraints.predicate_from_dict(p))
        return Scenario(
            base=base,
            edits=tuple(edits),
            template=template,
            predicates=tuple(predicates),
            top_k=int(raw.get("top_k", 10_000)),
            name=str(raw.get("name", "")),
        )
    except ScenarioError:
        raise
    except (KeyError, TypeError, ValueError, DatasetError) as e:
        raise ScenarioError(f"bad scenario: {e}") from e


def load_scenario(path: str | Path) -> Scenario:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise ScenarioError(f"cannot read scenario {path}: {e}") from e
    return scenario_from_dict(raw)


def apply_scenario(scenario: Scenario) -> LeagueDataset:
    """Apply edits in order to the base dataset.  The base is untouched;
    expansion drops the current structure since it no longer partitions."""
    base = resolve_dataset(scenario.base)
    teams = list(base.teams)
    ids = {t.id for t in teams}
    added = False
    for edit in scenario.edits:
        if isinstance(edit, MoveEdit):
            if edit.team not in ids:
                raise ScenarioError(f"cannot move unknown team {edit.team!r}")
            for k, t in enumerate(teams):
                if t.id == edit.team:
                    teams[k] = Team(
                        id=t.id,
                        name=t.name,
                        city=edit.place.city,
                        location=edit.place.location,
                        country=edit.place.country,
                        tz_offset_hours=edit.place.tz_offset_hours,
                    )
                    break
        else:
            if edit.team_id in ids:
                raise ScenarioError(f"team id {edit.team_id!r} already exists")
            ids.add(edit.team_id)
            added = True
            teams.append(
                Team(
                    id=edit.team_id,
                    name=edit.name,
                    city=edit.place.city,
                    location=edit.place.location,
                    country=edit.place.country,
                    tz_offset_hours=edit.place.tz_offset_hours,
                )
            )
    if len(teams) != scenario.template.team_count:
        raise ScenarioError(
            f"scenario yields {len(teams)} teams but template "
            f"{scenario.template.name} needs {scenario.template.team_count}"
        )
    suffix = scenario.name or "scenario"
    return LeagueDataset(
        league_id=f"{base.league_id}+{suffix}",
        teams=tuple(teams),
        current_structure=None if added else base.current_structure,
        actual_travel=base.actual_travel,
    )


def run_scenario(scenario: Scenario, top_k: int | None = None) -> CandidateSet:
    """generate -> filter -> rank over the edited dataset."""
    dataset = apply_scenario(scenario)
    options = GenerateOptions(
        top_k=top_k if top_k is not None else scenario.top_k,
        predicates=scenario.predicates,
    )
    return generate(dataset, scenario.template, options)
