"""Core domain types, dataset ingestion, and structure validation.

The data model is deliberately immutable: datasets, templates, and
structures are frozen dataclasses that downstream modules share freely
(including across threads in the HTTP service).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Mapping, Sequence


class DatasetError(ValueError):
    """A league dataset file failed to parse or validate."""


class TemplateError(ValueError):
    """A structure template is malformed or does not fit the dataset."""


@dataclass(frozen=True)
class GeoPoint:
    """Geographic location in decimal degrees."""

    lat: float
    lon: float

    def __post_init__(self) -> None:
        if not -90.0 <= self.lat <= 90.0:
            raise DatasetError(f"latitude {self.lat!r} outside [-90, 90]")
        if not -180.0 <= self.lon <= 180.0:
            raise DatasetError(f"longitude {self.lon!r} outside [-180, 180]")


@dataclass(frozen=True)
class Team:
    id: str
    name: str
    city: str
    location: GeoPoint
    country: str
    tz_offset_hours: int


@dataclass(frozen=True)
class LeagueStructure:
    """A concrete assignment of teams to divisions grouped into conferences.

    ``conferences`` is an ordered tuple; each conference is an ordered tuple
    of divisions; each division is a frozenset of team ids.  An undivided
    conference is represented as a single division spanning the conference.
    """

    conferences: tuple[tuple[frozenset[str], ...], ...]
    provenance: str = "manual"

    def all_teams(self) -> frozenset[str]:
        out: set[str] = set()
        for conf in self.conferences:
            for div in conf:
                out.update(div)
        return frozenset(out)

    def divisions(self) -> list[frozenset[str]]:
        return [div for conf in self.conferences for div in conf]

    def division_of(self, team_id: str) -> frozenset[str]:
        for conf in self.conferences:
            for div in conf:
                if team_id in div:
                    return div
        raise KeyError(team_id)

    def conference_of(self, team_id: str) -> frozenset[str]:
        for conf in self.conferences:
            for div in conf:
                if team_id in div:
                    return frozenset(t for d in conf for t in d)
        raise KeyError(team_id)

    def canonical_form(self) -> tuple:
        """Label-order-insensitive form: ids sorted within divisions,
        divisions sorted by smallest id, conferences likewise."""
        confs = []
        for conf in self.conferences:
            divs = sorted(tuple(sorted(div)) for div in conf)
            confs.append(tuple(divs))
        return tuple(sorted(confs))

    @staticmethod
    def from_nested(nested: Sequence[Sequence[Sequence[str]]],
                    provenance: str = "manual") -> "LeagueStructure":
        return LeagueStructure(
            conferences=tuple(
                tuple(frozenset(div) for div in conf) for conf in nested
            ),
            provenance=provenance,
        )

    def to_nested(self) -> list[list[list[str]]]:
        return [[sorted(div) for div in conf] for conf in self.conferences]


@dataclass(frozen=True, eq=False)
class LeagueDataset:
    """Teams plus (optionally) the league's current alignment.

    Instances hash by identity so per-dataset caches (distance matrix,
    projection) key off the loaded object.
    """

    league_id: str
    teams: tuple[Team, ...]
    current_structure: LeagueStructure | None = None
    actual_travel: Mapping[str, float] | None = None

    def __post_init__(self) -> None:
        if len(self.teams) < 2:
            raise DatasetError(f"{self.league_id}: needs at least 2 teams")
        seen: set[str] = set()
        for team in self.teams:
            if team.id in seen:
                raise DatasetError(f"duplicate team id {team.id!r}")
            seen.add(team.id)
        if self.current_structure is not None:
            assigned = self.current_structure.all_teams()
            if assigned != seen:
                missing = sorted(seen - assigned)
                extra = sorted(assigned - seen)
                raise DatasetError(
                    f"{self.league_id}: current_structure does not partition the "
                    f"team set (missing={missing}, unknown={extra})"
                )
            counted = sum(len(d) for c in self.current_structure.conferences for d in c)
            if counted != len(self.teams):
                raise DatasetError(
                    f"{self.league_id}: current_structure assigns a team twice"
                )

    @property
    def team_ids(self) -> tuple[str, ...]:
        return tuple(t.id for t in self.teams)

    @property
    def size(self) -> int:
        return len(self.teams)

    def index_of(self) -> dict[str, int]:
        return {t.id: i for i, t in enumerate(self.teams)}

    def by_id(self, team_id: str) -> Team:
        for t in self.teams:
            if t.id == team_id:
                return t
        raise KeyError(team_id)

    def __iter__(self) -> Iterator[Team]:
        return iter(self.teams)


def _freeze_games(value) -> tuple[tuple[int, float], ...] | float:
    if isinstance(value, Mapping):
        return tuple(sorted((int(k), float(v)) for k, v in value.items()))
    return float(value)


def _games_for(value, size: int) -> float:
    if isinstance(value, tuple):
        for k, v in value:
            if k == size:
                return v
        raise TemplateError(f"no game count configured for group size {size}")
    return value


@dataclass(frozen=True)
class ScheduleProfile:
    """Per-team season game totals by opponent category.

    Each field is either a single number or a mapping keyed by group size
    (division size for ``division_games``, conference size for the other
    two), which covers uneven setups such as 7/8-team conferences.
    """

    division_games: float | tuple[tuple[int, float], ...]
    conference_games: float | tuple[tuple[int, float], ...]
    nonconference_games: float | tuple[tuple[int, float], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "division_games", _freeze_games(self.division_games))
        object.__setattr__(self, "conference_games", _freeze_games(self.conference_games))
        object.__setattr__(
            self, "nonconference_games", _freeze_games(self.nonconference_games)
        )
        for name in ("division_games", "conference_games", "nonconference_games"):
            v = getattr(self, name)
            entries = [x for _, x in v] if isinstance(v, tuple) else [v]
            if any(e < 0 for e in entries):
                raise TemplateError(f"{name} must be non-negative")

    def division_games_for(self, division_size: int) -> float:
        return _games_for(self.division_games, division_size)

    def conference_games_for(self, conference_size: int) -> float:
        return _games_for(self.conference_games, conference_size)

    def nonconference_games_for(self, conference_size: int) -> float:
        return _games_for(self.nonconference_games, conference_size)


@dataclass(frozen=True)
class LeafGroup:
    """One row/column of the away-game matrix: a division, or an undivided
    conference acting as its own group."""

    conference: int
    size: int
    conference_size: int
    divided: bool


@dataclass(frozen=True)
class StructureTemplate:
    """Shape of a league: conference sizes, division sizes, and schedule."""

    name: str
    conference_sizes: tuple[int, ...]
    divisions_per_conference: tuple[tuple[int, ...], ...]
    schedule: ScheduleProfile

    def __post_init__(self) -> None:
        if len(self.conference_sizes) != len(self.divisions_per_conference):
            raise TemplateError(f"{self.name}: conference/division shape mismatch")
        if any(s <= 0 for s in self.conference_sizes):
            raise TemplateError(f"{self.name}: conference sizes must be positive")
        for size, divs in zip(self.conference_sizes, self.divisions_per_conference):
            if divs and sum(divs) != size:
                raise TemplateError(
                    f"{self.name}: division sizes {list(divs)} do not sum to "
                    f"conference size {size}"
                )
            if any(d <= 0 for d in divs):
                raise TemplateError(f"{self.name}: division sizes must be positive")

    @property
    def team_count(self) -> int:
        return sum(self.conference_sizes)

    def leaf_groups(self) -> tuple[LeafGroup, ...]:
        groups: list[LeafGroup] = []
        for ci, (csize, divs) in enumerate(
            zip(self.conference_sizes, self.divisions_per_conference)
        ):
            if divs:
                groups.extend(
                    LeafGroup(ci, d, csize, True) for d in divs
                )
            else:
                groups.append(LeafGroup(ci, csize, csize, False))
        return tuple(groups)


def validate_structure(
    structure: LeagueStructure,
    dataset: LeagueDataset,
    template: StructureTemplate,
) -> list[str]:
    """Return a list of violations; empty means the structure is a partition
    of the dataset's teams matching the template sizes."""
    violations: list[str] = []
    team_set = set(dataset.team_ids)
    seen: set[str] = set()
    for conf in structure.conferences:
        for div in conf:
            for tid in sorted(div):
                if tid not in team_set:
                    violations.append(f"unknown team {tid!r}")
                elif tid in seen:
                    violations.append(f"team {tid!r} assigned twice")
                seen.add(tid)
    for tid in dataset.team_ids:
        if tid not in seen:
            violations.append(f"unassigned team {tid!r}")

    if len(structure.conferences) != len(template.conference_sizes):
        violations.append(
            f"expected {len(template.conference_sizes)} conferences, "
            f"got {len(structure.conferences)}"
        )
        return violations

    got_conf_shapes = sorted(
        (sum(len(d) for d in conf), tuple(sorted(len(d) for d in conf)))
        for conf in structure.conferences
    )
    want_conf_shapes = sorted(
        (csize, tuple(sorted(divs)) if divs else (csize,))
        for csize, divs in zip(
            template.conference_sizes, template.divisions_per_conference
        )
    )
    if got_conf_shapes != want_conf_shapes:
        violations.append(
            f"conference/division sizes {got_conf_shapes} do not match "
            f"template {want_conf_shapes}"
        )
    return violations


# --- dataset file I/O ---------------------------------------------------

def dataset_from_dict(raw: Mapping) -> LeagueDataset:
    try:
        league_id = str(raw["league_id"])
        team_rows = raw["teams"]
    except (KeyError, TypeError) as e:
        raise DatasetError(f"missing required key: {e}") from e

    teams: list[Team] = []
    for row in team_rows:
        tid = row.get("id")
        try:
            teams.append(
                Team(
                    id=str(tid),
                    name=str(row["name"]),
                    city=str(row["city"]),
                    location=GeoPoint(float(row["lat"]), float(row["lon"])),
                    country=str(row["country"]),
                    tz_offset_hours=int(row["tz_offset"]),
                )
            )
        except DatasetError as e:
            raise DatasetError(f"team {tid!r}: {e}") from e
        except (KeyError, TypeError, ValueError) as e:
            raise DatasetError(f"team {tid!r}: bad or missing field ({e})") from e

    structure = None
    if raw.get("current_structure") is not None:
        structure = LeagueStructure.from_nested(
            raw["current_structure"], provenance="current"
        )

    travel = None
    if raw.get("actual_travel") is not None:
        travel = {str(k): float(v) for k, v in raw["actual_travel"].items()}

    return LeagueDataset(
        league_id=league_id,
        teams=tuple(teams),
        current_structure=structure,
        actual_travel=travel,
    )


def dataset_to_dict(dataset: LeagueDataset) -> dict:
    out: dict = {
        "league_id": dataset.league_id,
        "teams": [
            {
                "id": t.id,
                "name": t.name,
                "city": t.city,
                "lat": t.location.lat,
                "lon": t.location.lon,
                "country": t.country,
                "tz_offset": t.tz_offset_hours,
            }
            for t in dataset.teams
        ],
    }
    if dataset.current_structure is not None:
        out["current_structure"] = dataset.current_structure.to_nested()
    if dataset.actual_travel is not None:
        out["actual_travel"] = dict(sorted(dataset.actual_travel.items()))
    return out


def load_dataset(path: str | Path) -> LeagueDataset:
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except OSError as e:
        raise DatasetError(f"cannot read {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise DatasetError(f"{path}: not valid JSON ({e})") from e
    return dataset_from_dict(raw)


def save_dataset(dataset: LeagueDataset, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(dataset_to_dict(dataset), indent=2) + "\n", encoding="utf-8"
    )


# --- bundled data -------------------------------------------------------

DATA_DIR = Path(__file__).parent / "data"

_BUNDLED = ("nhl-2011", "mlb-2012", "nfl-2012", "nba-2012")


def bundled_league_ids() -> tuple[str, ...]:
    return _BUNDLED


def bundled_dataset(league_id: str) -> LeagueDataset:
    if league_id not in _BUNDLED:
        raise DatasetError(
            f"unknown bundled league {league_id!r}; available: {', '.join(_BUNDLED)}"
        )
    return load_dataset(DATA_DIR / f"{league_id}.json")


def resolve_dataset(ref: str | Path) -> LeagueDataset:
    """Accept a bundled league id or a path to a dataset file."""
    if isinstance(ref, str) and ref in _BUNDLED:
        return bundled_dataset(ref)
    return load_dataset(ref)


# --- template registry --------------------------------------------------

def _template(name, conf_sizes, divs, division, conference, nonconference):
    return StructureTemplate(
        name=name,
        conference_sizes=tuple(conf_sizes),
        divisions_per_conference=tuple(tuple(d) for d in divs),
        schedule=ScheduleProfile(division, conference, nonconference),
    )


TEMPLATES: dict[str, dict[str, StructureTemplate]] = {
    "nhl": {
        "6x5": _template("nhl-6x5", [15, 15], [[5, 5, 5], [5, 5, 5]], 24, 40, 18),
        "4conf": _template(
            "nhl-4conf",
            [8, 8, 7, 7],
            [[], [], [], []],
            0,
            {7: 36, 8: 38},
            {7: 46, 8: 44},
        ),
        # Hypothetical 32-team expansion shapes; the schedule mirrors the
        # 4-conference proposal's balance for 4x8 and an 82-game split for 8x4.
        "4x8": _template("nhl-4x8", [8, 8, 8, 8], [[], [], [], []], 0, 38, 44),
        "8x4": _template(
            "nhl-8x4", [16, 16], [[4, 4, 4, 4], [4, 4, 4, 4]], 18, 40, 24
        ),
    },
    "mlb": {
        # Per-pair away games work out to (3, 1.2, 0.5); this weighting also
        # reproduces the known league-preserving AL/NL swap analysis.
        "6x5": _template("mlb-6x5", [15, 15], [[5, 5, 5], [5, 5, 5]], 24, 24, 15),
    },
    "nfl": {
        "8x4": _template(
            "nfl-8x4", [16, 16], [[4, 4, 4, 4], [4, 4, 4, 4]], 6, 6, 4
        ),
    },
    "nba": {
        "6x5": _template("nba-6x5", [15, 15], [[5, 5, 5], [5, 5, 5]], 16, 36, 30),
    },
}

DEFAULT_TEMPLATE = {
    "nhl": "6x5",
    "mlb": "6x5",
    "nfl": "8x4",
    "nba": "6x5",
}


def template_from_dict(raw: Mapping) -> StructureTemplate:
    try:
        sched = raw["schedule"]
        return StructureTemplate(
            name=str(raw.get("name", "custom")),
            conference_sizes=tuple(int(s) for s in raw["conference_sizes"]),
            divisions_per_conference=tuple(
                tuple(int(d) for d in divs)
                for divs in raw["divisions_per_conference"]
            ),
            schedule=ScheduleProfile(
                sched["division_games"],
                sched["conference_games"],
                sched["nonconference_games"],
            ),
        )
    except (KeyError, TypeError, ValueError) as e:
        raise TemplateError(f"bad template definition: {e}") from e


def resolve_template(name_or_path: str | Path, dataset: LeagueDataset | None = None) -> StructureTemplate:
    """Resolve a template by registry name (league-qualified or short, e.g.
    ``nhl-6x5`` or ``6x5`` with a dataset for context) or by file path."""
    name = str(name_or_path)
    league = dataset.league_id.split("-")[0] if dataset is not None else None
    if league and league in TEMPLATES and name in TEMPLATES[league]:
        return TEMPLATES[league][name]
    for lg, entries in TEMPLATES.items():
        for short, tpl in entries.items():
            if name == tpl.name or name == f"{lg}-{short}":
                return tpl
    path = Path(name_or_path)
    if path.exists():
        try:
            raw = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise TemplateError(f"{path}: not valid JSON ({e})") from e
        return template_from_dict(raw)
    raise TemplateError(f"unknown template {name!r}")


def default_template(dataset: LeagueDataset) -> StructureTemplate:
    league = dataset.league_id.split("-")[0]
    if league in DEFAULT_TEMPLATE:
        return TEMPLATES[league][DEFAULT_TEMPLATE[league]]
    raise TemplateError(f"no default template for league {dataset.league_id!r}")
