"""Declarative predicates over league structures.

Predicates are conjunctive hard filters: a candidate survives only if every
predicate holds.  Each kind is either division-local (checkable per
division) or conference-level, which is what lets the generator reject
whole split subtrees instead of finished structures.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .model import LeagueDataset, LeagueStructure

KINDS = (
    "together",
    "apart",
    "max_attr_per_division",
    "max_tz_span_per_division",
    "fixed_group",
)

_ATTRS = ("country", "city", "tz_offset")


class PredicateError(ValueError):
    pass


@dataclass(frozen=True)
class Predicate:
    kind: str
    teams: tuple[str, ...] = ()
    attr: str = ""
    value: str = ""
    cap: int = 0
    label: str = ""

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise PredicateError(f"unknown predicate kind {self.kind!r}")


def together(*teams: str) -> Predicate:
    return Predicate("together", teams=tuple(teams))


def apart(*teams: str) -> Predicate:
    return Predicate("apart", teams=tuple(teams))


def max_attr_per_division(attr: str, value: str, cap: int) -> Predicate:
    return Predicate("max_attr_per_division", attr=attr, value=str(value), cap=int(cap))


def max_tz_span_per_division(zones: int) -> Predicate:
    return Predicate("max_tz_span_per_division", cap=int(zones))


def fixed_group(label: str, teams: Iterable[str]) -> Predicate:
    return Predicate("fixed_group", teams=tuple(teams), label=label)


def describe(pred: Predicate) -> str:
    if pred.kind == "together":
        return f"together({','.join(pred.teams)})"
    if pred.kind == "apart":
        return f"apart({','.join(pred.teams)})"
    if pred.kind == "max_attr_per_division":
        return f"max_attr({pred.attr}={pred.value},cap={pred.cap})"
    if pred.kind == "max_tz_span_per_division":
        return f"max_tz_span({pred.cap})"
    return f"fixed_group({pred.label})"


def check_predicate(pred: Predicate, dataset: LeagueDataset) -> None:
    known = set(dataset.team_ids)
    for tid in pred.teams:
        if tid not in known:
            raise PredicateError(f"{describe(pred)}: unknown team {tid!r}")
    if pred.kind == "max_attr_per_division" and pred.attr not in _ATTRS:
        raise PredicateError(
            f"unknown attribute {pred.attr!r}; expected one of {_ATTRS}"
        )
    if pred.kind in ("together", "apart", "fixed_group") and len(pred.teams) < 2:
        raise PredicateError(f"{describe(pred)}: needs at least 2 teams")
    if pred.kind == "max_tz_span_per_division" and pred.cap < 1:
        raise PredicateError("time-zone span cap must be at least 1 zone")


def _attr_value(dataset: LeagueDataset, team_id: str, attr: str) -> str:
    team = dataset.by_id(team_id)
    if attr == "country":
        return team.country
    if attr == "city":
        return team.city
    if attr == "tz_offset":
        return str(team.tz_offset_hours)
    raise PredicateError(f"unknown attribute {attr!r}")


def _division_ok(pred: Predicate, division: frozenset[str], dataset: LeagueDataset) -> bool:
    if pred.kind == "apart":
        return len(division.intersection(pred.teams)) <= 1
    if pred.kind == "max_attr_per_division":
        count = sum(
            1 for t in division if _attr_value(dataset, t, pred.attr) == pred.value
        )
        return count <= pred.cap
    if pred.kind == "max_tz_span_per_division":
        offsets = [dataset.by_id(t).tz_offset_hours for t in division]
        # a span of k zones covers k-1 hours between contiguous offsets
        return max(offsets) - min(offsets) <= pred.cap - 1
    return True


def evaluate(pred: Predicate, structure: LeagueStructure, dataset: LeagueDataset) -> bool:
    """Pure predicate check against a complete structure."""
    check_predicate(pred, dataset)
    if pred.kind == "together":
        want = set(pred.teams)
        return any(
            want <= div for conf in structure.conferences for div in conf
        )
    if pred.kind == "fixed_group":
        want = set(pred.teams)
        return any(
            want <= {t for div in conf for t in div}
            for conf in structure.conferences
        )
    return all(
        _division_ok(pred, div, dataset)
        for conf in structure.conferences
        for div in conf
    )


def arrangement_violation(
    preds: Sequence[Predicate],
    confs: tuple[tuple[frozenset[str], ...], ...],
    dataset: LeagueDataset,
) -> str | None:
    """First predicate violated by a partial structure (one or more complete
    conferences), or None.

    Group predicates whose teams only partially intersect these conferences
    are violations: the missing members are on the other side of some
    earlier cut, so no completion can satisfy them.
    """
    side_teams = {t for conf in confs for div in conf for t in div}
    for pred in preds:
        if pred.kind == "together":
            want = set(pred.teams)
            if want & side_teams:
                if not any(want <= div for conf in confs for div in conf):
                    return describe(pred)
        elif pred.kind == "fixed_group":
            want = set(pred.teams)
            if want & side_teams:
                if not any(
                    want <= {t for div in conf for t in div} for conf in confs
                ):
                    return describe(pred)
        else:
            for conf in confs:
                for div in conf:
                    if not _division_ok(pred, div, dataset):
                        return describe(pred)
    return None


def filter_candidates(candidate_set, predicates: Sequence[Predicate]):
    """Subset of a CandidateSet satisfying all predicates, order preserved;
    rejection counts (first failing predicate) are added to the stats."""
    preds = tuple(predicates)
    dataset = candidate_set.dataset
    for p in preds:
        check_predicate(p, dataset)
    if not preds:
        return candidate_set

    rejections = {describe(p): 0 for p in preds}
    kept = []
    for scored in candidate_set.entries:
        failed = None
        for p in preds:
            if not evaluate(p, scored.structure, dataset):
                failed = describe(p)
                break
        if failed is None:
            kept.append(scored)
        else:
            rejections[failed] += 1

    merged = dict(candidate_set.stats.predicate_rejections)
    for name, count in rejections.items():
        merged[name] = merged.get(name, 0) + count
    stats = replace(
        candidate_set.stats,
        candidates_satisfying=len(kept),
        retained=len(kept),
        predicate_rejections=tuple(sorted(merged.items())),
    )
    return replace(candidate_set, entries=tuple(kept), stats=stats)


# --- presets and files ----------------------------------------------------

def preset(name: str, dataset: LeagueDataset | None = None) -> tuple[Predicate, ...]:
    if name == "nhl-rivalries":
        return (
            together("FLA", "TB"),
            together("PHI", "PIT"),
            together("NJ", "NYI", "NYR"),
            together("CGY", "EDM"),
            together("ANA", "LA"),
        )
    if name == "mlb-fix-leagues":
        if dataset is None or dataset.current_structure is None:
            raise PredicateError(
                "mlb-fix-leagues needs a dataset with a current structure"
            )
        confs = dataset.current_structure.conferences
        labels = ("AL", "NL") + tuple(
            f"conf{i}" for i in range(2, len(confs))
        )
        return tuple(
            fixed_group(labels[i], sorted(t for div in conf for t in div))
            for i, conf in enumerate(confs)
        )
    raise PredicateError(f"unknown preset {name!r}")


PRESET_NAMES = ("nhl-rivalries", "mlb-fix-leagues")


def predicate_from_dict(raw: Mapping) -> Predicate:
    try:
        kind = raw["kind"]
        params = raw.get("params", {})
        if kind == "together":
            return together(*params["teams"])
        if kind == "apart":
            return apart(*params["teams"])
        if kind == "max_attr_per_division":
            return max_attr_per_division(params["attr"], params["value"], params["cap"])
        if kind == "max_tz_span_per_division":
            return max_tz_span_per_division(params["zones"])
        if kind == "fixed_group":
            return fixed_group(params["label"], params["teams"])
    except (KeyError, TypeError, ValueError) as e:
        raise PredicateError(f"bad predicate entry {raw!r}: {e}") from e
    raise PredicateError(f"unknown predicate kind {kind!r}")


def predicate_to_dict(pred: Predicate) -> dict:
    if pred.kind in ("together", "apart"):
        params: dict = {"teams": list(pred.teams)}
    elif pred.kind == "max_attr_per_division":
        params = {"attr": pred.attr, "value": pred.value, "cap": pred.cap}
    elif pred.kind == "max_tz_span_per_division":
        params = {"zones": pred.cap}
    else:
        params = {"label": pred.label, "teams": list(pred.teams)}
    return {"kind": pred.kind, "params": params}


def load_constraints(
    path: str | Path, dataset: LeagueDataset | None = None
) -> tuple[Predicate, ...]:
    """Parse a constraint file: a JSON array whose entries are predicate
    objects or preset names."""
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise PredicateError(f"cannot read constraints {path}: {e}") from e
    if not isinstance(raw, list):
        raise PredicateError("constraint file must be a JSON array")
    out: list[Predicate] = []
    for entry in raw:
        if isinstance(entry, str):
            out.extend(preset(entry, dataset))
        else:
            out.append(predicate_from_dict(entry))
    return tuple(out)
