"""The schedule-free travel objective and its calibration to actual miles.

A league structure's weighted distance is the sum, over ordered team pairs,
of inter-city distance times the away games the first team plays in the
second team's city.  Those away-game counts come from the schedule profile
as per-pair averages, so the objective needs no season schedule.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .geodesy import DistanceMatrix
from .model import (
    LeafGroup,
    LeagueStructure,
    StructureTemplate,
    TemplateError,
)


class ScoringError(ValueError):
    """A structure cannot be scored against the given matrix."""


@dataclass(frozen=True, eq=False)
class GameMatrix:
    """s x s away-game matrix: entry (i, j) is the away games a team in
    group i plays at each team of group j (averaged when uneven)."""

    groups: tuple[LeafGroup, ...]
    values: np.ndarray

    @property
    def size(self) -> int:
        return len(self.groups)


@dataclass(frozen=True)
class TravelModel:
    slope: float
    intercept: float
    r_squared: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.r_squared <= 1.0 + 1e-12:
            raise ValueError(f"r_squared {self.r_squared} outside [0, 1]")


@dataclass(frozen=True, eq=False)
class ScoredStructure:
    structure: LeagueStructure
    D: float
    per_team: Mapping[str, float]


def _per_pair(games: float, opponents: int, label: str) -> float:
    if opponents == 0:
        if games != 0:
            raise TemplateError(f"{label}: {games} games but no opponents")
        return 0.0
    return games / (2.0 * opponents)


def build_game_matrix(template: StructureTemplate) -> GameMatrix:
    """Per-pair away games between every pair of leaf groups.

    A team's category total is split evenly over the 2x opponents in that
    category (half the games are away), which is exactly the averaging rule
    for uneven schedules."""
    groups = template.leaf_groups()
    n = template.team_count
    sched = template.schedule
    s = len(groups)
    values = np.zeros((s, s))
    for i, gi in enumerate(groups):
        for j, gj in enumerate(groups):
            if i == j:
                if gi.divided:
                    games = sched.division_games_for(gi.size)
                    label = f"division of {gi.size}"
                else:
                    games = sched.conference_games_for(gi.size)
                    label = f"undivided conference of {gi.size}"
                values[i, j] = _per_pair(games, gi.size - 1, label)
            elif gi.conference == gj.conference:
                games = sched.conference_games_for(gi.conference_size)
                values[i, j] = _per_pair(
                    games,
                    gi.conference_size - gi.size,
                    f"conference of {gi.conference_size}",
                )
            else:
                games = sched.nonconference_games_for(gi.conference_size)
                values[i, j] = _per_pair(
                    games, n - gi.conference_size, "non-conference"
                )
    values.setflags(write=False)
    return GameMatrix(groups=groups, values=values)


def _align_groups(
    structure: LeagueStructure, matrix: GameMatrix
) -> list[tuple[int, frozenset[str]]]:
    """Match the structure's divisions to matrix rows by conference shape.

    Group roles in a category-based matrix depend only on sizes and
    conference membership, so any size-consistent alignment scores
    identically."""
    slot_confs: dict[int, list[tuple[int, int]]] = {}
    for idx, g in enumerate(matrix.groups):
        slot_confs.setdefault(g.conference, []).append((g.size, idx))
    want = sorted(
        (tuple(sorted(s for s, _ in slots)), ci) for ci, slots in slot_confs.items()
    )

    confs = sorted(
        structure.conferences,
        key=lambda conf: (tuple(sorted(len(d) for d in conf)), min(min(d) for d in conf)),
    )
    got = sorted(
        (tuple(sorted(len(d) for d in conf)), k) for k, conf in enumerate(confs)
    )
    if [shape for shape, _ in want] != [shape for shape, _ in got]:
        raise ScoringError(
            f"structure shape {[s for s, _ in got]} does not match "
            f"matrix groups {[s for s, _ in want]}"
        )

    assignment: list[tuple[int, frozenset[str]]] = []
    for (_, ci), (_, k) in zip(want, got):
        slots = sorted(slot_confs[ci])
        divs = sorted(confs[k], key=lambda d: (len(d), min(d)))
        for (size, idx), div in zip(slots, divs):
            if size != len(div):
                raise ScoringError("division sizes do not match matrix groups")
            assignment.append((idx, div))
    return assignment


def weighted_distance(
    structure: LeagueStructure,
    matrix: GameMatrix,
    distances: DistanceMatrix,
) -> ScoredStructure:
    """Score a structure: D plus the per-team decomposition (row sums)."""
    assignment = _align_groups(structure, matrix)
    n = len(distances.ids)
    index = {tid: k for k, tid in enumerate(distances.ids)}
    group_of = np.empty(n, dtype=np.intp)
    assigned = 0
    for gidx, div in assignment:
        for tid in div:
            k = index.get(tid)
            if k is None:
                raise ScoringError(f"team {tid!r} not in distance matrix")
            group_of[k] = gidx
            assigned += 1
    if assigned != n:
        missing = sorted(set(distances.ids) - structure.all_teams())
        raise ScoringError(f"teams missing from structure: {missing}")

    g = matrix.values[group_of[:, None], group_of[None, :]]
    weighted = distances.values * g
    per_team_arr = weighted.sum(axis=1)
    per_team = {tid: float(per_team_arr[index[tid]]) for tid in distances.ids}
    return ScoredStructure(
        structure=structure, D=float(per_team_arr.sum()), per_team=per_team
    )


def fit_travel_model(
    per_team_surrogate: Mapping[str, float],
    actual_travel: Mapping[str, float],
) -> TravelModel:
    """OLS of actual miles on the surrogate, over teams present in both."""
    common = sorted(set(per_team_surrogate) & set(actual_travel))
    if len(common) < 3:
        raise ValueError(
            f"need at least 3 overlapping teams to fit, got {len(common)}"
        )
    x = np.array([per_team_surrogate[t] for t in common], dtype=float)
    y = np.array([actual_travel[t] for t in common], dtype=float)
    sxx = float(((x - x.mean()) ** 2).sum())
    if sxx == 0.0:
        raise ValueError("surrogate values have zero variance")
    sxy = float(((x - x.mean()) * (y - y.mean())).sum())
    slope = sxy / sxx
    intercept = float(y.mean()) - slope * float(x.mean())
    syy = float(((y - y.mean()) ** 2).sum())
    if syy == 0.0:
        r_squared = 0.0
    else:
        resid = y - (slope * x + intercept)
        r_squared = 1.0 - float((resid**2).sum()) / syy
        r_squared = min(max(r_squared, 0.0), 1.0)
    return TravelModel(slope=slope, intercept=intercept, r_squared=r_squared)


IDENTITY_MODEL = TravelModel(slope=1.0, intercept=0.0, r_squared=1.0)


def predict_travel(
    model: TravelModel, per_team_surrogate: Mapping[str, float]
) -> dict[str, float]:
    return {
        tid: model.slope * s + model.intercept
        for tid, s in per_team_surrogate.items()
    }
