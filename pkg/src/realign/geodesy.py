"""Great-circle distances and the planar projection used by the line-cut
heuristic.

Distances are haversine miles on a sphere; both the inter-city matrix and
the projection are computed once per dataset and cached, so every
downstream scorer reads the same numbers.
"""

from __future__ import annotations

import math
import weakref
from dataclasses import dataclass
from typing import Mapping, NamedTuple

import numpy as np

from .model import GeoPoint, LeagueDataset

EARTH_RADIUS_MILES = 3958.7613


class PlanarPoint(NamedTuple):
    x: float
    y: float


@dataclass(frozen=True, eq=False)
class DistanceMatrix:
    """Symmetric n x n miles matrix, row order matching the dataset."""

    ids: tuple[str, ...]
    values: np.ndarray

    def index(self, team_id: str) -> int:
        return self.ids.index(team_id)

    def between(self, a: str, b: str) -> float:
        return float(self.values[self.index(a), self.index(b)])


def great_circle(a: GeoPoint, b: GeoPoint) -> float:
    """Haversine distance in miles."""
    lat1, lon1 = math.radians(a.lat), math.radians(a.lon)
    lat2, lon2 = math.radians(b.lat), math.radians(b.lon)
    dlat = lat2 - lat1
    dlon = lon2 - lon1
    h = math.sin(dlat / 2) ** 2 + math.cos(lat1) * math.cos(lat2) * math.sin(dlon / 2) ** 2
    return 2.0 * EARTH_RADIUS_MILES * math.asin(min(1.0, math.sqrt(h)))


_matrix_cache: "weakref.WeakKeyDictionary[LeagueDataset, DistanceMatrix]" = (
    weakref.WeakKeyDictionary()
)
_projection_cache: "weakref.WeakKeyDictionary[LeagueDataset, dict[str, PlanarPoint]]" = (
    weakref.WeakKeyDictionary()
)


def distance_matrix(dataset: LeagueDataset) -> DistanceMatrix:
    cached = _matrix_cache.get(dataset)
    if cached is not None:
        return cached
    n = dataset.size
    values = np.zeros((n, n))
    for i, ti in enumerate(dataset.teams):
        for j in range(i + 1, n):
            d = great_circle(ti.location, dataset.teams[j].location)
            values[i, j] = d
            values[j, i] = d
    values.setflags(write=False)
    out = DistanceMatrix(ids=dataset.team_ids, values=values)
    _matrix_cache[dataset] = out
    return out


def project(dataset: LeagueDataset) -> Mapping[str, PlanarPoint]:
    """Equirectangular projection: x = lon * cos(mean dataset latitude),
    y = lat.  One projection per dataset, shared by every recursive split."""
    cached = _projection_cache.get(dataset)
    if cached is not None:
        return cached
    mean_lat = sum(t.location.lat for t in dataset.teams) / dataset.size
    scale = math.cos(math.radians(mean_lat))
    points = {
        t.id: PlanarPoint(t.location.lon * scale, t.location.lat)
        for t in dataset.teams
    }
    _projection_cache[dataset] = points
    return points
