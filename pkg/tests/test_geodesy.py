import math

import numpy as np

from realign.geodesy import (
    EARTH_RADIUS_MILES,
    distance_matrix,
    great_circle,
    project,
)
from realign.model import GeoPoint

from conftest import make_synth_league


def test_coincident_points_zero():
    p = GeoPoint(27.9427, -82.4518)
    assert great_circle(p, p) == 0.0


def test_tampa_boston_matches_paper(nhl):
    d = great_circle(nhl.by_id("TB").location, nhl.by_id("BOS").location)
    assert abs(d - 1184) / 1184 < 0.05


def test_antipodal_half_circumference():
    a = GeoPoint(10.0, 20.0)
    b = GeoPoint(-10.0, -160.0)
    expected = math.pi * EARTH_RADIUS_MILES
    assert abs(great_circle(a, b) - expected) / expected < 1e-6


def test_symmetry_and_identity(nhl):
    teams = nhl.teams
    for i in range(0, len(teams), 5):
        for j in range(i, len(teams), 7):
            a, b = teams[i], teams[j]
            d_ab = great_circle(a.location, b.location)
            d_ba = great_circle(b.location, a.location)
            assert d_ab == d_ba
            if a.location == b.location:
                assert d_ab == 0.0
            else:
                assert d_ab > 0.0


def test_distance_matrix_properties(nhl):
    dm = distance_matrix(nhl)
    assert dm.values.shape == (30, 30)
    assert np.allclose(dm.values, dm.values.T)
    assert np.all(np.diag(dm.values) == 0.0)
    assert np.all(dm.values >= 0.0)


def test_matrix_triangle_inequality(nhl):
    v = distance_matrix(nhl).values
    n = len(v)
    rng = np.random.default_rng(7)
    for _ in range(200):
        i, j, k = rng.integers(0, n, size=3)
        assert v[i, j] <= v[i, k] + v[k, j] + 1e-9


def test_fla_tb_entry_near_paper(nhl):
    dm = distance_matrix(nhl)
    d = dm.between("FLA", "TB")
    assert abs(d - 180) / 180 < 0.15


def test_two_team_matrix():
    ds = make_synth_league(3, 2)
    dm = distance_matrix(ds)
    assert dm.values[0, 0] == 0.0 and dm.values[1, 1] == 0.0
    assert dm.values[0, 1] == dm.values[1, 0] > 0.0


def test_matrix_cached(nhl):
    assert distance_matrix(nhl) is distance_matrix(nhl)


def test_projection_equator_team():
    from realign.model import LeagueDataset, Team

    ds = LeagueDataset(
        "eq",
        (
            Team("O", "Origin", "o", GeoPoint(0.0, 0.0), "US", 0),
            Team("N", "North", "n", GeoPoint(0.0, 10.0), "US", 0),
        ),
    )
    points = project(ds)
    assert points["O"] == (0.0, 0.0)


def test_projection_same_meridian():
    from realign.model import LeagueDataset, Team

    ds = LeagueDataset(
        "mer",
        (
            Team("A", "A", "a", GeoPoint(30.0, -100.0), "US", -6),
            Team("B", "B", "b", GeoPoint(45.0, -100.0), "US", -6),
        ),
    )
    points = project(ds)
    assert points["A"].x == points["B"].x


def test_projection_distinct_points(nhl):
    points = project(nhl)
    assert len(set(points.values())) == 30


def test_projection_preserves_orientation(nhl):
    """Left/right orientation of triples survives the projection (no
    meridian wraparound in the bundled data)."""
    points = project(nhl)
    teams = nhl.teams

    def orient2d(p, q, r):
        return (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])

    import itertools

    sample = list(itertools.islice(itertools.combinations(range(30), 3), 0, 600, 7))
    for i, j, k in sample:
        a, b, c = teams[i], teams[j], teams[k]
        geo = orient2d(
            (a.location.lon, a.location.lat),
            (b.location.lon, b.location.lat),
            (c.location.lon, c.location.lat),
        )
        proj = orient2d(points[a.id], points[b.id], points[c.id])
        if abs(geo) > 1e-6:
            assert (geo > 0) == (proj > 0)
