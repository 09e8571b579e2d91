import random

import pytest

import realign
from realign.geodesy import distance_matrix
from realign.hullsplit import GenerateOptions, generate
from realign.model import (
    GeoPoint,
    LeagueDataset,
    ScheduleProfile,
    StructureTemplate,
    Team,
)
from realign.surrogate import build_game_matrix, weighted_distance


@pytest.fixture(scope="session")
def nhl():
    return realign.bundled_dataset("nhl-2011")


@pytest.fixture(scope="session")
def mlb():
    return realign.bundled_dataset("mlb-2012")


@pytest.fixture(scope="session")
def nfl():
    return realign.bundled_dataset("nfl-2012")


@pytest.fixture(scope="session")
def nba():
    return realign.bundled_dataset("nba-2012")


@pytest.fixture(scope="session")
def nhl_template(nhl):
    return realign.resolve_template("6x5", nhl)


@pytest.fixture(scope="session")
def nhl_candidates(nhl, nhl_template):
    """Unconstrained NHL generation shared across tests."""
    return generate(nhl, nhl_template, GenerateOptions(top_k=2000))


@pytest.fixture(scope="session")
def nhl_current_scored(nhl, nhl_template):
    return weighted_distance(
        nhl.current_structure, build_game_matrix(nhl_template), distance_matrix(nhl)
    )


def make_synth_league(seed: int, n: int) -> LeagueDataset:
    """Random general-position league in a continental bounding box."""
    rng = random.Random(seed)
    teams = tuple(
        Team(
            id=f"T{i:02d}",
            name=f"Team {i}",
            city=f"City {i}",
            location=GeoPoint(
                round(rng.uniform(26.0, 52.0), 4), round(rng.uniform(-124.0, -70.0), 4)
            ),
            country="US" if rng.random() < 0.8 else "CA",
            tz_offset_hours=rng.choice([-5, -6, -7, -8]),
        )
        for i in range(n)
    )
    return LeagueDataset(f"synth-{seed}-{n}", teams)


SYNTH_TEMPLATES = {
    "2x4": StructureTemplate("2x4", (4, 4), ((), ()), ScheduleProfile(0, 6, 2)),
    "2x5": StructureTemplate("2x5", (5, 5), ((), ()), ScheduleProfile(0, 6, 2)),
    "2x2x3": StructureTemplate(
        "2x2x3", (6, 6), ((3, 3), (3, 3)), ScheduleProfile(6, 4, 2)
    ),
    "3x4": StructureTemplate("3x4", (4, 4, 4), ((), (), ()), ScheduleProfile(0, 6, 2)),
}
