"""Sports-league realignment toolkit: a schedule-free travel objective,
a line-cut structure generator, constraint filtering, exact certification,
what-if scenarios, and report/CLI/HTTP surfaces."""

from .model import (
    GeoPoint,
    LeafGroup,
    LeagueDataset,
    LeagueStructure,
    ScheduleProfile,
    StructureTemplate,
    Team,
    bundled_dataset,
    bundled_league_ids,
    default_template,
    load_dataset,
    resolve_dataset,
    resolve_template,
    save_dataset,
    validate_structure,
)
from .geodesy import DistanceMatrix, PlanarPoint, distance_matrix, great_circle, project
from .surrogate import (
    GameMatrix,
    ScoredStructure,
    TravelModel,
    build_game_matrix,
    fit_travel_model,
    predict_travel,
    weighted_distance,
)
from .hullsplit import (
    BalancedSplit,
    CandidateSet,
    CutLine,
    GenerateOptions,
    balanced_splits,
    candidate_lines,
    generate,
    orientation_filter,
    rank,
)
from .constraints import (
    Predicate,
    apart,
    evaluate,
    filter_candidates,
    fixed_group,
    load_constraints,
    max_attr_per_division,
    max_tz_span_per_division,
    preset,
    together,
)
from .exact import (
    Certification,
    ExactResult,
    MipModel,
    add_exclusions,
    build_mip,
    certify,
    export_lp,
    export_warm_start,
    solve_exact,
)
from .scenarios import Scenario, apply_scenario, load_scenario, run_scenario
from .reports import (
    TravelDiff,
    fuel_estimate,
    hull_geojson,
    summary_table,
    travel_diff,
)

__version__ = "0.1.0"
