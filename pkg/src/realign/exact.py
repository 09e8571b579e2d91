"""Exact minimization of the weighted-distance objective.

The quadratic assignment formulation uses binary assignment variables
x[v][i] (team v in division i) and pairing variables y[u][v][i][j] linked
by y <= 0.5(x_ui + x_vj); with the objective written as maximizing the
M-shifted costs, every y settles to 1 exactly when both its x variables
do.  Full-size leagues are exported in LP format for industrial solvers;
desk-scale instances are solved internally by depth-first branch and bound
over direct team-to-division assignment, which searches the same feasible
set and objective.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

import numpy as np

from . import constraints as _constraints
from .geodesy import distance_matrix
from .model import LeagueDataset, LeagueStructure, StructureTemplate
from .surrogate import ScoredStructure, build_game_matrix, weighted_distance


class ExactError(ValueError):
    pass


class InfeasibleError(ExactError):
    """The predicate set admits no structure."""


class BudgetExceededError(ExactError):
    def __init__(self, message: str, incumbent: "ExactResult | None" = None):
        super().__init__(message)
        self.incumbent = incumbent


class _Timeout(Exception):
    pass


# practical limits for the internal engine; beyond this, export the LP
EXHAUSTIVE_TEAM_LIMIT = 14
BRANCH_AND_BOUND_TEAM_LIMIT = 20


@dataclass(frozen=True, eq=False)
class MipModel:
    dataset: LeagueDataset
    template: StructureTemplate
    team_ids: tuple[str, ...]
    division_sizes: tuple[int, ...]
    G: np.ndarray
    distances: np.ndarray
    M: float
    warm_start: LeagueStructure | None = None
    exclusions: tuple[tuple[str, str], ...] = ()

    @property
    def n(self) -> int:
        return len(self.team_ids)

    @property
    def s(self) -> int:
        return len(self.division_sizes)

    @property
    def x_count(self) -> int:
        return self.n * self.s

    @property
    def y_count(self) -> int:
        return (self.n * self.s) ** 2

    def cost(self, u: int, v: int, i: int, j: int) -> float:
        return float(self.distances[u, v] * self.G[i, j])


@dataclass(frozen=True)
class ExactResult:
    structure: LeagueStructure
    objective_D: float
    proof: str  # exhaustive | branch-and-bound | external
    nodes: int
    partitions: int
    wall_time: float


@dataclass(frozen=True)
class Certification:
    optimal: bool
    gap: float


def build_mip(
    dataset: LeagueDataset,
    template: StructureTemplate,
    warm_start: LeagueStructure | None = None,
) -> MipModel:
    if template.team_count != dataset.size:
        raise ExactError(
            f"template {template.name} sized for {template.team_count} teams, "
            f"dataset has {dataset.size}"
        )
    matrix = build_game_matrix(template)
    dm = distance_matrix(dataset)
    max_cost = float(dm.values.max() * matrix.values.max())
    return MipModel(
        dataset=dataset,
        template=template,
        team_ids=dataset.team_ids,
        division_sizes=tuple(g.size for g in matrix.groups),
        G=matrix.values,
        distances=dm.values,
        M=max_cost + 1.0,
        warm_start=warm_start,
    )


def add_exclusions(model: MipModel, pairs: Iterable[tuple[str, str]]) -> MipModel:
    """Append x_ui + x_vi <= 1 rows forcing each pair into different
    divisions (one constraint per division)."""
    known = set(model.team_ids)
    cleaned = []
    for u, v in pairs:
        if u not in known or v not in known:
            raise ExactError(f"unknown team in exclusion pair ({u!r}, {v!r})")
        if u == v:
            raise ExactError(f"exclusion pair ({u!r}, {v!r}) is degenerate")
        cleaned.append((u, v) if u < v else (v, u))
    return replace(model, exclusions=model.exclusions + tuple(cleaned))


def exclusions_over(dataset: LeagueDataset, threshold_miles: float) -> list[tuple[str, str]]:
    """Team pairs farther apart than the threshold, for geographic
    exclusion speedups."""
    dm = distance_matrix(dataset)
    out = []
    for i, u in enumerate(dm.ids):
        for j in range(i + 1, len(dm.ids)):
            if dm.values[i, j] > threshold_miles:
                out.append((u, dm.ids[j]))
    return out


# --- LP export ------------------------------------------------------------

def _num(value: float) -> str:
    return f"{value:.12g}"


def _wrap_terms(terms: list[str], indent: str = "  ", per_line: int = 8) -> list[str]:
    lines = []
    for i in range(0, len(terms), per_line):
        lines.append(indent + " ".join(terms[i: i + per_line]))
    return lines


def export_lp(model: MipModel) -> str:
    """CPLEX-style LP text with deterministic x_v_i / y_u_v_i_j naming."""
    n, s = model.n, model.s
    ids = model.team_ids
    lines: list[str] = ["Maximize", " obj:"]

    obj_terms = []
    first = True
    for u in range(n):
        for v in range(n):
            for i in range(s):
                for j in range(s):
                    cprime = model.M - model.cost(u, v, i, j)
                    sign = "" if first else "+ "
                    first = False
                    obj_terms.append(f"{sign}{_num(cprime)} y_{ids[u]}_{ids[v]}_{i}_{j}")
    lines.extend(_wrap_terms(obj_terms))

    lines.append("Subject To")
    for i in range(s):
        terms = [f"x_{ids[v]}_{i}" for v in range(n)]
        lines.append(f" size_{i}: " + " + ".join(terms) + f" = {model.division_sizes[i]}")
    for v in range(n):
        terms = [f"x_{ids[v]}_{i}" for i in range(s)]
        lines.append(f" assign_{ids[v]}: " + " + ".join(terms) + " = 1")
    for u in range(n):
        for v in range(n):
            terms = [
                f"y_{ids[u]}_{ids[v]}_{i}_{j}" for i in range(s) for j in range(s)
            ]
            lines.append(f" pair_{ids[u]}_{ids[v]}:")
            lines.extend(_wrap_terms([" + ".join(terms[k: k + 6]) + (" +" if k + 6 < len(terms) else "") for k in range(0, len(terms), 6)]))
            lines.append("  = 1")
    for i in range(s):
        for j in range(s):
            terms = [
                f"y_{ids[u]}_{ids[v]}_{i}_{j}" for u in range(n) for v in range(n)
            ]
            rhs = model.division_sizes[i] * model.division_sizes[j]
            lines.append(f" paircount_{i}_{j}:")
            lines.extend(_wrap_terms([" + ".join(terms[k: k + 6]) + (" +" if k + 6 < len(terms) else "") for k in range(0, len(terms), 6)]))
            lines.append(f"  = {rhs}")
    for u in range(n):
        for v in range(n):
            for i in range(s):
                for j in range(s):
                    yname = f"y_{ids[u]}_{ids[v]}_{i}_{j}"
                    if u == v and i == j:
                        body = f"{yname} - x_{ids[u]}_{i} <= 0"
                    else:
                        body = (
                            f"{yname} - 0.5 x_{ids[u]}_{i} - 0.5 x_{ids[v]}_{j} <= 0"
                        )
                    lines.append(f" link_{ids[u]}_{ids[v]}_{i}_{j}: {body}")
    for idx, (u, v) in enumerate(model.exclusions):
        for i in range(s):
            lines.append(f" excl_{idx}_{i}: x_{u}_{i} + x_{v}_{i} <= 1")

    lines.append("Binary")
    for v in range(n):
        for i in range(s):
            lines.append(f" x_{ids[v]}_{i}")
    for u in range(n):
        for v in range(n):
            for i in range(s):
                for j in range(s):
                    lines.append(f" y_{ids[u]}_{ids[v]}_{i}_{j}")
    lines.append("End")
    return "\n".join(lines) + "\n"


def export_warm_start(model: MipModel) -> str:
    """Companion start file: one `x_v_i = 1` line per warm-start assignment."""
    if model.warm_start is None:
        raise ExactError("model has no warm start")
    assignment = _division_index_of(model, model.warm_start)
    lines = [f"x_{tid}_{assignment[tid]} = 1" for tid in model.team_ids]
    return "\n".join(lines) + "\n"


def _division_index_of(model: MipModel, structure: LeagueStructure) -> dict[str, int]:
    """Map teams to division slots, matching structure divisions to the
    template's leaf groups by conference shape."""
    matrix = build_game_matrix(model.template)
    from .surrogate import _align_groups  # same alignment the scorer uses

    out: dict[str, int] = {}
    for gidx, div in _align_groups(structure, matrix):
        for tid in div:
            out[tid] = gidx
    return out


# --- MIP solution checking -------------------------------------------------

def mip_solution_from_structure(
    model: MipModel, structure: LeagueStructure
) -> tuple[np.ndarray, np.ndarray]:
    """The unique feasible (x, y) for a fixed integral assignment.

    y is forced by the linking rows: y_uvij can be 1 only when
    x_ui = x_vj = 1, and the pair-coverage rows then pin exactly that one."""
    n, s = model.n, model.s
    assignment = _division_index_of(model, structure)
    x = np.zeros((n, s), dtype=np.int8)
    for idx, tid in enumerate(model.team_ids):
        x[idx, assignment[tid]] = 1
    y = np.zeros((n, n, s, s), dtype=np.int8)
    for u in range(n):
        for v in range(n):
            feasible = [
                (i, j)
                for i in range(s)
                for j in range(s)
                if x[u, i] + x[v, j] == 2
            ]
            if len(feasible) != 1:
                raise ExactError(
                    f"pair ({model.team_ids[u]}, {model.team_ids[v]}) has "
                    f"{len(feasible)} feasible y slots"
                )
            i, j = feasible[0]
            y[u, v, i, j] = 1
    return x, y


def check_mip_solution(
    model: MipModel, x: np.ndarray, y: np.ndarray
) -> dict[str, float | bool]:
    """Verify all constraint families and return both objective forms."""
    n, s = model.n, model.s
    d = np.asarray(model.division_sizes)
    ok_sizes = bool((x.sum(axis=0) == d).all())
    ok_assign = bool((x.sum(axis=1) == 1).all())
    ok_pairs = bool((y.sum(axis=(2, 3)) == 1).all())
    counts = y.sum(axis=(0, 1))
    ok_counts = bool((counts == np.outer(d, d)).all())
    ok_link = True
    for u in range(n):
        for v in range(n):
            for i in range(s):
                for j in range(s):
                    if y[u, v, i, j] > 0.5 * (x[u, i] + x[v, j]):
                        ok_link = False
    cost = float((y * (model.distances[:, :, None, None] * model.G[None, None, :, :])).sum())
    shifted = model.M * n * n - cost
    return {
        "sizes": ok_sizes,
        "assignment": ok_assign,
        "pair_coverage": ok_pairs,
        "pair_counts": ok_counts,
        "linking": ok_link,
        "objective_min": cost,
        "objective_max_shifted": shifted,
    }


# --- internal exact engines -------------------------------------------------

@dataclass
class _Compiled:
    entities: list[tuple[int, ...]]  # tuples of team indices
    ent_pair_dist: np.ndarray        # entity x entity summed distances
    ent_intra: np.ndarray
    apart: set[tuple[int, int]]     # entity index pairs barred from one division
    attr_counts: list[np.ndarray]   # per max_attr predicate: count per entity
    attr_caps: list[int]
    tz_lo: np.ndarray
    tz_hi: np.ndarray
    tz_caps: list[int]
    labels_of: list[tuple[int, ...]]  # fixed-group labels per entity
    label_count: int


def _compile(
    dataset: LeagueDataset,
    predicates: Sequence[_constraints.Predicate],
    exclusions: Sequence[tuple[str, str]],
) -> _Compiled:
    n = dataset.size
    index = dataset.index_of()
    parent = list(range(n))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a: int, b: int) -> None:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    for p in predicates:
        _constraints.check_predicate(p, dataset)
        if p.kind == "together":
            first = index[p.teams[0]]
            for tid in p.teams[1:]:
                union(first, index[tid])

    roots: dict[int, list[int]] = {}
    for t in range(n):
        roots.setdefault(find(t), []).append(t)
    entities = [tuple(sorted(ts)) for _, ts in sorted(roots.items())]
    ent_of_team = {}
    for e, ts in enumerate(entities):
        for t in ts:
            ent_of_team[t] = e

    dm = distance_matrix(dataset).values
    m = len(entities)
    ent_pair = np.zeros((m, m))
    ent_intra = np.zeros(m)
    for e, ts in enumerate(entities):
        rows = np.array(ts)
        ent_intra[e] = dm[np.ix_(rows, rows)].sum() / 2.0
        for f in range(e + 1, m):
            cols = np.array(entities[f])
            total = dm[np.ix_(rows, cols)].sum()
            ent_pair[e, f] = total
            ent_pair[f, e] = total

    apart: set[tuple[int, int]] = set()

    def bar(a_team: int, b_team: int, what: str) -> None:
        ea, eb = ent_of_team[a_team], ent_of_team[b_team]
        if ea == eb:
            raise InfeasibleError(
                f"{what} conflicts with a together group covering both teams"
            )
        apart.add((min(ea, eb), max(ea, eb)))

    for p in predicates:
        if p.kind == "apart":
            for a in range(len(p.teams)):
                for b in range(a + 1, len(p.teams)):
                    bar(index[p.teams[a]], index[p.teams[b]], _constraints.describe(p))
    for u, v in exclusions:
        bar(index[u], index[v], f"exclusion ({u}, {v})")

    attr_counts: list[np.ndarray] = []
    attr_caps: list[int] = []
    tz_caps: list[int] = []
    for p in predicates:
        if p.kind == "max_attr_per_division":
            counts = np.zeros(m, dtype=int)
            for e, ts in enumerate(entities):
                counts[e] = sum(
                    1
                    for t in ts
                    if _constraints._attr_value(dataset, dataset.teams[t].id, p.attr)
                    == p.value
                )
                if counts[e] > p.cap:
                    raise InfeasibleError(
                        f"{_constraints.describe(p)} conflicts with a together group"
                    )
            attr_counts.append(counts)
            attr_caps.append(p.cap)
        elif p.kind == "max_tz_span_per_division":
            tz_caps.append(p.cap)

    tz_lo = np.zeros(m)
    tz_hi = np.zeros(m)
    for e, ts in enumerate(entities):
        offs = [dataset.teams[t].tz_offset_hours for t in ts]
        tz_lo[e] = min(offs)
        tz_hi[e] = max(offs)
    if tz_caps:
        worst = min(tz_caps)
        for e in range(m):
            if tz_hi[e] - tz_lo[e] > worst - 1:
                raise InfeasibleError(
                    "time-zone span cap conflicts with a together group"
                )

    fixed = [p for p in predicates if p.kind == "fixed_group"]
    labels_of: list[list[int]] = [[] for _ in range(m)]
    for li, p in enumerate(fixed):
        for tid in p.teams:
            e = ent_of_team[index[tid]]
            if li not in labels_of[e]:
                labels_of[e].append(li)

    return _Compiled(
        entities=entities,
        ent_pair_dist=ent_pair,
        ent_intra=ent_intra,
        apart=apart,
        attr_counts=attr_counts,
        attr_caps=attr_caps,
        tz_lo=tz_lo,
        tz_hi=tz_hi,
        tz_caps=tz_caps,
        labels_of=[tuple(ls) for ls in labels_of],
        label_count=len(fixed),
    )


def _group_classes(W: np.ndarray, sizes: Sequence[int]) -> list[int]:
    """Equivalence class per division: two divisions are interchangeable
    when swapping them leaves the pair-weight matrix invariant."""
    s = len(sizes)
    classes = list(range(s))
    for i in range(s):
        for j in range(i + 1, s):
            if classes[j] != j:
                continue
            if sizes[i] != sizes[j] or W[i, i] != W[j, j]:
                continue
            others = [k for k in range(s) if k not in (i, j)]
            if all(W[i, k] == W[j, k] for k in others):
                classes[j] = classes[i]
    return classes


def solve_exact(
    dataset: LeagueDataset,
    template: StructureTemplate,
    predicates: Sequence[_constraints.Predicate] = (),
    budget_seconds: float | None = None,
    method: str = "auto",
    exclusions: Sequence[tuple[str, str]] = (),
) -> ExactResult:
    """Provably minimal structure over all partitions matching the template
    and predicates.  Instances beyond the documented limits must go through
    export_lp instead."""
    n = dataset.size
    if template.team_count != n:
        raise ExactError(
            f"template {template.name} sized for {template.team_count}, dataset has {n}"
        )
    if method not in ("auto", "exhaustive", "branch-and-bound"):
        raise ExactError(f"unknown method {method!r}")
    if method == "auto":
        method = "branch-and-bound"
    limit = (
        EXHAUSTIVE_TEAM_LIMIT if method == "exhaustive" else BRANCH_AND_BOUND_TEAM_LIMIT
    )
    if n > limit:
        raise ExactError(
            f"{n} teams exceeds the internal {method} limit ({limit}); "
            "use build_mip/export_lp with an external solver"
        )

    matrix = build_game_matrix(template)
    groups = matrix.groups
    sizes = [g.size for g in groups]
    conf_of_group = [g.conference for g in groups]
    W = matrix.values + matrix.values.T
    comp = _compile(dataset, predicates, exclusions)

    m = len(comp.entities)
    order = sorted(
        range(m),
        key=lambda e: (
            -len(comp.entities[e]),
            -float(comp.ent_pair_dist[e].sum()),
            comp.entities[e],
        ),
    )
    ent_teams = [comp.entities[e] for e in order]
    ent_sizes = [len(ts) for ts in ent_teams]
    pair_ds = comp.ent_pair_dist[np.ix_(order, order)]
    intra = comp.ent_intra[order]
    apart = {
        (a, b)
        for a, b in (
            (order.index(x), order.index(y)) for x, y in comp.apart
        )
    }
    apart |= {(b, a) for a, b in apart}
    attr_counts = [c[order] for c in comp.attr_counts]
    tz_lo = comp.tz_lo[order]
    tz_hi = comp.tz_hi[order]
    labels_of = [comp.labels_of[e] for e in order]

    w_min = float(W.min())
    suffix_pair = np.zeros(m + 1)
    suffix_intra = np.zeros(m + 1)
    for k in range(m - 1, -1, -1):
        suffix_pair[k] = suffix_pair[k + 1] + float(pair_ds[k, k + 1:].sum())
        suffix_intra[k] = suffix_intra[k + 1] + float(intra[k])
    classes = _group_classes(W, sizes)
    s = len(sizes)

    start = time.monotonic()
    deadline = start + budget_seconds if budget_seconds is not None else None
    prune = method == "branch-and-bound"

    capacity = list(sizes)
    assigned_group = [-1] * m
    div_members: list[list[int]] = [[] for _ in range(s)]
    div_attr = [np.zeros(s, dtype=int) for _ in comp.attr_counts]
    div_tz_lo = [None] * s
    div_tz_hi = [None] * s
    commit = [-1] * comp.label_count

    best_cost = float("inf")
    best_assignment: list[int] | None = None
    nodes = 0
    partitions = 0

    def feasible_groups(e: int) -> list[int]:
        out = []
        seen_empty_class: set[int] = set()
        for g in range(s):
            if capacity[g] < ent_sizes[e]:
                continue
            if not div_members[g]:
                cls = classes[g]
                if cls in seen_empty_class:
                    continue
                seen_empty_class.add(cls)
            if any((e, f) in apart for f in div_members[g]):
                continue
            ok = True
            for counts, cap, acc in zip(attr_counts, comp.attr_caps, div_attr):
                if acc[g] + counts[e] > cap:
                    ok = False
                    break
            if not ok:
                continue
            if comp.tz_caps:
                lo = tz_lo[e] if div_tz_lo[g] is None else min(div_tz_lo[g], tz_lo[e])
                hi = tz_hi[e] if div_tz_hi[g] is None else max(div_tz_hi[g], tz_hi[e])
                if any(hi - lo > cap - 1 for cap in comp.tz_caps):
                    continue
            conf = conf_of_group[g]
            if any(
                commit[l] not in (-1, conf) for l in labels_of[e]
            ):
                continue
            out.append(g)
        return out

    def assign_cost(e: int, g: int) -> float:
        cost = float(W[g, g]) * float(intra[e])
        for f in range(m):
            gf = assigned_group[f]
            if gf >= 0:
                cost += float(W[gf, g]) * float(pair_ds[e, f])
        return cost

    def lower_bound(k: int, current: float) -> float:
        bound = current + w_min * (float(suffix_pair[k]) + float(suffix_intra[k]))
        for e in range(k, m):
            cheapest = float("inf")
            for g in range(s):
                if capacity[g] < ent_sizes[e]:
                    continue
                c = 0.0
                for f in range(m):
                    gf = assigned_group[f]
                    if gf >= 0:
                        c += float(W[gf, g]) * float(pair_ds[e, f])
                if c < cheapest:
                    cheapest = c
            if cheapest == float("inf"):
                return float("inf")
            bound += cheapest
        return bound

    def dfs(k: int, current: float) -> None:
        nonlocal best_cost, best_assignment, nodes, partitions
        nodes += 1
        if deadline is not None and nodes % 1024 == 0 and time.monotonic() > deadline:
            raise _Timeout()
        if k == m:
            partitions += 1
            if current < best_cost:
                best_cost = current
                best_assignment = assigned_group.copy()
            return
        if prune and lower_bound(k, current) >= best_cost:
            return
        for g in feasible_groups(k):
            delta = assign_cost(k, g)
            if prune and current + delta >= best_cost:
                continue
            assigned_group[k] = g
            capacity[g] -= ent_sizes[k]
            div_members[g].append(k)
            for counts, acc in zip(attr_counts, div_attr):
                acc[g] += counts[k]
            old_lo, old_hi = div_tz_lo[g], div_tz_hi[g]
            div_tz_lo[g] = tz_lo[k] if old_lo is None else min(old_lo, tz_lo[k])
            div_tz_hi[g] = tz_hi[k] if old_hi is None else max(old_hi, tz_hi[k])
            touched = [l for l in labels_of[k] if commit[l] == -1]
            for l in touched:
                commit[l] = conf_of_group[g]

            dfs(k + 1, current + delta)

            for l in touched:
                commit[l] = -1
            div_tz_lo[g], div_tz_hi[g] = old_lo, old_hi
            for counts, acc in zip(attr_counts, div_attr):
                acc[g] -= counts[k]
            div_members[g].pop()
            capacity[g] += ent_sizes[k]
            assigned_group[k] = -1

    def result_from(assignment: list[int], proof: str) -> ExactResult:
        confs: dict[int, list[frozenset[str]]] = {c: [] for c in sorted(set(conf_of_group))}
        for g in range(s):
            members = [
                dataset.teams[t].id
                for e in range(m)
                if assignment[e] == g
                for t in ent_teams[e]
            ]
            confs[conf_of_group[g]].append(frozenset(members))
        structure = LeagueStructure(
            conferences=tuple(tuple(divs) for _, divs in sorted(confs.items())),
            provenance="exact",
        )
        scored = weighted_distance(structure, matrix, distance_matrix(dataset))
        return ExactResult(
            structure=structure,
            objective_D=scored.D,
            proof=proof,
            nodes=nodes,
            partitions=partitions,
            wall_time=time.monotonic() - start,
        )

    try:
        dfs(0, 0.0)
    except _Timeout:
        incumbent = (
            result_from(best_assignment, method) if best_assignment is not None else None
        )
        raise BudgetExceededError(
            f"budget of {budget_seconds}s exceeded after {nodes} nodes",
            incumbent=incumbent,
        ) from None

    if best_assignment is None:
        raise InfeasibleError(
            "no structure satisfies the predicates: "
            + ", ".join(_constraints.describe(p) for p in predicates)
        )
    return result_from(best_assignment, method)


def certify(heuristic_best: ScoredStructure, exact: ExactResult,
            rel_tol: float = 1e-6) -> Certification:
    """Compare the heuristic's best structure against the proven optimum."""
    if heuristic_best.structure.all_teams() != exact.structure.all_teams():
        raise ExactError("heuristic and exact results cover different team sets")
    h_shape = sorted(
        tuple(sorted(len(d) for d in conf))
        for conf in heuristic_best.structure.conferences
    )
    e_shape = sorted(
        tuple(sorted(len(d) for d in conf)) for conf in exact.structure.conferences
    )
    if h_shape != e_shape:
        raise ExactError("heuristic and exact results use different templates")
    gap = heuristic_best.D - exact.objective_D
    scale = max(abs(exact.objective_D), 1.0)
    return Certification(optimal=gap <= rel_tol * scale, gap=gap)
