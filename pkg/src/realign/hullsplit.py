"""Line-cut enumeration heuristic.

Candidate structures come from straight-line cuts: every line through a
pair of cities is perturbed infinitesimally (translated to either side, and
rotated either way about the anchor midpoint) and a cut is kept when the
resulting side sizes hit the target.  Conferences are cut first (with the
near-horizontal filter at that top level only), then each piece is cut
recursively into divisions, and every combination of sub-splits composes
into a full structure.  Perturbation is evaluated in the zero-epsilon
limit, so collinear inputs and the anchor cities themselves classify
deterministically.

Composition dedupes at every level and streams scored structures through a
bounded best-K heap, so the full cross product is ranked without being
materialized.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import constraints as _constraints
from .geodesy import PlanarPoint, distance_matrix, project
from .model import LeagueDataset, LeagueStructure, StructureTemplate, TemplateError
from .surrogate import GameMatrix, ScoredStructure, build_game_matrix, weighted_distance


class GenerationError(ValueError):
    pass


@dataclass(frozen=True)
class CutLine:
    """A line through two projected cities."""

    anchors: tuple[str, str]
    direction: tuple[float, float]
    angle_from_horizontal: float


@dataclass(frozen=True)
class BalancedSplit:
    line: CutLine
    left: frozenset[str]
    right: frozenset[str]


@dataclass(frozen=True)
class GenerationStats:
    """Counters from one generation run.

    ``candidates_raw`` counts compositions of kept splits before any
    deduplication or predicate, computed arithmetically (different
    lines producing the same partition all count).  Predicate rejection
    counts are in distinct-structure units, attributed to the first
    failing predicate in declaration order.  The ``top_*`` fields are zero
    for templates with no conference-level split (the orientation filter
    never applies below that level).
    """

    top_lines: int
    top_splits_kept: int
    top_lines_retained: int
    candidates_raw: int
    candidates_distinct: int
    duplicates_removed: int
    candidates_satisfying: int
    retained: int
    predicate_rejections: tuple[tuple[str, int], ...] = ()


@dataclass(frozen=True, eq=False)
class CandidateSet:
    dataset: LeagueDataset
    template: StructureTemplate
    entries: tuple[ScoredStructure, ...]
    stats: GenerationStats


@dataclass(frozen=True)
class GenerateOptions:
    filter_angle_deg: float = 35.0
    top_k: int = 10_000
    keep_all: bool = False
    predicates: tuple = ()


# --- lines and side classification ---------------------------------------

_VARIANTS = ("rot+", "rot-", "shift+", "shift-")


def candidate_lines(points: Mapping[str, PlanarPoint]) -> list[CutLine]:
    """One line per unordered pair of distinct projected locations."""
    ids = sorted(points)
    lines: list[CutLine] = []
    for i, a_id in enumerate(ids):
        ax, ay = points[a_id]
        for b_id in ids[i + 1:]:
            bx, by = points[b_id]
            dx, dy = bx - ax, by - ay
            norm = math.hypot(dx, dy)
            if norm == 0.0:
                continue  # coincident cities define no line
            dx, dy = dx / norm, dy / norm
            if dx < 0 or (dx == 0 and dy < 0):
                dx, dy = -dx, -dy
            angle = math.degrees(math.atan2(abs(dy), abs(dx)))
            lines.append(CutLine((a_id, b_id), (dx, dy), angle))
    return lines


def _variant_sides(
    line: CutLine, points: Mapping[str, PlanarPoint], ids: Sequence[str]
) -> list[tuple[str, frozenset[str], frozenset[str]]]:
    """Positive/negative side sets for each perturbation variant.

    The signed distance s is perturbed in the zero-epsilon limit:
    translation resolves on-line points to one side together; rotation
    about the anchor midpoint resolves them by their position t along the
    line, which separates the two anchors.
    """
    a = points[line.anchors[0]]
    b = points[line.anchors[1]]
    dx, dy = b.x - a.x, b.y - a.y
    norm = math.hypot(dx, dy)
    dx, dy = dx / norm, dy / norm
    nx, ny = -dy, dx
    mx, my = (a.x + b.x) / 2.0, (a.y + b.y) / 2.0

    s_vals: list[float] = []
    t_vals: list[float] = []
    for tid in ids:
        p = points[tid]
        if p == a or p == b:
            # anchors sit on the line by construction; forcing s to exact
            # zero keeps them under the perturbation rules instead of
            # floating-point residue
            s_vals.append(0.0)
        else:
            s_vals.append(nx * (p.x - a.x) + ny * (p.y - a.y))
        t_vals.append(dx * (p.x - mx) + dy * (p.y - my))

    out = []
    for variant in _VARIANTS:
        pos: list[str] = []
        neg: list[str] = []
        for tid, s, t in zip(ids, s_vals, t_vals):
            if s == 0.0:
                if variant == "rot+":
                    s = -t if t != 0.0 else 1.0
                elif variant == "rot-":
                    s = t if t != 0.0 else 1.0
                elif variant == "shift+":
                    s = -1.0
                else:
                    s = 1.0
            (pos if s > 0 else neg).append(tid)
        out.append((variant, frozenset(pos), frozenset(neg)))
    return out


def balanced_splits(
    lines: Iterable[CutLine],
    points: Mapping[str, PlanarPoint],
    target: tuple[int, int],
) -> list[BalancedSplit]:
    """Splits whose side sizes hit the target in either orientation.

    Perturbation variants of one line that induce the same partition are
    reported once per line."""
    k, rest = target
    n = k + rest
    if k <= 0 or rest <= 0:
        raise GenerationError(f"degenerate split target {target}")
    ids = sorted(points)
    if len(ids) != n:
        raise GenerationError(
            f"target {target} sums to {n} but there are {len(ids)} points"
        )
    kept: list[BalancedSplit] = []
    for line in lines:
        seen: set[frozenset[frozenset[str]]] = set()
        for _, pos, neg in _variant_sides(line, points, ids):
            sizes = (len(pos), len(neg))
            if sizes != (k, rest) and sizes != (rest, k):
                continue
            part_key = frozenset((pos, neg))
            if part_key in seen:
                continue
            seen.add(part_key)
            kept.append(BalancedSplit(line, pos, neg))
    return kept


def orientation_filter(
    splits: Sequence[BalancedSplit], max_angle_from_horizontal_rejected: float
) -> list[BalancedSplit]:
    """Drop splits whose line is flatter than the threshold."""
    return [
        s
        for s in splits
        if s.line.angle_from_horizontal >= max_angle_from_horizontal_rejected
    ]


# --- split tree ----------------------------------------------------------

@dataclass(frozen=True)
class _Leaf:
    size: int
    key: tuple


@dataclass(frozen=True)
class _Conf:
    size: int
    div_node: object | None
    key: tuple


@dataclass(frozen=True)
class _Split:
    level: str  # "conference" | "division"
    left: object
    right: object
    sizes: tuple[int, int]
    key: tuple


def _halves(sizes: Sequence[int]) -> tuple[list[int], list[int]]:
    left: list[int] = []
    right: list[int] = []
    for s in sorted(sizes, reverse=True):
        if sum(left) <= sum(right):
            left.append(s)
        else:
            right.append(s)
    return left, right


def _build_division_tree(div_sizes: Sequence[int]) -> object:
    if len(div_sizes) == 1:
        return _Leaf(div_sizes[0], ("leaf", div_sizes[0]))
    ls, rs = _halves(div_sizes)
    left = _build_division_tree(ls)
    right = _build_division_tree(rs)
    return _Split(
        "division", left, right, (sum(ls), sum(rs)),
        ("dsplit", left.key, right.key),
    )


def _build_conference_tree(shapes: Sequence[tuple[int, tuple[int, ...]]]) -> object:
    if len(shapes) == 1:
        size, divs = shapes[0]
        div_node = _build_division_tree(list(divs)) if divs else None
        dkey = div_node.key if div_node is not None else None
        return _Conf(size, div_node, ("conf", size, dkey))
    sizes = [size for size, _ in shapes]
    ls, rs = _halves(sizes)
    remaining = list(shapes)

    def take(wanted: list[int]) -> list[tuple[int, tuple[int, ...]]]:
        got = []
        for w in wanted:
            for i, (size, _) in enumerate(remaining):
                if size == w:
                    got.append(remaining.pop(i))
                    break
        return got

    left = _build_conference_tree(take(ls))
    right = _build_conference_tree(take(rs))
    return _Split(
        "conference", left, right, (sum(ls), sum(rs)),
        ("csplit", left.key, right.key),
    )


def build_split_tree(template: StructureTemplate) -> object:
    """Binary split tree for a template, mirroring the recursive
    conference-then-division cutting."""
    shapes = [
        (size, tuple(divs))
        for size, divs in zip(
            template.conference_sizes, template.divisions_per_conference
        )
    ]
    tree = _build_conference_tree(shapes)

    def check(node) -> None:
        if isinstance(node, _Split):
            if node.sizes[0] <= 0 or node.sizes[1] <= 0:
                raise TemplateError(
                    f"{template.name}: split target {node.sizes} not decomposable"
                )
            check(node.left)
            check(node.right)
        elif isinstance(node, _Conf) and node.div_node is not None:
            check(node.div_node)

    check(tree)
    return tree


# --- weight decomposition -------------------------------------------------

@dataclass(frozen=True)
class _UniformWeights:
    """Unordered-pair weights when the matrix is category-uniform, letting
    D decompose into per-conference values plus a constant cross term."""

    cross: float
    conf_weight: dict[int, float]
    div_weight: dict[tuple[int, int], float]
    undivided_weight: dict[int, float]


def derive_uniform_weights(matrix: GameMatrix) -> _UniformWeights | None:
    groups = matrix.groups
    g = matrix.values
    cross: float | None = None
    conf_w: dict[int, float] = {}
    div_w: dict[tuple[int, int], float] = {}
    undiv_w: dict[int, float] = {}
    for i, gi in enumerate(groups):
        for j in range(i, len(groups)):
            gj = groups[j]
            w = float(g[i, j] + g[j, i])
            if i == j:
                if gi.divided:
                    if div_w.setdefault((gi.conference_size, gi.size), w) != w:
                        return None
                else:
                    if undiv_w.setdefault(gi.conference_size, w) != w:
                        return None
            elif gi.conference == gj.conference:
                if gi.size != gj.size:
                    return None  # mixed division sizes make pair weights asymmetric
                if conf_w.setdefault(gi.conference_size, w) != w:
                    return None
            else:
                if cross is None:
                    cross = w
                elif cross != w:
                    return None
    return _UniformWeights(cross if cross is not None else 0.0, conf_w, div_w, undiv_w)


class _PairSums:
    """Cached sums of pairwise distances inside team subsets."""

    def __init__(self, dataset: LeagueDataset):
        dm = distance_matrix(dataset)
        self.values = dm.values
        self.index = {tid: i for i, tid in enumerate(dm.ids)}
        self._cache: dict[frozenset[str], float] = {}

    def intra(self, teams: frozenset[str]) -> float:
        cached = self._cache.get(teams)
        if cached is None:
            rows = sorted(self.index[t] for t in teams)
            cached = float(self.values[np.ix_(rows, rows)].sum()) / 2.0
            self._cache[teams] = cached
        return cached


# --- arrangements ---------------------------------------------------------

@dataclass(frozen=True)
class _Arrangement:
    """Completed conferences for one subtree's team set."""

    confs: tuple[tuple[frozenset[str], ...], ...]
    value: float
    key: tuple


def _canonical_confs(
    confs: Iterable[tuple[frozenset[str], ...]]
) -> tuple[tuple[tuple[str, ...], ...], ...]:
    out = []
    for conf in confs:
        out.append(tuple(sorted(tuple(sorted(d)) for d in conf)))
    return tuple(sorted(out))


def _structure_from_confs(
    confs: tuple[tuple[frozenset[str], ...], ...]
) -> LeagueStructure:
    ordered = []
    for conf in sorted(confs, key=lambda c: min(min(d) for d in c)):
        ordered.append(tuple(sorted(conf, key=lambda d: min(d))))
    return LeagueStructure(conferences=tuple(ordered), provenance="heuristic")


class _Generator:
    def __init__(
        self,
        dataset: LeagueDataset,
        template: StructureTemplate,
        options: GenerateOptions,
    ):
        self.dataset = dataset
        self.template = template
        self.options = options
        self.points = project(dataset)
        self.pair_sums = _PairSums(dataset)
        self.matrix = build_game_matrix(template)
        self.weights = derive_uniform_weights(self.matrix)
        self.tree = build_split_tree(template)
        self.total_intra = self.pair_sums.intra(frozenset(dataset.team_ids))
        self._arr_cache: dict[tuple, list[_Arrangement]] = {}
        self._div_cache: dict[tuple, list[tuple[tuple[frozenset[str], ...], tuple]]] = {}
        self._raw_cache: dict[tuple, int] = {}
        self._split_cache: dict[tuple, tuple[list, int]] = {}
        self.top_lines = 0
        self.top_splits_kept = 0
        self.top_lines_retained = 0

    # -- split enumeration --

    def _split_node_pairs(
        self, node: _Split, teams: frozenset[str]
    ) -> tuple[
        list[tuple[frozenset[str], frozenset[str]]],
        list[tuple[frozenset[str], frozenset[str]]],
    ]:
        """(deduped pairs, raw pre-dedup pairs) for one split node.

        The left element of each pair has node.sizes[0] teams.  When the two
        subtrees are identical and the target is even, mirrored pairs are
        deduplicated; when the subtrees differ but the sizes are equal, both
        orientations are kept because the sides feed different subtrees.
        """
        at_root = node is self.tree
        symmetric = node.sizes[0] == node.sizes[1] and node.left.key == node.right.key
        cache_key = (node.key, teams, at_root)
        cached = self._split_cache.get(cache_key)
        if cached is not None:
            return cached

        sub_points = {tid: self.points[tid] for tid in sorted(teams)}
        lines = candidate_lines(sub_points)
        splits = balanced_splits(lines, sub_points, node.sizes)
        if at_root and self.options.filter_angle_deg > 0:
            splits = orientation_filter(splits, self.options.filter_angle_deg)
        if at_root:
            self.top_lines = len(lines)
            self.top_splits_kept = len(splits)
            self.top_lines_retained = len({s.line.anchors for s in splits})

        k_left, k_right = node.sizes
        seen: set[tuple] = set()
        ordered: list[tuple[frozenset[str], frozenset[str]]] = []
        raw: list[tuple[frozenset[str], frozenset[str]]] = []

        def admit(left: frozenset[str], right: frozenset[str]) -> None:
            raw.append((left, right))
            if symmetric:
                key = tuple(sorted((tuple(sorted(left)), tuple(sorted(right)))))
            else:
                key = (tuple(sorted(left)), tuple(sorted(right)))
            if key not in seen:
                seen.add(key)
                ordered.append((left, right))

        for s in splits:
            if len(s.left) == k_left:
                admit(s.left, s.right)
            if len(s.right) == k_left and not symmetric and k_left == k_right:
                admit(s.right, s.left)
            elif len(s.right) == k_left and k_left != k_right:
                admit(s.right, s.left)

        result = (ordered, raw)
        self._split_cache[cache_key] = result
        return result

    # -- value helpers --

    def _conf_value(
        self,
        teams: frozenset[str],
        divs: tuple[frozenset[str], ...],
        divided: bool,
    ) -> float:
        w = self.weights
        csize = len(teams)
        if not divided:
            return (w.undivided_weight[csize] - w.cross) * self.pair_sums.intra(teams)
        wc = w.conf_weight.get(csize, 0.0)
        value = (wc - w.cross) * self.pair_sums.intra(teams)
        for d in divs:
            wd = w.div_weight[(csize, len(d))]
            value += (wd - wc) * self.pair_sums.intra(d)
        return value

    # -- arrangements per node --

    def arrangements(self, node, teams: frozenset[str]) -> list[_Arrangement]:
        cache_key = (node.key, teams)
        cached = self._arr_cache.get(cache_key)
        if cached is not None:
            return cached
        out = self._arrangements_uncached(node, teams)
        out.sort(key=lambda a: (a.value, a.key))
        self._arr_cache[cache_key] = out
        return out

    def _arrangements_uncached(self, node, teams: frozenset[str]) -> list[_Arrangement]:
        if isinstance(node, _Conf):
            if node.div_node is None:
                conf = (teams,)
                value = (
                    self._conf_value(teams, conf, divided=False) if self.weights else 0.0
                )
                return [_Arrangement((conf,), value, _canonical_confs([conf]))]
            out = []
            for divs, _ in self._division_arrangements(node.div_node, teams):
                value = (
                    self._conf_value(teams, divs, divided=True) if self.weights else 0.0
                )
                out.append(_Arrangement((divs,), value, _canonical_confs([divs])))
            return out

        assert isinstance(node, _Split) and node.level == "conference"
        merged: dict[tuple, _Arrangement] = {}
        pairs, _ = self._split_node_pairs(node, teams)
        for left_set, right_set in pairs:
            for la in self.arrangements(node.left, left_set):
                for ra in self.arrangements(node.right, right_set):
                    confs = la.confs + ra.confs
                    key = _canonical_confs(confs)
                    if key not in merged:
                        merged[key] = _Arrangement(confs, la.value + ra.value, key)
        return list(merged.values())

    def _division_arrangements(
        self, node, teams: frozenset[str]
    ) -> list[tuple[tuple[frozenset[str], ...], tuple]]:
        """Division multisets for one conference's team set, deduped."""
        if isinstance(node, _Leaf):
            return [((teams,), (tuple(sorted(teams)),))]
        assert isinstance(node, _Split) and node.level == "division"
        cache_key = (node.key, teams)
        cached = self._div_cache.get(cache_key)
        if cached is not None:
            return cached
        merged: dict[tuple, tuple[tuple[frozenset[str], ...], tuple]] = {}
        pairs, _ = self._split_node_pairs(node, teams)
        for left_set, right_set in pairs:
            for ldivs, _ in self._division_arrangements(node.left, left_set):
                for rdivs, _ in self._division_arrangements(node.right, right_set):
                    divs = ldivs + rdivs
                    key = tuple(sorted(tuple(sorted(d)) for d in divs))
                    if key not in merged:
                        merged[key] = (divs, key)
        out = sorted(merged.values(), key=lambda x: x[1])
        self._div_cache[cache_key] = out
        return out

    # -- raw (pre-dedup) candidate counting --

    def raw_count(self, node, teams: frozenset[str]) -> int:
        cache_key = (node.key, teams)
        cached = self._raw_cache.get(cache_key)
        if cached is not None:
            return cached
        if isinstance(node, _Leaf):
            count = 1
        elif isinstance(node, _Conf):
            count = 1 if node.div_node is None else self.raw_count(node.div_node, teams)
        else:
            count = 0
            _, raw_pairs = self._split_node_pairs(node, teams)
            for left_set, right_set in raw_pairs:
                count += self.raw_count(node.left, left_set) * self.raw_count(
                    node.right, right_set
                )
        self._raw_cache[cache_key] = count
        return count

    def exact_value(self, confs: tuple[tuple[frozenset[str], ...], ...]) -> float:
        """Objective for one composed structure under arbitrary matrices
        (fallback when the matrix is not category-uniform)."""
        structure = _structure_from_confs(confs)
        scored = weighted_distance(structure, self.matrix, distance_matrix(self.dataset))
        return scored.D


class _NegatedKey:
    """Orders opposite to the wrapped tuple, so a max-heap on -value
    prefers the lexicographically smaller canonical key on value ties."""

    __slots__ = ("key",)

    def __init__(self, key: tuple):
        self.key = key

    def __lt__(self, other: "_NegatedKey") -> bool:
        return self.key > other.key

    def __gt__(self, other: "_NegatedKey") -> bool:
        return self.key < other.key

    def __eq__(self, other: object) -> bool:
        return isinstance(other, _NegatedKey) and self.key == other.key


def _filter_arrangements(
    arrangements: list[_Arrangement],
    preds: tuple,
    dataset: LeagueDataset,
    rejections: dict[str, int],
    multiplier: int,
) -> list[_Arrangement]:
    if not preds:
        return arrangements
    out = []
    for arr in arrangements:
        verdict = _constraints.arrangement_violation(preds, arr.confs, dataset)
        if verdict is None:
            out.append(arr)
        else:
            rejections[verdict] += multiplier
    return out


def generate(
    dataset: LeagueDataset,
    template: StructureTemplate,
    options: GenerateOptions | None = None,
) -> CandidateSet:
    """Enumerate, filter, score, and rank hull-disjoint structures."""
    options = options or GenerateOptions()
    if template.team_count != dataset.size:
        raise GenerationError(
            f"template {template.name} is for {template.team_count} teams, "
            f"dataset {dataset.league_id} has {dataset.size}"
        )
    preds = tuple(options.predicates)
    for p in preds:
        _constraints.check_predicate(p, dataset)

    gen = _Generator(dataset, template, options)
    root = gen.tree
    all_teams = frozenset(dataset.team_ids)

    rejections: dict[str, int] = {_constraints.describe(p): 0 for p in preds}
    limit = None if options.keep_all else max(options.top_k, 0)
    heap: list[tuple[float, _NegatedKey, tuple]] = []

    def offer(value: float, key: tuple, confs) -> None:
        if limit == 0:
            return
        entry = (-value, _NegatedKey(key), confs)
        if limit is None:
            heap.append(entry)
        elif len(heap) < limit:
            heapq.heappush(heap, entry)
        elif entry > heap[0]:
            heapq.heapreplace(heap, entry)

    def heap_floor() -> float | None:
        if limit == 0:
            return float("-inf")
        if limit is None or len(heap) < limit:
            return None
        return -heap[0][0]

    candidates_distinct = 0
    candidates_satisfying = 0

    if isinstance(root, _Split):
        pairs, _ = gen._split_node_pairs(root, all_teams)
        for left_set, right_set in pairs:
            arr_l = gen.arrangements(root.left, left_set)
            arr_r = gen.arrangements(root.right, right_set)
            candidates_distinct += len(arr_l) * len(arr_r)

            fl = _filter_arrangements(arr_l, preds, dataset, rejections, len(arr_r))
            fr = _filter_arrangements(arr_r, preds, dataset, rejections, len(fl))
            candidates_satisfying += len(fl) * len(fr)
            if not fl or not fr:
                continue

            if gen.weights is not None:
                base = gen.weights.cross * gen.total_intra
                for la in fl:
                    floor = heap_floor()
                    if floor is not None and base + la.value + fr[0].value > floor:
                        break
                    for ra in fr:
                        value = base + la.value + ra.value
                        floor = heap_floor()
                        if floor is not None and value > floor:
                            break
                        key = _canonical_confs(la.confs + ra.confs)
                        offer(value, key, la.confs + ra.confs)
            else:
                for la in fl:
                    for ra in fr:
                        confs = la.confs + ra.confs
                        offer(gen.exact_value(confs), _canonical_confs(confs), confs)
    else:
        arrs = gen.arrangements(root, all_teams)
        candidates_distinct = len(arrs)
        filtered = _filter_arrangements(arrs, preds, dataset, rejections, 1)
        candidates_satisfying = len(filtered)
        for arr in filtered:
            if gen.weights is not None:
                value = gen.weights.cross * gen.total_intra + arr.value
            else:
                value = gen.exact_value(arr.confs)
            offer(value, arr.key, arr.confs)

    raw = gen.raw_count(root, all_teams)

    dm = distance_matrix(dataset)
    scored: list[ScoredStructure] = []
    for _, _, confs in heap:
        structure = _structure_from_confs(confs)
        scored.append(weighted_distance(structure, gen.matrix, dm))
    scored.sort(key=lambda s: (s.D, s.structure.canonical_form()))

    stats = GenerationStats(
        top_lines=gen.top_lines,
        top_splits_kept=gen.top_splits_kept,
        top_lines_retained=gen.top_lines_retained,
        candidates_raw=raw,
        candidates_distinct=candidates_distinct,
        duplicates_removed=raw - candidates_distinct,
        candidates_satisfying=candidates_satisfying,
        retained=len(scored),
        predicate_rejections=tuple(sorted(rejections.items())),
    )
    return CandidateSet(
        dataset=dataset, template=template, entries=tuple(scored), stats=stats
    )


def rank(candidate_set: CandidateSet, top_k: int) -> list[ScoredStructure]:
    """First k entries by ascending D (ties already broken canonically)."""
    if top_k < 0:
        raise ValueError("top_k must be non-negative")
    return list(candidate_set.entries[:top_k])
