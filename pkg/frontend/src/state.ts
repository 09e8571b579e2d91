// Explorer state and its pure transition functions. Views re-render from
// state alone, so identical states produce identical DOM.

import type {
  EditSpec,
  NestedStructure,
  PredicatePayload,
  PredicateSpec,
  SolveResponse,
} from "./types";

export interface PinnedStructure {
  label: string;
  league: string;
  structure: NestedStructure;
  D: number;
}

export interface ExplorerState {
  leagues: string[];
  selectedLeague: string | null;
  template: string | null;
  availableTemplates: string[];
  teamIds: string[];
  rivalriesPreset: boolean;
  predicates: PredicatePayload[];
  edits: EditSpec[];
  topK: number;
  page: number;
  pinned: PinnedStructure[];
  result: SolveResponse | null;
  running: boolean;
  error: string | null;
}

export const MAX_PINNED = 3;

export function initialState(): ExplorerState {
  return {
    leagues: [],
    selectedLeague: null,
    template: null,
    availableTemplates: [],
    teamIds: [],
    rivalriesPreset: false,
    predicates: [],
    edits: [],
    topK: 50,
    page: 1,
    pinned: [],
    result: null,
    running: false,
    error: null,
  };
}

export function selectLeague(
  state: ExplorerState,
  league: string,
  templates: string[],
  teamIds: string[],
): ExplorerState {
  // switching leagues invalidates constraints, edits, pins, and results
  return {
    ...state,
    selectedLeague: league,
    template: templates[0] ?? null,
    availableTemplates: templates,
    teamIds: [...teamIds].sort(),
    rivalriesPreset: false,
    predicates: [],
    edits: [],
    page: 1,
    pinned: [],
    result: null,
    error: null,
  };
}

export function addPredicate(
  state: ExplorerState,
  predicate: PredicatePayload,
): ExplorerState {
  const problem = validatePredicate(predicate, state.teamIds);
  if (problem) {
    return { ...state, error: problem };
  }
  return { ...state, predicates: [...state.predicates, predicate], error: null };
}

export function removePredicate(state: ExplorerState, index: number): ExplorerState {
  return {
    ...state,
    predicates: state.predicates.filter((_, i) => i !== index),
  };
}

export function toggleRivalries(state: ExplorerState): ExplorerState {
  return { ...state, rivalriesPreset: !state.rivalriesPreset };
}

export function clearConstraints(state: ExplorerState): ExplorerState {
  return { ...state, predicates: [], rivalriesPreset: false };
}

export function validatePredicate(
  predicate: PredicatePayload,
  teamIds: string[],
): string | null {
  const known = new Set(teamIds);
  const teams = (predicate.params.teams ?? []) as string[];
  for (const team of teams) {
    if (!known.has(team)) {
      return `unknown team ${team}`;
    }
  }
  if (
    (predicate.kind === "together" ||
      predicate.kind === "apart" ||
      predicate.kind === "fixed_group") &&
    teams.length < 2
  ) {
    return `${predicate.kind} needs at least two teams`;
  }
  return null;
}

export function activePredicates(state: ExplorerState): PredicateSpec[] {
  const specs: PredicateSpec[] = [...state.predicates];
  if (state.rivalriesPreset) {
    specs.unshift("nhl-rivalries");
  }
  return specs;
}

export function addEdit(state: ExplorerState, edit: EditSpec): ExplorerState {
  return { ...state, edits: [...state.edits, edit], error: null };
}

export function revertEdits(state: ExplorerState): ExplorerState {
  return { ...state, edits: [] };
}

/** Team count after edits; surfaced against the template before submit. */
export function editedTeamCount(state: ExplorerState): number {
  let count = state.teamIds.length;
  for (const edit of state.edits) {
    if ("add" in edit) {
      count += 1;
    }
  }
  return count;
}

export function templateTeamCount(template: string | null): number | null {
  if (!template) return null;
  // template names encode their shape: nhl-6x5, nfl-8x4, nhl-4conf, nhl-4x8
  const match = template.match(/(\d+)x(\d+)$/);
  if (match) {
    return Number(match[1]) * Number(match[2]);
  }
  if (template.endsWith("4conf")) return 30;
  return null;
}

export function sizeMismatch(state: ExplorerState): string | null {
  const want = templateTeamCount(state.template);
  const have = editedTeamCount(state);
  if (want !== null && want !== have) {
    return `template ${state.template} needs ${want} teams but edits yield ${have}`;
  }
  return null;
}

export function applyResult(
  state: ExplorerState,
  result: SolveResponse,
): ExplorerState {
  return { ...state, result, running: false, error: null };
}

export function applyError(state: ExplorerState, message: string): ExplorerState {
  return { ...state, result: null, running: false, error: message };
}

export function pinStructure(
  state: ExplorerState,
  pin: PinnedStructure,
): ExplorerState {
  if (state.selectedLeague === null || pin.league !== state.selectedLeague) {
    return { ...state, error: "pinned structures must belong to the selected league" };
  }
  if (state.pinned.length >= MAX_PINNED) {
    return { ...state, error: `at most ${MAX_PINNED} structures can be pinned` };
  }
  return { ...state, pinned: [...state.pinned, pin], error: null };
}

export function unpinStructure(state: ExplorerState, index: number): ExplorerState {
  return { ...state, pinned: state.pinned.filter((_, i) => i !== index) };
}

/** The client re-checks partition completeness before rendering a structure. */
export function isCompletePartition(
  structure: NestedStructure,
  teamIds: string[],
): boolean {
  const seen = new Set<string>();
  for (const conference of structure) {
    for (const division of conference) {
      for (const team of division) {
        if (seen.has(team)) return false;
        seen.add(team);
      }
    }
  }
  if (seen.size !== teamIds.length) return false;
  return teamIds.every((t) => seen.has(t));
}
