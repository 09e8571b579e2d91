import { describe, expect, it } from "vitest";

import {
  activePredicates,
  addEdit,
  addPredicate,
  editedTeamCount,
  initialState,
  isCompletePartition,
  pinStructure,
  removePredicate,
  revertEdits,
  selectLeague,
  sizeMismatch,
  templateTeamCount,
  toggleRivalries,
  unpinStructure,
  validatePredicate,
} from "../src/state";
import type { PinnedStructure } from "../src/state";

const TEAMS = ["ANA", "BOS", "FLA", "TB"];

function leagueState() {
  return selectLeague(initialState(), "nhl-2011", ["nhl-6x5", "nhl-4conf"], TEAMS);
}

describe("state transitions", () => {
  it("selecting a league resets constraints, edits, pins, and results", () => {
    let state = leagueState();
    state = addPredicate(state, { kind: "together", params: { teams: ["TB", "FLA"] } });
    state = addEdit(state, { move: { team: "ANA", to: "seattle" } });
    state = selectLeague(state, "mlb-2012", ["mlb-6x5"], ["NYY", "NYM"]);
    expect(state.predicates).toHaveLength(0);
    expect(state.edits).toHaveLength(0);
    expect(state.pinned).toHaveLength(0);
    expect(state.result).toBeNull();
    expect(state.template).toBe("mlb-6x5");
  });

  it("rejects predicates that reference unknown teams", () => {
    const state = leagueState();
    const next = addPredicate(state, {
      kind: "together",
      params: { teams: ["TB", "ZZZ"] },
    });
    expect(next.predicates).toHaveLength(0);
    expect(next.error).toContain("ZZZ");
  });

  it("validates group predicates need two teams", () => {
    expect(
      validatePredicate({ kind: "apart", params: { teams: ["TB"] } }, TEAMS),
    ).toContain("at least two");
    expect(
      validatePredicate({ kind: "together", params: { teams: ["TB", "FLA"] } }, TEAMS),
    ).toBeNull();
  });

  it("preset toggle prepends the preset name", () => {
    let state = leagueState();
    state = addPredicate(state, { kind: "apart", params: { teams: ["TB", "FLA"] } });
    state = toggleRivalries(state);
    expect(activePredicates(state)[0]).toBe("nhl-rivalries");
    expect(activePredicates(state)).toHaveLength(2);
    state = toggleRivalries(state);
    expect(activePredicates(state)).toHaveLength(1);
  });

  it("removePredicate drops by index", () => {
    let state = leagueState();
    state = addPredicate(state, { kind: "apart", params: { teams: ["TB", "FLA"] } });
    state = addPredicate(state, { kind: "together", params: { teams: ["TB", "BOS"] } });
    state = removePredicate(state, 0);
    expect(state.predicates).toHaveLength(1);
    expect(state.predicates[0]!.kind).toBe("together");
  });

  it("counts expansion edits toward template size", () => {
    let state = leagueState();
    expect(editedTeamCount(state)).toBe(4);
    state = addEdit(state, { add: { id: "QUE", to: "quebec-city" } });
    expect(editedTeamCount(state)).toBe(5);
    state = revertEdits(state);
    expect(editedTeamCount(state)).toBe(4);
  });

  it("parses team counts from template names", () => {
    expect(templateTeamCount("nhl-6x5")).toBe(30);
    expect(templateTeamCount("nfl-8x4")).toBe(32);
    expect(templateTeamCount("nhl-4conf")).toBe(30);
    expect(templateTeamCount(null)).toBeNull();
  });

  it("surfaces size mismatches before submit", () => {
    let state = leagueState();
    state = { ...state, template: "nhl-6x5", teamIds: Array(30).fill("X").map((_, i) => `T${i}`) };
    expect(sizeMismatch(state)).toBeNull();
    state = addEdit(state, { add: { id: "QUE", to: "quebec-city" } });
    expect(sizeMismatch(state)).toContain("31");
  });

  it("limits pins to three and to the selected league", () => {
    let state = leagueState();
    const pin = (label: string, league = "nhl-2011"): PinnedStructure => ({
      label,
      league,
      structure: [[["TB", "FLA"]], [["ANA", "BOS"]]],
      D: 100,
    });
    state = pinStructure(state, pin("#1"));
    state = pinStructure(state, pin("#2"));
    state = pinStructure(state, pin("#3"));
    expect(state.pinned).toHaveLength(3);
    const overflow = pinStructure(state, pin("#4"));
    expect(overflow.pinned).toHaveLength(3);
    expect(overflow.error).toContain("at most 3");
    const wrongLeague = pinStructure(state, pin("#x", "mlb-2012"));
    expect(wrongLeague.error).toContain("selected league");
    state = unpinStructure(state, 1);
    expect(state.pinned.map((p) => p.label)).toEqual(["#1", "#3"]);
  });
});

describe("partition re-check", () => {
  const teams = ["A", "B", "C", "D"];

  it("accepts an exact partition", () => {
    expect(isCompletePartition([[["A", "B"]], [["C", "D"]]], teams)).toBe(true);
  });

  it("rejects missing, duplicated, or unknown teams", () => {
    expect(isCompletePartition([[["A", "B"]], [["C"]]], teams)).toBe(false);
    expect(isCompletePartition([[["A", "B"]], [["C", "C"]]], teams)).toBe(false);
    expect(isCompletePartition([[["A", "B"]], [["C", "E"]]], teams)).toBe(false);
  });
});
