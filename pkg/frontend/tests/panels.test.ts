import { describe, expect, it, vi } from "vitest";

import { buildPredicate, describePredicate, renderConstraintBuilder } from "../src/constraintBuilder";
import { barClass, renderDiffPanel, sortRows } from "../src/diffPanel";
import { divisionColor, renderMap } from "../src/mapView";
import { describeEdit, renderScenarioPanel } from "../src/scenarioPanel";
import type { DiffResponse, GeoJsonCollection } from "../src/types";

function containerEl(): HTMLElement {
  const el = document.createElement("div");
  document.body.appendChild(el);
  return el;
}

const DIFF: DiffResponse = {
  dataset: "nhl-2011",
  teams: [
    { team_id: "AAA", current: 30_000, alternative: 31_000, delta: 1_000, direction: "worse" },
    { team_id: "WYY", current: 62_000, alternative: 55_000, delta: -7_000, direction: "better" },
    { team_id: "MID", current: 45_000, alternative: 45_000, delta: 0, direction: "same" },
  ],
  totals: { current: 137_000, alternative: 131_000, delta: -6_000 },
};

describe("diff panel", () => {
  it("sorts by current travel descending", () => {
    const sorted = sortRows(DIFF.teams);
    expect(sorted.map((r) => r.team_id)).toEqual(["WYY", "MID", "AAA"]);
  });

  it("colors bars by sign", () => {
    expect(barClass(DIFF.teams[0]!)).toBe("bar worse");
    expect(barClass(DIFF.teams[1]!)).toBe("bar better");
    expect(barClass(DIFF.teams[2]!)).toBe("bar same");
  });

  it("renders rows in order with direction classes", () => {
    const el = containerEl();
    renderDiffPanel(el, DIFF);
    const rows = [...el.querySelectorAll("tr[data-team]")];
    expect(rows.map((r) => (r as HTMLElement).dataset.team)).toEqual([
      "WYY", "MID", "AAA",
    ]);
    expect(el.querySelector("tr[data-team=WYY] .bar")!.className).toBe("bar better");
    expect(el.querySelector("tr[data-team=AAA] .bar")!.className).toBe("bar worse");
    expect(el.querySelector(".diff-totals")!.textContent).toContain("-6,000");
  });
});

const GEOJSON: GeoJsonCollection = {
  type: "FeatureCollection",
  features: [
    {
      type: "Feature",
      geometry: {
        type: "Polygon",
        coordinates: [[[-100, 40], [-90, 40], [-95, 45], [-100, 40]]],
      },
      properties: { kind: "division-hull", conference: 0, division: 0, teams: ["A", "B", "C"] },
    },
    {
      type: "Feature",
      geometry: { type: "Polygon", coordinates: [[[-80, 30], [-70, 30], [-75, 35], [-80, 30]]] },
      properties: { kind: "division-hull", conference: 1, division: 0, teams: ["D", "E", "F"] },
    },
    {
      type: "Feature",
      geometry: { type: "Point", coordinates: [-95, 42] },
      properties: { kind: "team", team_id: "A" },
    },
  ],
};

describe("map view", () => {
  it("renders one hull per division with conference hues", () => {
    const el = containerEl();
    expect(renderMap(el, GEOJSON)).toBe("map");
    const hulls = [...el.querySelectorAll(".division-hull")];
    expect(hulls).toHaveLength(2);
    const strokes = hulls.map((h) => h.getAttribute("stroke"));
    expect(strokes[0]).not.toEqual(strokes[1]); // different conference hues
    expect(divisionColor(0, 0)).not.toBe(divisionColor(1, 0));
    expect(el.querySelectorAll(".team-marker")).toHaveLength(1);
  });

  it("falls back to a list on malformed payloads", () => {
    const el = containerEl();
    expect(renderMap(el, { type: "whatever" })).toBe("list");
    expect(el.querySelector(".map-fallback")).not.toBeNull();
  });

  it("shows an empty state without a payload", () => {
    const el = containerEl();
    expect(renderMap(el, null)).toBe("empty");
    expect(el.querySelector(".empty-state")).not.toBeNull();
  });
});

describe("constraint builder", () => {
  it("builds predicate payloads per kind", () => {
    expect(buildPredicate("together", { teams: ["TB", "FLA"] })).toEqual({
      kind: "together",
      params: { teams: ["TB", "FLA"] },
    });
    expect(
      buildPredicate("max_attr_per_division", { attr: "country", value: "CA", cap: 3 }),
    ).toEqual({
      kind: "max_attr_per_division",
      params: { attr: "country", value: "CA", cap: 3 },
    });
    expect(buildPredicate("max_tz_span_per_division", { zones: 2 })).toEqual({
      kind: "max_tz_span_per_division",
      params: { zones: 2 },
    });
    expect(describePredicate({ kind: "apart", params: { teams: ["A", "B"] } }))
      .toContain("apart");
  });

  it("wires the preset toggle and add button", () => {
    const el = containerEl();
    const hooks = {
      onAdd: vi.fn(),
      onRemove: vi.fn(),
      onToggleRivalries: vi.fn(),
    };
    renderConstraintBuilder(el, ["TB", "FLA"], [], false, hooks);
    const toggle = el.querySelector<HTMLInputElement>("#rivalries-toggle")!;
    toggle.checked = true;
    toggle.dispatchEvent(new Event("change"));
    expect(hooks.onToggleRivalries).toHaveBeenCalledOnce();

    const picker = el.querySelector<HTMLSelectElement>("#constraint-teams")!;
    for (const option of picker.options) option.selected = true;
    el.querySelector<HTMLButtonElement>("#add-constraint")!.click();
    expect(hooks.onAdd).toHaveBeenCalledWith({
      kind: "together",
      params: { teams: ["TB", "FLA"] },
    });
  });

  it("lists active constraints with remove buttons", () => {
    const el = containerEl();
    const hooks = { onAdd: vi.fn(), onRemove: vi.fn(), onToggleRivalries: vi.fn() };
    renderConstraintBuilder(
      el,
      ["TB", "FLA"],
      [{ kind: "together", params: { teams: ["TB", "FLA"] } }],
      true,
      hooks,
    );
    expect(el.querySelectorAll(".constraint-list li")).toHaveLength(1);
    el.querySelector<HTMLButtonElement>(".remove-constraint")!.click();
    expect(hooks.onRemove).toHaveBeenCalledWith(0);
  });
});

describe("scenario panel", () => {
  it("describes edits against the gazetteer", () => {
    expect(describeEdit({ move: { team: "PHO", to: "quebec-city" } }))
      .toBe("move PHO to Quebec City");
    expect(describeEdit({ add: { id: "QUE", to: "hamilton" } }))
      .toBe("add QUE in Hamilton");
  });

  it("fires hooks for moves, adds, and revert", () => {
    const el = containerEl();
    const hooks = { onMove: vi.fn(), onAdd: vi.fn(), onRevert: vi.fn() };
    renderScenarioPanel(el, ["PHO", "TB"], [], null, hooks);
    el.querySelector<HTMLSelectElement>("#scenario-team")!.value = "PHO";
    el.querySelector<HTMLSelectElement>("#scenario-city")!.value = "quebec-city";
    el.querySelector<HTMLButtonElement>("#scenario-move")!.click();
    expect(hooks.onMove).toHaveBeenCalledWith("PHO", "quebec-city");

    el.querySelector<HTMLInputElement>("#scenario-new-id")!.value = "QUE";
    el.querySelector<HTMLButtonElement>("#scenario-add")!.click();
    expect(hooks.onAdd).toHaveBeenCalledWith("QUE", "Quebec City (expansion)", "quebec-city");

    el.querySelector<HTMLButtonElement>("#scenario-revert")!.click();
    expect(hooks.onRevert).toHaveBeenCalledOnce();
  });

  it("shows the size warning when provided", () => {
    const el = containerEl();
    renderScenarioPanel(el, [], [], "needs 32 teams", {
      onMove: vi.fn(), onAdd: vi.fn(), onRevert: vi.fn(),
    });
    expect(el.querySelector(".size-warning")!.textContent).toContain("32");
  });
});
