// End-to-end: spawn the real HTTP service, mount the explorer in jsdom,
// and drive the full flow: select nhl-2011, toggle the FLA+TB
// constraint, Run, then check the rendered map and diff panel against the
// raw /solve payload.

import { spawn, type ChildProcess } from "node:child_process";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api";
import { ExplorerApp } from "../src/app";
import type { SolveResponse } from "../src/types";

const PORT = 8765 + (process.pid % 500);
const BASE = `http://127.0.0.1:${PORT}`;
const realFetch: typeof fetch = (...args) => globalThis.fetch(...args);

let server: ChildProcess;

async function waitForHealth(): Promise<void> {
  for (let attempt = 0; attempt < 120; attempt++) {
    try {
      const response = await realFetch(`${BASE}/health`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 500));
  }
  throw new Error("service did not come up");
}

beforeAll(async () => {
  server = spawn(
    "python3",
    ["-m", "uvicorn", "realign.service:app", "--port", String(PORT),
     "--log-level", "warning"],
    { cwd: "..", stdio: "ignore" },
  );
  await waitForHealth();
}, 120_000);

afterAll(() => {
  server?.kill();
});

function divisionContaining(structure: string[][][], team: string): string[] {
  for (const conference of structure) {
    for (const division of conference) {
      if (division.includes(team)) return [...division].sort();
    }
  }
  throw new Error(`${team} not found`);
}

async function settled(app: ExplorerApp): Promise<void> {
  for (let i = 0; i < 600; i++) {
    if (!app.state.running && (app.state.result || app.state.error)) return;
    await new Promise((resolve) => setTimeout(resolve, 100));
  }
  throw new Error("solve did not settle");
}

describe("explorer round trip against the live service", () => {
  it("FLA+TB together: rendered best matches /solve and the diff panel is ordered", async () => {
    const root = document.createElement("div");
    document.body.appendChild(root);
    const app = new ExplorerApp(root, new ApiClient(BASE, realFetch));
    await app.init();

    // pick the league through the real select element
    const leagueSelect = root.querySelector<HTMLSelectElement>("#league-select")!;
    expect([...leagueSelect.options].map((o) => o.value)).toContain("nhl-2011");
    leagueSelect.value = "nhl-2011";
    leagueSelect.dispatchEvent(new Event("change"));
    for (let i = 0; i < 100 && app.state.teamIds.length === 0; i++) {
      await new Promise((resolve) => setTimeout(resolve, 100));
    }
    expect(app.state.teamIds).toHaveLength(30);

    // toggle the FLA+TB constraint in the builder
    const kind = root.querySelector<HTMLSelectElement>("#constraint-kind")!;
    kind.value = "together";
    const picker = root.querySelector<HTMLSelectElement>("#constraint-teams")!;
    for (const option of picker.options) {
      option.selected = option.value === "FLA" || option.value === "TB";
    }
    root.querySelector<HTMLButtonElement>("#add-constraint")!.click();
    expect(app.state.predicates).toEqual([
      { kind: "together", params: { teams: ["FLA", "TB"] } },
    ]);

    // run and wait (first run warms the server-side pool)
    root.querySelector<HTMLButtonElement>("#run-button")!.click();
    await settled(app);
    expect(app.state.error).toBeNull();
    const shown = app.state.result!;
    expect(shown.results.length).toBeGreaterThan(0);

    // the rendered best keeps FLA and TB in one division
    const best = shown.results[0]!;
    const bestDivision = divisionContaining(best.structure, "FLA");
    expect(bestDivision).toContain("TB");

    // and matches the raw /solve payload's top entry
    const raw = (await (
      await realFetch(`${BASE}/solve`, {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify({
          dataset: "nhl-2011",
          template: app.state.template,
          predicates: [{ kind: "together", params: { teams: ["FLA", "TB"] } }],
          top_k: app.state.topK,
          page: 1,
          page_size: 10,
          include_geojson: false,
        }),
      })
    ).json()) as SolveResponse;
    expect(best.D).toBeCloseTo(raw.results[0]!.D, 6);
    expect(best.structure).toEqual(raw.results[0]!.structure);

    // the map rendered six division hulls from the payload
    const hulls = root.querySelectorAll("#map-panel .division-hull");
    expect(hulls).toHaveLength(6);
    const hullWithFla = [...hulls].find((h) =>
      (h.getAttribute("data-teams") ?? "").split(" ").includes("FLA"),
    )!;
    expect(hullWithFla.getAttribute("data-teams")!.split(" ")).toContain("TB");

    // diff panel: current-vs-best, sorted by current descending, signed colors
    const rows = [...root.querySelectorAll<HTMLTableRowElement>(
      "#diff-panel tr[data-team]",
    )];
    expect(rows).toHaveLength(30);
    const currents = rows.map((row) =>
      Number(row.children[1]!.textContent!.replaceAll(",", "")),
    );
    for (let i = 1; i < currents.length; i++) {
      expect(currents[i]!).toBeLessThanOrEqual(currents[i - 1]!);
    }
    for (const row of rows) {
      const bar = row.querySelector(".bar")!;
      const delta = Number(
        row.children[2]!.textContent!.replaceAll(",", "").replace("+", ""),
      );
      if (delta > 0) expect(bar.className).toBe("bar worse");
      else if (delta < 0) expect(bar.className).toBe("bar better");
      else expect(bar.className).toBe("bar same");
    }
  }, 180_000);

  it("pins are capped at three and unsatisfiable constraints surface as errors", async () => {
    const root = document.createElement("div");
    document.body.appendChild(root);
    const app = new ExplorerApp(root, new ApiClient(BASE, realFetch));
    await app.init();
    await app.chooseLeague("nhl-2011");

    app.state = { ...app.state, topK: 5 };
    root.querySelector<HTMLButtonElement>("#run-button")!.click();
    await settled(app);
    const pinButtons = root.querySelectorAll<HTMLButtonElement>(".pin-button");
    expect(pinButtons.length).toBeGreaterThanOrEqual(4);
    for (let i = 0; i < 4; i++) {
      root.querySelectorAll<HTMLButtonElement>(".pin-button")[i]!.click();
    }
    expect(app.state.pinned).toHaveLength(3);
    expect(app.state.error).toContain("at most 3");

    // conflicting constraints: server answers 422, UI shows the message
    const kind = root.querySelector<HTMLSelectElement>("#constraint-kind")!;
    const picker = root.querySelector<HTMLSelectElement>("#constraint-teams")!;
    kind.value = "together";
    for (const option of picker.options) {
      option.selected = option.value === "FLA" || option.value === "TB";
    }
    root.querySelector<HTMLButtonElement>("#add-constraint")!.click();
    root.querySelector<HTMLSelectElement>("#constraint-kind")!.value = "apart";
    const picker2 = root.querySelector<HTMLSelectElement>("#constraint-teams")!;
    for (const option of picker2.options) {
      option.selected = option.value === "FLA" || option.value === "TB";
    }
    root.querySelector<HTMLButtonElement>("#add-constraint")!.click();
    root.querySelector<HTMLButtonElement>("#run-button")!.click();
    await settled(app);
    expect(app.state.error).toContain("no candidate");
  }, 180_000);

  it("scenario move re-solves on the edited league", async () => {
    const root = document.createElement("div");
    document.body.appendChild(root);
    const app = new ExplorerApp(root, new ApiClient(BASE, realFetch));
    await app.init();
    await app.chooseLeague("nhl-2011");

    root.querySelector<HTMLSelectElement>("#scenario-team")!.value = "PHO";
    root.querySelector<HTMLSelectElement>("#scenario-city")!.value = "quebec-city";
    root.querySelector<HTMLButtonElement>("#scenario-move")!.click();
    expect(app.state.edits).toEqual([{ move: { team: "PHO", to: "quebec-city" } }]);

    app.state = { ...app.state, topK: 3 };
    root.querySelector<HTMLButtonElement>("#run-button")!.click();
    await settled(app);
    expect(app.state.error).toBeNull();
    const best = app.state.result!.results[0]!;
    // the relocated franchise lands in an eastern division
    const division = divisionContaining(best.structure, "PHO");
    expect(
      division.some((t) =>
        ["BOS", "BUF", "MTL", "NJ", "NYI", "NYR", "OTT", "TOR"].includes(t),
      ),
    ).toBe(true);

    // revert restores the base league
    root.querySelector<HTMLButtonElement>("#scenario-revert")!.click();
    expect(app.state.edits).toHaveLength(0);
  }, 180_000);
});
