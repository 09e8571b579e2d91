// Explorer wiring: state in, DOM out. Solves run only on the explicit Run
// action; in-flight requests are superseded when the state changes under
// them.

import { ApiClient } from "./api";
import { renderConstraintBuilder } from "./constraintBuilder";
import { renderDiffPanel } from "./diffPanel";
import { renderMap } from "./mapView";
import { renderScenarioPanel } from "./scenarioPanel";
import {
  ExplorerState,
  activePredicates,
  addEdit,
  addPredicate,
  applyError,
  applyResult,
  clearConstraints,
  initialState,
  isCompletePartition,
  pinStructure,
  removePredicate,
  revertEdits,
  selectLeague,
  sizeMismatch,
  toggleRivalries,
  unpinStructure,
} from "./state";
import type { DiffResponse, LeagueDetail } from "./types";

export class ExplorerApp {
  state: ExplorerState = initialState();
  private leagueDetails = new Map<string, LeagueDetail>();
  private runGeneration = 0;
  private lastDiff: DiffResponse | null = null;

  constructor(
    private root: HTMLElement,
    private api: ApiClient,
  ) {}

  async init(): Promise<void> {
    const leagues = await this.api.leagues();
    this.state = { ...this.state, leagues: leagues.map((l) => l.id) };
    this.render();
  }

  private update(next: ExplorerState): void {
    this.state = next;
    this.render();
  }

  async chooseLeague(id: string): Promise<void> {
    let detail = this.leagueDetails.get(id);
    if (!detail) {
      detail = await this.api.league(id);
      this.leagueDetails.set(id, detail);
    }
    this.update(
      selectLeague(
        this.state,
        id,
        detail.templates,
        detail.dataset.teams.map((t) => t.id),
      ),
    );
  }

  /** Explicit Run action: one /solve round-trip, newest run wins. */
  async run(): Promise<void> {
    if (!this.state.selectedLeague) return;
    const problem = sizeMismatch(this.state);
    if (problem) {
      this.update(applyError(this.state, problem));
      return;
    }
    const generation = ++this.runGeneration;
    this.update({ ...this.state, running: true, error: null });
    try {
      const result = await this.api.solve({
        dataset: this.state.selectedLeague,
        template: this.state.template ?? undefined,
        predicates: activePredicates(this.state),
        edits: this.state.edits,
        top_k: this.state.topK,
        page: this.state.page,
        page_size: 10,
        include_geojson: true,
      });
      if (generation !== this.runGeneration) return; // superseded
      this.update(applyResult(this.state, result));
      await this.refreshDiff();
    } catch (error) {
      if (generation !== this.runGeneration) return;
      this.update(applyError(this.state, (error as Error).message));
    }
  }

  /** Diff of current vs the best shown structure (when both exist). */
  private async refreshDiff(): Promise<void> {
    this.lastDiff = null;
    const result = this.state.result;
    const league = this.state.selectedLeague;
    if (!result || !league || this.state.edits.length > 0) {
      this.renderDiff();
      return;
    }
    const best = result.results[0];
    if (!best) {
      this.renderDiff();
      return;
    }
    try {
      this.lastDiff = await this.api.diff(
        league,
        "current",
        best.structure,
        this.state.template ?? undefined,
      );
    } catch {
      this.lastDiff = null; // e.g. league without a current structure
    }
    this.renderDiff();
  }

  render(): void {
    let shell = this.root.querySelector<HTMLElement>(".explorer");
    if (!shell) {
      this.root.textContent = "";
      shell = document.createElement("div");
      shell.className = "explorer";
      shell.innerHTML = `
        <header>
          <select id="league-select"></select>
          <select id="template-select"></select>
          <button id="run-button">Run</button>
          <span id="status"></span>
        </header>
        <main>
          <section id="map-panel"></section>
          <aside>
            <h2>Constraints</h2>
            <div id="constraint-panel"></div>
            <h2>Scenario</h2>
            <div id="scenario-panel"></div>
            <h2>Results</h2>
            <div id="results-panel"></div>
            <h2>Pinned</h2>
            <div id="pinned-panel"></div>
            <h2>Travel diff (current vs best)</h2>
            <div id="diff-panel"></div>
          </aside>
        </main>`;
      this.root.appendChild(shell);
      shell
        .querySelector<HTMLButtonElement>("#run-button")!
        .addEventListener("click", () => void this.run());
      shell
        .querySelector<HTMLSelectElement>("#league-select")!
        .addEventListener("change", (event) => {
          const value = (event.target as HTMLSelectElement).value;
          if (value) void this.chooseLeague(value);
        });
      shell
        .querySelector<HTMLSelectElement>("#template-select")!
        .addEventListener("change", (event) => {
          this.update({
            ...this.state,
            template: (event.target as HTMLSelectElement).value,
          });
        });
    }

    this.renderHeader(shell);
    this.renderConstraints(shell);
    this.renderScenario(shell);
    this.renderResults(shell);
    this.renderPinned(shell);
    this.renderMapPanel(shell);
    this.renderDiff();
  }

  private renderHeader(shell: HTMLElement): void {
    const leagueSelect = shell.querySelector<HTMLSelectElement>("#league-select")!;
    if (leagueSelect.options.length !== this.state.leagues.length + 1) {
      leagueSelect.textContent = "";
      const placeholder = document.createElement("option");
      placeholder.value = "";
      placeholder.textContent = "choose a league";
      leagueSelect.appendChild(placeholder);
      for (const id of this.state.leagues) {
        const option = document.createElement("option");
        option.value = id;
        option.textContent = id;
        leagueSelect.appendChild(option);
      }
    }
    leagueSelect.value = this.state.selectedLeague ?? "";

    const templateSelect = shell.querySelector<HTMLSelectElement>("#template-select")!;
    templateSelect.textContent = "";
    for (const name of this.state.availableTemplates) {
      const option = document.createElement("option");
      option.value = name;
      option.textContent = name;
      templateSelect.appendChild(option);
    }
    if (this.state.template) templateSelect.value = this.state.template;

    const status = shell.querySelector<HTMLElement>("#status")!;
    status.textContent = this.state.running
      ? "solving…"
      : this.state.error ?? "";
    status.className = this.state.error ? "status error" : "status";
  }

  private renderConstraints(shell: HTMLElement): void {
    renderConstraintBuilder(
      shell.querySelector<HTMLElement>("#constraint-panel")!,
      this.state.teamIds,
      this.state.predicates,
      this.state.rivalriesPreset,
      {
        onAdd: (predicate) => this.update(addPredicate(this.state, predicate)),
        onRemove: (index) => this.update(removePredicate(this.state, index)),
        onToggleRivalries: () => this.update(toggleRivalries(this.state)),
      },
    );
  }

  private renderScenario(shell: HTMLElement): void {
    renderScenarioPanel(
      shell.querySelector<HTMLElement>("#scenario-panel")!,
      this.state.teamIds,
      this.state.edits,
      sizeMismatch(this.state),
      {
        onMove: (team, city) =>
          this.update(addEdit(this.state, { move: { team, to: city } })),
        onAdd: (id, name, city) =>
          this.update(addEdit(this.state, { add: { id, name, to: city } })),
        onRevert: () => this.update(revertEdits(this.state)),
      },
    );
  }

  private renderResults(shell: HTMLElement): void {
    const panel = shell.querySelector<HTMLElement>("#results-panel")!;
    panel.textContent = "";
    const result = this.state.result;
    if (!result) {
      const empty = document.createElement("p");
      empty.className = "empty-state";
      empty.textContent = "No results yet.";
      panel.appendChild(empty);
      return;
    }
    const list = document.createElement("ol");
    list.className = "result-list";
    for (const item of result.results) {
      const entry = document.createElement("li");
      entry.dataset.rank = String(item.rank);
      const over = Math.round(item.miles_over_best).toLocaleString("en-US");
      entry.textContent = `#${item.rank}  D=${Math.round(item.D).toLocaleString("en-US")} (+${over}) `;
      const pin = document.createElement("button");
      pin.textContent = "pin";
      pin.className = "pin-button";
      pin.addEventListener("click", () =>
        this.update(
          pinStructure(this.state, {
            label: `#${item.rank}`,
            league: this.state.selectedLeague!,
            structure: item.structure,
            D: item.D,
          }),
        ),
      );
      entry.appendChild(pin);
      list.appendChild(entry);
    }
    panel.appendChild(list);
  }

  private renderPinned(shell: HTMLElement): void {
    const panel = shell.querySelector<HTMLElement>("#pinned-panel")!;
    panel.textContent = "";
    const list = document.createElement("ul");
    list.className = "pinned-list";
    this.state.pinned.forEach((pin, index) => {
      const item = document.createElement("li");
      item.textContent = `${pin.label} D=${Math.round(pin.D).toLocaleString("en-US")} `;
      const unpin = document.createElement("button");
      unpin.textContent = "unpin";
      unpin.addEventListener("click", () =>
        this.update(unpinStructure(this.state, index)),
      );
      item.appendChild(unpin);
      list.appendChild(item);
    });
    panel.appendChild(list);
  }

  private renderMapPanel(shell: HTMLElement): void {
    const panel = shell.querySelector<HTMLElement>("#map-panel")!;
    const best = this.state.result?.results[0];
    if (!best) {
      renderMap(panel, null);
      return;
    }
    // trust but re-check: never render a structure that fails partition
    // completeness client-side
    if (!isCompletePartition(best.structure, this.currentTeamIds())) {
      renderMap(panel, { type: "broken", structure: best.structure });
      return;
    }
    renderMap(panel, best.geojson ?? null);
  }

  private currentTeamIds(): string[] {
    const ids = new Set(this.state.teamIds);
    for (const edit of this.state.edits) {
      if ("add" in edit) ids.add(edit.add.id);
    }
    return [...ids];
  }

  private renderDiff(): void {
    const panel = this.root.querySelector<HTMLElement>("#diff-panel");
    if (!panel) return;
    if (!this.lastDiff) {
      panel.textContent = "";
      const empty = document.createElement("p");
      empty.className = "empty-state";
      empty.textContent = "Run a solve on a league with a current alignment.";
      panel.appendChild(empty);
      return;
    }
    renderDiffPanel(panel, this.lastDiff);
  }
}
