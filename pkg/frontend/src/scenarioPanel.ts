// Franchise move / expansion editor backed by the gazetteer; mismatches
// against the template are surfaced before submit.

import type { EditSpec } from "./types";
import { GAZETTEER } from "./types";

export interface ScenarioPanelHooks {
  onMove(team: string, city: string): void;
  onAdd(id: string, name: string, city: string): void;
  onRevert(): void;
}

export function describeEdit(edit: EditSpec): string {
  if ("move" in edit) {
    const to = typeof edit.move.to === "string"
      ? GAZETTEER[edit.move.to]?.city ?? edit.move.to
      : "custom location";
    return `move ${edit.move.team} to ${to}`;
  }
  const to = typeof edit.add.to === "string"
    ? GAZETTEER[edit.add.to]?.city ?? edit.add.to
    : "custom location";
  return `add ${edit.add.id} in ${to}`;
}

export function renderScenarioPanel(
  container: HTMLElement,
  teamIds: string[],
  edits: EditSpec[],
  sizeProblem: string | null,
  hooks: ScenarioPanelHooks,
): void {
  container.textContent = "";

  const list = document.createElement("ul");
  list.className = "edit-list";
  for (const edit of edits) {
    const item = document.createElement("li");
    item.textContent = describeEdit(edit);
    list.appendChild(item);
  }
  container.appendChild(list);

  if (sizeProblem) {
    const warning = document.createElement("p");
    warning.className = "size-warning";
    warning.textContent = sizeProblem;
    container.appendChild(warning);
  }

  const teamSelect = document.createElement("select");
  teamSelect.id = "scenario-team";
  for (const id of teamIds) {
    const option = document.createElement("option");
    option.value = id;
    option.textContent = id;
    teamSelect.appendChild(option);
  }

  const citySelect = document.createElement("select");
  citySelect.id = "scenario-city";
  for (const [key, place] of Object.entries(GAZETTEER)) {
    const option = document.createElement("option");
    option.value = key;
    option.textContent = place.city;
    citySelect.appendChild(option);
  }

  const moveButton = document.createElement("button");
  moveButton.id = "scenario-move";
  moveButton.textContent = "move team";
  moveButton.addEventListener("click", () =>
    hooks.onMove(teamSelect.value, citySelect.value),
  );

  const newId = document.createElement("input");
  newId.id = "scenario-new-id";
  newId.placeholder = "new team id";
  const addButton = document.createElement("button");
  addButton.id = "scenario-add";
  addButton.textContent = "add expansion team";
  addButton.addEventListener("click", () => {
    if (newId.value.trim()) {
      const key = citySelect.value;
      hooks.onAdd(
        newId.value.trim(),
        `${GAZETTEER[key]?.city ?? key} (expansion)`,
        key,
      );
    }
  });

  const revertButton = document.createElement("button");
  revertButton.id = "scenario-revert";
  revertButton.textContent = "revert all edits";
  revertButton.addEventListener("click", () => hooks.onRevert());

  const controls = document.createElement("div");
  controls.className = "scenario-controls";
  controls.append(teamSelect, citySelect, moveButton, newId, addButton, revertButton);
  container.appendChild(controls);
}
