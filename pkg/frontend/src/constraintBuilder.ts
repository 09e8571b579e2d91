// Kind-specific constraint forms plus the rivalries preset toggle. The
// forms only build predicate payloads; solving happens on the explicit
// Run action.

import type { PredicateKind, PredicatePayload } from "./types";

export interface ConstraintBuilderHooks {
  onAdd(predicate: PredicatePayload): void;
  onRemove(index: number): void;
  onToggleRivalries(): void;
}

export function buildPredicate(
  kind: PredicateKind,
  fields: { teams?: string[]; attr?: string; value?: string; cap?: number;
            zones?: number; label?: string },
): PredicatePayload {
  switch (kind) {
    case "together":
    case "apart":
      return { kind, params: { teams: fields.teams ?? [] } };
    case "max_attr_per_division":
      return {
        kind,
        params: {
          attr: fields.attr ?? "country",
          value: fields.value ?? "",
          cap: fields.cap ?? 1,
        },
      };
    case "max_tz_span_per_division":
      return { kind, params: { zones: fields.zones ?? 2 } };
    case "fixed_group":
      return {
        kind,
        params: { label: fields.label ?? "group", teams: fields.teams ?? [] },
      };
  }
}

export function describePredicate(predicate: PredicatePayload): string {
  const p = predicate.params;
  switch (predicate.kind) {
    case "together":
      return `together(${(p.teams as string[]).join(", ")})`;
    case "apart":
      return `apart(${(p.teams as string[]).join(", ")})`;
    case "max_attr_per_division":
      return `at most ${p.cap} with ${p.attr}=${p.value} per division`;
    case "max_tz_span_per_division":
      return `divisions span at most ${p.zones} time zones`;
    case "fixed_group":
      return `${p.label}: ${(p.teams as string[]).join(", ")} share a conference`;
  }
}

export function renderConstraintBuilder(
  container: HTMLElement,
  teamIds: string[],
  predicates: PredicatePayload[],
  rivalriesOn: boolean,
  hooks: ConstraintBuilderHooks,
): void {
  container.textContent = "";

  const preset = document.createElement("label");
  preset.className = "preset-toggle";
  const checkbox = document.createElement("input");
  checkbox.type = "checkbox";
  checkbox.id = "rivalries-toggle";
  checkbox.checked = rivalriesOn;
  checkbox.addEventListener("change", () => hooks.onToggleRivalries());
  preset.append(checkbox, document.createTextNode(" keep traditional rivals together"));
  container.appendChild(preset);

  const list = document.createElement("ul");
  list.className = "constraint-list";
  predicates.forEach((predicate, index) => {
    const item = document.createElement("li");
    item.textContent = describePredicate(predicate) + " ";
    const remove = document.createElement("button");
    remove.textContent = "remove";
    remove.className = "remove-constraint";
    remove.addEventListener("click", () => hooks.onRemove(index));
    item.appendChild(remove);
    list.appendChild(item);
  });
  container.appendChild(list);

  const form = document.createElement("div");
  form.className = "constraint-form";

  const kindSelect = document.createElement("select");
  kindSelect.id = "constraint-kind";
  for (const kind of [
    "together",
    "apart",
    "max_attr_per_division",
    "max_tz_span_per_division",
    "fixed_group",
  ]) {
    const option = document.createElement("option");
    option.value = kind;
    option.textContent = kind.replaceAll("_", " ");
    kindSelect.appendChild(option);
  }

  const teamPicker = document.createElement("select");
  teamPicker.id = "constraint-teams";
  teamPicker.multiple = true;
  for (const id of teamIds) {
    const option = document.createElement("option");
    option.value = id;
    option.textContent = id;
    teamPicker.appendChild(option);
  }

  const attrInput = document.createElement("input");
  attrInput.id = "constraint-attr";
  attrInput.placeholder = "attr=value (e.g. country=CA)";
  const capInput = document.createElement("input");
  capInput.id = "constraint-cap";
  capInput.type = "number";
  capInput.value = "3";
  const labelInput = document.createElement("input");
  labelInput.id = "constraint-label";
  labelInput.placeholder = "group label";

  const addButton = document.createElement("button");
  addButton.id = "add-constraint";
  addButton.textContent = "add constraint";
  addButton.addEventListener("click", () => {
    const kind = kindSelect.value as PredicateKind;
    const teams = [...teamPicker.selectedOptions].map((o) => o.value);
    const [attr, value] = attrInput.value.split("=", 2);
    hooks.onAdd(
      buildPredicate(kind, {
        teams,
        attr: attr?.trim(),
        value: value?.trim(),
        cap: Number(capInput.value),
        zones: Number(capInput.value),
        label: labelInput.value || "group",
      }),
    );
  });

  form.append(kindSelect, teamPicker, attrInput, capInput, labelInput, addButton);
  container.appendChild(form);
}
