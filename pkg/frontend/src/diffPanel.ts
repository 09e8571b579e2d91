// Per-team travel delta bars, worst current travel at the top, red for
// worse and green for better.

import type { DiffResponse, DiffRow } from "./types";

export function sortRows(rows: DiffRow[]): DiffRow[] {
  return [...rows].sort((a, b) => b.current - a.current || a.team_id.localeCompare(b.team_id));
}

export function barClass(row: DiffRow): string {
  if (row.delta > 0) return "bar worse";
  if (row.delta < 0) return "bar better";
  return "bar same";
}

export function renderDiffPanel(container: HTMLElement, diff: DiffResponse): void {
  container.textContent = "";
  const rows = sortRows(diff.teams);
  const maxAbs = Math.max(1, ...rows.map((r) => Math.abs(r.delta)));

  const table = document.createElement("table");
  table.className = "diff-panel";
  const header = document.createElement("tr");
  header.innerHTML =
    "<th>team</th><th>current</th><th>delta</th><th class='bar-cell'></th>";
  table.appendChild(header);

  for (const row of rows) {
    const tr = document.createElement("tr");
    tr.dataset.team = row.team_id;
    tr.dataset.direction = row.direction;

    const team = document.createElement("td");
    team.textContent = row.team_id;
    const current = document.createElement("td");
    current.textContent = Math.round(row.current).toLocaleString("en-US");
    const delta = document.createElement("td");
    const sign = row.delta > 0 ? "+" : "";
    delta.textContent = `${sign}${Math.round(row.delta).toLocaleString("en-US")}`;

    const barCell = document.createElement("td");
    barCell.className = "bar-cell";
    const bar = document.createElement("div");
    bar.className = barClass(row);
    bar.style.width = `${(Math.abs(row.delta) / maxAbs) * 100}%`;
    barCell.appendChild(bar);

    tr.append(team, current, delta, barCell);
    table.appendChild(tr);
  }

  const totals = document.createElement("p");
  totals.className = "diff-totals";
  const sign = diff.totals.delta > 0 ? "+" : "";
  totals.textContent =
    `league total: ${sign}${Math.round(diff.totals.delta).toLocaleString("en-US")} miles`;

  container.appendChild(table);
  container.appendChild(totals);
}
