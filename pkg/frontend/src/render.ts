import type { CellRef, TablePayload } from "./types.js";
import type { TranscriptEntry } from "./transcript.js";

/** Render the table as a grid; the header row is visually distinct. */
export function renderTable(doc: Document, table: TablePayload): HTMLTableElement {
  const el = doc.createElement("table");
  el.className = "data-grid";
  const thead = doc.createElement("thead");
  const headRow = doc.createElement("tr");
  for (const header of table.headers) {
    const th = doc.createElement("th");
    th.textContent = header;
    headRow.appendChild(th);
  }
  thead.appendChild(headRow);
  el.appendChild(thead);
  const tbody = doc.createElement("tbody");
  table.rows.forEach((row, r) => {
    const tr = doc.createElement("tr");
    row.forEach((text, c) => {
      const td = doc.createElement("td");
      td.textContent = text;
      td.dataset.row = String(r);
      td.dataset.col = String(c);
      tr.appendChild(td);
    });
    tbody.appendChild(tr);
  });
  el.appendChild(tbody);
  return el;
}

/**
 * Highlight exactly the server-provided coordinates; anything previously
 * highlighted is cleared first. Coordinates are never recomputed locally.
 */
export function highlightCells(grid: HTMLTableElement, refs: CellRef[]): void {
  for (const cell of grid.querySelectorAll("td.highlight")) {
    cell.classList.remove("highlight");
  }
  for (const ref of refs) {
    const cell = grid.querySelector(
      `td[data-row="${ref.row}"][data-col="${ref.col}"]`,
    );
    if (cell) cell.classList.add("highlight");
  }
}

export function highlightedCoordinates(grid: HTMLTableElement): { row: number; col: number }[] {
  return Array.from(grid.querySelectorAll("td.highlight")).map((cell) => ({
    row: Number((cell as HTMLElement).dataset.row),
    col: Number((cell as HTMLElement).dataset.col),
  }));
}

/** One transcript turn: question, logical form, copy badge, answers. */
export function renderEntry(doc: Document, entry: TranscriptEntry): HTMLElement {
  const item = doc.createElement("li");
  item.className = entry.answered ? "turn" : "turn unanswered";

  const question = doc.createElement("div");
  question.className = "question";
  question.textContent = entry.question;
  item.appendChild(question);

  if (!entry.answered) {
    const note = doc.createElement("div");
    note.className = "no-answer";
    note.textContent = "No answer found";
    item.appendChild(note);
    return item;
  }

  const lf = doc.createElement("code");
  lf.className = "logical-form";
  lf.textContent = entry.logicalFormText ?? "";
  item.appendChild(lf);

  if (entry.copySegment !== null) {
    const badge = doc.createElement("span");
    badge.className = `copy-badge copy-${entry.copySegment.toLowerCase()}`;
    badge.textContent =
      entry.copySegment === "BOTH"
        ? "copied SELECT + WHERE"
        : `copied ${entry.copySegment}`;
    item.appendChild(badge);
  }

  const answers = doc.createElement("div");
  answers.className = "answers";
  answers.textContent = entry.answerTexts.join(", ");
  item.appendChild(answers);
  return item;
}

export function renderTranscript(doc: Document, entries: TranscriptEntry[]): HTMLOListElement {
  const list = doc.createElement("ol");
  list.className = "transcript";
  for (const entry of entries) list.appendChild(renderEntry(doc, entry));
  return list;
}

export function renderErrorBanner(doc: Document, message: string): HTMLElement {
  const banner = doc.createElement("div");
  banner.className = "error-banner";
  banner.setAttribute("role", "alert");
  const text = doc.createElement("span");
  text.textContent = message;
  banner.appendChild(text);
  const dismiss = doc.createElement("button");
  dismiss.type = "button";
  dismiss.className = "dismiss";
  dismiss.textContent = "×";
  dismiss.addEventListener("click", () => banner.remove());
  banner.appendChild(dismiss);
  return banner;
}
