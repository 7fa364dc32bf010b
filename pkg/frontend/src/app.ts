import { ApiClient, ApiError } from "./api.js";
import {
  SessionCache,
  SessionModel,
  type StorageLike,
} from "./transcript.js";
import {
  highlightCells,
  renderErrorBanner,
  renderTable,
  renderTranscript,
} from "./render.js";

export interface AppElements {
  tablePicker: HTMLSelectElement;
  startButton: HTMLButtonElement;
  tableHost: HTMLElement;
  transcriptHost: HTMLElement;
  questionInput: HTMLInputElement;
  askButton: HTMLButtonElement;
  bannerHost: HTMLElement;
}

/**
 * Page controller. All answer data (logical forms, highlight coordinates)
 * comes from the server payloads; the client only renders and caches them.
 */
export class App {
  private model: SessionModel | null = null;
  private grid: HTMLTableElement | null = null;
  private pending = false;
  private readonly cache: SessionCache;

  constructor(
    private readonly doc: Document,
    private readonly els: AppElements,
    private readonly api: ApiClient,
    storage: StorageLike,
  ) {
    this.cache = new SessionCache(storage);
    this.els.startButton.addEventListener("click", () => void this.start());
    this.els.askButton.addEventListener("click", () => void this.ask());
    this.els.questionInput.addEventListener("keydown", (event) => {
      if ((event as KeyboardEvent).key === "Enter") void this.ask();
    });
    this.setAskEnabled(false);
  }

  /** Populate the table picker and restore any cached session transcript. */
  async init(): Promise<void> {
    try {
      const payload = await this.api.listTables();
      this.els.tablePicker.replaceChildren();
      for (const table of payload.tables) {
        const option = this.doc.createElement("option");
        option.value = table.id;
        option.textContent = `${table.id} (${table.nRows}×${table.nCols})`;
        this.els.tablePicker.appendChild(option);
      }
    } catch (error) {
      this.showError(this.describe(error));
    }
    const snapshot = this.cache.load();
    if (snapshot !== null) {
      this.model = SessionModel.fromSnapshot(snapshot);
      this.renderSession();
      this.setAskEnabled(true);
    }
  }

  private async start(): Promise<void> {
    const tableId = this.els.tablePicker.value;
    if (!tableId) return;
    try {
      const payload = await this.api.createSession(tableId);
      this.model = new SessionModel(payload.sessionId, payload.table);
      this.cache.save(this.model.snapshot());
      this.renderSession();
      this.setAskEnabled(true);
    } catch (error) {
      this.model = null;
      this.showError(this.describe(error));
    }
  }

  private async ask(): Promise<void> {
    if (this.model === null || this.pending) return;
    const question = this.els.questionInput.value.trim();
    if (!question) return;
    this.pending = true;
    this.setAskEnabled(false);
    try {
      const payload = await this.api.ask(this.model.sessionId, question);
      const entry = this.model.append(payload);
      this.cache.save(this.model.snapshot());
      this.renderSession();
      if (this.grid !== null) highlightCells(this.grid, entry.answerCoordinates);
      this.els.questionInput.value = "";
    } catch (error) {
      if (error instanceof ApiError && error.status === 410) {
        this.cache.clear();
        this.showError("Session expired — start a new session to continue.");
      } else {
        this.showError(this.describe(error));
      }
    } finally {
      this.pending = false;
      this.setAskEnabled(this.model !== null);
    }
  }

  /** Re-render grid and transcript from the model (also used for replay). */
  renderSession(): void {
    if (this.model === null) return;
    this.grid = renderTable(this.doc, this.model.table);
    this.els.tableHost.replaceChildren(this.grid);
    this.els.transcriptHost.replaceChildren(
      renderTranscript(this.doc, this.model.transcript),
    );
    const last = this.model.transcript[this.model.transcript.length - 1];
    if (last !== undefined) highlightCells(this.grid, last.answerCoordinates);
  }

  private setAskEnabled(enabled: boolean): void {
    this.els.questionInput.disabled = !enabled || this.pending;
    this.els.askButton.disabled = !enabled || this.pending;
  }

  private showError(message: string): void {
    this.els.bannerHost.replaceChildren(renderErrorBanner(this.doc, message));
  }

  private describe(error: unknown): string {
    if (error instanceof ApiError) return error.message;
    if (error instanceof Error) return `Network error: ${error.message}`;
    return String(error);
  }
}
