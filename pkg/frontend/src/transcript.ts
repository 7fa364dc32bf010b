import type { AskPayload, CellRef, TablePayload } from "./types.js";

/** Which segment of the previous turn a parse carried over. */
export type CopySegment = "SELECT" | "WHERE" | "BOTH" | null;

export interface TranscriptEntry {
  question: string;
  answered: boolean;
  logicalFormText: string | null;
  sketchId: string | null;
  copySegment: CopySegment;
  answerCoordinates: CellRef[];
  answerTexts: string[];
}

export interface SessionSnapshot {
  sessionId: string;
  table: TablePayload;
  transcript: TranscriptEntry[];
}

/** The sketch alone determines what was copied from the previous turn. */
export function copySegmentOf(sketchId: string | null): CopySegment {
  switch (sketchId) {
    case "S_COPYSEL_WHERE":
      return "SELECT";
    case "S_COPYWHERE_SELECT":
      return "WHERE";
    case "S_COPYALL_WHERE":
      return "BOTH";
    default:
      return null;
  }
}

/** Translate one server response into a transcript entry (no client parsing). */
export function entryFromPayload(payload: AskPayload): TranscriptEntry {
  if (!payload.answered) {
    return {
      question: payload.question,
      answered: false,
      logicalFormText: null,
      sketchId: null,
      copySegment: null,
      answerCoordinates: [],
      answerTexts: [],
    };
  }
  return {
    question: payload.question,
    answered: true,
    logicalFormText: payload.logicalForm.text,
    sketchId: payload.sketch,
    copySegment: copySegmentOf(payload.sketch),
    answerCoordinates: payload.denotation.values.map((v) => ({ ...v })),
    answerTexts: payload.denotation.values.map((v) => v.text),
  };
}

export function inBounds(ref: CellRef, table: TablePayload): boolean {
  return (
    ref.row >= 0 &&
    ref.row < table.rows.length &&
    ref.col >= 0 &&
    ref.col < table.headers.length
  );
}

/** Minimal storage contract so tests can supply a plain object. */
export interface StorageLike {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
  removeItem(key: string): void;
}

const CACHE_KEY = "convtab.session";

/** Local transcript cache: lets a reload re-render without re-asking. */
export class SessionCache {
  constructor(private readonly storage: StorageLike) {}

  save(snapshot: SessionSnapshot): void {
    this.storage.setItem(CACHE_KEY, JSON.stringify(snapshot));
  }

  load(): SessionSnapshot | null {
    const raw = this.storage.getItem(CACHE_KEY);
    if (raw === null) return null;
    try {
      const parsed = JSON.parse(raw) as SessionSnapshot;
      if (!parsed || typeof parsed.sessionId !== "string" || !parsed.table) return null;
      return parsed;
    } catch {
      return null;
    }
  }

  clear(): void {
    this.storage.removeItem(CACHE_KEY);
  }
}

/** Conversation state: appends entries in server turn order and snapshots. */
export class SessionModel {
  readonly transcript: TranscriptEntry[] = [];

  constructor(
    readonly sessionId: string,
    readonly table: TablePayload,
  ) {}

  append(payload: AskPayload): TranscriptEntry {
    const entry = entryFromPayload(payload);
    for (const ref of entry.answerCoordinates) {
      if (!inBounds(ref, this.table)) {
        throw new Error(`answer coordinate out of bounds: ${ref.row},${ref.col}`);
      }
    }
    this.transcript.push(entry);
    return entry;
  }

  snapshot(): SessionSnapshot {
    return {
      sessionId: this.sessionId,
      table: this.table,
      transcript: this.transcript.map((e) => ({
        ...e,
        answerCoordinates: e.answerCoordinates.map((c) => ({ ...c })),
        answerTexts: [...e.answerTexts],
      })),
    };
  }

  static fromSnapshot(snapshot: SessionSnapshot): SessionModel {
    const model = new SessionModel(snapshot.sessionId, snapshot.table);
    for (const entry of snapshot.transcript) model.transcript.push(entry);
    return model;
  }
}
