/** Wire types for the table question answering HTTP API (schemaVersion 1). */

export interface TablePayload {
  id: string;
  headers: string[];
  types: string[];
  rows: string[][];
}

export interface SessionPayload {
  sessionId: string;
  schemaVersion: string;
  table: TablePayload;
}

export interface TableSummary {
  id: string;
  nRows: number;
  nCols: number;
  headers: string[];
}

export interface TablesPayload {
  schemaVersion: string;
  tables: TableSummary[];
}

export interface ConditionJson {
  col: string;
  op: string;
  value?: string;
}

export interface LogicalFormJson {
  select: string;
  conditions: ConditionJson[];
}

export interface ActionJson {
  tag: string;
  argument?: string;
}

export interface CellRef {
  row: number;
  col: number;
  text: string;
}

export interface AnsweredPayload {
  schemaVersion: string;
  answered: true;
  question: string;
  logicalForm: { text: string; json: LogicalFormJson };
  actions: ActionJson[];
  sketch: string;
  score: number;
  denotation: { column: string; values: CellRef[] };
}

export interface UnansweredPayload {
  schemaVersion: string;
  answered: false;
  question: string;
}

export type AskPayload = AnsweredPayload | UnansweredPayload;

export interface ErrorPayload {
  error: string;
  schemaVersion: string;
}
