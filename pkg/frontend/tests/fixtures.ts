import type { AnsweredPayload, SessionPayload, TablePayload } from "../src/types.js";

export const OLYMPICS_TABLE: TablePayload = {
  id: "olympics",
  headers: ["Year", "City", "Country", "Nations"],
  types: ["YEAR", "TEXT", "COUNTRY", "NUMBER"],
  rows: [
    ["2004", "Athens", "Greece", "201"],
    ["2008", "Beijing", "China", "204"],
    ["2012", "London", "UK", "205"],
  ],
};

export const SESSION_PAYLOAD: SessionPayload = {
  sessionId: "session-1",
  schemaVersion: "1",
  table: OLYMPICS_TABLE,
};

/** Turn 1: "Which city hosted the 2008 Summer Olympics?" */
export const TURN1_PAYLOAD: AnsweredPayload = {
  schemaVersion: "1",
  answered: true,
  question: "Which city hosted the 2008 Summer Olympics?",
  logicalForm: {
    text: "SELECT City WHERE Year = 2008",
    json: { select: "City", conditions: [{ col: "Year", op: "=", value: "2008" }] },
  },
  actions: [
    { tag: "A1", argument: "City" },
    { tag: "A2", argument: "Year" },
    { tag: "A3", argument: "=" },
    { tag: "A4", argument: "2008" },
  ],
  sketch: "S_SELECT_WHERE",
  score: -0.4,
  denotation: { column: "City", values: [{ row: 1, col: 1, text: "Beijing" }] },
};

/** Turn 2: "How many nations participate in that year?" — WHERE copied. */
export const TURN2_PAYLOAD: AnsweredPayload = {
  schemaVersion: "1",
  answered: true,
  question: "How many nations participate in that year?",
  logicalForm: {
    text: "SELECT Nations WHERE Year = 2008",
    json: { select: "Nations", conditions: [{ col: "Year", op: "=", value: "2008" }] },
  },
  actions: [
    { tag: "A6" },
    { tag: "A1", argument: "Nations" },
  ],
  sketch: "S_COPYWHERE_SELECT",
  score: -0.2,
  denotation: { column: "Nations", values: [{ row: 1, col: 3, text: "204" }] },
};

export function jsonResponse(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}
