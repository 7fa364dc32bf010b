"""Dataset loaders: the native JSONL conversation format and the public
SequentialQA TSV release layout."""

from __future__ import annotations

import ast
import csv
import json
from pathlib import Path

from .errors import MalformedRowError, MissingTableFileError
from .table_model import Table, load_table_file


def load_conversations_jsonl(path):
    """Read {"tableFile", "turns": [{"question", "answers"}]} lines.

    Table paths resolve relative to the JSONL file's directory. Tables are
    loaded once and shared between conversations.
    """
    path = Path(path)
    root = path.parent
    tables = {}
    conversations = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
                table_file = record["tableFile"]
                turns = record["turns"]
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise MalformedRowError(f"bad conversation record: {exc}", lineno)
            table_path = root / table_file
            if not table_path.exists():
                raise MissingTableFileError(str(table_path))
            key = str(table_path)
            if key not in tables:
                tables[key] = load_table_file(table_path, table_id=table_file)
            conversations.append({
                "id": record.get("id", f"conv-{lineno}"),
                "table": tables[key],
                "turns": [{"question": t["question"], "answers": t["answers"]}
                          for t in turns],
            })
    return conversations


_SQA_COLUMNS = ("id", "annotator", "position", "question", "table_file",
                "answer_text")


def _parse_answer_text(raw, lineno):
    raw = raw.strip()
    if raw.startswith("["):
        try:
            parsed = ast.literal_eval(raw)
            return [str(x) for x in parsed]
        except (ValueError, SyntaxError) as exc:
            raise MalformedRowError(f"bad answer_text: {exc}", lineno)
    return [part for part in raw.split("|") if part != ""]


def load_sqa_tsv(path):
    """Group a SequentialQA TSV file into conversations.

    Rows are keyed by (id, annotator) and ordered by position. Table files
    resolve relative to the dataset root (the TSV's parent directory).
    Columns are found by header name, so reordering is tolerated.
    """
    path = Path(path)
    root = path.parent
    grouped = {}
    tables = {}
    with open(path, encoding="utf-8") as fh:
        reader = csv.DictReader(fh, delimiter="\t")
        if reader.fieldnames is None:
            raise MalformedRowError("empty file", 1)
        missing = [c for c in _SQA_COLUMNS if c not in reader.fieldnames]
        if missing:
            raise MalformedRowError(f"missing columns {missing}", 1)
        for lineno, row in enumerate(reader, start=2):
            try:
                key = (row["id"], row["annotator"])
                position = int(row["position"])
                question = row["question"]
                table_file = row["table_file"]
            except (KeyError, TypeError, ValueError) as exc:
                raise MalformedRowError(f"bad row: {exc}", lineno)
            answers = _parse_answer_text(row["answer_text"] or "", lineno)
            table_path = root / table_file
            if not table_path.exists():
                raise MissingTableFileError(str(table_path))
            tkey = str(table_path)
            if tkey not in tables:
                tables[tkey] = load_table_file(table_path, table_id=table_file)
            grouped.setdefault(key, []).append(
                (position, {"question": question, "answers": answers},
                 tables[tkey]))
    conversations = []
    for (qid, annotator), rows in sorted(grouped.items()):
        rows.sort(key=lambda r: r[0])
        conversations.append({
            "id": f"{qid}-{annotator}",
            "table": rows[0][2],
            "turns": [turn for _, turn, _ in rows],
        })
    return conversations
