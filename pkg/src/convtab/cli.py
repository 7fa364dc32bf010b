"""Command-line entry points.

Exit codes: 0 success, 1 usage error, 2 data error. The CAMP_MODEL
environment variable overrides --model everywhere a model is accepted.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .datasets import load_conversations_jsonl, load_sqa_tsv
from .errors import ConvTabError, NoParseError
from .logical_form import render
from .pipeline import answer, evaluate, format_metrics, new_session
from .scorer import ModelWeights, TrainConfig, train
from .search import SearchConfig, LabelResult, coverage_report, search_labels
from .synthetic import SyntheticSpec, gen_synthetic, write_corpus
from .table_model import load_table_file


class _UsageExit(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageExit(message)


def _load_model(path):
    path = os.environ.get("CAMP_MODEL") or path
    if path is None:
        return ModelWeights.zero()
    return ModelWeights.load(path)


def build_parser():
    parser = _Parser(prog="convtab",
                     description="Conversational table question answering")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="answer question(s) over one table")
    p.add_argument("--table", required=True)
    p.add_argument("--format", choices=["csv", "tsv"], default=None)
    p.add_argument("--question", action="append", required=True)
    p.add_argument("--model", default=None)
    p.add_argument("--beam", type=int, default=3)

    p = sub.add_parser("search-labels", help="generate logical-form labels")
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--no-s1", action="store_true")
    p.add_argument("--no-s2", action="store_true")
    p.add_argument("--match", choices=["exact", "overlap"], default="exact")
    p.add_argument("--max-candidates", type=int, default=5000)
    p.add_argument("--report", action="store_true",
                   help="print a coverage report")

    p = sub.add_parser("train", help="train model weights from labels")
    p.add_argument("--labels", required=True)
    p.add_argument("--data", required=True,
                   help="conversation JSONL the labels were generated from")
    p.add_argument("--out", required=True)
    p.add_argument("--epochs", type=int, default=15)
    p.add_argument("--lr", type=float, default=0.5)
    p.add_argument("--l2", type=float, default=1e-4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--lambda", dest="lam", type=float, default=0.7)
    p.add_argument("--init", default=None,
                   help="continue training from an existing model file")

    p = sub.add_parser("eval", help="evaluate a model on conversations")
    p.add_argument("--data", required=True)
    p.add_argument("--model", default=None)
    p.add_argument("--beam", type=int, default=3)
    p.add_argument("--json", dest="json_out", default=None)
    p.add_argument("--sqa", action="store_true",
                   help="read --data as a SequentialQA TSV file")

    p = sub.add_parser("gen-synthetic", help="generate a synthetic corpus")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--n-tables", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--copy-fraction", type=float, default=0.5)
    p.add_argument("--rows", default="3:6", help="min:max rows per table")
    p.add_argument("--cols", default="3:5", help="min:max columns per table")
    p.add_argument("--turns", default="2:4", help="min:max turns per conversation")

    p = sub.add_parser("serve", help="run the HTTP API")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--model", default=None)
    p.add_argument("--table-dir", required=True)
    p.add_argument("--idle-timeout", type=float, default=1800.0)
    p.add_argument("--frontend-dir", default=None)
    p.add_argument("--beam", type=int, default=3)

    p = sub.add_parser("repl", help="interactive conversation in the terminal")
    p.add_argument("--table", required=True)
    p.add_argument("--format", choices=["csv", "tsv"], default=None)
    p.add_argument("--model", default=None)
    p.add_argument("--beam", type=int, default=3)
    return parser


def _load_table_arg(args):
    path = args.table
    if args.format:
        with open(path, "rb") as fh:
            from .table_model import load_table
            return load_table(fh, fmt=args.format, table_id=path)
    return load_table_file(path)


def _cmd_parse(args):
    table = _load_table_arg(args)
    weights = _load_model(args.model)
    state = new_session(table)
    for question in args.question:
        try:
            denotation, parse, state = answer(state, question, weights,
                                              beam=args.beam)
        except NoParseError:
            print(f"{question}\n  (no parse)")
            continue
        print(render(parse.lf))
        print(", ".join(denotation.texts) if denotation.texts else "(empty)")
    return 0


def _cmd_search_labels(args):
    conversations = load_conversations_jsonl(args.data)
    config = SearchConfig(max_candidates=args.max_candidates,
                          apply_s1=not args.no_s1, apply_s2=not args.no_s2,
                          match_mode=args.match)
    results = []
    with open(args.out, "w", encoding="utf-8") as fh:
        for conv in conversations:
            turns = [(t["question"], t["answers"]) for t in conv["turns"]]
            for label in search_labels(turns, conv["table"], config):
                results.append(label)
                fh.write(json.dumps(label.to_json(), sort_keys=True) + "\n")
    report = coverage_report(results)
    if args.report:
        print(json.dumps(report, indent=2, sort_keys=True))
    else:
        print(f"labeled {report['nQuestions']} questions, "
              f"coverage {report['overall']:.1f}%")
    return 0


def _read_labels(path):
    labels = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                labels.append(LabelResult.from_json(json.loads(line)))
    return labels


def _cmd_train(args):
    labels = _read_labels(args.labels)
    conversations = load_conversations_jsonl(args.data)
    tables = {conv["table"].id: conv["table"] for conv in conversations}
    init = ModelWeights.load(args.init) if args.init else None
    config = TrainConfig(epochs=args.epochs, learning_rate=args.lr,
                         l2=args.l2, seed=args.seed, lam=args.lam)
    weights, accuracy = train(labels, tables, config, init=init)
    weights.save(args.out)
    print(f"saved model to {args.out}")
    for head in sorted(accuracy):
        print(f"  held-out {head}: {accuracy[head]:.3f}")
    return 0


def _cmd_eval(args):
    if args.sqa:
        dataset = load_sqa_tsv(args.data)
    else:
        dataset = load_conversations_jsonl(args.data)
    weights = _load_model(args.model)
    metrics = evaluate(dataset, weights, beam=args.beam)
    print(format_metrics(metrics))
    if args.json_out:
        with open(args.json_out, "w", encoding="utf-8") as fh:
            json.dump(metrics, fh, indent=2, sort_keys=True)
    return 0


def _parse_range(text):
    lo, _, hi = text.partition(":")
    return (int(lo), int(hi or lo))


def _cmd_gen_synthetic(args):
    spec = SyntheticSpec(n_tables=args.n_tables,
                         row_range=_parse_range(args.rows),
                         col_range=_parse_range(args.cols),
                         turns_range=_parse_range(args.turns),
                         copy_turn_fraction=args.copy_fraction,
                         seed=args.seed)
    conversations = gen_synthetic(spec)
    path = write_corpus(conversations, args.out_dir)
    n_turns = sum(len(c["turns"]) for c in conversations)
    print(f"wrote {len(conversations)} conversations ({n_turns} turns) to {path}")
    return 0


def _cmd_serve(args):
    from .server import serve

    weights = _load_model(args.model)
    table_dir = Path(args.table_dir)
    tables = {}
    for path in sorted(table_dir.glob("*.csv")) + sorted(table_dir.glob("*.tsv")):
        table = load_table_file(path, table_id=path.stem)
        tables[table.id] = table
    if not tables:
        raise ConvTabError(f"no .csv/.tsv tables in {table_dir}")
    serve(weights, tables, port=args.port, host=args.host,
          idle_timeout=args.idle_timeout, beam=args.beam,
          frontend_dir=args.frontend_dir)
    return 0


def _cmd_repl(args):
    table = _load_table_arg(args)
    weights = _load_model(args.model)
    state = new_session(table)
    print(f"table {table.id}: {table.n_rows} rows x {table.n_cols} cols")
    print("ask questions; 'exit' to quit")
    while True:
        try:
            question = input("? ").strip()
        except EOFError:
            break
        if not question:
            continue
        if question.lower() in ("exit", "quit"):
            break
        try:
            denotation, parse, state = answer(state, question, weights,
                                              beam=args.beam)
        except NoParseError:
            print("  no parse")
            continue
        print(f"  {render(parse.lf)}")
        print(f"  -> {', '.join(denotation.texts) if denotation.texts else '(empty)'}")
    return 0


_COMMANDS = {
    "parse": _cmd_parse,
    "search-labels": _cmd_search_labels,
    "train": _cmd_train,
    "eval": _cmd_eval,
    "gen-synthetic": _cmd_gen_synthetic,
    "serve": _cmd_serve,
    "repl": _cmd_repl,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageExit as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        return _COMMANDS[args.command](args)
    except (ConvTabError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
