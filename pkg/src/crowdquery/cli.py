"""Command-line entry point.

    crowdquery profile DATA.nt [--class IRI] [--predicate IRI]
    crowdquery run     DATA.nt QUERY.rq [--crowd off|sim|replay|http] ...
    crowdquery serve   DATA.nt QUERY.rq [--bind HOST:PORT] ...

Exit codes: 0 on completed execution, 1 on parse/input errors, 2 when the
gateway timed out (the partial report is still printed).
"""

from __future__ import annotations

import argparse
import json
import sys

from . import engine, gateway as gw, metrics, quality
from .httpd import HttpGateway
from .kb import CrowdKB, load_kb, save_kb
from .rdf import NTriplesError, load_ntriples, term_to_text
from .sparql import STAR, QuerySyntaxError, load_query


def _add_engine_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tau", type=float, default=0.02,
                   help="crowdsourcing threshold (default 0.02)")
    p.add_argument("--alpha", type=float, default=0.5,
                   help="completeness weight in the gate score (default 0.5)")
    p.add_argument("--agg", choices=sorted(quality.AGGREGATIONS), default="median",
                   help="class aggregation function (default median)")
    p.add_argument("--crowd", choices=["off", "sim", "replay", "http"], default="off")
    p.add_argument("--judgments", type=int, default=3,
                   help="judgments per question (default 3)")
    p.add_argument("--questions-per-task", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--error-rate", type=float, default=0.0)
    p.add_argument("--not-sure-rate", type=float, default=0.0)
    p.add_argument("--timeout", type=float, default=None,
                   help="seconds to wait for crowd answers")
    p.add_argument("--gold", help="gold standard file for precision/recall")
    p.add_argument("--kb-in", help="load the crowd KB from this file")
    p.add_argument("--kb-out", help="save the updated crowd KB to this file")
    p.add_argument("--oracle", help="oracle data set for --crowd sim "
                                    "(default: the query data set)")
    p.add_argument("--replay", help="recorded answers for --crowd replay")
    p.add_argument("--bind", default="127.0.0.1:8080",
                   help="HOST:PORT for --crowd http (default 127.0.0.1:8080)")
    p.add_argument("--ui-dir", help="directory with the built worker UI")
    p.add_argument("--format", choices=["text", "jsonl"], default="text")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="crowdquery", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_profile = sub.add_parser("profile", help="completeness report for a data set")
    p_profile.add_argument("data")
    p_profile.add_argument("--class", dest="class_iri")
    p_profile.add_argument("--predicate")
    p_profile.add_argument("--agg", choices=sorted(quality.AGGREGATIONS),
                           default="median")
    p_profile.add_argument("--format", choices=["text", "jsonl"], default="text")

    p_run = sub.add_parser("run", help="execute a query, crowdsourcing gaps")
    p_run.add_argument("data")
    p_run.add_argument("query")
    _add_engine_flags(p_run)

    p_serve = sub.add_parser("serve", help="execute with the live HTTP gateway")
    p_serve.add_argument("data")
    p_serve.add_argument("query")
    _add_engine_flags(p_serve)
    return parser


def cmd_profile(args) -> int:
    d = load_ntriples(args.data)
    rows = quality.profile(d, class_filter=args.class_iri,
                           predicate_filter=args.predicate, agg=args.agg)
    if args.class_iri and args.predicate:
        am = quality.aggregated_multiplicity(d, args.class_iri, args.predicate, args.agg)
        if args.format == "jsonl":
            print(json.dumps({"type": "class-aggregate", "class": args.class_iri,
                              "predicate": args.predicate, "aggregated_multiplicity": am}))
        else:
            print(f"# AM\t{args.class_iri}\t{args.predicate}\t{am}")
    for r in rows:
        if args.format == "jsonl":
            print(json.dumps({
                "type": "completeness", "subject": term_to_text(r.subject),
                "predicate": r.predicate, "multiplicity": r.data_multiplicity,
                "class_aggregate": r.best_class_multiplicity,
                "completeness_data": r.data_completeness,
                "completeness_kb_plus": r.kb_plus_completeness,
            }))
        else:
            print(f"{term_to_text(r.subject)}\t{r.predicate}\t{r.data_multiplicity}\t"
                  f"{r.best_class_multiplicity}\t{r.data_completeness:.6g}\t"
                  f"{r.kb_plus_completeness:.6g}")
    return 0


def _make_gateway(args, d):
    if args.crowd == "off":
        return None, None
    if args.crowd == "sim":
        oracle = load_ntriples(args.oracle) if args.oracle else d
        cfg = gw.SimCrowdConfig(
            oracle=oracle, error_rate=args.error_rate,
            not_sure_rate=args.not_sure_rate, seed=args.seed,
            judgments_per_question=args.judgments)
        return gw.SimGateway(cfg), None
    if args.crowd == "replay":
        if not args.replay:
            raise SystemExit("--crowd replay needs --replay FILE")
        return gw.ReplayGateway(args.replay, quota=args.judgments), None
    host, _, port = args.bind.partition(":")
    http_gateway = HttpGateway(host=host or "127.0.0.1", port=int(port or 0),
                               quota=args.judgments, ui_dir=args.ui_dir)
    http_gateway.start()
    print(f"# gateway listening on {http_gateway.base_url}", file=sys.stderr)
    return http_gateway, http_gateway


def _print_report(args, q, result, scores) -> None:
    if q.projected == STAR:
        names = sorted(result.answers.schema)
    else:
        names = [v.name for v in q.projected]
    rows = sorted(
        tuple(term_to_text(m.get(n)) if m.get(n) is not None else "" for n in names)
        for m in result.answers)
    if args.format == "jsonl":
        for row in rows:
            print(json.dumps({"type": "answer", **dict(zip(names, row))}))
        for g in result.gate_trace:
            print(json.dumps({
                "type": "gate", "subject": term_to_text(g.subject),
                "predicate": g.predicate, "completeness_data": g.completeness_data,
                "completeness_kb": g.completeness_kb, "disagreement": g.disagreement,
                "uncertainty": g.uncertainty, "probability": g.probability,
                "decision": g.decision}))
        for item in result.collected:
            print(json.dumps({
                "type": "kb-quad", "set": item.set_tag,
                "subject": term_to_text(item.quad.subject),
                "predicate": item.quad.predicate,
                "object": term_to_text(item.quad.object),
                "membership": item.quad.membership}))
        summary = {"type": "summary", "answers": len(result.answers),
                   "crowdsourced": len(result.crowdsourced),
                   "tasks": len(result.tasks),
                   "unanswered": len(result.unanswered),
                   "timed_out": result.timed_out}
        if scores is not None:
            summary.update(scores)
        print(json.dumps(summary))
        return

    print("\t".join(f"?{n}" for n in names))
    for row in rows:
        print("\t".join(row))
    if result.gate_trace:
        print("# gate: subject predicate comp_d comp_kb D U P decision")
        for g in result.gate_trace:
            fields = [term_to_text(g.subject), g.predicate,
                      f"{g.completeness_data:.6g}", f"{g.completeness_kb:.6g}"]
            for v in (g.disagreement, g.uncertainty, g.probability):
                fields.append("-" if v is None else f"{v:.6g}")
            fields.append(g.decision)
            print("# gate: " + "\t".join(fields))
    print(f"# summary: answers={len(result.answers)} "
          f"crowdsourced={len(result.crowdsourced)} tasks={len(result.tasks)} "
          f"unanswered={len(result.unanswered)} timed_out={result.timed_out}")
    for question in result.unanswered:
        print(f"# unanswered: {question.existence_text}")
    if scores is not None:
        p = scores["precision"]
        print(f"# metrics: precision={'n/a' if p is None else p} "
              f"recall={scores['recall']} f_measure={scores['f_measure']}")


def cmd_run(args) -> int:
    d = load_ntriples(args.data)
    q = load_query(args.query)
    kb = load_kb(args.kb_in) if args.kb_in else CrowdKB()
    crowd_gateway, http_gateway = _make_gateway(args, d)
    cfg = engine.ExecutionConfig(
        tau=args.tau, alpha=args.alpha, aggregation=args.agg,
        crowd_enabled=args.crowd != "off",
        questions_per_task=args.questions_per_task,
        timeout=args.timeout)
    try:
        result = engine.execute(q, d, kb, cfg, crowd_gateway)
    finally:
        if http_gateway is not None:
            http_gateway.stop()
    scores = None
    if args.gold:
        gold = metrics.load_gold(args.gold)
        crowd_answers = metrics.collected_answer_set(result.collected)
        p = metrics.precision(crowd_answers, gold)
        r = metrics.recall(crowd_answers, gold)
        scores = {"precision": p, "recall": r,
                  "f_measure": metrics.f_measure(p or 0.0, r)}
    if args.kb_out:
        save_kb(kb, args.kb_out)
    _print_report(args, q, result, scores)
    return 2 if result.timed_out else 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "profile":
            return cmd_profile(args)
        if args.command == "serve":
            args.crowd = "http"
            return cmd_run(args)
        return cmd_run(args)
    except (NTriplesError, QuerySyntaxError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
