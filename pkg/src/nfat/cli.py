"""``nfat`` command line.

Exit status: 0 success, 1 domain error (message on stderr), 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from datetime import datetime
from pathlib import Path

from . import __version__
from .clustering import KMeansConfig
from .criteria import DEFAULT_RULES, classify_event, load_rules
from .errors import NfatError
from .ingest import TIMESTAMP_FORMAT, ingest_file
from .pipeline import format_counts, run_pipeline
from .report import DEFAULT_TOP_N, build_attack_report, render
from .severity import SEVERITY_ORDER
from .store import EvidenceStore


def _timestamp(text: str) -> datetime:
    try:
        return datetime.strptime(text, TIMESTAMP_FORMAT)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'YYYY-MM-DD HH:MM:SS', got {text!r}") from None


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def _seed(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--store", default=argparse.SUPPRESS,
                        help="store root directory (default: $NFAT_STORE or ./.nfat-store)")

    parser = argparse.ArgumentParser(prog="nfat", description="Network forensic log clustering and reporting.",
                                     parents=[common])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="verb", required=True, metavar="VERB")

    p = sub.add_parser("case-create", parents=[common], help="open a new case")
    p.add_argument("--id", required=True, dest="case_id")
    p.add_argument("--title", required=True)
    p.add_argument("--investigator", required=True)
    p.add_argument("--notes", default="", help="evidence profile notes")

    sub.add_parser("case-list", parents=[common], help="list cases in the store")

    p = sub.add_parser("ingest", parents=[common], help="ingest an event CSV into a case")
    p.add_argument("--case", required=True)
    p.add_argument("--input", required=True, type=Path)

    p = sub.add_parser("analyze", parents=[common], help="cluster a case's events and store the analysis")
    p.add_argument("--case", required=True)
    p.add_argument("--k", type=_positive, default=3)
    p.add_argument("--restarts", type=_positive, default=10)
    p.add_argument("--max-iterations", type=_positive, default=300)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--rules", type=Path, help="criteria rules CSV overriding the built-in table")

    p = sub.add_parser("classify", parents=[common], help="criteria-only severity listing (no clustering)")
    p.add_argument("--case", required=True)
    p.add_argument("--from", dest="time_from", type=_timestamp)
    p.add_argument("--to", dest="time_to", type=_timestamp)
    p.add_argument("--protocol", choices=["TCP", "UDP"])
    p.add_argument("--rules", type=Path)
    p.add_argument("--format", choices=["text", "json"], default="text")

    p = sub.add_parser("report", parents=[common], help="render the attack report of a stored analysis")
    p.add_argument("--case", required=True)
    p.add_argument("--analysis", required=True)
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.add_argument("--top", type=_positive, default=DEFAULT_TOP_N)
    p.add_argument("--out", type=Path)
    return parser


def _emit(data: bytes, out: Path | None = None) -> None:
    if out is not None:
        out.write_bytes(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()


def _cmd_case_create(store, args):
    store.create_case(args.case_id, args.title, args.investigator, args.notes)
    print(args.case_id)


def _cmd_case_list(store, args):
    for case_id in store.list_cases():
        case = store.get_case(case_id)
        print(f"{case.case_id}\t{case.opened_at.isoformat()}\t{case.investigator}\t{case.title}")


def _cmd_ingest(store, args):
    summary = ingest_file(store, args.input, args.case)
    print(f"accepted={summary.accepted} rejected={summary.rejected}")
    for line_no, err in summary.errors:
        print(f"  line {line_no}: {err}", file=sys.stderr)


def _cmd_analyze(store, args):
    config = KMeansConfig(k=args.k, max_iterations=args.max_iterations, n_restarts=args.restarts, seed=args.seed)
    rules = load_rules(args.rules) if args.rules else DEFAULT_RULES
    run = run_pipeline(store, args.case, config, rules)
    print(f"analysis_id={run.analysis_id}")
    print(f"events={run.input_event_count} {format_counts(run.severity_counts)}")
    print(f"criteria_error_rate={run.error_rate:.4f}")


def _cmd_classify(store, args):
    rules = load_rules(args.rules) if args.rules else DEFAULT_RULES
    events = store.query_events(args.case, args.time_from, args.time_to, args.protocol)
    verdicts = [(e, classify_event(e, rules)) for e in events]
    counts = {s: 0 for s in SEVERITY_ORDER}
    for _, sev in verdicts:
        counts[sev] += 1
    if args.format == "json":
        doc = {
            "case_id": args.case,
            "severity_counts": {s.value: n for s, n in counts.items()},
            "events": [
                {"event_id": e.event_id, "time": e.timestamp.strftime(TIMESTAMP_FORMAT), "src_addr": e.src_addr,
                 "dst_addr": e.dst_addr, "protocol": e.protocol.value, "d_port": e.d_port,
                 "tcp_flags": e.tcp_flags, "severity": sev.value}
                for e, sev in verdicts
            ],
        }
        _emit((json.dumps(doc, indent=2) + "\n").encode("utf-8"))
        return
    for e, sev in verdicts:
        print(f"{e.timestamp.strftime(TIMESTAMP_FORMAT)}  {e.src_addr:<15}  {e.dst_addr:<15}  "
              f"{e.protocol.value:<3}  {e.d_port:>5}  {e.tcp_flags:>3}  {sev.value}")
    print(" ".join(f"{s.value}={n}" for s, n in counts.items()))


def _cmd_report(store, args):
    report = build_attack_report(store, args.case, args.analysis, top_n=args.top)
    _emit(render(report, args.format), args.out)


COMMANDS = {
    "case-create": _cmd_case_create,
    "case-list": _cmd_case_list,
    "ingest": _cmd_ingest,
    "analyze": _cmd_analyze,
    "classify": _cmd_classify,
    "report": _cmd_report,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    store = EvidenceStore.from_env(getattr(args, "store", None))
    try:
        COMMANDS[args.verb](store, args)
    except (NfatError, FileNotFoundError, OSError) as exc:
        print(f"nfat: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
