"""Investigator reports: per-severity event listings plus source/target tallies."""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from datetime import datetime

from .criteria import ErrorReport
from .ingest import TIMESTAMP_FORMAT
from .labeling import severity_by_cluster
from .severity import SEVERITY_ORDER, Severity
from .store import EvidenceStore, canonical_json, utc_now

DEFAULT_TOP_N = 10


@dataclass(frozen=True)
class ReportRow:
    event_id: int
    time: datetime
    src_addr: str
    dst_addr: str
    d_port: int
    protocol: str


@dataclass(frozen=True)
class AttackReport:
    case_id: str
    analysis_id: str
    generated_at: datetime
    severity_sections: dict[Severity, tuple[ReportRow, ...]]
    top_sources: tuple[tuple[str, int], ...]
    top_targets: tuple[tuple[str, int], ...]
    error_report: ErrorReport | None = None

    @property
    def severity_counts(self) -> tuple[int, int, int]:
        return tuple(len(self.severity_sections.get(s, ())) for s in SEVERITY_ORDER)

    @property
    def total_events(self) -> int:
        return sum(self.severity_counts)


def _top(counter: Counter, n: int) -> tuple[tuple[str, int], ...]:
    return tuple(sorted(counter.items(), key=lambda kv: (-kv[1], kv[0]))[:n])


def _row_key(row: ReportRow):
    return (row.time, row.event_id)


def assemble_report(case_id, analysis_id, events, assignments, labels, error_report=None,
                    top_n: int = DEFAULT_TOP_N, generated_at=None) -> AttackReport:
    """Build a report from events and their cluster assignments."""
    sev_of = severity_by_cluster(labels)
    sections = {s: [] for s in SEVERITY_ORDER}
    sources, targets = Counter(), Counter()
    for ev, cluster in zip(events, assignments, strict=True):
        sections[sev_of[cluster]].append(
            ReportRow(ev.event_id, ev.timestamp, ev.src_addr, ev.dst_addr, ev.d_port, ev.protocol.value)
        )
        sources[ev.src_addr] += 1
        targets[ev.dst_addr] += 1
    return AttackReport(
        case_id=case_id,
        analysis_id=analysis_id,
        generated_at=generated_at or utc_now(),
        severity_sections={s: tuple(sorted(rows, key=_row_key, reverse=True)) for s, rows in sections.items()},
        top_sources=_top(sources, top_n),
        top_targets=_top(targets, top_n),
        error_report=error_report,
    )


def build_attack_report(store: EvidenceStore, case_id: str, analysis_id: str,
                        top_n: int = DEFAULT_TOP_N, generated_at=None) -> AttackReport:
    record = store.load_analysis(case_id, analysis_id)
    by_id = {e.event_id: e for e in store.load_events(case_id)}
    events = [by_id[i] for i in record.event_ids]
    return assemble_report(case_id, analysis_id, events, record.result.assignments, record.labels,
                           record.error_report, top_n, generated_at)


# -- rendering --------------------------------------------------------------

_COLUMNS = (("Time", 19), ("Source Address", 15), ("Dest. Address", 15), ("Protocol", 8), ("Port", 5))


def report_to_dict(report: AttackReport) -> dict:
    return {
        "case_id": report.case_id,
        "analysis_id": report.analysis_id,
        "generated_at": report.generated_at.isoformat(),
        "severity_counts": {s.value: n for s, n in zip(SEVERITY_ORDER, report.severity_counts)},
        "severity_sections": {
            s.value: [
                {
                    "event_id": r.event_id,
                    "time": r.time.strftime(TIMESTAMP_FORMAT),
                    "src_addr": r.src_addr,
                    "dst_addr": r.dst_addr,
                    "d_port": r.d_port,
                    "protocol": r.protocol,
                }
                for r in report.severity_sections.get(s, ())
            ]
            for s in SEVERITY_ORDER
        },
        "top_sources": [[a, n] for a, n in report.top_sources],
        "top_targets": [[a, n] for a, n in report.top_targets],
        "error_report": report.error_report.to_dict() if report.error_report else None,
    }


def report_from_dict(d: dict) -> AttackReport:
    sections = {
        Severity(name): tuple(
            ReportRow(r["event_id"], datetime.strptime(r["time"], TIMESTAMP_FORMAT), r["src_addr"],
                      r["dst_addr"], r["d_port"], r["protocol"])
            for r in rows
        )
        for name, rows in d["severity_sections"].items()
    }
    return AttackReport(
        case_id=d["case_id"],
        analysis_id=d["analysis_id"],
        generated_at=datetime.fromisoformat(d["generated_at"]),
        severity_sections=sections,
        top_sources=tuple((a, n) for a, n in d["top_sources"]),
        top_targets=tuple((a, n) for a, n in d["top_targets"]),
        error_report=ErrorReport.from_dict(d["error_report"]) if d["error_report"] else None,
    )


def _table(rows) -> list[str]:
    header = "  ".join(name.ljust(width) for name, width in _COLUMNS).rstrip()
    lines = [header, "  ".join("-" * width for _, width in _COLUMNS)]
    for r in rows:
        cells = (r.time.strftime(TIMESTAMP_FORMAT), r.src_addr, r.dst_addr, r.protocol, str(r.d_port))
        lines.append("  ".join(c.ljust(w) for c, (_, w) in zip(cells, _COLUMNS)).rstrip())
    return lines


def render_text(report: AttackReport) -> str:
    out = [
        f"NFAT attack report: case {report.case_id}, analysis {report.analysis_id}",
        f"Generated: {report.generated_at.isoformat()}",
        f"Events: {report.total_events}  "
        + "  ".join(f"{s.value}={n}" for s, n in zip(SEVERITY_ORDER, report.severity_counts)),
    ]
    if report.error_report is not None:
        er = report.error_report
        out.append(f"Criteria error: {er.mismatches}/{er.total} = {er.error_rate:.4f}")
    for sev in SEVERITY_ORDER:
        rows = report.severity_sections.get(sev, ())
        out += ["", f"== {sev.value} ({len(rows)}) =="]
        out += _table(rows)
    for title, pairs in (("Top sources", report.top_sources), ("Top targets", report.top_targets)):
        out += ["", f"== {title} =="]
        out += [f"{addr:<15}  {n}" for addr, n in pairs] or ["(none)"]
    return "\n".join(out) + "\n"


def render(report: AttackReport, fmt: str = "text") -> bytes:
    if fmt == "json":
        return canonical_json(report_to_dict(report))
    if fmt == "text":
        return render_text(report).encode("utf-8")
    raise ValueError(f"unknown report format {fmt!r}")


def parse_json_report(data: bytes | str) -> AttackReport:
    return report_from_dict(json.loads(data))
