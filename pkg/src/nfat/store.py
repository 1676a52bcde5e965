"""File-backed evidence store.

Layout under the store root::

    <case_id>/
        manifest.json         case profile + integrity counters
        events.csv            canonical event CSV, append-only
        analyses/<id>.json    one immutable document per analysis
        .lock                 present while a writer holds the case

Every file is replaced atomically (write temp, fsync, rename), so readers
never take the lock and always see either the old or the new version.
Writers serialise on ``.lock`` (created with O_EXCL).
"""

from __future__ import annotations

import json
import os
import re
import tempfile
import threading
import time
from contextlib import contextmanager
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path

from .clustering import KMeansConfig, KMeansResult
from .criteria import ErrorReport
from .errors import (
    AnalysisNotFound,
    CaseNotFound,
    DuplicateAnalysis,
    DuplicateCase,
    InvalidIdentifier,
    InvalidRange,
    StoreLocked,
)
from .ingest import CSV_HEADER, LogEvent, Protocol, parse_event_line
from .labeling import SeverityLabel

STORE_ENV = "NFAT_STORE"
DEFAULT_STORE = ".nfat-store"
STORE_TIMEZONE = "UTC"
MANIFEST = "manifest.json"
EVENTS = "events.csv"
ANALYSES = "analyses"
LOCK = ".lock"

_ID_RE = re.compile(r"[A-Za-z0-9][A-Za-z0-9._-]{0,127}")


def utc_now() -> datetime:
    return datetime.now(timezone.utc).replace(microsecond=0)


def canonical_json(obj) -> bytes:
    return (json.dumps(obj, indent=2, ensure_ascii=False, allow_nan=False) + "\n").encode("utf-8")


def atomic_write(path: Path, data: bytes) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def check_identifier(value: str, what: str = "case_id") -> str:
    if not isinstance(value, str) or not _ID_RE.fullmatch(value):
        raise InvalidIdentifier(
            f"invalid {what} {value!r}: use 1-128 of [A-Za-z0-9._-], starting with a letter or digit"
        )
    return value


@dataclass(frozen=True)
class CaseRecord:
    case_id: str
    title: str
    investigator: str
    opened_at: datetime
    profile_notes: str = ""

    def to_dict(self) -> dict:
        return {
            "case_id": self.case_id,
            "title": self.title,
            "investigator": self.investigator,
            "opened_at": self.opened_at.isoformat(),
            "profile_notes": self.profile_notes,
        }

    @classmethod
    def from_dict(cls, d: dict) -> CaseRecord:
        return cls(d["case_id"], d["title"], d["investigator"], datetime.fromisoformat(d["opened_at"]), d["profile_notes"])


@dataclass(frozen=True)
class AnalysisRecord:
    case_id: str
    config: KMeansConfig
    result: KMeansResult
    labels: tuple[SeverityLabel, ...]
    error_report: ErrorReport
    event_ids: tuple[int, ...]  # row order of result.assignments
    created_at: datetime = field(default_factory=utc_now)
    analysis_id: str = ""

    def to_dict(self) -> dict:
        return {
            "analysis_id": self.analysis_id,
            "case_id": self.case_id,
            "created_at": self.created_at.isoformat(),
            "config": self.config.to_dict(),
            "event_ids": list(self.event_ids),
            "result": self.result.to_dict(),
            "labels": [lab.to_dict() for lab in self.labels],
            "error_report": self.error_report.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> AnalysisRecord:
        return cls(
            analysis_id=d["analysis_id"],
            case_id=d["case_id"],
            created_at=datetime.fromisoformat(d["created_at"]),
            config=KMeansConfig.from_dict(d["config"]),
            event_ids=tuple(int(x) for x in d["event_ids"]),
            result=KMeansResult.from_dict(d["result"]),
            labels=tuple(SeverityLabel.from_dict(x) for x in d["labels"]),
            error_report=ErrorReport.from_dict(d["error_report"]),
        )

    def encode(self) -> bytes:
        return canonical_json(self.to_dict())


class EvidenceStore:
    def __init__(self, root, lock_timeout: float = 5.0):
        self.root = Path(root)
        self.lock_timeout = lock_timeout
        self._held: dict[str, tuple[int, int]] = {}  # case_id -> (thread id, depth)
        self._held_guard = threading.Lock()

    @classmethod
    def from_env(cls, override=None) -> EvidenceStore:
        return cls(override or os.environ.get(STORE_ENV) or DEFAULT_STORE)

    # -- paths ---------------------------------------------------------------

    def case_dir(self, case_id: str) -> Path:
        return self.root / check_identifier(case_id)

    def _existing_case_dir(self, case_id: str) -> Path:
        d = self.case_dir(case_id)
        if not (d / MANIFEST).is_file():
            raise CaseNotFound(f"case {case_id!r} not found in {self.root}")
        return d

    # -- locking -------------------------------------------------------------

    @contextmanager
    def writer(self, case_id: str):
        """Hold the single-writer lock for a case (re-entrant per thread)."""
        case_dir = self._existing_case_dir(case_id)
        me = threading.get_ident()
        with self._held_guard:
            owner = self._held.get(case_id)
            if owner and owner[0] == me:
                self._held[case_id] = (me, owner[1] + 1)
                nested = True
            else:
                nested = False
        if nested:
            try:
                yield
            finally:
                with self._held_guard:
                    tid, depth = self._held[case_id]
                    self._held[case_id] = (tid, depth - 1)
            return

        lock_path = case_dir / LOCK
        deadline = time.monotonic() + self.lock_timeout
        delay = 0.005
        while True:
            try:
                fd = os.open(lock_path, os.O_CREAT | os.O_EXCL | os.O_WRONLY, 0o644)
                break
            except FileExistsError:
                if time.monotonic() >= deadline:
                    raise StoreLocked(f"case {case_id!r} is locked by another writer ({lock_path})") from None
                time.sleep(delay)
                delay = min(delay * 2, 0.1)
        try:
            os.write(fd, f"{os.getpid()}\n".encode())
        finally:
            os.close(fd)
        with self._held_guard:
            self._held[case_id] = (me, 1)
        try:
            yield
        finally:
            with self._held_guard:
                del self._held[case_id]
            lock_path.unlink(missing_ok=True)

    # -- cases ---------------------------------------------------------------

    def create_case(self, case_id: str, title: str, investigator: str, profile_notes: str = "", opened_at=None) -> str:
        d = self.case_dir(case_id)
        self.root.mkdir(parents=True, exist_ok=True)
        try:
            d.mkdir()
        except FileExistsError:
            raise DuplicateCase(f"case {case_id!r} already exists") from None
        (d / ANALYSES).mkdir()
        record = CaseRecord(case_id, title, investigator, opened_at or utc_now(), profile_notes)
        atomic_write(d / EVENTS, (CSV_HEADER + "\n").encode("utf-8"))
        self._write_manifest(d, record, event_count=0)
        return case_id

    def _write_manifest(self, case_dir: Path, record: CaseRecord, event_count: int) -> None:
        events_path = case_dir / EVENTS
        manifest = record.to_dict()
        manifest["timezone"] = STORE_TIMEZONE
        manifest["event_count"] = event_count
        manifest["events_bytes"] = events_path.stat().st_size
        manifest["analysis_count"] = len(list((case_dir / ANALYSES).glob("*.json")))
        atomic_write(case_dir / MANIFEST, canonical_json(manifest))

    def read_manifest(self, case_id: str) -> dict:
        return json.loads((self._existing_case_dir(case_id) / MANIFEST).read_bytes())

    def get_case(self, case_id: str) -> CaseRecord:
        return CaseRecord.from_dict(self.read_manifest(case_id))

    def list_cases(self) -> list[str]:
        if not self.root.is_dir():
            return []
        return sorted(p.parent.name for p in self.root.glob(f"*/{MANIFEST}"))

    def update_profile_notes(self, case_id: str, notes: str) -> None:
        with self.writer(case_id):
            manifest = self.read_manifest(case_id)
            record = replace(CaseRecord.from_dict(manifest), profile_notes=notes)
            self._write_manifest(self.case_dir(case_id), record, manifest["event_count"])

    # -- events --------------------------------------------------------------

    def load_events(self, case_id: str) -> list[LogEvent]:
        """All events of a case in ingest order (one consistent snapshot)."""
        raw = (self._existing_case_dir(case_id) / EVENTS).read_text(encoding="utf-8")
        lines = raw.splitlines()
        return [parse_event_line(line, n) for n, line in enumerate(lines[1:], start=2)]

    def append_events(self, case_id: str, events) -> int:
        events = list(events)
        with self.writer(case_id):
            d = self.case_dir(case_id)
            manifest = self.read_manifest(case_id)
            if events:
                current = (d / EVENTS).read_bytes()
                added = "".join(e.to_csv_line() + "\n" for e in events).encode("utf-8")
                atomic_write(d / EVENTS, current + added)
            self._write_manifest(d, CaseRecord.from_dict(manifest), manifest["event_count"] + len(events))
        return len(events)

    def query_events(self, case_id: str, time_from=None, time_to=None, protocol=None) -> list[LogEvent]:
        """Events with ``time_from <= timestamp <= time_to``, newest first.

        Either bound may be None (open). Equal timestamps order by event_id,
        highest first.
        """
        if time_from is not None and time_to is not None and time_from > time_to:
            raise InvalidRange(f"time_from {time_from} is after time_to {time_to}")
        proto = Protocol(protocol.upper() if isinstance(protocol, str) else protocol) if protocol else None
        hits = [
            e
            for e in self.load_events(case_id)
            if (time_from is None or e.timestamp >= time_from)
            and (time_to is None or e.timestamp <= time_to)
            and (proto is None or e.protocol is proto)
        ]
        hits.sort(key=lambda e: (e.timestamp, e.event_id), reverse=True)
        return hits

    # -- analyses ------------------------------------------------------------

    def list_analyses(self, case_id: str) -> list[str]:
        d = self._existing_case_dir(case_id) / ANALYSES
        return sorted(p.stem for p in d.glob("*.json"))

    def next_analysis_id(self, case_id: str) -> str:
        taken = self.list_analyses(case_id)
        n = len(taken) + 1
        while f"an-{n:04d}" in taken:
            n += 1
        return f"an-{n:04d}"

    def store_analysis(self, record: AnalysisRecord) -> str:
        """Persist an analysis; allocates an id when ``record.analysis_id`` is empty."""
        with self.writer(record.case_id):
            d = self.case_dir(record.case_id)
            if not record.analysis_id:
                record = replace(record, analysis_id=self.next_analysis_id(record.case_id))
            check_identifier(record.analysis_id, "analysis_id")
            path = d / ANALYSES / f"{record.analysis_id}.json"
            if path.exists():
                raise DuplicateAnalysis(f"analysis {record.analysis_id!r} already stored for case {record.case_id!r}")
            atomic_write(path, record.encode())
            manifest = self.read_manifest(record.case_id)
            self._write_manifest(d, CaseRecord.from_dict(manifest), manifest["event_count"])
        return record.analysis_id

    def analysis_bytes(self, case_id: str, analysis_id: str) -> bytes:
        d = self._existing_case_dir(case_id)
        check_identifier(analysis_id, "analysis_id")
        path = d / ANALYSES / f"{analysis_id}.json"
        try:
            return path.read_bytes()
        except FileNotFoundError:
            raise AnalysisNotFound(f"analysis {analysis_id!r} not found for case {case_id!r}") from None

    def load_analysis(self, case_id: str, analysis_id: str) -> AnalysisRecord:
        return AnalysisRecord.from_dict(json.loads(self.analysis_bytes(case_id, analysis_id)))

    # -- integrity -----------------------------------------------------------

    def verify_case(self, case_id: str) -> dict:
        """Compare manifest counters with the files on disk.

        Taken under the writer lock so the manifest and files agree.
        """
        with self.writer(case_id):
            manifest = self.read_manifest(case_id)
            d = self.case_dir(case_id)
            actual = {
                "event_count": len(self.load_events(case_id)),
                "events_bytes": (d / EVENTS).stat().st_size,
                "analysis_count": len(self.list_analyses(case_id)),
            }
        mismatched = {k: (manifest[k], v) for k, v in actual.items() if manifest[k] != v}
        return {"ok": not mismatched, "mismatched": mismatched, **actual}
