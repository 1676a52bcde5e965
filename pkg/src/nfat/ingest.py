"""Parsing of network event logs into validated :class:`LogEvent` records.

Input is a headed CSV with eight fixed columns::

    event_id,timestamp,src_addr,dst_addr,protocol,d_port,ip_len,tcp_flags
    2204,2011-04-04 00:10:22,117.206.82.219,203.190.115.150,TCP,445,412,24
"""

from __future__ import annotations

import ipaddress
from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum
from pathlib import Path

from .errors import (
    BadAddress,
    BadTimestamp,
    DuplicateEvent,
    FieldOutOfRange,
    IngestError,
    MalformedLine,
    UnknownProtocol,
)

CSV_COLUMNS = ("event_id", "timestamp", "src_addr", "dst_addr", "protocol", "d_port", "ip_len", "tcp_flags")
CSV_HEADER = ",".join(CSV_COLUMNS)
TIMESTAMP_FORMAT = "%Y-%m-%d %H:%M:%S"


class Protocol(str, Enum):
    TCP = "TCP"
    UDP = "UDP"


@dataclass(frozen=True, order=True)
class LogEvent:
    event_id: int
    timestamp: datetime
    src_addr: str
    dst_addr: str
    protocol: Protocol
    d_port: int
    ip_len: int
    tcp_flags: int = 0

    def __post_init__(self):
        if self.event_id < 1:
            raise FieldOutOfRange(f"event_id must be positive, got {self.event_id}")
        if not 0 <= self.d_port <= 65535:
            raise FieldOutOfRange(f"d_port {self.d_port} outside [0, 65535]")
        if self.ip_len < 0:
            raise FieldOutOfRange(f"ip_len {self.ip_len} is negative")
        if not 0 <= self.tcp_flags <= 255:
            raise FieldOutOfRange(f"tcp_flags {self.tcp_flags} outside [0, 255]")
        if self.protocol is Protocol.UDP and self.tcp_flags != 0:
            raise FieldOutOfRange("UDP events carry tcp_flags = 0")
        if self.timestamp.microsecond or self.timestamp.tzinfo is not None:
            raise BadTimestamp("timestamps are naive with whole-second precision")

    def to_csv_line(self) -> str:
        return ",".join(
            (
                str(self.event_id),
                self.timestamp.strftime(TIMESTAMP_FORMAT),
                self.src_addr,
                self.dst_addr,
                self.protocol.value,
                str(self.d_port),
                str(self.ip_len),
                str(self.tcp_flags),
            )
        )


def _int_field(name: str, text: str, line_no: int | None) -> int:
    # int() alone would accept " 12", "+12" and "1_000"
    if not text.isdigit() or not text.isascii():
        raise MalformedLine(f"{name} must be a non-negative integer, got {text!r}", line_no)
    return int(text)


def _ipv4(name: str, text: str, line_no: int | None) -> str:
    try:
        return str(ipaddress.IPv4Address(text))
    except ipaddress.AddressValueError:
        raise BadAddress(f"{name} is not an IPv4 address: {text!r}", line_no) from None


def parse_event_line(line: str, line_no: int | None = None) -> LogEvent:
    """Parse one data row. UDP rows are stored with ``tcp_flags = 0``."""
    parts = line.rstrip("\r\n").split(",")
    if len(parts) != len(CSV_COLUMNS):
        raise MalformedLine(f"expected {len(CSV_COLUMNS)} fields, got {len(parts) if line.strip() else 0}", line_no)
    raw_id, raw_ts, src, dst, raw_proto, raw_port, raw_len, raw_flags = (p.strip() for p in parts)

    event_id = _int_field("event_id", raw_id, line_no)
    try:
        timestamp = datetime.strptime(raw_ts, TIMESTAMP_FORMAT)
    except ValueError:
        raise BadTimestamp(f"timestamp must be YYYY-MM-DD HH:MM:SS, got {raw_ts!r}", line_no) from None
    try:
        protocol = Protocol(raw_proto.upper())
    except ValueError:
        raise UnknownProtocol(f"protocol must be TCP or UDP, got {raw_proto!r}", line_no) from None
    d_port = _int_field("d_port", raw_port, line_no)
    ip_len = _int_field("ip_len", raw_len, line_no)
    tcp_flags = _int_field("tcp_flags", raw_flags, line_no)
    if protocol is Protocol.UDP:
        tcp_flags = 0

    try:
        return LogEvent(
            event_id=event_id,
            timestamp=timestamp,
            src_addr=_ipv4("src_addr", src, line_no),
            dst_addr=_ipv4("dst_addr", dst, line_no),
            protocol=protocol,
            d_port=d_port,
            ip_len=ip_len,
            tcp_flags=tcp_flags,
        )
    except IngestError as exc:
        if exc.line_no is None and line_no is not None:
            raise type(exc)(str(exc), line_no) from None
        raise


def parse_lines(lines):
    """Yield ``(line_no, LogEvent | IngestError)`` for each data line.

    A leading header row is skipped. Line numbers are 1-based file lines.
    """
    for line_no, line in enumerate(lines, start=1):
        text = line.rstrip("\r\n")
        if line_no == 1 and text.lstrip("﻿").strip() == CSV_HEADER:
            continue
        try:
            yield line_no, parse_event_line(text, line_no)
        except IngestError as exc:
            yield line_no, exc


@dataclass
class IngestSummary:
    accepted: int = 0
    rejected: int = 0
    errors: list[tuple[int, str]] = field(default_factory=list)

    @property
    def total(self) -> int:
        return self.accepted + self.rejected


def ingest_file(store, path, case_id: str) -> IngestSummary:
    """Parse ``path`` and append every accepted event to the case.

    Rejected lines are listed in the summary with their error. Event ids
    already present in the case, or repeated within the file, are rejected
    as :class:`DuplicateEvent`.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such input file: {path}")
    summary = IngestSummary()
    with store.writer(case_id):
        seen = {e.event_id for e in store.load_events(case_id)}
        accepted = []
        with path.open(encoding="utf-8", newline="") as fh:
            for line_no, item in parse_lines(fh):
                if isinstance(item, LogEvent) and item.event_id in seen:
                    item = DuplicateEvent(f"event_id {item.event_id} already present in case", line_no)
                if isinstance(item, IngestError):
                    summary.rejected += 1
                    summary.errors.append((line_no, f"{type(item).__name__}: {item}"))
                    continue
                seen.add(item.event_id)
                accepted.append(item)
        store.append_events(case_id, accepted)
    summary.accepted = len(accepted)
    return summary
