"""Rule-based severity criteria (protocol, destination port, TCP flags).

The built-in table:

=====  ===============  ==============================  ============
proto  severity         ports                           tcp flags
=====  ===============  ==============================  ============
TCP    Dangerous        80, 8080, 443, 20, 21, 22, 23   16, 32
TCP    RatherDangerous  161, 143, 162, 110, 993         20..24
TCP    NotDangerous     any other port                  20..27
UDP    Dangerous        53                              any
UDP    RatherDangerous  137, 161                        any
UDP    NotDangerous     any other port                  any
=====  ===============  ==============================  ============

Rules are tried most-severe first and the first match wins. An event that
matches nothing (e.g. TCP/80 with flags 24) is NotDangerous.
"""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass
from pathlib import Path

from .errors import LengthMismatch, RulesFileError
from .ingest import LogEvent, Protocol
from .severity import SEVERITY_ORDER, Severity

DEFAULT_SEVERITY = Severity.NOT_DANGEROUS


@dataclass(frozen=True)
class CriteriaRule:
    protocol: Protocol
    severity: Severity
    ports: frozenset[int] | None  # None: every port not named by another rule of this protocol
    flags: frozenset[int] | None  # None: any flag value

    def matches(self, event: LogEvent, named_ports: frozenset[int]) -> bool:
        if event.protocol is not self.protocol:
            return False
        if self.ports is None:
            if event.d_port in named_ports:
                return False
        elif event.d_port not in self.ports:
            return False
        return self.flags is None or event.tcp_flags in self.flags


class RuleTable:
    """An ordered, total classifier built from :class:`CriteriaRule` rows."""

    def __init__(self, rules):
        rules = list(rules)
        # stable sort keeps file order within one severity
        self.rules = tuple(sorted(rules, key=lambda r: r.severity.rank))
        self._named = {
            proto: frozenset().union(*(r.ports for r in self.rules if r.protocol is proto and r.ports is not None))
            for proto in Protocol
        }
        self._by_protocol = {proto: tuple(r for r in self.rules if r.protocol is proto) for proto in Protocol}

    def classify(self, event: LogEvent) -> Severity:
        named = self._named[event.protocol]
        for rule in self._by_protocol[event.protocol]:
            if rule.matches(event, named):
                return rule.severity
        return DEFAULT_SEVERITY

    def __iter__(self):
        return iter(self.rules)

    def __len__(self):
        return len(self.rules)


def _r(proto, sev, ports, flags):
    return CriteriaRule(proto, sev, None if ports is None else frozenset(ports), None if flags is None else frozenset(flags))


DEFAULT_RULES = RuleTable(
    [
        _r(Protocol.TCP, Severity.DANGEROUS, (80, 8080, 443, 20, 21, 22, 23), (16, 32)),
        _r(Protocol.TCP, Severity.RATHER_DANGEROUS, (161, 143, 162, 110, 993), range(20, 25)),
        _r(Protocol.TCP, Severity.NOT_DANGEROUS, None, range(20, 28)),
        _r(Protocol.UDP, Severity.DANGEROUS, (53,), None),
        _r(Protocol.UDP, Severity.RATHER_DANGEROUS, (137, 161), None),
        _r(Protocol.UDP, Severity.NOT_DANGEROUS, None, None),
    ]
)


def classify_event(event: LogEvent, rules: RuleTable = DEFAULT_RULES) -> Severity:
    return rules.classify(event)


# -- rules file -------------------------------------------------------------

_ANY = {"", "-", "*", "any"}
_COMPLEMENT = {"*", "other", "others", "rest", "complement"}


def _parse_severity(text: str) -> Severity:
    key = re.sub(r"[\s_-]+", "", text.lower()).removesuffix("attack")
    for sev in Severity:
        if sev.value.lower() == key:
            return sev
    raise RulesFileError(f"unknown severity {text!r}")


def _parse_int_set(text: str, upper: int, what: str) -> frozenset[int]:
    values = set()
    for token in re.split(r"[,;\s]+", text.strip()):
        if not token:
            continue
        m = re.fullmatch(r"(\d+)(?:-(\d+))?", token)
        if not m:
            raise RulesFileError(f"bad {what} token {token!r}")
        lo = int(m.group(1))
        hi = int(m.group(2) or lo)
        if lo > hi or hi > upper:
            raise RulesFileError(f"{what} range {token!r} outside [0, {upper}]")
        values.update(range(lo, hi + 1))
    if not values:
        raise RulesFileError(f"empty {what} set")
    return frozenset(values)


def load_rules(path) -> RuleTable:
    """Read a rules CSV with columns ``protocol,severity,ports,flags``.

    Ports and flags are lists of integers or inclusive ``lo-hi`` ranges,
    separated by commas, semicolons or spaces (quote the field if it
    contains commas). ``*`` in the ports column means "every other port";
    ``-``, ``*`` or ``any`` in the flags column means any flag value.
    """
    rules = []
    with Path(path).open(encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        missing = {"protocol", "severity", "ports", "flags"} - set(reader.fieldnames or ())
        if missing:
            raise RulesFileError(f"rules file missing columns: {sorted(missing)}")
        for row in reader:
            try:
                proto = Protocol(row["protocol"].strip().upper())
            except ValueError:
                raise RulesFileError(f"unknown protocol {row['protocol']!r}") from None
            ports_text = row["ports"].strip().lower()
            flags_text = row["flags"].strip().lower()
            rules.append(
                CriteriaRule(
                    protocol=proto,
                    severity=_parse_severity(row["severity"]),
                    ports=None if ports_text in _COMPLEMENT else _parse_int_set(ports_text, 65535, "port"),
                    flags=None if flags_text in _ANY else _parse_int_set(flags_text, 255, "flag"),
                )
            )
    return RuleTable(rules)


# -- error against cluster labels -------------------------------------------

@dataclass(frozen=True)
class ErrorReport:
    """Disagreement between cluster-derived and criteria severities.

    ``confusion[i][j]`` counts events whose criteria severity is
    ``SEVERITY_ORDER[i]`` and whose cluster severity is ``SEVERITY_ORDER[j]``.
    """

    mismatches: int
    total: int
    error_rate: float
    confusion: tuple[tuple[int, int, int], ...]

    def to_dict(self) -> dict:
        return {
            "mismatches": self.mismatches,
            "total": self.total,
            "error_rate": self.error_rate,
            "confusion": [list(row) for row in self.confusion],
        }

    @classmethod
    def from_dict(cls, d: dict) -> ErrorReport:
        return cls(
            mismatches=int(d["mismatches"]),
            total=int(d["total"]),
            error_rate=float(d["error_rate"]),
            confusion=tuple(tuple(int(x) for x in row) for row in d["confusion"]),
        )


def compute_error(events, assignments, labels, rules: RuleTable = DEFAULT_RULES) -> ErrorReport:
    events = list(events)
    assignments = list(assignments)
    if len(events) != len(assignments):
        raise LengthMismatch(f"{len(events)} events but {len(assignments)} assignments")
    by_cluster = {lab.cluster_index: lab.severity for lab in labels}
    missing = set(assignments) - set(by_cluster)
    if missing:
        raise LengthMismatch(f"no severity label for clusters {sorted(missing)}")
    confusion = [[0, 0, 0] for _ in SEVERITY_ORDER]
    for event, cluster in zip(events, assignments):
        confusion[classify_event(event, rules).rank][by_cluster[cluster].rank] += 1
    total = len(events)
    mismatches = total - sum(confusion[i][i] for i in range(len(SEVERITY_ORDER)))
    return ErrorReport(
        mismatches=mismatches,
        total=total,
        error_rate=mismatches / total if total else 0.0,
        confusion=tuple(tuple(row) for row in confusion),
    )
