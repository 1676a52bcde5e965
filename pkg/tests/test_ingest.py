from datetime import datetime

import pytest
from hypothesis import given, strategies as st

from nfat.errors import (
    BadAddress,
    BadTimestamp,
    CaseNotFound,
    DuplicateEvent,
    FieldOutOfRange,
    MalformedLine,
    UnknownProtocol,
)
from nfat.ingest import CSV_HEADER, LogEvent, Protocol, ingest_file, parse_event_line, parse_lines

from conftest import FIG11, FIG12, FIG13


def test_parse_fig11_row1():
    ev = parse_event_line("2204,2011-04-04 00:10:22,117.206.82.219,203.190.115.150,TCP,445,412,24", 2)
    assert ev == LogEvent(2204, datetime(2011, 4, 4, 0, 10, 22), "117.206.82.219", "203.190.115.150",
                          Protocol.TCP, 445, 412, 24)


def test_parse_udp_row():
    ev = parse_event_line("7,2011-04-03 03:35:02,203.190.115.150,203.190.112.1,UDP,53,0,0")
    assert ev.protocol is Protocol.UDP
    assert ev.d_port == 53
    assert ev.tcp_flags == 0


def test_udp_flags_forced_to_zero():
    ev = parse_event_line("7,2011-04-03 03:35:02,203.190.115.150,203.190.112.1,UDP,53,60,24")
    assert ev.tcp_flags == 0


@pytest.mark.parametrize(
    "line, exc",
    [
        ("", MalformedLine),
        ("1,2,3", MalformedLine),
        ("1,2011-01-01 00:00:00,1.2.3.4,5.6.7.8,TCP,99999,40,16", FieldOutOfRange),
        ("1,2011-01-01 00:00:00,1.2.3.4,5.6.7.8,TCP,80,40,256", FieldOutOfRange),
        ("0,2011-01-01 00:00:00,1.2.3.4,5.6.7.8,TCP,80,40,16", FieldOutOfRange),
        ("1,2011-01-01 00:00:00,1.2.3.4,5.6.7.8,ICMP,80,40,16", UnknownProtocol),
        ("1,2011-01-01T00:00:00,1.2.3.4,5.6.7.8,TCP,80,40,16", BadTimestamp),
        ("1,2011-02-30 00:00:00,1.2.3.4,5.6.7.8,TCP,80,40,16", BadTimestamp),
        ("1,2011-01-01 00:00:00,1.2.3,5.6.7.8,TCP,80,40,16", BadAddress),
        ("1,2011-01-01 00:00:00,1.2.3.4,5.6.7.8.80,TCP,80,40,16", BadAddress),
        ("1,2011-01-01 00:00:00,1.2.3.4,5.6.7.8,TCP,-1,40,16", MalformedLine),
        ("x,2011-01-01 00:00:00,1.2.3.4,5.6.7.8,TCP,80,40,16", MalformedLine),
    ],
)
def test_parse_errors(line, exc):
    with pytest.raises(exc):
        parse_event_line(line, 5)


def test_error_carries_line_number():
    with pytest.raises(FieldOutOfRange) as info:
        parse_event_line("1,2011-01-01 00:00:00,1.2.3.4,5.6.7.8,TCP,99999,40,16", 9)
    assert info.value.line_no == 9
    assert "line 9" in str(info.value)


events = st.builds(
    lambda eid, ts, src, dst, proto, port, ip_len, flags: LogEvent(
        eid, ts, src, dst, proto, port, ip_len, flags if proto is Protocol.TCP else 0
    ),
    st.integers(1, 10**9),
    st.datetimes(min_value=datetime(1970, 1, 1), max_value=datetime(2100, 1, 1)).map(
        lambda d: d.replace(microsecond=0)
    ),
    st.ip_addresses(v=4).map(str),
    st.ip_addresses(v=4).map(str),
    st.sampled_from(Protocol),
    st.integers(0, 65535),
    st.integers(0, 65535),
    st.integers(0, 255),
)


@given(events)
def test_round_trip_through_canonical_csv(ev):
    assert parse_event_line(ev.to_csv_line()) == ev


@given(st.lists(st.one_of(events.map(LogEvent.to_csv_line), st.text(max_size=40).filter(lambda s: "\n" not in s and "\r" not in s)), max_size=30))
def test_rejection_is_line_local(lines):
    # every valid rendered line parses regardless of its neighbours
    results = list(parse_lines([CSV_HEADER, *lines]))
    assert len(results) == len(lines)
    for (_, item), line in zip(results, lines):
        try:
            expected = parse_event_line(line)
        except Exception as exc:  # noqa: BLE001
            assert type(item) is type(exc)
        else:
            assert item == expected


def test_ingest_fig11(store, demo_case):
    summary = ingest_file(store, FIG11, demo_case)
    assert (summary.accepted, summary.rejected) == (15, 0)
    assert len(store.load_events(demo_case)) == 15


def test_ingest_header_only(store, demo_case, tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text(CSV_HEADER + "\n")
    summary = ingest_file(store, path, demo_case)
    assert (summary.accepted, summary.rejected) == (0, 0)


def test_ingest_with_corrupted_row(store, demo_case, tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text(FIG11.read_text() + "2189,2011-04-03,TCP\n")
    summary = ingest_file(store, path, demo_case)
    assert (summary.accepted, summary.rejected) == (15, 1)
    assert summary.errors[0][0] == 17
    assert "MalformedLine" in summary.errors[0][1]


def test_ingest_counts_add_up(store, demo_case, tmp_path):
    lines = FIG12.read_text().splitlines()
    lines.insert(5, "")
    lines.insert(9, "3028,2011-04-04 00:10:22,1.1.1.1,2.2.2.2,TCP,80,40,16")  # duplicate id
    path = tmp_path / "mixed.csv"
    path.write_text("\n".join(lines) + "\n")
    summary = ingest_file(store, path, demo_case)
    assert summary.accepted + summary.rejected == len(lines) - 1
    assert summary.rejected == 2
    assert any("DuplicateEvent" in err for _, err in summary.errors)


def test_duplicate_ids_across_ingests(store, demo_case):
    ingest_file(store, FIG13, demo_case)
    again = ingest_file(store, FIG13, demo_case)
    assert again.accepted == 0
    assert again.rejected == 17
    assert len(store.load_events(demo_case)) == 17


def test_ingest_errors(store, demo_case, tmp_path):
    with pytest.raises(FileNotFoundError):
        ingest_file(store, tmp_path / "missing.csv", demo_case)
    with pytest.raises(CaseNotFound):
        ingest_file(store, FIG11, "nope")
