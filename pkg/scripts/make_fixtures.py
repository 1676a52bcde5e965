"""Regenerate the CSV fixtures in data/ from the printed figure listings.

The figures give either feature columns (event id, port, length, flags) or
listing columns (time, addresses), never both; the fig11 fixture borrows
time and source address from the TCP listing row-by-row.
"""

from pathlib import Path

HEADER = "event_id,timestamp,src_addr,dst_addr,protocol,d_port,ip_len,tcp_flags"
DATA = Path(__file__).resolve().parent.parent / "data"

# event_id, d_port, ip_len, tcp_flags
FIG11 = [
    (2204, 445, 412, 24), (2203, 445, 412, 24), (2202, 58592, 79, 24), (2201, 445, 412, 24),
    (2200, 445, 412, 24), (2199, 445, 412, 24), (2198, 445, 412, 24), (2197, 33336, 60, 18),
    (2196, 445, 412, 24), (2195, 445, 412, 24), (2194, 445, 412, 24), (2193, 445, 412, 24),
    (2192, 445, 414, 24), (2191, 445, 414, 24), (2190, 39878, 79, 24),
]

# time, source, destination "addr.port" (or addr + separate port)
FIG12 = """\
2011-04-04 00:10:22|117.206.82.219|203.190.115.150.445
2011-04-03 23:14:03|111.242.1.228|203.190.115.150.445
2011-04-03 22:55:48|175.111.91.162|203.190.115.150.80
2011-04-03 22:27:57|175.111.91.162|203.190.115.150.80
2011-04-03 22:27:57|175.111.91.162|203.190.115.150.80
2011-04-03 22:27:57|175.111.91.162|203.190.115.150.80
2011-04-03 22:27:57|175.111.91.162|203.190.115.150.80
2011-04-03 22:27:57|175.111.91.162|203.190.115.150.80
2011-04-03 22:27:57|175.111.91.162|203.190.115.150.80
2011-04-03 22:27:56|175.111.91.162|203.190.115.150.80
2011-04-03 22:27:56|175.111.91.162|203.190.115.150.80
2011-04-03 22:14:01|203.190.115.150.22|223.255.224.14.53480
2011-04-03 20:44:28|223.255.224.14|203.190.115.150.3306
2011-04-03 20:33:43|10.10.98.75|203.190.115.150.139
2011-04-03 20:24:34|223.255.224.14|203.190.115.150.22
2011-04-03 20:03:42|180.178.92.56|203.190.115.150.22
2011-04-03 20:03:01|180.178.92.56|203.190.115.150.22
2011-04-03 20:00:30|118.97.8.17|203.190.115.150.3306
2011-04-03 20:00:30|118.97.8.17|203.190.115.150.3306
2011-04-03 19:18:42|202.152.202.210|203.190.115.150.3306
2011-04-03 19:18:33|202.152.202.210|203.190.115.150.3306
2011-04-03 18:35:56|202.152.202.166|203.190.115.150.3306
2011-04-03 18:35:54|202.152.202.166|203.190.115.150.3306
2011-04-03 18:30:29|203.81.224.227|203.190.115.150.445
2011-04-03 18:12:48|118.97.8.17|203.190.115.150.22
2011-04-03 18:12:46|203.190.115.150.22|118.97.8.17.57693
2011-04-03 18:11:45|118.97.8.17|203.190.115.150.22
2011-04-03 18:11:43|203.190.115.150.22|118.97.8.17.57693"""

FIG13_TIMES = """\
2011-04-03 03:35:02 2011-04-03 03:27:01 2011-04-03 03:14:47 2011-04-03 03:01:36
2011-04-02 12:09:41 2011-04-02 12:07:40 2011-04-02 09:31:05 2011-04-01 10:19:23
2011-04-01 10:05:38 2011-04-01 09:53:33 2011-04-01 09:52:33 2011-04-01 09:39:30
2011-04-01 09:03:33 2011-04-01 08:52:13 2011-04-01 08:47:30 2011-03-28 18:43:09
2011-03-28 18:33:48"""

# lengths/flags are not printed in the listing; chosen per destination port
TCP_SHAPE = {80: (40, 16), 445: (412, 24), 22: (60, 16), 3306: (60, 24), 139: (48, 24)}
REPLY_SHAPE = (52, 24)


def split_addr(text):
    parts = text.split(".")
    addr = ".".join(parts[:4])
    port = int(parts[4]) if len(parts) > 4 else None
    return addr, port


def fig12_rows():
    rows = []
    for i, line in enumerate(FIG12.splitlines()):
        ts, src, dst = line.split("|")
        src_addr, _ = split_addr(src)
        dst_addr, port = split_addr(dst)
        ip_len, flags = TCP_SHAPE.get(port, REPLY_SHAPE)
        rows.append(f"{3028 - i},{ts},{src_addr},{dst_addr},TCP,{port},{ip_len},{flags}")
    return rows


def fig11_rows():
    listing = FIG12.splitlines()
    rows = []
    for (eid, port, ip_len, flags), line in zip(FIG11, listing):
        ts, src, _ = line.split("|")
        rows.append(f"{eid},{ts},{split_addr(src)[0]},203.190.115.150,TCP,{port},{ip_len},{flags}")
    return rows


def fig13_rows():
    tokens = FIG13_TIMES.split()
    times = [f"{d} {t}" for d, t in zip(tokens[::2], tokens[1::2])]
    return [f"{117 - i},{ts},203.190.115.150,203.190.112.1,UDP,53,0,0" for i, ts in enumerate(times)]


def write(name, rows):
    (DATA / name).write_text("\n".join([HEADER, *rows]) + "\n", encoding="utf-8")


if __name__ == "__main__":
    DATA.mkdir(exist_ok=True)
    write("fig11_events.csv", fig11_rows())
    write("fig12_tcp.csv", fig12_rows())
    write("fig13_udp.csv", fig13_rows())
    print("wrote", *sorted(p.name for p in DATA.glob("*.csv")))
