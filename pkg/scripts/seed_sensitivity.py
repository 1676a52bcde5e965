"""How much do the K-means partitions and severity labels move with the seed?

Runs single-start and best-of-N clustering on a fixture for a range of seeds
and tabulates total SSE, severity split and criteria error rate.

    python scripts/seed_sensitivity.py --input data/fig12_tcp.csv --seeds 20
"""

import argparse
from collections import Counter
from pathlib import Path

import numpy as np

from nfat.clustering import KMeansConfig, run_kmeans, run_restarts
from nfat.criteria import compute_error
from nfat.features import to_feature_vector
from nfat.ingest import LogEvent, parse_lines
from nfat.labeling import label_clusters, severity_by_cluster
from nfat.severity import SEVERITY_ORDER

ROOT = Path(__file__).resolve().parent.parent


def load(path):
    with open(path, encoding="utf-8") as fh:
        return [ev for _, ev in parse_lines(fh) if isinstance(ev, LogEvent)]


def summarise(events, result):
    labels = label_clusters(result)
    sev = severity_by_cluster(labels)
    counts = Counter(sev[a] for a in result.assignments)
    err = compute_error(events, result.assignments, labels)
    return [counts[s] for s in SEVERITY_ORDER], err.error_rate


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--input", type=Path, default=ROOT / "data" / "fig11_events.csv")
    ap.add_argument("--seeds", type=int, default=20)
    ap.add_argument("--restarts", type=int, default=10)
    args = ap.parse_args()

    events = load(args.input)
    vectors = [to_feature_vector(e) for e in events]
    print(f"{len(events)} events from {args.input.name}")
    print(f"{'seed':>4}  {'single SSE':>12}  {'split':>10}  {'err':>5}   {'best SSE':>12}  {'split':>10}  {'err':>5}")
    splits = Counter()
    for seed in range(args.seeds):
        single = run_kmeans(vectors, 3, np.random.default_rng(seed))
        best = run_restarts(vectors, KMeansConfig(seed=seed, n_restarts=args.restarts))
        s_counts, s_err = summarise(events, single)
        b_counts, b_err = summarise(events, best)
        splits[tuple(s_counts)] += 1
        print(f"{seed:>4}  {single.total_sse:>12.2f}  {'/'.join(map(str, s_counts)):>10}  {s_err:>5.2f}   "
              f"{best.total_sse:>12.2f}  {'/'.join(map(str, b_counts)):>10}  {b_err:>5.2f}")
    print("\nsingle-start D/R/N splits seen:", dict(splits))


if __name__ == "__main__":
    main()
