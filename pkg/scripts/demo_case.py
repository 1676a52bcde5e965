"""Walk one case through the whole workflow in a throwaway store and print
the text report: create case, ingest the TCP and UDP fixtures, analyse,
report.

    python scripts/demo_case.py [--seed 42] [--store DIR]
"""

import argparse
import tempfile
from pathlib import Path

from nfat.clustering import KMeansConfig
from nfat.ingest import ingest_file
from nfat.pipeline import format_counts, run_pipeline
from nfat.report import build_attack_report, render
from nfat.store import EvidenceStore

DATA = Path(__file__).resolve().parent.parent / "data"


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--store", type=Path)
    args = ap.parse_args()

    root = args.store or Path(tempfile.mkdtemp(prefix="nfat-demo-"))
    store = EvidenceStore(root)
    store.create_case("demo", "campus network incident", "demo investigator")
    for name in ("fig12_tcp.csv", "fig13_udp.csv"):
        s = ingest_file(store, DATA / name, "demo")
        print(f"ingest {name}: accepted={s.accepted} rejected={s.rejected}")
    run = run_pipeline(store, "demo", KMeansConfig(seed=args.seed))
    print(f"{run.analysis_id}: {format_counts(run.severity_counts)} criteria_error={run.error_rate:.3f}")
    print()
    print(render(build_attack_report(store, "demo", run.analysis_id), "text").decode())
    print(f"store left at {root}")


if __name__ == "__main__":
    main()
