from pathlib import Path

import pytest

import nfat.pipeline as pipeline_mod
from nfat.clustering import KMeansConfig
from nfat.errors import CaseNotFound, StoreLocked, TooFewPoints, WrongClusterCount
from nfat.ingest import ingest_file
from nfat.pipeline import run_pipeline
from nfat.store import EvidenceStore

from conftest import FIG11, read_events


def test_fig11_seed42(store, demo_case):
    ingest_file(store, FIG11, demo_case)
    run = run_pipeline(store, demo_case, KMeansConfig(seed=42))
    assert run.input_event_count == 15
    assert sum(run.severity_counts) == 15
    rec = store.load_analysis(demo_case, run.analysis_id)
    assert len(rec.result.assignments) == 15 == len(store.load_events(demo_case))
    assert list(rec.event_ids) == [e.event_id for e in read_events(FIG11)]


def test_repeat_is_deterministic(store, demo_case):
    ingest_file(store, FIG11, demo_case)
    a = run_pipeline(store, demo_case, KMeansConfig(seed=42))
    b = run_pipeline(store, demo_case, KMeansConfig(seed=42))
    assert a.analysis_id != b.analysis_id
    ra = store.load_analysis(demo_case, a.analysis_id)
    rb = store.load_analysis(demo_case, b.analysis_id)
    assert ra.result == rb.result
    assert ra.labels == rb.labels
    assert ra.error_report == rb.error_report


def test_too_few_points(store, demo_case, tmp_path):
    path = tmp_path / "two.csv"
    path.write_text("\n".join(FIG11.read_text().splitlines()[:3]) + "\n")
    ingest_file(store, path, demo_case)
    with pytest.raises(TooFewPoints):
        run_pipeline(store, demo_case, KMeansConfig(seed=1))
    assert store.list_analyses(demo_case) == []


def test_k_must_be_three(store, demo_case):
    ingest_file(store, FIG11, demo_case)
    with pytest.raises(WrongClusterCount):
        run_pipeline(store, demo_case, KMeansConfig(k=4))


def test_unknown_case(store):
    with pytest.raises(CaseNotFound):
        run_pipeline(store, "ghost")


def test_failed_run_leaves_nothing(store, demo_case, monkeypatch):
    ingest_file(store, FIG11, demo_case)
    before = sorted(p.relative_to(store.root) for p in Path(store.root).rglob("*"))

    def boom(*args, **kwargs):
        raise RuntimeError("disk on fire")

    monkeypatch.setattr(pipeline_mod, "compute_error", boom)
    with pytest.raises(RuntimeError):
        run_pipeline(store, demo_case, KMeansConfig(seed=1))
    after = sorted(p.relative_to(store.root) for p in Path(store.root).rglob("*"))
    assert after == before
    assert store.list_analyses(demo_case) == []


def test_failed_write_leaves_nothing(store, demo_case, monkeypatch):
    import nfat.store as store_mod

    ingest_file(store, FIG11, demo_case)
    real_replace = store_mod.os.replace

    def failing_replace(src, dst):
        if str(dst).endswith(".json") and "analyses" in str(dst):
            raise OSError("rename failed")
        return real_replace(src, dst)

    monkeypatch.setattr(store_mod.os, "replace", failing_replace)
    with pytest.raises(OSError):
        run_pipeline(store, demo_case, KMeansConfig(seed=1))
    monkeypatch.undo()
    assert store.list_analyses(demo_case) == []
    assert [p for p in Path(store.root).rglob("*.tmp")] == []


def test_run_holds_writer_lock(tmp_path):
    root = tmp_path / "s"
    a = EvidenceStore(root)
    other = EvidenceStore(root, lock_timeout=0.05)
    a.create_case("c", "t", "i")
    ingest_file(a, FIG11, "c")
    with other.writer("c"):
        with pytest.raises(StoreLocked):
            run_pipeline(EvidenceStore(root, lock_timeout=0.05), "c")
        # readers are never blocked
        assert len(a.query_events("c")) == 15
