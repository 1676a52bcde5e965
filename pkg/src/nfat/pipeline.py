"""End-to-end analysis of one case: featurize, cluster, label, score, persist."""

from __future__ import annotations

from dataclasses import dataclass

from .clustering import KMeansConfig, run_restarts
from .criteria import DEFAULT_RULES, RuleTable, compute_error
from .errors import TooFewPoints, WrongClusterCount
from .features import to_feature_vector
from .labeling import label_clusters
from .severity import SEVERITY_ORDER
from .store import AnalysisRecord, EvidenceStore


@dataclass(frozen=True)
class PipelineRun:
    case_id: str
    config: KMeansConfig
    input_event_count: int
    analysis_id: str
    severity_counts: tuple[int, int, int]
    error_rate: float


def analyze_events(case_id: str, events, config: KMeansConfig, rules: RuleTable = DEFAULT_RULES) -> AnalysisRecord:
    """Pure part of the pipeline; returns an unsaved record (no analysis_id)."""
    events = list(events)
    if config.k != len(SEVERITY_ORDER):
        raise WrongClusterCount(f"severity labeling needs k=3, got k={config.k}")
    if len(events) < config.k:
        raise TooFewPoints(f"case {case_id!r} has {len(events)} events, need at least k={config.k}")
    result = run_restarts([to_feature_vector(e) for e in events], config)
    labels = tuple(label_clusters(result))
    error = compute_error(events, result.assignments, labels, rules)
    return AnalysisRecord(
        case_id=case_id,
        config=config,
        result=result,
        labels=labels,
        error_report=error,
        event_ids=tuple(e.event_id for e in events),
    )


def run_pipeline(store: EvidenceStore, case_id: str, config: KMeansConfig | None = None,
                 rules: RuleTable = DEFAULT_RULES) -> PipelineRun:
    """Analyse every stored event of a case and persist the analysis.

    The case's writer lock is held throughout. The analysis document is
    written in a single atomic rename, so a failure at any step leaves no
    record behind.
    """
    config = config or KMeansConfig()
    with store.writer(case_id):
        events = store.load_events(case_id)
        record = analyze_events(case_id, events, config, rules)
        analysis_id = store.store_analysis(record)
    sev_of = {lab.cluster_index: lab.severity for lab in record.labels}
    counts = [0, 0, 0]
    for cluster in record.result.assignments:
        counts[sev_of[cluster].rank] += 1
    return PipelineRun(
        case_id=case_id,
        config=config,
        input_event_count=len(events),
        analysis_id=analysis_id,
        severity_counts=tuple(counts),
        error_rate=record.error_report.error_rate,
    )


def format_counts(counts) -> str:
    return " ".join(f"{s.value}={n}" for s, n in zip(SEVERITY_ORDER, counts))
