"""Network forensic log analysis: K-means clustering of event logs into
severity classes, a rule-based criteria oracle, and a file-backed
evidence store with investigator reports."""

__version__ = "0.1.0"

from .clustering import KMeansConfig, KMeansResult, run_kmeans, run_restarts
from .criteria import DEFAULT_RULES, ErrorReport, classify_event, compute_error, load_rules
from .features import FeatureVector, normalize_port, to_feature_vector
from .ingest import LogEvent, Protocol, ingest_file, parse_event_line
from .labeling import SeverityLabel, cluster_score, label_clusters
from .pipeline import PipelineRun, run_pipeline
from .report import AttackReport, build_attack_report, render
from .severity import Severity
from .store import AnalysisRecord, CaseRecord, EvidenceStore
