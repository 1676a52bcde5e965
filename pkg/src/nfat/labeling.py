"""Severity labels for a three-cluster result.

Each centroid is scored by ``c @ c.T`` (its squared norm). The highest
score is Dangerous, the middle RatherDangerous, the lowest NotDangerous.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import WrongClusterCount
from .severity import SEVERITY_ORDER, Severity


@dataclass(frozen=True)
class SeverityLabel:
    severity: Severity
    cluster_index: int
    score: float

    def to_dict(self) -> dict:
        return {"severity": self.severity.value, "cluster_index": self.cluster_index, "score": self.score}

    @classmethod
    def from_dict(cls, d: dict) -> SeverityLabel:
        return cls(Severity(d["severity"]), int(d["cluster_index"]), float(d["score"]))


def cluster_score(centroid) -> float:
    c = np.asarray(centroid, dtype=np.float64).reshape(1, -1)
    return float((c @ c.T)[0, 0])


def label_centroids(centroids) -> list[SeverityLabel]:
    """Label exactly three centroids, returned in descending severity.

    Equal scores: the lower cluster index gets the more severe label.
    """
    centroids = list(centroids)
    if len(centroids) != len(SEVERITY_ORDER):
        raise WrongClusterCount(f"severity labeling needs exactly 3 clusters, got {len(centroids)}")
    scores = [cluster_score(c) for c in centroids]
    ranked = sorted(range(len(scores)), key=lambda j: (-scores[j], j))
    return [SeverityLabel(sev, j, scores[j]) for sev, j in zip(SEVERITY_ORDER, ranked)]


def label_clusters(result) -> list[SeverityLabel]:
    """Label a :class:`~nfat.clustering.KMeansResult` from its centroids alone."""
    return label_centroids(result.centroids)


def severity_by_cluster(labels) -> dict[int, Severity]:
    return {lab.cluster_index: lab.severity for lab in labels}
