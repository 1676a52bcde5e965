"""Lloyd-style K-means with Forgy initialisation and best-of-N restarts.

Iteration follows the textbook loop: pick k centroids at random, assign
every point to its nearest centroid, move each centroid to the mean of its
members, repeat until no centroid moves. Clusters that lose all members
keep their previous centroid instead of being reseeded.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, TooFewPoints
from .features import FeatureVector

SEED_MODULUS = 2**64


@dataclass(frozen=True)
class KMeansConfig:
    k: int = 3
    max_iterations: int = 300
    n_restarts: int = 10
    seed: int = 0

    def __post_init__(self):
        for name in ("k", "max_iterations", "n_restarts"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if not 0 <= self.seed < SEED_MODULUS:
            raise ValueError("seed must be a 64-bit unsigned integer")

    def to_dict(self) -> dict:
        return {"k": self.k, "max_iterations": self.max_iterations, "n_restarts": self.n_restarts, "seed": self.seed}

    @classmethod
    def from_dict(cls, d: dict) -> KMeansConfig:
        return cls(k=d["k"], max_iterations=d["max_iterations"], n_restarts=d["n_restarts"], seed=d["seed"])


@dataclass(frozen=True)
class KMeansResult:
    """Outcome of one K-means run.

    ``sse_trace`` holds the total SSE after every assignment step, so
    ``sse_trace[-1] == total_sse``. All numeric fields are plain Python
    floats/ints so results compare and serialise exactly.
    """

    centroids: tuple[tuple[float, ...], ...]
    assignments: tuple[int, ...]
    per_cluster_sse: tuple[float, ...]
    total_sse: float
    iterations: int
    converged: bool
    sse_trace: tuple[float, ...] = ()

    @property
    def k(self) -> int:
        return len(self.centroids)

    def cluster_sizes(self) -> list[int]:
        sizes = [0] * self.k
        for a in self.assignments:
            sizes[a] += 1
        return sizes

    def to_dict(self) -> dict:
        return {
            "centroids": [list(c) for c in self.centroids],
            "assignments": list(self.assignments),
            "per_cluster_sse": list(self.per_cluster_sse),
            "total_sse": self.total_sse,
            "iterations": self.iterations,
            "converged": self.converged,
            "sse_trace": list(self.sse_trace),
        }

    @classmethod
    def from_dict(cls, d: dict) -> KMeansResult:
        return cls(
            centroids=tuple(tuple(float(x) for x in c) for c in d["centroids"]),
            assignments=tuple(int(a) for a in d["assignments"]),
            per_cluster_sse=tuple(float(x) for x in d["per_cluster_sse"]),
            total_sse=float(d["total_sse"]),
            iterations=int(d["iterations"]),
            converged=bool(d["converged"]),
            sse_trace=tuple(float(x) for x in d.get("sse_trace", ())),
        )


def as_points(data) -> np.ndarray:
    """Coerce FeatureVectors or array-likes to a 2-D float64 array."""
    if isinstance(data, np.ndarray):
        arr = data.astype(np.float64, copy=False)
    else:
        rows = [d.as_tuple() if isinstance(d, FeatureVector) else d for d in data]
        arr = np.asarray(rows, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1) if arr.size else arr.reshape(0, 0)
    return arr


def distance(a, b) -> float:
    a = np.asarray(a.as_tuple() if isinstance(a, FeatureVector) else a, dtype=np.float64)
    b = np.asarray(b.as_tuple() if isinstance(b, FeatureVector) else b, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionMismatch(f"cannot compare vectors of shape {a.shape} and {b.shape}")
    return float(np.sqrt(np.sum((a - b) ** 2)))


def _squared_distances(points: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    if points.shape[1] != centroids.shape[1]:
        raise DimensionMismatch(f"points have {points.shape[1]} dims, centroids {centroids.shape[1]}")
    diff = points[:, None, :] - centroids[None, :, :]
    return np.einsum("ijk,ijk->ij", diff, diff)


def init_centroids(data, k: int, rng: np.random.Generator) -> np.ndarray:
    """Sample k distinct data points (by index) uniformly without replacement."""
    points = as_points(data)
    if k < 1:
        raise ValueError("k must be >= 1")
    if k > len(points):
        raise TooFewPoints(f"k={k} exceeds the {len(points)} available points")
    idx = rng.choice(len(points), size=k, replace=False)
    return points[idx].copy()


def assign(data, centroids) -> np.ndarray:
    """Index of the nearest centroid per point; ties go to the lowest index."""
    points = as_points(data)
    cents = as_points(centroids)
    if len(cents) == 0:
        raise ValueError("need at least one centroid")
    if len(points) == 0:
        return np.zeros(0, dtype=np.int64)
    return np.argmin(_squared_distances(points, cents), axis=1)


def update_centroids(data, assignments, old_centroids) -> np.ndarray:
    points = as_points(data)
    labels = np.asarray(assignments, dtype=np.int64)
    new = as_points(old_centroids).copy()
    for j in range(len(new)):
        members = points[labels == j]
        if len(members):
            new[j] = members.mean(axis=0)
    return new


def cluster_sse(data, assignments, centroids) -> np.ndarray:
    """Per-cluster sum of squared distances to the cluster's centroid."""
    points = as_points(data)
    labels = np.asarray(assignments, dtype=np.int64)
    cents = as_points(centroids)
    sq = np.sum((points - cents[labels]) ** 2, axis=1)
    return np.array([sq[labels == j].sum() for j in range(len(cents))], dtype=np.float64)


def _freeze(points, centroids, labels, iterations, converged, trace) -> KMeansResult:
    per = tuple(float(x) for x in cluster_sse(points, labels, centroids))
    return KMeansResult(
        centroids=tuple(tuple(float(x) for x in c) for c in centroids),
        assignments=tuple(int(a) for a in labels),
        per_cluster_sse=per,
        total_sse=float(sum(per)),
        iterations=iterations,
        converged=converged,
        sse_trace=tuple(trace),
    )


def lloyd(data, initial_centroids, max_iterations: int = 300) -> KMeansResult:
    """Run assign/update from explicit starting centroids.

    Stops when an update leaves every centroid bit-for-bit unchanged, or
    after ``max_iterations`` assign/update passes.
    """
    points = as_points(data)
    centroids = as_points(initial_centroids).copy()
    if len(points) == 0:
        raise TooFewPoints("no data points")
    trace = []
    converged = False
    iterations = 0
    while iterations < max_iterations:
        iterations += 1
        labels = assign(points, centroids)
        trace.append(float(cluster_sse(points, labels, centroids).sum()))
        new = update_centroids(points, labels, centroids)
        if np.array_equal(new, centroids):
            converged = True
            break
        centroids = new
    if not converged:
        # centroids moved on the last pass; report the matching assignment
        labels = assign(points, centroids)
        trace.append(float(cluster_sse(points, labels, centroids).sum()))
    return _freeze(points, centroids, labels, iterations, converged, trace)


def run_kmeans(data, k: int, rng: np.random.Generator, max_iterations: int = 300) -> KMeansResult:
    points = as_points(data)
    if len(points) == 0:
        raise TooFewPoints("no data points")
    return lloyd(points, init_centroids(points, k, rng), max_iterations)


def restart_seeds(config: KMeansConfig) -> list[int]:
    return [(config.seed + i) % SEED_MODULUS for i in range(config.n_restarts)]


def run_restarts(data, config: KMeansConfig) -> KMeansResult:
    """Best of ``n_restarts`` runs by total SSE; earliest restart wins ties."""
    points = as_points(data)
    best = None
    for seed in restart_seeds(config):
        result = run_kmeans(points, config.k, np.random.default_rng(seed), config.max_iterations)
        if best is None or result.total_sse < best.total_sse:
            best = result
    return best
