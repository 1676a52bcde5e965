"""LogEvent -> 4-dimensional feature vectors used as clustering input.

Only the destination port is rescaled (to a 0-100 range). ``ip_len`` and
``tcp_flags`` pass through unscaled, so ``ip_len`` dominates Euclidean
distance by design.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ingest import LogEvent, Protocol

FEATURE_NAMES = ("protocol_code", "norm_port", "ip_len", "tcp_flags")
MAX_PORT = 65535


def normalize_port(d_port: int) -> float:
    return d_port / MAX_PORT * 100.0


def encode_protocol(protocol: Protocol) -> float:
    return 1.0 if Protocol(protocol) is Protocol.TCP else 0.0


@dataclass(frozen=True)
class FeatureVector:
    event_id: int  # identifier only, never a distance dimension
    protocol_code: float
    norm_port: float
    ip_len: float
    tcp_flags: float

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.protocol_code, self.norm_port, self.ip_len, self.tcp_flags)


def to_feature_vector(event: LogEvent) -> FeatureVector:
    return FeatureVector(
        event_id=event.event_id,
        protocol_code=encode_protocol(event.protocol),
        norm_port=normalize_port(event.d_port),
        ip_len=float(event.ip_len),
        tcp_flags=float(event.tcp_flags),
    )


def feature_matrix(vectors) -> np.ndarray:
    """Stack feature vectors into an ``(n, 4)`` float64 array."""
    rows = [v.as_tuple() if isinstance(v, FeatureVector) else tuple(v) for v in vectors]
    return np.asarray(rows, dtype=np.float64).reshape(len(rows), len(FEATURE_NAMES))
