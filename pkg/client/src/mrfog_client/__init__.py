"""Thin client for the mrfog gateway: scripting ingest, query, overlay and
push from analyst environments, with all analysis done at the fog node."""

from .client import FogClient, connect
from .errors import (
    ClientError,
    FogClientError,
    NotFound,
    ServerError,
    TransportError,
    ValidationFailed,
)
from .models import CatalogEntry, OverlayResult, OverlayStats, TransferMetrics

__version__ = "0.1.0"

__all__ = [
    "CatalogEntry",
    "ClientError",
    "FogClient",
    "FogClientError",
    "NotFound",
    "OverlayResult",
    "OverlayStats",
    "ServerError",
    "TransferMetrics",
    "TransportError",
    "ValidationFailed",
    "connect",
]
