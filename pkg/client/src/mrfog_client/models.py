"""Typed mirrors of the gateway's wire JSON; field names match exactly."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class CatalogEntry:
    layer_id: str
    name: str
    feature_count: int
    bbox: list[float]
    created_at: str
    stored_len: int
    original_len: int
    checksum: str

    @classmethod
    def from_json(cls, doc: dict) -> "CatalogEntry":
        return cls(**doc)

    def as_json(self) -> dict:
        return {
            "layer_id": self.layer_id,
            "name": self.name,
            "feature_count": self.feature_count,
            "bbox": self.bbox,
            "created_at": self.created_at,
            "stored_len": self.stored_len,
            "original_len": self.original_len,
            "checksum": self.checksum,
        }


@dataclass(frozen=True)
class OverlayStats:
    input_area_a: float
    input_area_b: float
    output_area: float
    output_feature_count: int
    elapsed_ms: float

    @classmethod
    def from_json(cls, doc: dict) -> "OverlayStats":
        return cls(**doc)

    def as_json(self) -> dict:
        return {
            "input_area_a": self.input_area_a,
            "input_area_b": self.input_area_b,
            "output_area": self.output_area,
            "output_feature_count": self.output_feature_count,
            "elapsed_ms": self.elapsed_ms,
        }


@dataclass(frozen=True)
class OverlayResult:
    result: CatalogEntry
    stats: OverlayStats

    @classmethod
    def from_json(cls, doc: dict) -> "OverlayResult":
        return cls(
            result=CatalogEntry.from_json(doc["result"]),
            stats=OverlayStats.from_json(doc["stats"]),
        )

    def as_json(self) -> dict:
        return {"result": self.result.as_json(), "stats": self.stats.as_json()}


@dataclass(frozen=True)
class TransferMetrics:
    layer_id: str
    destination: str
    codec: str
    original_len: int
    transferred_len: int
    compress_ms: float
    transfer_ms: float
    total_ms: float
    attempts: int
    outcome: str

    @classmethod
    def from_json(cls, doc: dict) -> "TransferMetrics":
        return cls(**doc)

    def as_json(self) -> dict:
        return {
            "layer_id": self.layer_id,
            "destination": self.destination,
            "codec": self.codec,
            "original_len": self.original_len,
            "transferred_len": self.transferred_len,
            "compress_ms": self.compress_ms,
            "transfer_ms": self.transfer_ms,
            "total_ms": self.total_ms,
            "attempts": self.attempts,
            "outcome": self.outcome,
        }
