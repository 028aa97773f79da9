"""The fog node: HTTP ingestion, compressed-at-rest storage, edge overlay
analysis, store-and-forward push to the cloud, and telemetry.

Persistence is a flat directory: ``catalog.jsonl`` (append-only, one entry
per line), ``metrics.jsonl`` (one record per ingest/overlay/push) and
``blobs/{layer_id}.geojson.dfl`` holding each layer's canonical bytes,
deflated when that is strictly smaller.  Blobs are written and fsynced
before their catalog line, so a crash never leaves an entry pointing at a
missing blob; a partial trailing line is truncated away on startup.

Concurrency: catalog and metrics appends are serialized by locks, reads go
against immutable blobs, and pushes to each destination are processed by a
single background worker in submission order.
"""

from __future__ import annotations

import json
import os
import threading
import time
import uuid
from concurrent.futures import Future
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from queue import Queue
from typing import Optional

import requests

from . import codec as codec_mod
from ._http import JsonRequestHandler, ThreadingHTTPServer
from .codec import CodecId
from .geo_model import (
    BBox,
    Layer,
    MalformedJson,
    UnsupportedGeometry,
    ValidationReport,
    invariant_violations,
    layer_bbox,
    normalize_layer,
    parse_geojson,
    parse_structural,
    write_geojson,
)
from .geo_ops import OverlayOp, bbox_query, overlay_layers

DEFAULT_PORT = 8464
_PUSH_TIMEOUT_S = 60.0


class GatewayError(Exception):
    pass


class LayerNotFound(GatewayError):
    pass


class NoCloudConfigured(GatewayError):
    pass


class StorageCorruption(GatewayError):
    pass


class ValidationFailed(GatewayError):
    def __init__(self, report: ValidationReport):
        super().__init__("layer violates invariants")
        self.report = report


class DeliveryFailed(GatewayError):
    def __init__(self, metrics: "TransferMetrics"):
        super().__init__(f"delivery to {metrics.destination} failed after {metrics.attempts} attempts")
        self.metrics = metrics


@dataclass
class GatewayConfig:
    data_dir: Path
    port: int = DEFAULT_PORT
    cloud_url: Optional[str] = None
    default_codec: CodecId = CodecId.DEFLATE
    push_retry_limit: int = 3
    push_backoff_ms: int = 200


@dataclass
class CatalogEntry:
    layer_id: str
    name: str
    feature_count: int
    bbox: BBox
    created_at: str
    stored_len: int
    original_len: int
    checksum: str

    def as_json(self) -> dict:
        return {
            "layer_id": self.layer_id,
            "name": self.name,
            "feature_count": self.feature_count,
            "bbox": self.bbox.as_list(),
            "created_at": self.created_at,
            "stored_len": self.stored_len,
            "original_len": self.original_len,
            "checksum": self.checksum,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "CatalogEntry":
        return cls(
            layer_id=doc["layer_id"],
            name=doc["name"],
            feature_count=doc["feature_count"],
            bbox=BBox(*doc["bbox"]),
            created_at=doc["created_at"],
            stored_len=doc["stored_len"],
            original_len=doc["original_len"],
            checksum=doc["checksum"],
        )


@dataclass
class TransferMetrics:
    layer_id: str
    destination: str
    codec: CodecId
    original_len: int
    transferred_len: int
    compress_ms: float
    transfer_ms: float
    total_ms: float
    attempts: int
    outcome: str  # "delivered" | "failed"

    def as_json(self) -> dict:
        return {
            "layer_id": self.layer_id,
            "destination": self.destination,
            "codec": self.codec.value,
            "original_len": self.original_len,
            "transferred_len": self.transferred_len,
            "compress_ms": self.compress_ms,
            "transfer_ms": self.transfer_ms,
            "total_ms": self.total_ms,
            "attempts": self.attempts,
            "outcome": self.outcome,
        }


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="microseconds").replace("+00:00", "Z")


def _read_jsonl(path: Path) -> list[dict]:
    """Read an append-only journal, truncating a partial trailing line left
    behind by a crash mid-append."""
    if not path.exists():
        return []
    records = []
    data = path.read_bytes()
    offset = 0
    for line in data.splitlines(keepends=True):
        stripped = line.strip()
        if stripped:
            try:
                records.append(json.loads(stripped))
            except json.JSONDecodeError:
                with path.open("rb+") as fh:
                    fh.truncate(offset)
                return records
            if not line.endswith(b"\n"):
                with path.open("rb+") as fh:
                    fh.truncate(offset)
                return records[:-1]
        offset += len(line)
    return records


def _append_jsonl(path: Path, record: dict) -> None:
    line = (json.dumps(record, separators=(",", ":")) + "\n").encode("utf-8")
    with path.open("ab") as fh:
        fh.write(line)
        fh.flush()
        os.fsync(fh.fileno())


class _PushWorker:
    """Single worker per destination; preserves per-layer submission order."""

    def __init__(self, node: "FogNode", destination: str):
        self.node = node
        self.destination = destination
        self.queue: Queue = Queue()
        self.thread = threading.Thread(target=self._loop, daemon=True)
        self.thread.start()

    def submit(self, entry: CatalogEntry, data: bytes, codec_id: CodecId) -> Future:
        future: Future = Future()
        self.queue.put((entry, data, codec_id, future))
        return future

    def stop(self) -> None:
        self.queue.put(None)

    def _loop(self) -> None:
        while True:
            item = self.queue.get()
            if item is None:
                return
            entry, data, codec_id, future = item
            try:
                future.set_result(self._push_once(entry, data, codec_id))
            except Exception as exc:  # noqa: BLE001 - surface to the waiting caller
                future.set_exception(exc)

    def _push_once(self, entry: CatalogEntry, data: bytes, codec_id: CodecId) -> TransferMetrics:
        config = self.node.config
        started = time.perf_counter()
        payload = codec_mod.compress(data, codec_id)
        compress_ms = (time.perf_counter() - started) * 1000.0

        headers = {
            "Content-Type": "application/octet-stream",
            "X-Codec": payload.codec.value,
            "X-Original-Len": str(payload.original_len),
            "X-Checksum-SHA256": payload.checksum,
            "X-Layer-Name": entry.name,
        }
        delivered = False
        transfer_ms = 0.0
        attempts = 0
        while attempts <= config.push_retry_limit:
            attempts += 1
            attempt_start = time.perf_counter()
            try:
                response = requests.post(
                    self.destination.rstrip("/") + "/upload",
                    data=payload.body,
                    headers=headers,
                    timeout=_PUSH_TIMEOUT_S,
                )
                transfer_ms += (time.perf_counter() - attempt_start) * 1000.0
                if 200 <= response.status_code < 300:
                    ack = response.json()
                    if ack.get("checksum") == payload.checksum:
                        delivered = True
                        break
            except (requests.RequestException, ValueError):
                transfer_ms += (time.perf_counter() - attempt_start) * 1000.0
            if attempts <= config.push_retry_limit:
                time.sleep(config.push_backoff_ms / 1000.0)

        metrics = TransferMetrics(
            layer_id=entry.layer_id,
            destination=self.destination,
            codec=payload.codec,
            original_len=payload.original_len,
            transferred_len=payload.compressed_len,
            compress_ms=compress_ms,
            transfer_ms=transfer_ms,
            total_ms=(time.perf_counter() - started) * 1000.0,
            attempts=attempts,
            outcome="delivered" if delivered else "failed",
        )
        self.node.record_metric({"kind": "push", **metrics.as_json()})
        return metrics


class FogNode:
    """Gateway state and operations; the HTTP handler is a thin shim over this."""

    def __init__(self, config: GatewayConfig):
        self.config = config
        self.data_dir = Path(config.data_dir)
        self.blob_dir = self.data_dir / "blobs"
        self.blob_dir.mkdir(parents=True, exist_ok=True)
        self.catalog_path = self.data_dir / "catalog.jsonl"
        self.metrics_path = self.data_dir / "metrics.jsonl"
        self._catalog_lock = threading.Lock()
        self._metrics_lock = threading.Lock()
        self._workers_lock = threading.Lock()
        self._workers: dict[str, _PushWorker] = {}
        self._entries: dict[str, CatalogEntry] = {}
        for doc in _read_jsonl(self.catalog_path):
            entry = CatalogEntry.from_json(doc)
            self._entries[entry.layer_id] = entry
        self._metric_records: list[dict] = _read_jsonl(self.metrics_path)

    # -- storage ---------------------------------------------------------

    def _blob_path(self, layer_id: str) -> Path:
        return self.blob_dir / f"{layer_id}.geojson.dfl"

    def _store_layer(self, layer: Layer) -> CatalogEntry:
        data = write_geojson(layer)
        digest = codec_mod.checksum(data)
        payload = codec_mod.compress(data, self.config.default_codec)
        entry = CatalogEntry(
            layer_id=layer.layer_id,
            name=layer.name,
            feature_count=len(layer.features),
            bbox=layer_bbox(layer),
            created_at=_utc_now(),
            stored_len=payload.compressed_len,
            original_len=payload.original_len,
            checksum=digest,
        )
        with self._catalog_lock:
            # Blob first (write-ahead): a crash here leaves an orphan blob,
            # never a dangling catalog entry.
            blob = self._blob_path(entry.layer_id)
            tmp = blob.with_suffix(".tmp")
            with tmp.open("wb") as fh:
                fh.write(payload.body)
                fh.flush()
                os.fsync(fh.fileno())
            tmp.rename(blob)
            _append_jsonl(self.catalog_path, entry.as_json())
            self._entries[entry.layer_id] = entry
        return entry

    def record_metric(self, record: dict) -> None:
        with self._metrics_lock:
            _append_jsonl(self.metrics_path, record)
            self._metric_records.append(record)

    # -- operations --------------------------------------------------------

    def ingest_layer(
        self, body: bytes, name: Optional[str] = None, content_encoding: Optional[str] = None
    ) -> CatalogEntry:
        started = time.perf_counter()
        if content_encoding:
            if content_encoding.lower() != "deflate":
                raise MalformedJson(f"unsupported Content-Encoding {content_encoding!r}")
            try:
                body = codec_mod.inflate(body)
            except codec_mod.CorruptBody as exc:
                raise MalformedJson(f"request body does not inflate: {exc}") from exc
        layer = parse_structural(body, default_name=name)
        violations = invariant_violations(layer, check_winding=False)
        if violations:
            raise ValidationFailed(ValidationReport(violations))
        layer = normalize_layer(layer)
        layer.layer_id = uuid.uuid4().hex  # node-local identity, never reused
        entry = self._store_layer(layer)
        self.record_metric(
            {
                "kind": "ingest",
                "layer_id": entry.layer_id,
                "original_len": entry.original_len,
                "stored_len": entry.stored_len,
                "elapsed_ms": (time.perf_counter() - started) * 1000.0,
            }
        )
        return entry

    def get_entry(self, layer_id: str) -> CatalogEntry:
        entry = self._entries.get(layer_id)
        if entry is None:
            raise LayerNotFound(f"layer {layer_id} not found")
        return entry

    def get_layer_bytes(self, layer_id: str) -> bytes:
        entry = self.get_entry(layer_id)
        blob = self._blob_path(layer_id)
        try:
            stored = blob.read_bytes()
        except OSError as exc:
            raise StorageCorruption(f"blob for {layer_id} unreadable: {exc}") from exc
        if entry.stored_len == entry.original_len:
            data = stored
        else:
            try:
                data = codec_mod.inflate(stored)
            except codec_mod.CorruptBody as exc:
                raise StorageCorruption(f"blob for {layer_id} corrupt: {exc}") from exc
        if len(data) != entry.original_len or codec_mod.checksum(data) != entry.checksum:
            raise StorageCorruption(f"blob for {layer_id} fails its checksum")
        return data

    def get_layer(self, layer_id: str) -> Layer:
        layer = parse_geojson(self.get_layer_bytes(layer_id))
        layer.layer_id = layer_id
        return layer

    def list_layers(self) -> list[CatalogEntry]:
        return sorted(self._entries.values(), key=lambda e: (e.created_at, e.layer_id))

    def query_layer(self, layer_id: str, box: BBox) -> Layer:
        return bbox_query(self.get_layer(layer_id), box)

    def run_overlay(self, layer_a_id: str, layer_b_id: str, op: OverlayOp):
        layer_a = self.get_layer(layer_a_id)
        layer_b = self.get_layer(layer_b_id)
        result, stats = overlay_layers(layer_a, layer_b, op)
        entry = self._store_layer(result)
        self.record_metric(
            {
                "kind": "overlay",
                "layer_a": layer_a_id,
                "layer_b": layer_b_id,
                "op": op.value,
                "result_layer_id": entry.layer_id,
                **stats.as_json(),
            }
        )
        return entry, stats

    def push_to_cloud(
        self,
        layer_id: str,
        codec_id: Optional[CodecId] = None,
        destination: Optional[str] = None,
    ) -> TransferMetrics:
        entry = self.get_entry(layer_id)
        target = destination or self.config.cloud_url
        if not target:
            raise NoCloudConfigured("no cloud endpoint configured")
        data = self.get_layer_bytes(layer_id)
        worker = self._worker_for(target)
        future = worker.submit(entry, data, codec_id or self.config.default_codec)
        metrics = future.result()
        if metrics.outcome != "delivered":
            raise DeliveryFailed(metrics)
        return metrics

    def _worker_for(self, destination: str) -> _PushWorker:
        with self._workers_lock:
            worker = self._workers.get(destination)
            if worker is None:
                worker = _PushWorker(self, destination)
                self._workers[destination] = worker
            return worker

    def metrics_summary(self) -> dict:
        with self._metrics_lock:
            records = list(self._metric_records)
        ingests = [r for r in records if r.get("kind") == "ingest"]
        overlays = [r for r in records if r.get("kind") == "overlay"]
        pushes = [r for r in records if r.get("kind") == "push"]
        delivered = [r for r in pushes if r.get("outcome") == "delivered"]

        def mean(values: list[float]) -> float:
            return sum(values) / len(values) if values else 0.0

        def p95(values: list[float]) -> float:
            if not values:
                return 0.0
            ordered = sorted(values)
            rank = max(0, -(-len(ordered) * 95 // 100) - 1)  # nearest-rank ceil
            return ordered[rank]

        reduction = {}
        for label in ("deflate", "none"):
            sent = [r for r in delivered if r.get("codec") == label]
            original = sum(r["original_len"] for r in sent)
            transferred = sum(r["transferred_len"] for r in sent)
            reduction[label] = 100.0 * (1.0 - transferred / original) if original else 0.0

        overlay_times = [r["elapsed_ms"] for r in overlays]
        push_times = [r["total_ms"] for r in pushes]
        return {
            "layers_ingested": len(ingests),
            "bytes_ingested": sum(r["original_len"] for r in ingests),
            "bytes_stored": sum(r["stored_len"] for r in ingests),
            "overlays_run": len(overlays),
            "pushes_total": len(pushes),
            "pushes_delivered": len(delivered),
            "pushes_failed": len(pushes) - len(delivered),
            "bytes_pushed_original": sum(r["original_len"] for r in delivered),
            "bytes_pushed_transferred": sum(r["transferred_len"] for r in delivered),
            "bytes_saved": sum(r["original_len"] - r["transferred_len"] for r in delivered),
            "overlay_latency_ms": {"mean": mean(overlay_times), "p95": p95(overlay_times)},
            "push_latency_ms": {"mean": mean(push_times), "p95": p95(push_times)},
            "codec_reduction_pct": reduction,
        }

    def close(self) -> None:
        with self._workers_lock:
            for worker in self._workers.values():
                worker.stop()
            self._workers.clear()


# ---------------------------------------------------------------------------
# HTTP surface


def _parse_bbox(raw: str) -> BBox:
    parts = [float(v) for v in raw.split(",")]
    if len(parts) != 4 or parts[0] > parts[2] or parts[1] > parts[3]:
        raise ValueError(f"invalid bbox {raw!r}")
    return BBox(*parts)


class FogRequestHandler(JsonRequestHandler):
    node: FogNode  # set by make_server

    def do_GET(self):  # noqa: N802 - stdlib naming
        from urllib.parse import parse_qs, urlparse

        url = urlparse(self.path)
        parts = [p for p in url.path.split("/") if p]
        try:
            if parts == ["layers"]:
                self.send_json(200, [e.as_json() for e in self.node.list_layers()])
            elif len(parts) == 2 and parts[0] == "layers":
                query = parse_qs(url.query)
                if "bbox" in query:
                    box = _parse_bbox(query["bbox"][0])
                    layer = self.node.query_layer(parts[1], box)
                    self.send_payload(200, write_geojson(layer), "application/geo+json")
                else:
                    self.node.get_entry(parts[1])
                    self.send_payload(
                        200, self.node.get_layer_bytes(parts[1]), "application/geo+json"
                    )
            elif parts == ["metrics"]:
                self.send_json(200, self.node.metrics_summary())
            else:
                self.send_error_json(404, "NotFound", f"no route {url.path}")
        except LayerNotFound as exc:
            self.send_error_json(404, "NotFound", str(exc))
        except StorageCorruption as exc:
            self.send_error_json(500, "StorageCorruption", str(exc))
        except ValueError as exc:
            self.send_error_json(400, "BadRequest", str(exc))

    def do_POST(self):  # noqa: N802
        from urllib.parse import parse_qs, urlparse

        url = urlparse(self.path)
        parts = [p for p in url.path.split("/") if p]
        body = self.read_body()
        try:
            if parts == ["layers"]:
                query = parse_qs(url.query)
                name = query.get("name", [None])[0]
                entry = self.node.ingest_layer(
                    body, name=name, content_encoding=self.headers.get("Content-Encoding")
                )
                self.send_json(201, entry.as_json())
            elif parts == ["overlay"]:
                doc = json.loads(body)
                op = OverlayOp.from_label(doc["op"])
                entry, stats = self.node.run_overlay(doc["layer_a"], doc["layer_b"], op)
                self.send_json(200, {"result": entry.as_json(), "stats": stats.as_json()})
            elif parts == ["push"]:
                doc = json.loads(body)
                codec_id = CodecId.from_label(doc["codec"]) if doc.get("codec") else None
                try:
                    metrics = self.node.push_to_cloud(
                        doc["layer_id"], codec_id, doc.get("destination")
                    )
                except DeliveryFailed as exc:
                    metrics = exc.metrics
                self.send_json(200, metrics.as_json())
            else:
                self.send_error_json(404, "NotFound", f"no route {url.path}")
        except (MalformedJson, json.JSONDecodeError, KeyError) as exc:
            self.send_error_json(400, "ParseError", str(exc))
        except UnsupportedGeometry as exc:
            self.send_error_json(422, "UnsupportedGeometry", str(exc))
        except ValidationFailed as exc:
            self.send_error_json(
                422, "ValidationError", "layer violates invariants", report=exc.report.as_json()
            )
        except LayerNotFound as exc:
            self.send_error_json(404, "NotFound", str(exc))
        except NoCloudConfigured as exc:
            self.send_error_json(400, "NoCloudConfigured", str(exc))
        except StorageCorruption as exc:
            self.send_error_json(500, "StorageCorruption", str(exc))
        except ValueError as exc:
            self.send_error_json(400, "BadRequest", str(exc))


def make_server(node: FogNode, port: Optional[int] = None) -> ThreadingHTTPServer:
    handler = type("BoundFogHandler", (FogRequestHandler,), {"node": node})
    server = ThreadingHTTPServer(("127.0.0.1", node.config.port if port is None else port), handler)
    server.daemon_threads = True
    return server


def serve(config: GatewayConfig) -> None:
    """Run the gateway until interrupted; prints a listening event as JSON."""
    node = FogNode(config)
    server = make_server(node)
    print(json.dumps({"event": "listening", "service": "fog", "port": server.server_address[1]}), flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
        node.close()
