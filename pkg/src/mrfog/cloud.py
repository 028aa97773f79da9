"""Cloud-side receiver stub: verifies compressed uploads and stores each
distinct payload exactly once, keyed by content checksum.

The fog node delivers at-least-once; dedup by checksum makes storage
exactly-once.  Blobs land in ``blobs/{checksum}.geojson`` beside an
append-only ``received.jsonl`` journal, both trivially inspectable.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Mapping

from . import codec as codec_mod
from ._http import JsonRequestHandler, ThreadingHTTPServer
from .codec import ChecksumMismatch, CodecId, CorruptBody, LengthMismatch

DEFAULT_PORT = 8465


@dataclass
class ReceivedEntry:
    checksum: str
    layer_name: str
    original_len: int
    received_at: str
    source: str

    def as_json(self) -> dict:
        return {
            "checksum": self.checksum,
            "layer_name": self.layer_name,
            "original_len": self.original_len,
            "received_at": self.received_at,
            "source": self.source,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "ReceivedEntry":
        return cls(**doc)


class CloudNode:
    def __init__(self, data_dir: Path):
        self.data_dir = Path(data_dir)
        self.blob_dir = self.data_dir / "blobs"
        self.blob_dir.mkdir(parents=True, exist_ok=True)
        self.journal_path = self.data_dir / "received.jsonl"
        self._lock = threading.Lock()
        self._received: dict[str, ReceivedEntry] = {}
        if self.journal_path.exists():
            for line in self.journal_path.read_text().splitlines():
                if line.strip():
                    entry = ReceivedEntry.from_json(json.loads(line))
                    self._received[entry.checksum] = entry

    def receive_upload(
        self, headers: Mapping[str, str], body: bytes, source: str
    ) -> tuple[int, dict]:
        """Verify and store one upload; returns (http_status, ack_json)."""
        codec_label = headers.get("X-Codec")
        original_len = headers.get("X-Original-Len")
        checksum = headers.get("X-Checksum-SHA256")
        if not codec_label or original_len is None or not checksum:
            return 400, {
                "error": "MissingHeader",
                "message": "X-Codec, X-Original-Len and X-Checksum-SHA256 are required",
            }
        try:
            codec_id = CodecId.from_label(codec_label)
            expected_len = int(original_len)
        except ValueError as exc:
            return 400, {"error": "BadRequest", "message": str(exc)}

        try:
            data = codec_mod.inflate(body) if codec_id is CodecId.DEFLATE else body
        except CorruptBody as exc:
            return 422, {"error": "CorruptBody", "message": str(exc)}
        if len(data) != expected_len:
            return 422, {
                "error": "LengthMismatch",
                "message": f"expected {expected_len} bytes, got {len(data)}",
            }
        if codec_mod.checksum(data) != checksum:
            return 422, {"error": "ChecksumMismatch", "message": "digest differs from header"}

        layer_name = headers.get("X-Layer-Name", "")
        with self._lock:
            if checksum in self._received:
                return 200, {"checksum": checksum, "duplicate": True}
            blob = self.blob_dir / f"{checksum}.geojson"
            tmp = blob.with_suffix(".tmp")
            with tmp.open("wb") as fh:
                fh.write(data)
                fh.flush()
                os.fsync(fh.fileno())
            tmp.rename(blob)
            entry = ReceivedEntry(
                checksum=checksum,
                layer_name=layer_name,
                original_len=expected_len,
                received_at=datetime.now(timezone.utc)
                .isoformat(timespec="microseconds")
                .replace("+00:00", "Z"),
                source=source,
            )
            with self.journal_path.open("ab") as fh:
                fh.write((json.dumps(entry.as_json(), separators=(",", ":")) + "\n").encode())
                fh.flush()
                os.fsync(fh.fileno())
            self._received[checksum] = entry
        return 200, {"checksum": checksum, "duplicate": False}

    def list_received(self) -> list[ReceivedEntry]:
        with self._lock:
            return sorted(self._received.values(), key=lambda e: (e.received_at, e.checksum))

    def blob_bytes(self, checksum: str) -> bytes:
        return (self.blob_dir / f"{checksum}.geojson").read_bytes()


class CloudRequestHandler(JsonRequestHandler):
    node: CloudNode  # set by make_server

    def do_POST(self):  # noqa: N802
        if self.path.rstrip("/") == "/upload":
            body = self.read_body()
            try:
                status, ack = self.node.receive_upload(
                    self.headers, body, source=self.client_address[0]
                )
            except OSError as exc:
                status, ack = 500, {"error": "StorageError", "message": str(exc)}
            self.send_json(status, ack)
        else:
            self.send_error_json(404, "NotFound", f"no route {self.path}")

    def do_GET(self):  # noqa: N802
        if self.path.rstrip("/") == "/received":
            self.send_json(200, [e.as_json() for e in self.node.list_received()])
        else:
            self.send_error_json(404, "NotFound", f"no route {self.path}")


def make_server(node: CloudNode, port: int = 0) -> ThreadingHTTPServer:
    handler = type("BoundCloudHandler", (CloudRequestHandler,), {"node": node})
    server = ThreadingHTTPServer(("127.0.0.1", port), handler)
    server.daemon_threads = True
    return server


def serve(data_dir: Path, port: int = DEFAULT_PORT) -> None:
    node = CloudNode(data_dir)
    server = make_server(node, port)
    print(
        json.dumps({"event": "listening", "service": "cloud", "port": server.server_address[1]}),
        flush=True,
    )
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
