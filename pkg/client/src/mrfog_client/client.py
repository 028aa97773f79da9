"""Thin client over the fog gateway's HTTP API.

Deliberately logic-free: every method maps 1:1 to an endpoint and returns
the wire payload (bytes for layer documents, typed mirrors for JSON).  The
only client-side processing is optional deflate encoding of large ingest
bodies.  All geometry analysis happens at the fog node.
"""

from __future__ import annotations

import zlib
from pathlib import Path
from typing import Optional, Union

import requests

from .errors import ClientError, NotFound, ServerError, TransportError, ValidationFailed
from .models import CatalogEntry, OverlayResult, TransferMetrics

DEFLATE_THRESHOLD = 4096  # bodies above 4 KiB are deflate-encoded on ingest


def _raw_deflate(data: bytes) -> bytes:
    compressor = zlib.compressobj(6, zlib.DEFLATED, -15)
    return compressor.compress(data) + compressor.flush()


class FogClient:
    def __init__(self, base_url: str, timeout: float = 120.0):
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout
        self.last_raw: bytes = b""  # body of the most recent response

    # -- plumbing -------------------------------------------------------

    def _request(self, method: str, path: str, **kwargs) -> requests.Response:
        try:
            response = requests.request(
                method, self.base_url + path, timeout=self.timeout, **kwargs
            )
        except requests.RequestException as exc:
            raise TransportError(str(exc)) from exc
        self.last_raw = response.content
        if response.status_code < 400:
            return response
        try:
            payload = response.json()
        except ValueError:
            payload = {"error": "Unknown", "message": response.text}
        message = f"{payload.get('error')}: {payload.get('message')}"
        if response.status_code == 404:
            raise NotFound(message)
        if response.status_code == 422 and "report" in payload:
            raise ValidationFailed(message, payload["report"])
        if response.status_code < 500:
            raise ClientError(message, payload)
        raise ServerError(message)

    # -- endpoint mirrors -------------------------------------------------

    def ingest(self, source: Union[bytes, str, Path], name: Optional[str] = None) -> CatalogEntry:
        body = Path(source).read_bytes() if isinstance(source, (str, Path)) else bytes(source)
        headers = {"Content-Type": "application/geo+json"}
        if len(body) > DEFLATE_THRESHOLD:
            body = _raw_deflate(body)
            headers["Content-Encoding"] = "deflate"
        path = "/layers" if name is None else f"/layers?name={name}"
        response = self._request("POST", path, data=body, headers=headers)
        return CatalogEntry.from_json(response.json())

    def list_layers(self) -> list[CatalogEntry]:
        response = self._request("GET", "/layers")
        return [CatalogEntry.from_json(doc) for doc in response.json()]

    def get_layer(self, layer_id: str, bbox: Optional[list] = None) -> bytes:
        path = f"/layers/{layer_id}"
        if bbox is not None:
            path += "?bbox=" + ",".join(str(v) for v in bbox)
        return self._request("GET", path).content

    def overlay(self, layer_a: str, layer_b: str, op: str) -> OverlayResult:
        response = self._request(
            "POST", "/overlay", json={"layer_a": layer_a, "layer_b": layer_b, "op": op}
        )
        return OverlayResult.from_json(response.json())

    def push(
        self, layer_id: str, codec: str = "deflate", destination: Optional[str] = None
    ) -> TransferMetrics:
        body = {"layer_id": layer_id, "codec": codec}
        if destination is not None:
            body["destination"] = destination
        response = self._request("POST", "/push", json=body)
        return TransferMetrics.from_json(response.json())

    def metrics(self) -> dict:
        return self._request("GET", "/metrics").json()


def connect(url: str, timeout: float = 120.0) -> FogClient:
    """Create a client for a running fog node."""
    return FogClient(url, timeout=timeout)
