"""Latency/throughput benchmark: push trials per codec through a local
bandwidth-throttling proxy.

The proxy forwards uploads to the real cloud endpoint but holds each
response for ``bytes * 8 / bandwidth_kbps`` milliseconds (a kbit/s link
transfers exactly one bit per microsecond per kbps), making transfer time
proportional to payload size.  That turns the byte savings from compression
into a reproducible latency difference on any machine.
"""

from __future__ import annotations

import time
from pathlib import Path

import requests

from ._http import JsonRequestHandler, ThreadingHTTPServer, start_background

_FORWARD_HEADERS = ("X-Codec", "X-Original-Len", "X-Checksum-SHA256", "X-Layer-Name")


class ThrottleProxyHandler(JsonRequestHandler):
    upstream: str  # set by make_throttle_proxy
    bandwidth_kbps: float

    def do_POST(self):  # noqa: N802
        if self.path.rstrip("/") != "/upload":
            self.send_error_json(404, "NotFound", f"no route {self.path}")
            return
        body = self.read_body()
        time.sleep((len(body) * 8.0 / self.bandwidth_kbps) / 1000.0)
        headers = {"Content-Type": "application/octet-stream"}
        for name in _FORWARD_HEADERS:
            if self.headers.get(name) is not None:
                headers[name] = self.headers[name]
        try:
            response = requests.post(
                self.upstream.rstrip("/") + "/upload", data=body, headers=headers, timeout=120
            )
        except requests.RequestException as exc:
            self.send_error_json(502, "UpstreamUnreachable", str(exc))
            return
        self.send_payload(
            response.status_code,
            response.content,
            response.headers.get("Content-Type", "application/json"),
        )


def make_throttle_proxy(upstream: str, bandwidth_kbps: float) -> ThreadingHTTPServer:
    handler = type(
        "BoundThrottleHandler",
        (ThrottleProxyHandler,),
        {"upstream": upstream, "bandwidth_kbps": float(bandwidth_kbps)},
    )
    server = ThreadingHTTPServer(("127.0.0.1", 0), handler)
    server.daemon_threads = True
    return server


def run_bench(
    fog_url: str,
    cloud_url: str,
    payload_path: Path,
    trials: int,
    bandwidth_kbps: float,
) -> dict:
    """Ingest the payload into the fog node, then run ``trials`` pushes per
    codec through the throttling proxy; returns the comparison table."""
    payload_path = Path(payload_path)
    body = payload_path.read_bytes()
    response = requests.post(
        fog_url.rstrip("/") + f"/layers?name={payload_path.stem}", data=body, timeout=120
    )
    response.raise_for_status()
    layer_id = response.json()["layer_id"]

    proxy = make_throttle_proxy(cloud_url, bandwidth_kbps)
    start_background(proxy)
    proxy_url = f"http://127.0.0.1:{proxy.server_address[1]}"
    rows = []
    try:
        for codec_label in ("deflate", "none"):
            transfer_times = []
            total_times = []
            transferred = original = 0
            for _ in range(trials):
                push = requests.post(
                    fog_url.rstrip("/") + "/push",
                    json={"layer_id": layer_id, "codec": codec_label, "destination": proxy_url},
                    timeout=600,
                )
                push.raise_for_status()
                metrics = push.json()
                if metrics["outcome"] != "delivered":
                    raise RuntimeError(f"push failed during bench: {metrics}")
                transfer_times.append(metrics["transfer_ms"])
                total_times.append(metrics["total_ms"])
                transferred = metrics["transferred_len"]
                original = metrics["original_len"]
            rows.append(
                {
                    "codec": codec_label,
                    "trials": trials,
                    "transferred_len": transferred,
                    "original_len": original,
                    "mean_transfer_ms": sum(transfer_times) / len(transfer_times),
                    "mean_total_ms": sum(total_times) / len(total_times),
                }
            )
    finally:
        proxy.shutdown()
        proxy.server_close()

    return {
        "payload": payload_path.name,
        "payload_bytes": len(body),
        "bandwidth_kbps": bandwidth_kbps,
        "trials": trials,
        "rows": rows,
    }


def format_table(result: dict) -> str:
    """Human-readable rendering of the bench table (diagnostics only)."""
    lines = [
        f"payload {result['payload']} ({result['payload_bytes']} bytes), "
        f"link {result['bandwidth_kbps']} kbps, {result['trials']} trials per codec",
        f"{'codec':<9}{'bytes sent':>12}{'mean transfer ms':>19}{'mean total ms':>16}",
    ]
    for row in result["rows"]:
        lines.append(
            f"{row['codec']:<9}{row['transferred_len']:>12}"
            f"{row['mean_transfer_ms']:>19.1f}{row['mean_total_ms']:>16.1f}"
        )
    return "\n".join(lines)
