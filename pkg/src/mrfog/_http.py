"""Minimal HTTP plumbing shared by the fog gateway and the cloud stub."""

from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer


class JsonRequestHandler(BaseHTTPRequestHandler):
    """Base handler with JSON helpers; subclasses implement do_GET/do_POST."""

    protocol_version = "HTTP/1.1"
    server_version = "mrfog"
    quiet = True

    def log_message(self, fmt, *args):  # noqa: D102 - stdlib signature
        if not self.quiet:
            super().log_message(fmt, *args)

    def read_body(self) -> bytes:
        length = int(self.headers.get("Content-Length") or 0)
        return self.rfile.read(length) if length > 0 else b""

    def send_payload(self, status: int, body: bytes, content_type: str) -> None:
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def send_json(self, status: int, payload) -> None:
        self.send_payload(status, json.dumps(payload).encode("utf-8"), "application/json")

    def send_error_json(self, status: int, error: str, message: str, **extra) -> None:
        self.send_json(status, {"error": error, "message": message, **extra})


def start_background(server: ThreadingHTTPServer) -> threading.Thread:
    """Run a server loop in a daemon thread (used by tests and the bench proxy)."""
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    return thread


__all__ = ["JsonRequestHandler", "ThreadingHTTPServer", "start_background"]
