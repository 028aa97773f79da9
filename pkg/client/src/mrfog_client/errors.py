"""Typed exceptions mirroring the gateway's HTTP error classes."""

from __future__ import annotations


class FogClientError(Exception):
    """Base class for all client failures."""


class TransportError(FogClientError):
    """The fog node could not be reached or did not answer."""


class NotFound(FogClientError):
    """The referenced layer or route does not exist (HTTP 404)."""


class ValidationFailed(FogClientError):
    """Ingest was rejected (HTTP 422); carries the full validation report."""

    def __init__(self, message: str, report: list[dict]):
        super().__init__(message)
        self.report = report


class ClientError(FogClientError):
    """Any other 4xx answer; carries the error payload."""

    def __init__(self, message: str, payload: dict):
        super().__init__(message)
        self.payload = payload


class ServerError(FogClientError):
    """A 5xx answer from the fog node."""
