"""Lossless compression envelope for fog-to-cloud payloads.

Codec set is {none, deflate} where deflate is raw RFC 1951 (no zlib or gzip
wrapper).  Every payload carries the SHA-256 of the ORIGINAL bytes so the
receiver verifies content end-to-end, independent of transport encoding.
When deflate does not make the body strictly smaller the payload falls back
to the raw bytes, so compression never inflates a transfer.
"""

from __future__ import annotations

import hashlib
import zlib
from dataclasses import dataclass
from enum import Enum

_DEFLATE_LEVEL = 6
_RAW_DEFLATE_WBITS = -15  # raw RFC 1951 stream


class CodecId(Enum):
    NONE = "none"
    DEFLATE = "deflate"

    @classmethod
    def from_label(cls, label: str) -> "CodecId":
        for member in cls:
            if member.value == label:
                return member
        raise ValueError(f"unknown codec {label!r}")


class CodecError(Exception):
    """Base class for payload integrity failures."""


class CorruptBody(CodecError):
    """Compressed body does not inflate."""


class ChecksumMismatch(CodecError):
    """Recovered bytes hash differently than the recorded checksum."""


class LengthMismatch(CodecError):
    """Recovered bytes have the wrong length."""


class ZeroOriginal(CodecError):
    """A compression report needs a nonzero original size."""


@dataclass(frozen=True)
class CompressedPayload:
    codec: CodecId
    original_len: int
    compressed_len: int
    checksum: str  # SHA-256 of the original bytes, 64 hex chars
    body: bytes


@dataclass(frozen=True)
class CompressionReport:
    original_len: int
    compressed_len: int
    ratio: float
    reduction_pct: float


def checksum(data: bytes) -> str:
    """SHA-256 hex digest of the bytes."""
    return hashlib.sha256(data).hexdigest()


def deflate(data: bytes) -> bytes:
    comp = zlib.compressobj(_DEFLATE_LEVEL, zlib.DEFLATED, _RAW_DEFLATE_WBITS)
    return comp.compress(data) + comp.flush()


def inflate(body: bytes) -> bytes:
    try:
        decomp = zlib.decompressobj(_RAW_DEFLATE_WBITS)
        out = decomp.decompress(body)
        out += decomp.flush()
        if decomp.unconsumed_tail or not decomp.eof:
            raise CorruptBody("deflate stream is truncated or has trailing garbage")
        return out
    except zlib.error as exc:
        raise CorruptBody(f"deflate stream does not inflate: {exc}") from exc


def compress(data: bytes, requested: CodecId = CodecId.DEFLATE) -> CompressedPayload:
    """Wrap bytes in a payload, falling back to codec=none when deflate
    would not strictly shrink them."""
    digest = checksum(data)
    if requested is CodecId.DEFLATE:
        body = deflate(data)
        if len(body) < len(data):
            return CompressedPayload(CodecId.DEFLATE, len(data), len(body), digest, body)
    return CompressedPayload(CodecId.NONE, len(data), len(data), digest, bytes(data))


def decompress(payload: CompressedPayload) -> bytes:
    """Recover and verify the original bytes; never silently returns
    corrupted content."""
    if payload.codec is CodecId.DEFLATE:
        data = inflate(payload.body)
    else:
        data = payload.body
    if len(data) != payload.original_len:
        raise LengthMismatch(f"expected {payload.original_len} bytes, got {len(data)}")
    if checksum(data) != payload.checksum:
        raise ChecksumMismatch("recovered bytes do not match the recorded checksum")
    return data


def compression_report(original_len: int, compressed_len: int) -> CompressionReport:
    if original_len <= 0:
        raise ZeroOriginal("original_len must be positive")
    ratio = compressed_len / original_len
    return CompressionReport(original_len, compressed_len, ratio, 100.0 * (1.0 - ratio))
