"""Compression envelope and integrity tests."""

import random
import zlib

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mrfog.codec import (
    ChecksumMismatch,
    CodecError,
    CodecId,
    CompressedPayload,
    CorruptBody,
    LengthMismatch,
    ZeroOriginal,
    checksum,
    compress,
    compression_report,
    decompress,
)

# FIPS 180-4 reference vectors.
SHA256_EMPTY = "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
SHA256_ABC = "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"


class TestChecksum:
    def test_reference_vectors(self):
        assert checksum(b"") == SHA256_EMPTY
        assert checksum(b"abc") == SHA256_ABC

    def test_deterministic(self):
        data = b"the same bytes"
        assert checksum(data) == checksum(data)


class TestCompress:
    def test_repetitive_input_shrinks(self):
        payload = compress(b"a" * 1000, CodecId.DEFLATE)
        assert payload.codec is CodecId.DEFLATE
        assert payload.compressed_len < 32
        assert payload.original_len == 1000
        # Cross-check against a direct raw-deflate encode of the same input.
        ref = zlib.compressobj(6, zlib.DEFLATED, -15)
        assert payload.body == ref.compress(b"a" * 1000) + ref.flush()

    def test_empty_input_falls_back(self):
        payload = compress(b"", CodecId.DEFLATE)
        assert payload.codec is CodecId.NONE
        assert decompress(payload) == b""

    def test_random_bytes_fall_back_to_none(self):
        data = random.Random(1234).randbytes(10 * 1024)
        ref = zlib.compressobj(6, zlib.DEFLATED, -15)
        assert len(ref.compress(data) + ref.flush()) >= len(data)
        payload = compress(data, CodecId.DEFLATE)
        assert payload.codec is CodecId.NONE
        assert payload.body == data

    def test_requested_none(self):
        payload = compress(b"a" * 1000, CodecId.NONE)
        assert payload.codec is CodecId.NONE
        assert payload.compressed_len == payload.original_len == 1000

    @settings(max_examples=300, deadline=None)
    @given(st.binary(max_size=4096))
    def test_roundtrip_and_never_expand(self, data):
        payload = compress(data, CodecId.DEFLATE)
        assert payload.compressed_len == len(payload.body)
        assert payload.compressed_len <= payload.original_len == len(data)
        assert decompress(payload) == data


class TestDecompress:
    def test_none_codec_passthrough(self):
        payload = compress(b"xyz", CodecId.NONE)
        assert decompress(payload) == b"xyz"

    def test_bit_flip_fuzz_never_silent(self):
        data = (b"coordinates " * 64) + bytes(range(256))
        for codec in (CodecId.DEFLATE, CodecId.NONE):
            payload = compress(data, codec)
            rng = random.Random(99)
            positions = rng.sample(range(len(payload.body) * 8), 48)
            for bit in positions:
                body = bytearray(payload.body)
                body[bit // 8] ^= 1 << (bit % 8)
                tampered = CompressedPayload(
                    payload.codec,
                    payload.original_len,
                    payload.compressed_len,
                    payload.checksum,
                    bytes(body),
                )
                with pytest.raises(CodecError):
                    decompress(tampered)

    def test_tampered_length_detected(self):
        payload = compress(b"hello world", CodecId.NONE)
        bad = CompressedPayload(
            payload.codec, payload.original_len + 1, payload.compressed_len,
            payload.checksum, payload.body,
        )
        with pytest.raises(LengthMismatch):
            decompress(bad)

    def test_tampered_checksum_detected(self):
        payload = compress(b"hello world", CodecId.DEFLATE)
        flipped = ("0" if payload.checksum[0] != "0" else "1") + payload.checksum[1:]
        bad = CompressedPayload(
            payload.codec, payload.original_len, payload.compressed_len, flipped, payload.body
        )
        with pytest.raises(ChecksumMismatch):
            decompress(bad)

    def test_garbage_body_is_corrupt(self):
        payload = compress(b"a" * 1000, CodecId.DEFLATE)
        bad = CompressedPayload(
            payload.codec, payload.original_len, 4, payload.checksum, b"\xff\xff\xff\xff"
        )
        with pytest.raises((CorruptBody, ChecksumMismatch, LengthMismatch)):
            decompress(bad)


class TestReport:
    def test_quarter_ratio(self):
        report = compression_report(1000, 250)
        assert report.ratio == 0.25
        assert report.reduction_pct == 75.0

    def test_no_reduction(self):
        report = compression_report(1000, 1000)
        assert report.ratio == 1.0
        assert report.reduction_pct == 0.0

    def test_zero_original_rejected(self):
        with pytest.raises(ZeroOriginal):
            compression_report(0, 10)
