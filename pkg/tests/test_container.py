from __future__ import annotations

import struct

import numpy as np
import pytest

from isom_codec.codec import decompress
from isom_codec.container import (
    MAGIC,
    VERSION,
    CompressedStream,
    DetailPlane,
    QuantizedCodebook,
    StreamHeader,
    container_sizes,
    read_container,
    write_container,
)
from isom_codec.entropy import build_table, encode
from isom_codec.errors import BadMagic, CorruptStream, IsvError, VersionMismatch
from isom_codec.types import FilterTag, WaveletTag


def random_stream(rng: np.random.Generator) -> CompressedStream:
    levels = int(rng.integers(1, 4))
    edge = int(rng.integers(1, 9))
    width, height = (int(v) for v in rng.integers(2 ** (levels - 1), 65, size=2))
    scale = 2**levels
    header = StreamHeader(
        filter=FilterTag(int(rng.integers(0, 5))),
        wavelet=WaveletTag(int(rng.integers(0, 2))),
        levels=levels,
        block_edge=edge,
        width=width,
        height=height,
        ll_width=-(-width // scale),
        ll_height=-(-height // scale),
    )
    size = int(rng.integers(1, 21))
    codebook = QuantizedCodebook(
        minimum=float(rng.uniform(-500, 500)),
        scale=float(rng.uniform(1e-3, 4)),
        size=size,
        dim=edge * edge,
        entries=rng.integers(0, 256, size=size * edge * edge, dtype=np.uint8).tobytes(),
    )
    indices = rng.integers(0, size, size=header.index_count)
    table = build_table(np.bincount(indices, minlength=size).tolist())

    details = None
    if rng.random() < 0.5:
        planes = []
        for level in range(1, levels + 1):
            w, h = header.detail_geometry(level)
            for _ in range(3):
                symbols = rng.integers(0, int(rng.integers(1, 20)), size=w * h)
                plane_table = build_table(np.bincount(symbols).tolist())
                planes.append(
                    DetailPlane(
                        float(rng.uniform(-100, 0)),
                        float(rng.uniform(0.5, 8)),
                        plane_table,
                        encode(symbols, plane_table),
                    )
                )
        details = tuple(planes)
    return CompressedStream(header, codebook, table, encode(indices, table), details)


def minimal_container() -> bytes:
    """8x8 image, Haar, one level, one 4x4 codeword of 200 used by a single index."""
    return b"".join(
        [
            MAGIC,
            bytes([VERSION, FilterTag.NONE, WaveletTag.HAAR, 1, 4]),
            struct.pack("<HHHHH", 8, 8, 4, 4, 1),
            struct.pack("<ff", 100.0, 1.0),
            bytes([100] * 16),
            bytes([1, 0, 1]),
            struct.pack("<I", 1),
            struct.pack("<I", 1),
            b"\x00",
            b"\x00",
        ]
    )


class TestRoundtrip:
    def test_fuzzed_streams(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            stream = random_stream(rng)
            data = write_container(stream)
            restored = read_container(data)
            assert restored == stream
            assert write_container(restored) == data
            assert container_sizes(stream).total == len(data)

    def test_minimal_hand_built_container(self):
        data = minimal_container()
        stream = read_container(data)
        assert stream.header.grid == (1, 1)
        assert stream.details is None
        assert write_container(stream) == data
        img = decompress(stream)
        assert img.geometry == (8, 8)
        assert np.all(img.samples == 100)

    def test_size_breakdown(self):
        sizes = container_sizes(read_container(minimal_container()))
        assert (sizes.header, sizes.codebook, sizes.table, sizes.payload, sizes.details) == (
            28,
            24,
            3,
            1,
            0,
        )
        assert sizes.total == len(minimal_container())


class TestMalformed:
    def test_bad_magic(self):
        with pytest.raises(BadMagic):
            read_container(b"ISV2" + minimal_container()[4:])
        with pytest.raises(BadMagic):
            read_container(b"")

    def test_version_mismatch(self):
        data = bytearray(minimal_container())
        data[4] = 2
        with pytest.raises(VersionMismatch):
            read_container(bytes(data))

    @pytest.mark.parametrize(
        ("offset", "value"),
        [
            (5, 9),  # filter id
            (6, 3),  # wavelet id
            (7, 0),  # levels
            (8, 0),  # block edge
            (13, 5),  # ll width
            (17, 0),  # codebook size
        ],
    )
    def test_inconsistent_header(self, offset, value):
        data = bytearray(minimal_container())
        data[offset] = value
        with pytest.raises(CorruptStream):
            read_container(bytes(data))

    def test_invalid_detail_flag(self):
        data = bytearray(minimal_container())
        data[-1] = 2
        with pytest.raises(CorruptStream):
            read_container(bytes(data))

    def test_trailing_bytes(self):
        with pytest.raises(CorruptStream):
            read_container(minimal_container() + b"\x00")

    def test_table_larger_than_codebook(self):
        data = minimal_container().replace(bytes([1, 0, 1]), bytes([2, 0, 1, 1]), 1)
        with pytest.raises(CorruptStream):
            read_container(data)

    def test_mutated_streams_are_rejected(self):
        rng = np.random.default_rng(11)
        for case in range(100):
            data = write_container(random_stream(rng))
            match case % 3:
                case 0:
                    mutated = data[: int(rng.integers(0, len(data)))]
                case 1:
                    mutated = data + rng.integers(0, 256, size=int(rng.integers(1, 8)), dtype=np.uint8).tobytes()
                case _:
                    flip = bytearray(data)
                    flip[int(rng.integers(0, 4))] ^= 0xFF
                    mutated = bytes(flip)
            with pytest.raises(CorruptStream):
                read_container(mutated)

    def test_random_bit_flips_never_crash(self):
        rng = np.random.default_rng(12)
        for _ in range(200):
            data = bytearray(write_container(random_stream(rng)))
            for _ in range(int(rng.integers(1, 4))):
                data[int(rng.integers(0, len(data)))] ^= 1 << int(rng.integers(0, 8))
            try:
                read_container(bytes(data))
            except IsvError:
                pass
