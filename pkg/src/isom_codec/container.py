"""The ``ISV1`` byte container.

All multi-byte integers are little-endian::

    magic "ISV1" | version u8 | filter u8 | wavelet u8 | levels u8 | block_edge u8
    width u16 | height u16 | ll_width u16 | ll_height u16 | codebook_size u16
    codebook: min f32 | scale f32 | size * dim u8 entries
    huffman table | index_count u32 | bit_count u32 | payload bytes
    code_details u8 | per detail plane: min f32 | scale f32 | table | bit_count u32 | bytes
"""

from __future__ import annotations

import logging
import math
import struct
from dataclasses import dataclass

import numpy as np

from isom_codec.entropy import BitPayload, HuffmanTable, read_table, serialize_table
from isom_codec.errors import BadMagic, CorruptStream, InvalidLevels, IsvError, VersionMismatch
from isom_codec.types import FilterTag, WaveletTag
from isom_codec.wavelet import check_levels

log = logging.getLogger(__name__)

MAGIC = b"ISV1"
VERSION = 1

_HEADER = struct.Struct("<4sBBBBBHHHHH")
_F32_PAIR = struct.Struct("<ff")
_U32 = struct.Struct("<I")
_U8 = struct.Struct("<B")


def as_f32(value: float) -> float:
    return float(np.float32(value))


@dataclass(frozen=True, slots=True)
class StreamHeader:
    filter: FilterTag
    wavelet: WaveletTag
    levels: int
    block_edge: int
    width: int
    height: int
    ll_width: int
    ll_height: int
    version: int = VERSION

    @property
    def grid(self) -> tuple[int, int]:
        return -(-self.ll_width // self.block_edge), -(-self.ll_height // self.block_edge)

    @property
    def index_count(self) -> int:
        cols, rows = self.grid
        return cols * rows

    def detail_geometry(self, level: int) -> tuple[int, int]:
        """Subband dims at ``level`` (1 = finest)."""
        scale = 2 ** (self.levels - level)
        return self.ll_width * scale, self.ll_height * scale


@dataclass(frozen=True, slots=True)
class QuantizedCodebook:
    minimum: float
    scale: float
    size: int
    dim: int
    entries: bytes
    """``size * dim`` u8 codes, row-major."""

    def __post_init__(self) -> None:
        object.__setattr__(self, "minimum", as_f32(self.minimum))
        object.__setattr__(self, "scale", as_f32(self.scale))
        if len(self.entries) != self.size * self.dim:
            raise CorruptStream(f"{len(self.entries)} codebook bytes for {self.size}x{self.dim} entries")


@dataclass(frozen=True, slots=True)
class DetailPlane:
    minimum: float
    scale: float
    table: HuffmanTable
    payload: BitPayload

    def __post_init__(self) -> None:
        object.__setattr__(self, "minimum", as_f32(self.minimum))
        object.__setattr__(self, "scale", as_f32(self.scale))


@dataclass(frozen=True, slots=True)
class CompressedStream:
    header: StreamHeader
    codebook: QuantizedCodebook
    table: HuffmanTable
    payload: BitPayload
    details: tuple[DetailPlane, ...] | None = None
    """``None`` when detail subbands are discarded; else finest level first, lh/hl/hh."""

    @property
    def index_count(self) -> int:
        return self.header.index_count


@dataclass(frozen=True, slots=True)
class ContainerSizes:
    header: int
    codebook: int
    table: int
    payload: int
    details: int

    @property
    def total(self) -> int:
        return self.header + self.codebook + self.table + self.payload + self.details


def _table_size(table: HuffmanTable) -> int:
    return 2 + table.symbol_count


def container_sizes(stream: CompressedStream) -> ContainerSizes:
    details = 0
    for plane in stream.details or ():
        details += _F32_PAIR.size + _table_size(plane.table) + _U32.size + len(plane.payload.data)
    return ContainerSizes(
        header=_HEADER.size + 2 * _U32.size + _U8.size,
        codebook=_F32_PAIR.size + len(stream.codebook.entries),
        table=_table_size(stream.table),
        payload=len(stream.payload.data),
        details=details,
    )


def write_container(stream: CompressedStream) -> bytes:
    h = stream.header
    cb = stream.codebook
    try:
        parts = [
            _HEADER.pack(
                MAGIC, h.version, h.filter, h.wavelet, h.levels, h.block_edge,
                h.width, h.height, h.ll_width, h.ll_height, cb.size,
            ),
            _F32_PAIR.pack(cb.minimum, cb.scale),
            cb.entries,
            serialize_table(stream.table),
            _U32.pack(h.index_count),
            _U32.pack(stream.payload.bit_count),
            stream.payload.data,
            _U8.pack(0 if stream.details is None else 1),
        ]
    except struct.error as exc:
        raise CorruptStream(f"stream fields do not fit the container layout: {exc}") from exc
    for plane in stream.details or ():
        parts += [
            _F32_PAIR.pack(plane.minimum, plane.scale),
            serialize_table(plane.table),
            _U32.pack(plane.payload.bit_count),
            plane.payload.data,
        ]
    data = b"".join(parts)
    log.debug("container sizes %s", container_sizes(stream))
    return data


class _Reader:
    def __init__(self, data: bytes) -> None:
        self.data = data
        self.offset = 0

    def take(self, count: int, what: str) -> bytes:
        end = self.offset + count
        if count < 0 or end > len(self.data):
            raise CorruptStream(f"truncated container while reading {what}")
        chunk = self.data[self.offset : end]
        self.offset = end
        return chunk

    def u8(self, what: str) -> int:
        return self.take(1, what)[0]

    def u32(self, what: str) -> int:
        (value,) = _U32.unpack(self.take(_U32.size, what))
        return int(value)

    def f32_pair(self, what: str) -> tuple[float, float]:
        minimum, scale = _F32_PAIR.unpack(self.take(_F32_PAIR.size, what))
        if not (math.isfinite(minimum) and math.isfinite(scale) and scale > 0):
            raise CorruptStream(f"invalid {what} quantizer (min={minimum}, scale={scale})")
        return float(minimum), float(scale)

    def table(self) -> HuffmanTable:
        table, self.offset = read_table(self.data, self.offset)
        return table

    def payload(self, what: str) -> BitPayload:
        bit_count = self.u32(f"{what} bit count")
        return BitPayload(bit_count, self.take((bit_count + 7) // 8, what))


def _read_header(reader: _Reader) -> tuple[StreamHeader, int]:
    if reader.data[:4] != MAGIC:
        raise BadMagic(f"not an ISV1 container (magic {reader.data[:4]!r})")
    _, version, filter_id, wavelet_id, levels, edge, width, height, ll_w, ll_h, size = (
        _HEADER.unpack(reader.take(_HEADER.size, "header"))
    )
    if version != VERSION:
        raise VersionMismatch(f"container version {version}, expected {VERSION}")
    try:
        filter_tag = FilterTag(filter_id)
        wavelet_tag = WaveletTag(wavelet_id)
    except ValueError as exc:
        raise CorruptStream(str(exc)) from exc
    if edge < 1 or size < 1:
        raise CorruptStream(f"invalid block edge {edge} or codebook size {size}")
    try:
        check_levels(width, height, levels)
    except InvalidLevels as exc:
        raise CorruptStream(str(exc)) from exc
    scale = 2**levels
    if (ll_w, ll_h) != (-(-width // scale), -(-height // scale)):
        raise CorruptStream(f"LL plane {ll_w}x{ll_h} inconsistent with {width}x{height} at {levels} levels")
    header = StreamHeader(filter_tag, wavelet_tag, levels, edge, width, height, ll_w, ll_h, version)
    return header, size


def read_container(data: bytes) -> CompressedStream:
    data = bytes(data)
    reader = _Reader(data)
    try:
        header, size = _read_header(reader)
        dim = header.block_edge * header.block_edge
        minimum, scale = reader.f32_pair("codebook")
        codebook = QuantizedCodebook(minimum, scale, size, dim, reader.take(size * dim, "codebook"))
        table = reader.table()
        if table.symbol_count > size:
            raise CorruptStream(f"table covers {table.symbol_count} symbols but codebook has {size}")
        index_count = reader.u32("index count")
        if index_count != header.index_count:
            raise CorruptStream(f"{index_count} indices recorded, grid needs {header.index_count}")
        payload = reader.payload("index payload")

        flag = reader.u8("detail flag")
        details: tuple[DetailPlane, ...] | None
        if flag == 0:
            details = None
        elif flag == 1:
            planes = []
            for level in range(1, header.levels + 1):
                for band in ("lh", "hl", "hh"):
                    what = f"level {level} {band}"
                    plane_min, plane_scale = reader.f32_pair(what)
                    plane_table = reader.table()
                    planes.append(DetailPlane(plane_min, plane_scale, plane_table, reader.payload(what)))
            details = tuple(planes)
        else:
            raise CorruptStream(f"invalid detail flag {flag}")
    except IsvError:
        raise
    except (struct.error, IndexError, ValueError) as exc:
        raise CorruptStream(f"malformed container: {exc}") from exc

    if reader.offset != len(data):
        raise CorruptStream(f"{len(data) - reader.offset} trailing bytes after container")
    return CompressedStream(header, codebook, table, payload, details)
