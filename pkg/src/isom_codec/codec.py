"""Compression pipeline: pre-filter, DWT, ISOM quantization of LL, Huffman coding."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from funlog import log_calls

from isom_codec.container import (
    VERSION,
    CompressedStream,
    DetailPlane,
    QuantizedCodebook,
    StreamHeader,
)
from isom_codec.entropy import build_table, decode, encode
from isom_codec.errors import (
    CorruptStream,
    InvalidConfig,
    IsvError,
    UnsupportedFormat,
    VersionMismatch,
)
from isom_codec.filters import FilterKind, apply_filter
from isom_codec.isom import (
    IsomCodebook,
    IsomConfig,
    extract_blocks,
    quantize,
    reconstruct,
    train,
)
from isom_codec.raster import Image
from isom_codec.types import Plane, WaveletTag
from isom_codec.wavelet import DetailLevel, SubbandDecomposition, WaveletFamily, dwt2, idwt2

log = logging.getLogger(__name__)

_U8_LEVELS = 255
_SCALE_FLOOR = 1e-6


@dataclass(frozen=True, slots=True)
class CodecOptions:
    filter: FilterKind = field(default_factory=FilterKind)
    wavelet: WaveletTag = WaveletTag.HAAR
    levels: int = 1
    block_edge: int = 8
    isom: IsomConfig = field(default_factory=IsomConfig)
    code_details: bool = False
    detail_step: float = 4.0

    def __post_init__(self) -> None:
        if not 1 <= self.levels <= 15:
            raise InvalidConfig(f"levels must lie in [1, 15], got {self.levels}")
        if not 1 <= self.block_edge <= 255:
            raise InvalidConfig(f"block_edge must lie in [1, 255], got {self.block_edge}")
        if not self.detail_step > 0:
            raise InvalidConfig(f"detail_step must be > 0, got {self.detail_step}")


def _uniform_quantizer(values: Plane, step: float) -> tuple[float, float]:
    """f32 ``(min, scale)`` with ``min <= values.min()`` and ``min + 255 * scale >= values.max()``."""
    lo, hi = float(values.min()), float(values.max())
    minimum = np.float32(lo)
    if float(minimum) > lo:
        minimum = np.float32(np.nextafter(minimum, np.float32(-np.inf)))
    scale = np.float32(max(step, (hi - float(minimum)) / _U8_LEVELS, _SCALE_FLOOR))
    if float(minimum) + _U8_LEVELS * float(scale) < hi:
        scale = np.float32(np.nextafter(scale, np.float32(np.inf)))
    return float(minimum), float(scale)


def quantize_codebook(codebook: IsomCodebook) -> QuantizedCodebook:
    """Store every codeword entry as ``round((v - min) / scale)`` in one byte."""
    values = codebook.codewords
    minimum, scale = _uniform_quantizer(values, 0.0)
    codes = np.clip(np.rint((values - minimum) / scale), 0, _U8_LEVELS).astype(np.uint8)
    return QuantizedCodebook(minimum, scale, len(codebook), codebook.dim, codes.tobytes())


def dequantize_codebook(stored: QuantizedCodebook) -> IsomCodebook:
    codes = np.frombuffer(stored.entries, dtype=np.uint8).reshape(stored.size, stored.dim)
    return IsomCodebook(stored.minimum + codes.astype(np.float64) * stored.scale)


def _encode_detail(plane: Image, step: float) -> DetailPlane:
    minimum, scale = _uniform_quantizer(plane.samples, step)
    symbols = np.rint((plane.samples - minimum) / scale).astype(np.int64).reshape(-1)
    table = build_table(np.bincount(symbols).tolist())
    return DetailPlane(minimum, scale, table, encode(symbols, table))


def _decode_detail(plane: DetailPlane, geometry: tuple[int, int]) -> Image:
    width, height = geometry
    symbols = np.asarray(decode(plane.payload, plane.table, width * height), dtype=np.float64)
    return Image((plane.minimum + symbols * plane.scale).reshape(height, width))


@log_calls(level="info", show_timing_only=True)
def compress(img: Image, opts: CodecOptions | None = None) -> CompressedStream:
    opts = opts or CodecOptions()
    if max(img.geometry) > 0xFFFF:
        raise UnsupportedFormat(f"{img.width}x{img.height} exceeds the 65535-pixel container limit")
    family = WaveletFamily.from_tag(opts.wavelet)

    filtered = apply_filter(img, opts.filter)
    decomp = dwt2(filtered, family, opts.levels)
    blocks = extract_blocks(decomp.ll, opts.block_edge)
    trained = train(blocks, opts.isom)

    stored = quantize_codebook(trained)
    # Indices are chosen against the codebook the decoder will see.
    indices = quantize(blocks, dequantize_codebook(stored))
    table = build_table(np.bincount(indices, minlength=len(trained)).tolist())
    payload = encode(indices, table)

    details = None
    if opts.code_details:
        details = tuple(
            _encode_detail(band, opts.detail_step)
            for level in decomp.details
            for band in level.planes()
        )

    header = StreamHeader(
        filter=opts.filter.tag,
        wavelet=opts.wavelet,
        levels=opts.levels,
        block_edge=opts.block_edge,
        width=img.width,
        height=img.height,
        ll_width=decomp.ll.width,
        ll_height=decomp.ll.height,
    )
    log.debug(
        "compressed %dx%d: %d codewords, %d indices, %d payload bits",
        img.width, img.height, len(trained), len(indices), payload.bit_count,
    )
    return CompressedStream(header, stored, table, payload, details)


def _zero_details(header: StreamHeader) -> tuple[DetailLevel, ...]:
    levels = []
    for level in range(1, header.levels + 1):
        width, height = header.detail_geometry(level)
        zero = Image.constant(width, height, 0.0)
        levels.append(DetailLevel(zero, zero, zero))
    return tuple(levels)


def _decoded_details(header: StreamHeader, planes: tuple[DetailPlane, ...]) -> tuple[DetailLevel, ...]:
    if len(planes) != 3 * header.levels:
        raise CorruptStream(f"{len(planes)} detail planes for {header.levels} levels")
    levels = []
    for level in range(1, header.levels + 1):
        geometry = header.detail_geometry(level)
        lh, hl, hh = (_decode_detail(p, geometry) for p in planes[3 * (level - 1) : 3 * level])
        levels.append(DetailLevel(lh, hl, hh))
    return tuple(levels)


@log_calls(level="info", show_timing_only=True)
def decompress(stream: CompressedStream) -> Image:
    header = stream.header
    if header.version != VERSION:
        raise VersionMismatch(f"stream version {header.version} is not supported")
    family = WaveletFamily.from_tag(header.wavelet)
    codebook = dequantize_codebook(stream.codebook)

    indices = decode(stream.payload, stream.table, header.index_count)
    try:
        ll = reconstruct(
            indices,
            codebook,
            header.grid,
            (header.ll_width, header.ll_height),
            header.block_edge,
        )
    except IsvError as exc:
        raise CorruptStream(f"index payload does not match the codebook: {exc}") from exc

    if stream.details is None:
        details = _zero_details(header)
    else:
        details = _decoded_details(header, stream.details)

    decomp = SubbandDecomposition(
        levels=header.levels,
        ll=ll,
        details=details,
        original_geometry=(header.width, header.height),
    )
    return Image(idwt2(decomp, family).to_bytes_plane())
