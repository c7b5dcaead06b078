"""Canonical Huffman coding of quantizer index streams.

Tables are fully described by their per-symbol code lengths; codes are assigned in
``(length, symbol)`` order and packed MSB-first.
"""

from __future__ import annotations

import heapq
import logging
import struct
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np
import numpy.typing as npt

from isom_codec.errors import CorruptStream, CorruptTable, EmptyAlphabet, UnknownSymbol

log = logging.getLogger(__name__)

MAX_CODE_LENGTH = 16
MAX_SYMBOLS = 0xFFFF


@dataclass(frozen=True, slots=True)
class HuffmanTable:
    code_lengths: tuple[int, ...]
    codes: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        lengths = tuple(int(n) for n in self.code_lengths)
        if not 1 <= len(lengths) <= MAX_SYMBOLS:
            raise CorruptTable(f"symbol count {len(lengths)} outside [1, {MAX_SYMBOLS}]")
        if any(not 0 <= n <= MAX_CODE_LENGTH for n in lengths):
            raise CorruptTable(f"code lengths must lie in [0, {MAX_CODE_LENGTH}]")
        if not any(lengths):
            raise CorruptTable("table has no used symbols")
        kraft = sum(1 << (MAX_CODE_LENGTH - n) for n in lengths if n)
        if kraft > 1 << MAX_CODE_LENGTH:
            raise CorruptTable(f"code lengths violate the Kraft inequality ({kraft / (1 << MAX_CODE_LENGTH)} > 1)")
        object.__setattr__(self, "code_lengths", lengths)
        object.__setattr__(self, "codes", _canonical_codes(lengths))

    @property
    def symbol_count(self) -> int:
        return len(self.code_lengths)

    @property
    def max_length(self) -> int:
        return max(self.code_lengths)

    @property
    def is_complete(self) -> bool:
        return sum(1 << (MAX_CODE_LENGTH - n) for n in self.code_lengths if n) == 1 << MAX_CODE_LENGTH

    def decode_lut(self) -> tuple[npt.NDArray[np.int64], npt.NDArray[np.int64]]:
        """Symbol and code length for every ``max_length``-bit window; length 0 marks an invalid prefix."""
        width = self.max_length
        symbols = np.zeros(1 << width, dtype=np.int64)
        lengths = np.zeros(1 << width, dtype=np.int64)
        for symbol, (code, length) in enumerate(zip(self.codes, self.code_lengths, strict=True)):
            if length:
                shift = width - length
                symbols[code << shift : (code + 1) << shift] = symbol
                lengths[code << shift : (code + 1) << shift] = length
        return symbols, lengths


@dataclass(frozen=True, slots=True)
class BitPayload:
    bit_count: int
    data: bytes

    def __post_init__(self) -> None:
        if self.bit_count < 0 or len(self.data) != (self.bit_count + 7) // 8:
            raise CorruptStream(f"{len(self.data)} bytes cannot hold exactly {self.bit_count} bits")
        if spare := -self.bit_count % 8:
            if self.data[-1] & ((1 << spare) - 1):
                raise CorruptStream("payload padding bits are not zero")


def _canonical_codes(lengths: Sequence[int]) -> tuple[int, ...]:
    codes = [0] * len(lengths)
    code = 0
    previous = 0
    for length, symbol in sorted((n, s) for s, n in enumerate(lengths) if n):
        code <<= length - previous
        codes[symbol] = code
        code += 1
        previous = length
    return tuple(codes)


def _limit_lengths(lengths: list[int], frequencies: Sequence[int]) -> list[int]:
    """Clamp code lengths to ``MAX_CODE_LENGTH`` keeping the Kraft sum at most one."""
    counts = [0] * (max(lengths) + 1)
    for n in lengths:
        if n:
            counts[n] += 1
    for n in range(len(counts) - 1, MAX_CODE_LENGTH, -1):
        while counts[n] > 0:
            j = n - 2
            while counts[j] == 0:
                j -= 1
            counts[n] -= 2
            counts[n - 1] += 1
            counts[j + 1] += 2
            counts[j] -= 1
    # Most frequent symbols take the shortest of the rebalanced lengths.
    order = sorted(
        (s for s, n in enumerate(lengths) if n), key=lambda s: (lengths[s], -frequencies[s], s)
    )
    limited = [0] * len(lengths)
    it = iter(order)
    for n in range(1, MAX_CODE_LENGTH + 1):
        for _ in range(counts[n]):
            limited[next(it)] = n
    return limited


def build_table(frequencies: Sequence[int]) -> HuffmanTable:
    if len(frequencies) == 0 or not any(int(f) > 0 for f in frequencies):
        raise EmptyAlphabet("at least one symbol needs a nonzero frequency")

    lengths = [0] * len(frequencies)
    # (weight, lowest symbol, subtree size, members)
    heap: list[tuple[int, int, int, list[int]]] = [
        (int(f), s, 1, [s]) for s, f in enumerate(frequencies) if int(f) > 0
    ]
    heapq.heapify(heap)
    if len(heap) == 1:
        lengths[heap[0][1]] = 1
        return HuffmanTable(tuple(lengths))

    while len(heap) > 1:
        w1, s1, n1, m1 = heapq.heappop(heap)
        w2, s2, n2, m2 = heapq.heappop(heap)
        members = m1 + m2
        for s in members:
            lengths[s] += 1
        heapq.heappush(heap, (w1 + w2, min(s1, s2), n1 + n2, members))

    if max(lengths) > MAX_CODE_LENGTH:
        log.debug("rebalancing huffman lengths (max %d)", max(lengths))
        lengths = _limit_lengths(lengths, frequencies)
    return HuffmanTable(tuple(lengths))


def encode(symbols: Sequence[int] | npt.NDArray[np.integer], table: HuffmanTable) -> BitPayload:
    syms = np.asarray(symbols, dtype=np.int64).reshape(-1)
    if syms.size == 0:
        return BitPayload(0, b"")
    if syms.min() < 0 or syms.max() >= table.symbol_count:
        raise UnknownSymbol(f"symbols must lie in [0, {table.symbol_count})")
    all_lengths = np.asarray(table.code_lengths, dtype=np.int64)
    lengths = all_lengths[syms]
    if not lengths.all():
        raise UnknownSymbol(f"symbol {int(syms[lengths == 0][0])} has no code in this table")
    codes = np.asarray(table.codes, dtype=np.int64)[syms]

    ends = np.cumsum(lengths)
    starts = ends - lengths
    bits = np.zeros(int(ends[-1]), dtype=np.uint8)
    for k in range(table.max_length):
        active = lengths > k
        bits[starts[active] + k] = (codes[active] >> (lengths[active] - 1 - k)) & 1
    return BitPayload(len(bits), np.packbits(bits).tobytes())


def decode(payload: BitPayload, table: HuffmanTable, symbol_count: int) -> list[int]:
    if symbol_count <= 0:
        return []
    width = table.max_length
    available = payload.bit_count
    window_count = min(available, symbol_count * width)
    bits = np.unpackbits(np.frombuffer(payload.data, dtype=np.uint8))[:window_count]
    bits = np.concatenate([bits, np.zeros(width, dtype=np.uint8)]).astype(np.int64)

    windows = np.zeros(window_count, dtype=np.int64)
    for k in range(width):
        windows = (windows << 1) | bits[k : k + window_count]
    lut_symbols, lut_lengths = table.decode_lut()
    symbol_at = lut_symbols[windows].tolist()
    length_at = lut_lengths[windows].tolist()

    out: list[int] = []
    pos = 0
    for _ in range(symbol_count):
        if pos >= window_count:
            raise CorruptStream(f"payload exhausted after {len(out)} of {symbol_count} symbols")
        length = length_at[pos]
        if length == 0:
            raise CorruptStream(f"invalid code prefix at bit {pos}")
        if pos + length > available:
            raise CorruptStream(f"payload exhausted after {len(out)} of {symbol_count} symbols")
        out.append(symbol_at[pos])
        pos += length
    return out


def serialize_table(table: HuffmanTable) -> bytes:
    return struct.pack("<H", table.symbol_count) + bytes(table.code_lengths)


def read_table(data: bytes | memoryview, offset: int = 0) -> tuple[HuffmanTable, int]:
    """Parse a serialized table at ``offset``; returns the table and the offset past it."""
    if len(data) < offset + 2:
        raise CorruptTable("truncated table header")
    (count,) = struct.unpack_from("<H", data, offset)
    end = offset + 2 + count
    if count == 0:
        raise CorruptTable("table declares zero symbols")
    if len(data) < end:
        raise CorruptTable(f"table declares {count} symbols but only {len(data) - offset - 2} bytes follow")
    return HuffmanTable(tuple(data[offset + 2 : end])), end


def deserialize_table(data: bytes) -> HuffmanTable:
    table, end = read_table(data)
    if end != len(data):
        raise CorruptTable(f"{len(data) - end} trailing bytes after table")
    return table
