"""Incremental self-organizing map used as a block vector quantizer.

The map is a 1-D chain of codewords. Training alternates rounds of online SOM updates with
a growth step that splits the node carrying the largest accumulated squared error, until
the mean distortion target is met, the node cap is reached, or the rounds run out.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt
from funlog import log_calls

from isom_codec.errors import (
    DimensionMismatch,
    EmptyInput,
    IndexOutOfRange,
    InvalidConfig,
    ShapeMismatch,
)
from isom_codec.raster import Image, crop, pad_replicate
from isom_codec.types import Plane

log = logging.getLogger(__name__)

MAX_CODEWORDS = 0xFFFF

# Upper bound on the (blocks x codewords x dim) temporaries built by nearest-codeword search.
_SEARCH_CHUNK_ELEMENTS = 1 << 22

Indices = npt.NDArray[np.intp]


@dataclass(frozen=True, eq=False, slots=True)
class BlockSet:
    block_edge: int
    vectors: Plane
    """Shape ``(count, block_edge**2)``, raster order."""
    grid: tuple[int, int]
    """``(blocks per row, blocks per column)``."""
    source_geometry: tuple[int, int]

    def __post_init__(self) -> None:
        vectors = np.array(self.vectors, dtype=np.float64)
        cols, rows = self.grid
        if vectors.ndim != 2 or vectors.shape != (cols * rows, self.dim):
            raise ShapeMismatch(
                f"expected {cols * rows} blocks of {self.dim} samples, got shape {vectors.shape}"
            )
        if not np.all(np.isfinite(vectors)):
            raise ShapeMismatch("block samples must be finite")
        vectors.flags.writeable = False
        object.__setattr__(self, "vectors", vectors)

    @property
    def dim(self) -> int:
        return self.block_edge * self.block_edge

    def __len__(self) -> int:
        return int(self.vectors.shape[0])


@dataclass(frozen=True, slots=True)
class IsomConfig:
    initial_nodes: int = 4
    max_nodes: int = 64
    epochs_per_round: int = 10
    rounds: int = 64
    alpha_start: float = 0.5
    alpha_end: float = 0.01
    radius_start: float | None = None
    """Chain neighbourhood radius at the start of each round; ``initial_nodes / 2`` when unset."""
    growth_distortion_target: float = 5.0
    split_epsilon: float = 1e-3
    rng_seed: int = 42

    def __post_init__(self) -> None:
        if not 1 <= self.initial_nodes <= self.max_nodes <= MAX_CODEWORDS:
            raise InvalidConfig(
                f"need 1 <= initial_nodes ({self.initial_nodes}) <= max_nodes ({self.max_nodes}) <= {MAX_CODEWORDS}"
            )
        if not 0 < self.alpha_end <= self.alpha_start < 1:
            raise InvalidConfig(
                f"need 0 < alpha_end ({self.alpha_end}) <= alpha_start ({self.alpha_start}) < 1"
            )
        if self.epochs_per_round < 1 or self.rounds < 1:
            raise InvalidConfig("epochs_per_round and rounds must be >= 1")
        if self.radius_start is not None and self.radius_start < 0:
            raise InvalidConfig(f"radius_start must be >= 0, got {self.radius_start}")
        if self.split_epsilon < 0 or self.growth_distortion_target < 0:
            raise InvalidConfig("split_epsilon and growth_distortion_target must be >= 0")
        if not 0 <= self.rng_seed < 2**64:
            raise InvalidConfig(f"rng_seed must fit 64 bits, got {self.rng_seed}")

    @property
    def effective_radius(self) -> float:
        return self.initial_nodes / 2 if self.radius_start is None else self.radius_start


@dataclass(frozen=True, eq=False, slots=True)
class IsomCodebook:
    codewords: Plane
    """Shape ``(size, dim)`` in chain order."""
    node_errors: Plane | None = None
    config: IsomConfig | None = None
    from_initial_sample: bool = False
    """Set when training ended worse than the sampled starting blocks and they were kept instead."""

    def __post_init__(self) -> None:
        codewords = np.array(self.codewords, dtype=np.float64)
        if codewords.ndim != 2 or not 1 <= codewords.shape[0] <= MAX_CODEWORDS:
            raise ShapeMismatch(f"invalid codebook shape {codewords.shape}")
        if not np.all(np.isfinite(codewords)):
            raise ShapeMismatch("codeword entries must be finite")
        codewords.flags.writeable = False
        object.__setattr__(self, "codewords", codewords)

    @property
    def dim(self) -> int:
        return int(self.codewords.shape[1])

    def __len__(self) -> int:
        return int(self.codewords.shape[0])


def extract_blocks(plane: Image, block_edge: int) -> BlockSet:
    if block_edge < 1:
        raise InvalidConfig(f"block_edge must be >= 1, got {block_edge}")
    padded = pad_replicate(plane, block_edge).samples
    rows, cols = padded.shape[0] // block_edge, padded.shape[1] // block_edge
    vectors = (
        padded.reshape(rows, block_edge, cols, block_edge)
        .transpose(0, 2, 1, 3)
        .reshape(rows * cols, block_edge * block_edge)
    )
    return BlockSet(block_edge, vectors, (cols, rows), plane.geometry)


def reassemble_blocks(blocks: BlockSet) -> Image:
    cols, rows = blocks.grid
    edge = blocks.block_edge
    width, height = blocks.source_geometry
    if not (1 <= width <= cols * edge and 1 <= height <= rows * edge):
        raise ShapeMismatch(
            f"source geometry {blocks.source_geometry} does not fit a {cols}x{rows} grid of {edge}-blocks"
        )
    plane = (
        blocks.vectors.reshape(rows, cols, edge, edge).transpose(0, 2, 1, 3).reshape(rows * edge, cols * edge)
    )
    return crop(Image(plane), width, height)


def _nearest(vectors: Plane, codewords: Plane) -> tuple[Indices, Plane]:
    """Nearest codeword per vector (lowest index on ties) and its squared distance."""
    step = max(1, _SEARCH_CHUNK_ELEMENTS // max(1, codewords.size))
    indices = np.empty(len(vectors), dtype=np.intp)
    errors = np.empty(len(vectors), dtype=np.float64)
    for start in range(0, len(vectors), step):
        chunk = vectors[start : start + step]
        distances = ((chunk[:, np.newaxis, :] - codewords[np.newaxis, :, :]) ** 2).sum(axis=-1)
        best = distances.argmin(axis=1)
        indices[start : start + step] = best
        errors[start : start + step] = distances[np.arange(len(chunk)), best]
    return indices, errors


def _check_dim(dim: int, codebook: IsomCodebook) -> None:
    if dim != codebook.dim:
        raise DimensionMismatch(f"vectors of length {dim} against a codebook of dimension {codebook.dim}")


def bmu(codebook: IsomCodebook, vector: Sequence[float] | Plane) -> int:
    v = np.asarray(vector, dtype=np.float64)
    _check_dim(v.shape[-1] if v.ndim else 0, codebook)
    return int(((codebook.codewords - v) ** 2).sum(axis=1).argmin())


def quantize(blocks: BlockSet, codebook: IsomCodebook) -> Indices:
    _check_dim(blocks.dim, codebook)
    indices, _ = _nearest(blocks.vectors, codebook.codewords)
    return indices


def distortion(blocks: BlockSet, codebook: IsomCodebook) -> float:
    _check_dim(blocks.dim, codebook)
    if len(blocks) == 0:
        return 0.0
    _, errors = _nearest(blocks.vectors, codebook.codewords)
    return float(errors.mean() / blocks.dim)


def reconstruct(
    indices: Sequence[int] | Indices,
    codebook: IsomCodebook,
    grid: tuple[int, int],
    source_geometry: tuple[int, int],
    block_edge: int,
) -> Image:
    picks = np.asarray(indices, dtype=np.intp)
    if picks.size and (picks.min() < 0 or picks.max() >= len(codebook)):
        raise IndexOutOfRange(f"codeword index outside [0, {len(codebook)})")
    if block_edge * block_edge != codebook.dim:
        raise DimensionMismatch(f"{block_edge}-blocks against a codebook of dimension {codebook.dim}")
    vectors = codebook.codewords[picks].reshape(len(picks), codebook.dim)
    return reassemble_blocks(BlockSet(block_edge, vectors, grid, source_geometry))


def _train_round(
    weights: Plane, vectors: Plane, config: IsomConfig, rng: np.random.Generator
) -> None:
    """One round of online chain-SOM updates, in place."""
    n = len(vectors)
    total_steps = config.epochs_per_round * n
    positions = np.arange(len(weights), dtype=np.float64)
    radius_start = config.effective_radius
    step = 0
    for _ in range(config.epochs_per_round):
        for i in rng.permutation(n):
            fraction = step / max(total_steps - 1, 1)
            alpha = config.alpha_start + (config.alpha_end - config.alpha_start) * fraction
            radius = radius_start * (1.0 - fraction)
            x = vectors[i]
            winner = int(((weights - x) ** 2).sum(axis=1).argmin())
            if radius > 0:
                neighbourhood = np.exp(-((positions - winner) ** 2) / (2.0 * radius * radius))
            else:
                neighbourhood = (positions == winner).astype(np.float64)
            weights += (alpha * neighbourhood)[:, np.newaxis] * (x - weights)
            step += 1


def _split(weights: Plane, node_errors: Plane, config: IsomConfig) -> Plane:
    worst = int(node_errors.argmax())
    codeword = weights[worst]
    delta = max(config.split_epsilon * float(np.linalg.norm(codeword)), 1e-6)
    log.debug("splitting node %d of %d (error %.6g)", worst, len(weights), node_errors[worst])
    return np.concatenate(
        [weights[:worst], [codeword - delta, codeword + delta], weights[worst + 1 :]]
    )


@log_calls(level="info", show_timing_only=True)
def train(blocks: BlockSet, config: IsomConfig) -> IsomCodebook:
    vectors = blocks.vectors
    if len(vectors) == 0:
        raise EmptyInput("cannot train a codebook on an empty block set")

    rng = np.random.default_rng(config.rng_seed)
    picks = rng.choice(len(vectors), size=config.initial_nodes, replace=len(vectors) < config.initial_nodes)
    weights = vectors[picks].copy()
    initial = weights.copy()
    _, initial_errors = _nearest(vectors, initial)

    for round_index in range(config.rounds):
        _train_round(weights, vectors, config, rng)
        indices, errors = _nearest(vectors, weights)
        mean_distortion = float(errors.mean()) / blocks.dim
        log.debug(
            "round %d: %d nodes, distortion %.6g", round_index, len(weights), mean_distortion
        )
        if mean_distortion <= config.growth_distortion_target:
            break
        # No growth after the last round: a fresh split is untrained.
        if round_index + 1 < config.rounds and len(weights) < config.max_nodes:
            node_errors = np.bincount(indices, weights=errors, minlength=len(weights))
            weights = _split(weights, node_errors, config)

    indices, errors = _nearest(vectors, weights)
    fell_back = False
    if errors.mean() > initial_errors.mean():
        # Tiny block sets can end up worse than the sampled blocks themselves.
        log.debug("training did not beat the initial sample, keeping it")
        weights = initial
        fell_back = True
        indices, errors = _nearest(vectors, weights)
    node_errors = np.bincount(indices, weights=errors, minlength=len(weights))
    return IsomCodebook(
        weights, node_errors=node_errors, config=config, from_initial_sample=fell_back
    )
