from __future__ import annotations

import json
import logging
import math
import time
from dataclasses import dataclass

import numpy as np
from funlog import log_calls

from isom_codec.codec import CodecOptions, compress, decompress
from isom_codec.container import container_sizes, read_container, write_container
from isom_codec.errors import ShapeMismatch, ZeroOriginalSize
from isom_codec.raster import Image, encode_pgm
from isom_codec.types import FilterTag, MetricsRow

log = logging.getLogger(__name__)

PEAK = 255.0

CSV_FIELDS: tuple[str, ...] = tuple(MetricsRow.__annotations__)


def _check_same_geometry(a: Image, b: Image) -> None:
    if a.geometry != b.geometry:
        raise ShapeMismatch(f"cannot compare {a.width}x{a.height} with {b.width}x{b.height}")


def mse(a: Image, b: Image) -> float:
    """Mean squared sample difference, ``1/(W*H) * sum((a - b)**2)``."""
    _check_same_geometry(a, b)
    return float(np.mean((a.samples - b.samples) ** 2))


def psnr(a: Image, b: Image) -> float:
    """Peak signal-to-noise ratio in dB against a 255 peak; ``math.inf`` for identical images."""
    error = mse(a, b)
    if error == 0:
        return math.inf
    return 10.0 * math.log10(PEAK * PEAK / error)


def compression_ratio(t_c: int, t_o: int) -> float:
    """``(1 - t_c / t_o) * 100``; negative when the compressed file is larger."""
    if t_o <= 0:
        raise ZeroOriginalSize(f"original size must be positive, got {t_o}")
    return (1.0 - t_c / t_o) * 100.0


@dataclass(frozen=True, slots=True)
class MetricsReport:
    mse: float
    psnr_db: float
    tau_percent: float
    tau_payload_percent: float
    t_c: int
    t_c_payload: int
    t_o: int
    filter: FilterTag
    seed: int
    runtime_ms: float

    def to_dict(self) -> MetricsRow:
        return MetricsRow(
            filter=self.filter.cli_name,
            mse=self.mse,
            psnr_db=self.psnr_db,
            tau_percent=self.tau_percent,
            tau_payload_percent=self.tau_payload_percent,
            t_c=self.t_c,
            t_c_payload=self.t_c_payload,
            t_o=self.t_o,
            seed=self.seed,
            runtime_ms=self.runtime_ms,
        )

    def to_json(self) -> str:
        """Strict JSON: non-finite values such as the PSNR of an exact decode become ``null``."""
        row = {
            key: None if isinstance(value, float) and not math.isfinite(value) else value
            for key, value in self.to_dict().items()
        }
        return json.dumps(row, allow_nan=False)

    def csv_row(self) -> list[str]:
        return [str(value) for value in self.to_dict().values()]


@log_calls(level="info", show_timing_only=True)
def evaluate(
    original: Image,
    opts: CodecOptions | None = None,
    *,
    t_o: int | None = None,
    degraded: Image | None = None,
) -> MetricsReport:
    """Compress and decompress ``original`` (or its ``degraded`` copy) and score the result.

    MSE is always measured against ``original``, before any filtering or degradation.
    ``t_o`` defaults to the size of ``original`` encoded as binary PGM.
    """
    opts = opts or CodecOptions()
    started = time.perf_counter()

    stream = compress(degraded if degraded is not None else original, opts)
    data = write_container(stream)
    decoded = decompress(read_container(data))

    runtime_ms = (time.perf_counter() - started) * 1000.0
    sizes = container_sizes(stream)
    t_c = len(data)
    if t_o is None:
        t_o = len(encode_pgm(original))
    log.debug("t_c=%d (%s), t_o=%d", t_c, sizes, t_o)

    return MetricsReport(
        mse=mse(original, decoded),
        psnr_db=psnr(original, decoded),
        tau_percent=compression_ratio(t_c, t_o),
        tau_payload_percent=compression_ratio(sizes.payload, t_o),
        t_c=t_c,
        t_c_payload=sizes.payload,
        t_o=t_o,
        filter=opts.filter.tag,
        seed=opts.isom.rng_seed,
        runtime_ms=runtime_ms,
    )
