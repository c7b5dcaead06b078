"""Filter-versus-compression sweep: one codec run per (image, filter) cell."""

from __future__ import annotations

import csv
import io
import logging
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from enum import StrEnum
from pathlib import Path

from funlog import log_calls
from jinja2 import Environment, PackageLoader

from isom_codec.codec import CodecOptions
from isom_codec.errors import BenchCellError, InvalidConfig, IsvError
from isom_codec.filters import FilterKind
from isom_codec.metrics import CSV_FIELDS, MetricsReport, evaluate
from isom_codec.noise import NoiseSpec, degrade
from isom_codec.raster import Image, load_image
from isom_codec.types import FilterTag

log = logging.getLogger(__name__)

DEFAULT_FILTERS: tuple[FilterKind, ...] = tuple(FilterKind(tag) for tag in FilterTag)
"""The five table columns, unfiltered first and adaptive Wiener last."""

PUBLISHED_REFERENCE: dict[str, dict[str, tuple[float, float]]] = {
    "cameraman": {
        "none": (85.54, 54.66),
        "median": (86.91, 58.95),
        "gaussian": (86.32, 60.25),
        "mean": (86.32, 100.9),
        "wiener": (88.08, 118.4),
    },
    "peppers": {
        "none": (77.92, 60.8),
        "median": (78.51, 66.7),
        "gaussian": (78.12, 61.09),
        "mean": (78.41, 62.28),
        "wiener": (79.1, 65.11),
    },
}
"""Published ``(tau %, MSE)`` per image stem and filter, shown next to measured values."""


class ReportFormat(StrEnum):
    CSV = "csv"
    MARKDOWN = "markdown"


@dataclass(frozen=True, slots=True)
class BenchGrid:
    images: tuple[Path, ...]
    filters: tuple[FilterKind, ...] = DEFAULT_FILTERS
    options: CodecOptions = field(default_factory=CodecOptions)
    format: ReportFormat = ReportFormat.CSV
    noise: NoiseSpec | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "images", tuple(Path(p) for p in self.images))
        if not self.images:
            raise InvalidConfig("bench grid needs at least one image")
        if not self.filters:
            raise InvalidConfig("bench grid needs at least one filter")

    def cells(self) -> list[tuple[Path, FilterKind]]:
        """Row-major: every filter of the first image, then the next image."""
        return [(path, kind) for path in self.images for kind in self.filters]


@dataclass(frozen=True, slots=True)
class BenchRow:
    image: str
    report: MetricsReport


def _run_cell(image: Image, name: str, kind: FilterKind, grid: BenchGrid) -> BenchRow:
    try:
        report = evaluate(
            image,
            replace(grid.options, filter=kind),
            degraded=degrade(image, grid.noise),
        )
    except (IsvError, ValueError, ArithmeticError) as exc:
        raise BenchCellError(name, kind.tag.cli_name, str(exc)) from exc
    log.info(
        "%s/%s: tau=%.2f%% mse=%.3f", name, kind.tag.cli_name, report.tau_percent, report.mse
    )
    return BenchRow(name, report)


@log_calls(level="info", show_timing_only=True)
def run_bench(grid: BenchGrid, workers: int = 1) -> list[BenchRow]:
    """Evaluate every cell of ``grid``; rows come back in grid order whatever ``workers`` is."""
    if workers < 1:
        raise InvalidConfig(f"workers must be >= 1, got {workers}")
    images = {path: load_image(path) for path in grid.images}

    def run(cell: tuple[Path, FilterKind]) -> BenchRow:
        path, kind = cell
        return _run_cell(images[path], path.stem, kind, grid)

    cells = grid.cells()
    if workers == 1:
        return [run(cell) for cell in cells]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run, cells))


def render_csv(rows: Sequence[BenchRow]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["image", *CSV_FIELDS])
    for row in rows:
        writer.writerow([row.image, *row.report.csv_row()])
    return out.getvalue()


@dataclass(frozen=True, slots=True)
class _ImageTable:
    image: str
    columns: list[str]
    tau: list[str]
    mse: list[str]
    psnr: list[str]
    published_tau: list[str] | None
    published_mse: list[str] | None


def _image_tables(rows: Sequence[BenchRow]) -> list[_ImageTable]:
    grouped: dict[str, list[MetricsReport]] = {}
    for row in rows:
        grouped.setdefault(row.image, []).append(row.report)

    tables = []
    for image, reports in grouped.items():
        columns = [r.filter.cli_name for r in reports]
        reference = PUBLISHED_REFERENCE.get(image.lower())
        published_tau: list[str] | None = None
        published_mse: list[str] | None = None
        if reference is not None:
            published_tau = [f"{reference[c][0]:.2f}" if c in reference else "" for c in columns]
            published_mse = [f"{reference[c][1]:.2f}" if c in reference else "" for c in columns]
        tables.append(
            _ImageTable(
                image=image,
                columns=columns,
                tau=[f"{r.tau_percent:.2f}" for r in reports],
                mse=[f"{r.mse:.2f}" for r in reports],
                psnr=[f"{r.psnr_db:.2f}" for r in reports],
                published_tau=published_tau,
                published_mse=published_mse,
            )
        )
    return tables


_TEMPLATES = Environment(
    loader=PackageLoader("isom_codec", "templates"),
    trim_blocks=True,
    lstrip_blocks=True,
    keep_trailing_newline=True,
)


def render_markdown(rows: Sequence[BenchRow], grid: BenchGrid | None = None) -> str:
    """One table per image with the filters as columns, in grid order."""
    template = _TEMPLATES.get_template("bench.md.jinja2")
    seed = rows[0].report.seed if rows else None
    return template.render(
        tables=_image_tables(rows),
        seed=seed,
        noise=grid.noise if grid is not None else None,
    )


def render(rows: Sequence[BenchRow], grid: BenchGrid) -> str:
    if grid.format is ReportFormat.MARKDOWN:
        return render_markdown(rows, grid)
    return render_csv(rows)
