"""``isom-codec`` command line: compress, decompress, filter, metrics and bench."""

from __future__ import annotations

import argparse
import logging
import sys
from collections.abc import Sequence
from pathlib import Path

from rich.console import Console
from rich.logging import RichHandler

from isom_codec.bench import BenchGrid, ReportFormat, render, run_bench
from isom_codec.codec import CodecOptions, compress, decompress
from isom_codec.container import container_sizes, read_container, write_container
from isom_codec.errors import InvalidConfig, IsvError
from isom_codec.filters import FilterKind, apply_filter
from isom_codec.isom import IsomConfig
from isom_codec.metrics import mse, psnr
from isom_codec.noise import NoiseSpec
from isom_codec.raster import load_image, save_image
from isom_codec.types import FilterTag, WaveletTag

log = logging.getLogger(__name__)

console = Console(highlight=False, markup=False, emoji=False, soft_wrap=True)
err_console = Console(stderr=True, highlight=False, markup=False, emoji=False, soft_wrap=True)

FILTER_NAMES = [tag.cli_name for tag in FilterTag]
WAVELET_NAMES = [tag.cli_name for tag in WaveletTag]


def _setup_logging(verbosity: int) -> None:
    level = {0: logging.WARNING, 1: logging.INFO}.get(verbosity, logging.DEBUG)
    logging.basicConfig(
        level=level,
        format="%(message)s",
        handlers=[RichHandler(console=err_console, show_path=False)],
        force=True,
    )


def _filter_kind(args: argparse.Namespace) -> FilterKind:
    return FilterKind(
        tag=FilterTag.from_cli_name(args.filter),
        window_radius=args.radius,
        sigma=args.sigma,
    )


def _codec_options(args: argparse.Namespace) -> CodecOptions:
    return CodecOptions(
        filter=_filter_kind(args),
        wavelet=WaveletTag.from_cli_name(args.wavelet),
        levels=args.levels,
        block_edge=args.block,
        isom=IsomConfig(max_nodes=args.max_nodes, rng_seed=args.seed),
        code_details=args.code_details,
    )


def _noise_spec(text: str) -> NoiseSpec:
    try:
        return NoiseSpec.parse(text)
    except InvalidConfig as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _image_list(text: str) -> list[Path]:
    paths = [Path(p) for p in text.split(",") if p.strip()]
    if not paths:
        raise argparse.ArgumentTypeError("expected a comma-separated list of images")
    return paths


def cmd_compress(args: argparse.Namespace) -> None:
    opts = _codec_options(args)
    stream = compress(load_image(args.input), opts)
    data = write_container(stream)
    Path(args.output).write_bytes(data)
    sizes = container_sizes(stream)
    console.print(
        f"{args.output}: {len(data)} bytes "
        f"(header={sizes.header} codebook={sizes.codebook} table={sizes.table} "
        f"payload={sizes.payload} details={sizes.details}) seed={opts.isom.rng_seed}"
    )


def cmd_decompress(args: argparse.Namespace) -> None:
    stream = read_container(Path(args.input).read_bytes())
    written = save_image(decompress(stream), args.output)
    console.print(f"{args.output}: {written} bytes")


def cmd_filter(args: argparse.Namespace) -> None:
    written = save_image(apply_filter(load_image(args.input), _filter_kind(args)), args.output)
    console.print(f"{args.output}: {written} bytes")


def cmd_metrics(args: argparse.Namespace) -> None:
    a, b = load_image(args.a), load_image(args.b)
    console.print(f"mse={mse(a, b):.6g} psnr_db={psnr(a, b):.6g}")


def cmd_bench(args: argparse.Namespace) -> None:
    grid = BenchGrid(
        images=tuple(args.images),
        options=_codec_options(args),
        format=ReportFormat(args.format),
        noise=None if args.noise is None else NoiseSpec(args.noise.kind, args.noise.level, args.seed),
    )
    report = render(run_bench(grid, workers=args.workers), grid)
    if args.output is None:
        console.print(report, end="")
    else:
        Path(args.output).write_text(report, encoding="utf-8")
        console.print(f"{args.output}: {len(grid.cells())} rows")


def _add_filter_args(parser: argparse.ArgumentParser, default: str | None) -> None:
    parser.add_argument(
        "--filter",
        choices=FILTER_NAMES,
        default=default,
        required=default is None,
        help="pre-filter applied before the transform",
    )
    parser.add_argument("--radius", type=int, default=1, help="filter window radius (default: 1)")
    parser.add_argument("--sigma", type=float, default=0.5, help="gaussian sigma (default: 0.5)")


def _add_codec_args(parser: argparse.ArgumentParser) -> None:
    _add_filter_args(parser, default="none")
    parser.add_argument("--wavelet", choices=WAVELET_NAMES, default="haar")
    parser.add_argument("--levels", type=int, default=1, help="DWT levels (default: 1)")
    parser.add_argument("--block", type=int, default=8, help="LL block edge (default: 8)")
    parser.add_argument("--max-nodes", type=int, default=64, help="codebook size cap (default: 64)")
    parser.add_argument("--seed", type=int, default=42, help="training and noise seed (default: 42)")
    parser.add_argument(
        "--code-details", action="store_true", help="also code the detail subbands"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="isom-codec",
        description="Lossy grayscale codec: wavelet transform plus SOM quantization of LL.",
    )
    parser.add_argument(
        "-v", "--verbose", action="count", default=0, help="-v for timings, -vv for debug"
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    p = subparsers.add_parser("compress", help="compress an image to an ISV1 container")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("-o", "--output", required=True)
    _add_codec_args(p)
    p.set_defaults(handler=cmd_compress)

    p = subparsers.add_parser("decompress", help="decode an ISV1 container to binary PGM")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(handler=cmd_decompress)

    p = subparsers.add_parser("filter", help="apply a pre-filter and write binary PGM")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("-o", "--output", required=True)
    _add_filter_args(p, default=None)
    p.set_defaults(handler=cmd_filter)

    p = subparsers.add_parser("metrics", help="MSE and PSNR between two images")
    p.add_argument("-a", required=True)
    p.add_argument("-b", required=True)
    p.set_defaults(handler=cmd_metrics)

    p = subparsers.add_parser("bench", help="run every filter on every image")
    p.add_argument("--images", type=_image_list, required=True, help="a.pgm,b.pgm")
    p.add_argument("--format", choices=[f.value for f in ReportFormat], default="csv")
    p.add_argument("-o", "--output", default=None, help="report file (default: stdout)")
    p.add_argument(
        "--noise", type=_noise_spec, default=None, help="gaussian:SIGMA or salt-pepper:AMOUNT"
    )
    p.add_argument("--workers", type=int, default=1, help="concurrent cells (default: 1)")
    _add_codec_args(p)
    p.set_defaults(handler=cmd_bench)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _setup_logging(args.verbose)

    try:
        args.handler(args)
    except InvalidConfig as exc:
        parser.error(str(exc))
    except (IsvError, OSError) as exc:
        log.debug("command failed", exc_info=exc)
        err_console.print(f"error: {exc}")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
