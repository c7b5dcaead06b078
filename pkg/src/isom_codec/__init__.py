from .bench import BenchGrid, BenchRow, ReportFormat, render_csv, render_markdown, run_bench
from .codec import CodecOptions, compress, decompress, dequantize_codebook, quantize_codebook
from .container import (
    CompressedStream,
    ContainerSizes,
    StreamHeader,
    container_sizes,
    read_container,
    write_container,
)
from .entropy import BitPayload, HuffmanTable, build_table, decode, encode
from .errors import IsvError
from .filters import (
    FilterKind,
    adaptive_wiener_filter,
    apply_filter,
    gaussian_filter,
    mean_filter,
    median_filter,
)
from .isom import (
    BlockSet,
    IsomCodebook,
    IsomConfig,
    bmu,
    distortion,
    extract_blocks,
    quantize,
    reconstruct,
    train,
)
from .metrics import MetricsReport, compression_ratio, evaluate, mse, psnr
from .noise import NoiseSpec, add_gaussian_noise, add_salt_and_pepper_noise
from .raster import Image, crop, load_image, pad_replicate, save_image
from .types import FilterTag, WaveletTag
from .wavelet import SubbandDecomposition, WaveletFamily, dwt2, idwt2

__all__ = (
    "Image",
    "load_image",
    "save_image",
    "pad_replicate",
    "crop",
    "FilterTag",
    "FilterKind",
    "apply_filter",
    "median_filter",
    "gaussian_filter",
    "mean_filter",
    "adaptive_wiener_filter",
    "WaveletTag",
    "WaveletFamily",
    "SubbandDecomposition",
    "dwt2",
    "idwt2",
    "BlockSet",
    "IsomConfig",
    "IsomCodebook",
    "extract_blocks",
    "train",
    "bmu",
    "quantize",
    "distortion",
    "reconstruct",
    "HuffmanTable",
    "BitPayload",
    "build_table",
    "encode",
    "decode",
    "CodecOptions",
    "compress",
    "decompress",
    "quantize_codebook",
    "dequantize_codebook",
    "CompressedStream",
    "StreamHeader",
    "ContainerSizes",
    "container_sizes",
    "write_container",
    "read_container",
    "MetricsReport",
    "mse",
    "psnr",
    "compression_ratio",
    "evaluate",
    "NoiseSpec",
    "add_gaussian_noise",
    "add_salt_and_pepper_noise",
    "BenchGrid",
    "BenchRow",
    "ReportFormat",
    "run_bench",
    "render_csv",
    "render_markdown",
    "IsvError",
)
