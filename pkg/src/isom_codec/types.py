from enum import IntEnum
from typing import TypeAlias, TypedDict

import numpy as np
import numpy.typing as npt

Plane: TypeAlias = npt.NDArray[np.float64]


class FilterTag(IntEnum):
    """Pre-filter identifiers; the value is the container byte."""

    NONE = 0
    MEDIAN = 1
    GAUSSIAN = 2
    MEAN = 3
    ADAPTIVE_WIENER = 4

    @property
    def cli_name(self) -> str:
        return _FILTER_CLI_NAMES[self]

    @classmethod
    def from_cli_name(cls, name: str) -> "FilterTag":
        for tag, cli_name in _FILTER_CLI_NAMES.items():
            if cli_name == name:
                return tag
        raise ValueError(f"unknown filter {name!r}")


_FILTER_CLI_NAMES = {
    FilterTag.NONE: "none",
    FilterTag.MEDIAN: "median",
    FilterTag.GAUSSIAN: "gaussian",
    FilterTag.MEAN: "mean",
    FilterTag.ADAPTIVE_WIENER: "wiener",
}


class WaveletTag(IntEnum):
    """Wavelet family identifiers; the value is the container byte."""

    HAAR = 0
    DAUBECHIES4 = 1

    @property
    def cli_name(self) -> str:
        return "haar" if self is WaveletTag.HAAR else "db4"

    @classmethod
    def from_cli_name(cls, name: str) -> "WaveletTag":
        for tag in cls:
            if tag.cli_name == name:
                return tag
        raise ValueError(f"unknown wavelet {name!r}")


class MetricsRow(TypedDict):
    filter: str
    mse: float
    psnr_db: float
    tau_percent: float
    tau_payload_percent: float
    t_c: int
    t_c_payload: int
    t_o: int
    seed: int
    runtime_ms: float
