"""Spatial pre-filters applied before the wavelet transform.

All windows are square with edge ``2 * radius + 1`` and the image border is extended by
edge replication, so constant images are fixed points of every filter.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt
from numpy.lib.stride_tricks import sliding_window_view
from scipy import ndimage

from isom_codec.errors import InvalidConfig
from isom_codec.raster import Image
from isom_codec.types import FilterTag, Plane

log = logging.getLogger(__name__)


@dataclass(frozen=True, slots=True)
class FilterKind:
    tag: FilterTag = FilterTag.NONE
    window_radius: int = 1
    sigma: float = 0.5
    noise_variance: float | None = None

    def __post_init__(self) -> None:
        if self.window_radius < 1:
            raise InvalidConfig(f"window_radius must be >= 1, got {self.window_radius}")
        if self.tag is FilterTag.GAUSSIAN and not self.sigma > 0:
            raise InvalidConfig(f"gaussian sigma must be > 0, got {self.sigma}")
        if self.noise_variance is not None and self.noise_variance < 0:
            raise InvalidConfig(f"noise_variance must be >= 0, got {self.noise_variance}")

    @property
    def window_edge(self) -> int:
        return 2 * self.window_radius + 1


def _windows(img: Image, radius: int) -> npt.NDArray[np.float64]:
    padded = np.pad(img.samples, radius, mode="edge")
    edge = 2 * radius + 1
    return sliding_window_view(padded, (edge, edge))


def median_filter(img: Image, radius: int = 1) -> Image:
    edge = 2 * radius + 1
    return Image(ndimage.median_filter(img.samples, size=edge, mode="nearest"))


def mean_filter(img: Image, radius: int = 1) -> Image:
    edge = 2 * radius + 1
    return Image(ndimage.uniform_filter(img.samples, size=edge, mode="nearest"))


def gaussian_kernel(sigma: float, radius: int) -> Plane:
    offsets = np.arange(-radius, radius + 1, dtype=np.float64)
    dy, dx = np.meshgrid(offsets, offsets, indexing="ij")
    kernel = np.exp(-(dx**2 + dy**2) / (2.0 * sigma**2))
    return kernel / kernel.sum()


def gaussian_filter(img: Image, sigma: float = 0.5, radius: int = 1) -> Image:
    if not sigma > 0:
        raise InvalidConfig(f"gaussian sigma must be > 0, got {sigma}")
    kernel = gaussian_kernel(sigma, radius)
    return Image(ndimage.correlate(img.samples, kernel, mode="nearest"))


def adaptive_wiener_filter(
    img: Image, radius: int = 1, noise_variance: float | None = None
) -> Image:
    windows = _windows(img, radius)
    local_mean = windows.mean(axis=(-2, -1))
    local_var = windows.var(axis=(-2, -1))

    if noise_variance is None:
        # Fixed C-order reduction over the whole plane.
        noise = float(local_var.mean())
    else:
        noise = float(noise_variance)
    log.debug("wiener noise power %.6g", noise)

    numerator = np.maximum(local_var - noise, 0.0)
    denominator = np.maximum(local_var, noise)
    gain = np.divide(
        numerator, denominator, out=np.zeros_like(numerator), where=denominator > 0
    )
    return Image(local_mean + gain * (img.samples - local_mean))


def apply_filter(img: Image, kind: FilterKind) -> Image:
    match kind.tag:
        case FilterTag.NONE:
            return img
        case FilterTag.MEDIAN:
            return median_filter(img, kind.window_radius)
        case FilterTag.GAUSSIAN:
            return gaussian_filter(img, kind.sigma, kind.window_radius)
        case FilterTag.MEAN:
            return mean_filter(img, kind.window_radius)
        case FilterTag.ADAPTIVE_WIENER:
            return adaptive_wiener_filter(img, kind.window_radius, kind.noise_variance)
