"""Multi-level separable 2D discrete wavelet transform.

Single-level periodic filtering is delegated to PyWavelets; the filter banks are built here
from the orthonormal low-pass taps by the quadrature-mirror relations.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import pywt

from isom_codec.errors import InvalidLevels, ShapeMismatch, UnknownFamily
from isom_codec.raster import Image, crop, pad_replicate
from isom_codec.types import Plane, WaveletTag

log = logging.getLogger(__name__)

_MODE = "periodization"

_SQRT2 = math.sqrt(2.0)
_SQRT3 = math.sqrt(3.0)
_TAPS: dict[WaveletTag, tuple[float, ...]] = {
    WaveletTag.HAAR: (1.0 / _SQRT2, 1.0 / _SQRT2),
    WaveletTag.DAUBECHIES4: tuple(
        v / (4.0 * _SQRT2) for v in (1 + _SQRT3, 3 + _SQRT3, 3 - _SQRT3, 1 - _SQRT3)
    ),
}


def family_coefficients(tag: WaveletTag | int) -> list[float]:
    try:
        return list(_TAPS[WaveletTag(tag)])
    except (ValueError, KeyError) as exc:
        raise UnknownFamily(f"unknown wavelet family {tag!r}") from exc


@dataclass(frozen=True)
class WaveletFamily:
    tag: WaveletTag

    @classmethod
    def from_tag(cls, tag: WaveletTag | int) -> WaveletFamily:
        family_coefficients(tag)
        return cls(WaveletTag(tag))

    @property
    def lowpass(self) -> list[float]:
        return family_coefficients(self.tag)

    @cached_property
    def filter_bank(self) -> tuple[list[float], list[float], list[float], list[float]]:
        """``(dec_lo, dec_hi, rec_lo, rec_hi)`` derived from the synthesis low-pass taps."""
        rec_lo = self.lowpass
        n = len(rec_lo)
        rec_hi = [(-1) ** k * rec_lo[n - 1 - k] for k in range(n)]
        return rec_lo[::-1], rec_hi[::-1], rec_lo, rec_hi

    @cached_property
    def pywt_wavelet(self) -> pywt.Wavelet:
        return pywt.Wavelet(f"isv-{self.tag.cli_name}", filter_bank=self.filter_bank)


@dataclass(frozen=True, slots=True)
class DetailLevel:
    lh: Image
    hl: Image
    hh: Image

    def planes(self) -> tuple[Image, Image, Image]:
        return self.lh, self.hl, self.hh


@dataclass(frozen=True, slots=True)
class SubbandDecomposition:
    levels: int
    ll: Image
    details: tuple[DetailLevel, ...]
    """Finest level first."""
    original_geometry: tuple[int, int]

    @property
    def padded_geometry(self) -> tuple[int, int]:
        scale = 2**self.levels
        return self.ll.width * scale, self.ll.height * scale


def check_levels(width: int, height: int, levels: int) -> None:
    """Padding may at most double a dimension, so ``2**(levels - 1)`` must fit."""
    if levels < 1 or 2 ** (levels - 1) > min(width, height):
        raise InvalidLevels(f"{levels} decomposition levels do not fit a {width}x{height} image")


def analysis_pass(samples: Plane, family: WaveletFamily, axis: int) -> tuple[Plane, Plane]:
    approx, detail = pywt.dwt(samples, family.pywt_wavelet, mode=_MODE, axis=axis)
    return np.asarray(approx, dtype=np.float64), np.asarray(detail, dtype=np.float64)


def synthesis_pass(approx: Plane, detail: Plane, family: WaveletFamily, axis: int) -> Plane:
    return np.asarray(
        pywt.idwt(approx, detail, family.pywt_wavelet, mode=_MODE, axis=axis), dtype=np.float64
    )


def dwt2(img: Image, family: WaveletFamily, levels: int = 1) -> SubbandDecomposition:
    check_levels(img.width, img.height, levels)
    plane = pad_replicate(img, 2**levels).samples

    details: list[DetailLevel] = []
    for _ in range(levels):
        low, high = analysis_pass(plane, family, axis=1)
        ll, lh = analysis_pass(low, family, axis=0)
        hl, hh = analysis_pass(high, family, axis=0)
        details.append(DetailLevel(Image(lh), Image(hl), Image(hh)))
        plane = ll

    return SubbandDecomposition(
        levels=levels,
        ll=Image(plane),
        details=tuple(details),
        original_geometry=img.geometry,
    )


def _check_structure(decomp: SubbandDecomposition) -> None:
    if decomp.levels < 1 or len(decomp.details) != decomp.levels:
        raise ShapeMismatch(
            f"{len(decomp.details)} detail levels recorded for a {decomp.levels}-level decomposition"
        )
    padded_w, padded_h = decomp.padded_geometry
    for k, level in enumerate(decomp.details, start=1):
        want = (padded_w >> k, padded_h >> k)
        for band in level.planes():
            if band.geometry != want:
                raise ShapeMismatch(f"level {k} subband is {band.geometry}, expected {want}")
    width, height = decomp.original_geometry
    if not (1 <= width <= padded_w and 1 <= height <= padded_h):
        raise ShapeMismatch(
            f"original geometry {decomp.original_geometry} exceeds padded plane {(padded_w, padded_h)}"
        )


def idwt2(decomp: SubbandDecomposition, family: WaveletFamily) -> Image:
    _check_structure(decomp)
    plane = decomp.ll.samples
    for level in reversed(decomp.details):
        low = synthesis_pass(plane, level.lh.samples, family, axis=0)
        high = synthesis_pass(level.hl.samples, level.hh.samples, family, axis=0)
        plane = synthesis_pass(low, high, family, axis=1)
    return crop(Image(plane), *decomp.original_geometry)
