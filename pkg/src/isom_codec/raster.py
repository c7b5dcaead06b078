"""Grayscale sample planes and their on-disk forms (PGM, BMP)."""

from __future__ import annotations

import logging
import struct
from collections.abc import Sequence
from dataclasses import dataclass
from io import BytesIO
from os import PathLike
from pathlib import Path

import numpy as np
import numpy.typing as npt
from PIL import Image as PILImage
from PIL import UnidentifiedImageError

from isom_codec.errors import CorruptFile, InvalidImage, OutOfBounds, UnsupportedFormat
from isom_codec.types import Plane

log = logging.getLogger(__name__)

_GRAY_MODES = {"L"}
_BMP_MODES = {"L", "P", "RGB"}
_BMP_BIT_DEPTHS = {8, 24}
_BI_RGB = 0
_LUMA = np.array([0.299, 0.587, 0.114])


@dataclass(frozen=True, eq=False, slots=True)
class Image:
    """Row-major real-valued samples, shape ``(height, width)``.

    The array is copied to float64 and frozen on construction.
    """

    samples: Plane

    def __post_init__(self) -> None:
        plane = np.array(self.samples, dtype=np.float64)
        if plane.ndim != 2 or plane.shape[0] < 1 or plane.shape[1] < 1:
            raise InvalidImage(f"expected a non-empty 2D plane, got shape {plane.shape}")
        if not np.all(np.isfinite(plane)):
            raise InvalidImage("samples must be finite")
        plane.flags.writeable = False
        object.__setattr__(self, "samples", plane)

    @classmethod
    def from_values(cls, width: int, height: int, values: Sequence[float]) -> Image:
        if len(values) != width * height:
            raise InvalidImage(f"{len(values)} samples do not fill {width}x{height}")
        return cls(np.asarray(values, dtype=np.float64).reshape(height, width))

    @classmethod
    def constant(cls, width: int, height: int, value: float) -> Image:
        return cls(np.full((height, width), value, dtype=np.float64))

    @property
    def width(self) -> int:
        return int(self.samples.shape[1])

    @property
    def height(self) -> int:
        return int(self.samples.shape[0])

    @property
    def geometry(self) -> tuple[int, int]:
        return self.width, self.height

    def to_bytes_plane(self) -> npt.NDArray[np.uint8]:
        """Round half up and clamp to ``[0, 255]``."""
        return np.clip(np.floor(self.samples + 0.5), 0, 255).astype(np.uint8)


def _bmp_layout(path: str | PathLike[str]) -> tuple[int, int]:
    """Bits per pixel and compression method from the DIB header."""
    with open(path, "rb") as fh:
        head = fh.read(34)
    if len(head) < 26:
        raise CorruptFile(f"{path}: truncated BMP header")
    (dib_size,) = struct.unpack_from("<I", head, 14)
    if dib_size == 12:
        # OS/2 core header: no compression field.
        (bits,) = struct.unpack_from("<H", head, 24)
        return bits, _BI_RGB
    if len(head) < 34:
        raise CorruptFile(f"{path}: truncated BMP header")
    bits, compression = struct.unpack_from("<HI", head, 28)
    return bits, compression


def load_image(path: str | PathLike[str]) -> Image:
    try:
        pil = PILImage.open(path)
    except UnidentifiedImageError as exc:
        raise UnsupportedFormat(f"{path}: not a PGM or BMP file") from exc

    with pil:
        if pil.format == "PPM":
            if pil.mode not in _GRAY_MODES:
                raise UnsupportedFormat(f"{path}: only 8-bit PGM is supported, got mode {pil.mode}")
        elif pil.format == "BMP":
            bits, compression = _bmp_layout(path)
            if bits not in _BMP_BIT_DEPTHS or compression != _BI_RGB or pil.mode not in _BMP_MODES:
                raise UnsupportedFormat(
                    f"{path}: only uncompressed 8- or 24-bit BMP is supported, "
                    f"got {bits} bits per pixel with compression {compression}"
                )
        else:
            raise UnsupportedFormat(f"{path}: unsupported container {pil.format}")

        try:
            pil.load()
        except (OSError, ValueError, SyntaxError) as exc:
            raise CorruptFile(f"{path}: {exc}") from exc

        if pil.mode == "L":
            plane = np.asarray(pil, dtype=np.float64)
        else:
            rgb = np.asarray(pil.convert("RGB"), dtype=np.float64)
            plane = np.floor(rgb @ _LUMA + 0.5)

    log.debug("loaded %s: %dx%d", path, plane.shape[1], plane.shape[0])
    return Image(plane)


def encode_pgm(img: Image) -> bytes:
    """Binary PGM (P5) encoding of the rounded and clamped samples."""
    buffer = BytesIO()
    PILImage.fromarray(img.to_bytes_plane()).save(buffer, format="PPM")
    return buffer.getvalue()


def save_image(img: Image, path: str | PathLike[str]) -> int:
    data = encode_pgm(img)
    Path(path).write_bytes(data)
    return len(data)


def pad_replicate(img: Image, multiple: int) -> Image:
    if multiple < 1:
        raise InvalidImage(f"padding multiple must be >= 1, got {multiple}")
    pad_h = -img.height % multiple
    pad_w = -img.width % multiple
    if pad_h == 0 and pad_w == 0:
        return img
    return Image(np.pad(img.samples, ((0, pad_h), (0, pad_w)), mode="edge"))


def crop(img: Image, width: int, height: int) -> Image:
    if not (1 <= width <= img.width and 1 <= height <= img.height):
        raise OutOfBounds(f"cannot crop {img.width}x{img.height} to {width}x{height}")
    if (width, height) == img.geometry:
        return img
    return Image(img.samples[:height, :width])
