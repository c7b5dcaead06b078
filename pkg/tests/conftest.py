from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from isom_codec.isom import IsomConfig
from isom_codec.raster import Image, save_image

DATA_DIR = Path(__file__).parent / "data"


def smooth_image(width: int, height: int, seed: int = 0) -> Image:
    """Gradients plus a blob and mild texture, integer-valued in [0, 255]."""
    rng = np.random.default_rng(seed)
    y, x = np.mgrid[0:height, 0:width].astype(np.float64)
    plane = 60.0 + 100.0 * x / max(width - 1, 1) + 40.0 * y / max(height - 1, 1)
    blob = np.hypot(x - width * 0.6, y - height * 0.4) < min(width, height) / 4
    plane[blob] -= 50.0
    plane += rng.normal(0.0, 4.0, size=plane.shape)
    return Image(np.clip(np.rint(plane), 0, 255))


@pytest.fixture
def natural_image() -> Image:
    return smooth_image(64, 64)


@pytest.fixture
def odd_image() -> Image:
    return smooth_image(37, 21, seed=1)


@pytest.fixture
def fast_isom() -> IsomConfig:
    return IsomConfig(max_nodes=16, epochs_per_round=3, rounds=4)


@pytest.fixture
def pgm_path(tmp_path: Path, natural_image: Image) -> Path:
    path = tmp_path / "natural.pgm"
    save_image(natural_image, path)
    return path
