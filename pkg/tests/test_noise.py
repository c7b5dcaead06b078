from __future__ import annotations

import numpy as np
import pytest

from isom_codec.errors import InvalidConfig
from isom_codec.filters import median_filter
from isom_codec.noise import (
    NoiseKind,
    NoiseSpec,
    add_gaussian_noise,
    add_salt_and_pepper_noise,
    degrade,
)
from isom_codec.raster import Image


class TestNoiseSpec:
    def test_parse(self):
        assert NoiseSpec.parse("gaussian:10") == NoiseSpec(NoiseKind.GAUSSIAN, 10.0)
        assert NoiseSpec.parse("salt-pepper:0.05", seed=7) == NoiseSpec(NoiseKind.SALT_PEPPER, 0.05, 7)

    @pytest.mark.parametrize("text", ["gaussian", "speckle:3", "gaussian:abc", "gaussian:-1", "salt-pepper:1.5", ""])
    def test_parse_rejects(self, text):
        with pytest.raises(InvalidConfig):
            NoiseSpec.parse(text)


class TestGaussianNoise:
    def test_seeded_and_clipped(self, natural_image):
        a = add_gaussian_noise(natural_image, 30.0, seed=3)
        b = add_gaussian_noise(natural_image, 30.0, seed=3)
        assert np.array_equal(a.samples, b.samples)
        assert a.samples.min() >= 0 and a.samples.max() <= 255
        assert not np.array_equal(a.samples, natural_image.samples)

    def test_zero_sigma_is_identity(self, natural_image):
        assert np.array_equal(add_gaussian_noise(natural_image, 0.0, seed=0).samples, natural_image.samples)


class TestSaltAndPepper:
    def test_fraction_and_values(self):
        img = Image.constant(100, 100, 128.0)
        noisy = add_salt_and_pepper_noise(img, 0.1, seed=1)
        hit = noisy.samples != 128.0
        assert 0.07 < hit.mean() < 0.13
        assert set(np.unique(noisy.samples[hit]).tolist()) == {0.0, 255.0}

    def test_median_filter_removes_sparse_impulses(self):
        img = Image.constant(40, 40, 90.0)
        cleaned = median_filter(add_salt_and_pepper_noise(img, 0.02, seed=2), 1)
        assert np.mean(cleaned.samples == 90.0) > 0.99


class TestDegrade:
    def test_none_is_identity(self, natural_image):
        assert degrade(natural_image, None) is natural_image

    def test_dispatch(self, natural_image):
        spec = NoiseSpec(NoiseKind.SALT_PEPPER, 0.2, seed=9)
        assert np.array_equal(
            degrade(natural_image, spec).samples,
            add_salt_and_pepper_noise(natural_image, 0.2, 9).samples,
        )
