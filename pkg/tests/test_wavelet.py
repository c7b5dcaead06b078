from __future__ import annotations

import math

import numpy as np
import pytest

from isom_codec.errors import InvalidLevels, ShapeMismatch, UnknownFamily
from isom_codec.raster import Image
from isom_codec.types import WaveletTag
from isom_codec.wavelet import (
    DetailLevel,
    SubbandDecomposition,
    WaveletFamily,
    analysis_pass,
    check_levels,
    dwt2,
    family_coefficients,
    idwt2,
)

HAAR = WaveletFamily.from_tag(WaveletTag.HAAR)
DB4 = WaveletFamily.from_tag(WaveletTag.DAUBECHIES4)


def energy(decomp: SubbandDecomposition) -> float:
    total = float(np.sum(decomp.ll.samples**2))
    for level in decomp.details:
        total += sum(float(np.sum(band.samples**2)) for band in level.planes())
    return total


class TestFamilyCoefficients:
    def test_haar(self):
        assert family_coefficients(WaveletTag.HAAR) == pytest.approx([1 / math.sqrt(2)] * 2, abs=1e-15)

    @pytest.mark.parametrize("tag", list(WaveletTag))
    def test_orthonormal_scaling(self, tag):
        taps = family_coefficients(tag)
        assert abs(sum(taps) - math.sqrt(2)) <= 1e-12
        assert abs(sum(t * t for t in taps) - 1.0) <= 1e-12

    def test_db4_matches_pywavelets_db2(self):
        import pywt

        assert DB4.filter_bank[2] == pytest.approx(pywt.Wavelet("db2").rec_lo, abs=1e-12)
        assert DB4.filter_bank[3] == pytest.approx(pywt.Wavelet("db2").rec_hi, abs=1e-12)

    @pytest.mark.parametrize("tag", [2, 7, -1])
    def test_unknown(self, tag):
        with pytest.raises(UnknownFamily):
            family_coefficients(tag)
        with pytest.raises(UnknownFamily):
            WaveletFamily.from_tag(tag)


class TestDwt2:
    def test_haar_row_pass(self):
        approx, detail = analysis_pass(np.array([[1.0, 2.0, 3.0, 4.0]]), HAAR, axis=1)
        r2 = math.sqrt(2)
        assert approx[0] == pytest.approx([3 / r2, 7 / r2], abs=1e-12)
        assert detail[0] == pytest.approx([-1 / r2, -1 / r2], abs=1e-12)

    def test_constant_haar(self):
        decomp = dwt2(Image.constant(8, 8, 100.0), HAAR, 1)
        assert np.allclose(decomp.ll.samples, 200.0, atol=1e-12)
        for band in decomp.details[0].planes():
            assert np.max(np.abs(band.samples)) < 1e-12

    @pytest.mark.parametrize("family", [HAAR, DB4])
    @pytest.mark.parametrize("levels", [1, 2, 3])
    def test_constant_has_no_detail(self, family, levels):
        decomp = dwt2(Image.constant(16, 24, 37.0), family, levels)
        for level in decomp.details:
            for band in level.planes():
                assert np.max(np.abs(band.samples)) < 1e-12

    @pytest.mark.parametrize("family", [HAAR, DB4])
    @pytest.mark.parametrize("levels", [1, 2, 3])
    def test_parseval(self, family, levels, natural_image):
        decomp = dwt2(natural_image, family, levels)
        expected = float(np.sum(natural_image.samples**2))
        assert abs(energy(decomp) - expected) <= 1e-9 * expected

    def test_subband_geometry_finest_first(self, odd_image):
        decomp = dwt2(odd_image, DB4, 2)
        assert decomp.padded_geometry == (40, 24)
        assert decomp.original_geometry == (37, 21)
        assert decomp.ll.geometry == (10, 6)
        assert [level.lh.geometry for level in decomp.details] == [(20, 12), (10, 6)]

    @pytest.mark.parametrize(("size", "levels"), [((8, 8), 0), ((8, 8), 5), ((3, 20), 3)])
    def test_invalid_levels(self, size, levels):
        with pytest.raises(InvalidLevels):
            dwt2(Image(np.zeros(size[::-1])), HAAR, levels)

    def test_check_levels_allows_padding_to_double(self):
        check_levels(5, 5, 3)
        check_levels(1, 1, 1)
        with pytest.raises(InvalidLevels):
            check_levels(5, 5, 4)


class TestIdwt2:
    def test_perfect_reconstruction_sweep(self):
        rng = np.random.default_rng(2024)
        worst = 0.0
        for case in range(200):
            width, height = (int(v) for v in rng.integers(8, 129, size=2))
            family = HAAR if case % 2 == 0 else DB4
            levels = int(rng.integers(1, 4))
            x = Image(rng.uniform(0, 255, size=(height, width)))
            y = idwt2(dwt2(x, family, levels), family)
            assert y.geometry == x.geometry
            worst = max(worst, float(np.max(np.abs(y.samples - x.samples))))
        assert worst < 1e-9

    def test_zero_details_constant_ll(self):
        zero = Image.constant(4, 4, 0.0)
        decomp = SubbandDecomposition(
            levels=1,
            ll=Image.constant(4, 4, 200.0),
            details=(DetailLevel(zero, zero, zero),),
            original_geometry=(8, 8),
        )
        assert np.allclose(idwt2(decomp, HAAR).samples, 100.0, atol=1e-12)

    def test_crops_to_original_geometry(self, odd_image):
        out = idwt2(dwt2(odd_image, HAAR, 3), HAAR)
        assert out.geometry == (37, 21)
        assert np.max(np.abs(out.samples - odd_image.samples)) < 1e-9

    def test_missing_level(self, natural_image):
        decomp = dwt2(natural_image, HAAR, 2)
        broken = SubbandDecomposition(
            levels=2, ll=decomp.ll, details=decomp.details[:1], original_geometry=(64, 64)
        )
        with pytest.raises(ShapeMismatch):
            idwt2(broken, HAAR)

    def test_wrong_subband_size(self, natural_image):
        decomp = dwt2(natural_image, HAAR, 1)
        small = Image.constant(8, 8, 0.0)
        broken = SubbandDecomposition(
            levels=1,
            ll=decomp.ll,
            details=(DetailLevel(small, decomp.details[0].hl, decomp.details[0].hh),),
            original_geometry=(64, 64),
        )
        with pytest.raises(ShapeMismatch):
            idwt2(broken, HAAR)

    def test_original_larger_than_padded(self, natural_image):
        decomp = dwt2(natural_image, HAAR, 1)
        broken = SubbandDecomposition(
            levels=1, ll=decomp.ll, details=decomp.details, original_geometry=(65, 64)
        )
        with pytest.raises(ShapeMismatch):
            idwt2(broken, HAAR)
