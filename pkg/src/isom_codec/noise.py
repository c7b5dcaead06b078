"""Synthetic degradations for filter experiments on clean test images."""

from __future__ import annotations

from dataclasses import dataclass
from enum import StrEnum

import numpy as np

from isom_codec.errors import InvalidConfig
from isom_codec.raster import Image


class NoiseKind(StrEnum):
    GAUSSIAN = "gaussian"
    SALT_PEPPER = "salt-pepper"


@dataclass(frozen=True, slots=True)
class NoiseSpec:
    kind: NoiseKind
    level: float
    """Standard deviation for gaussian noise, corrupted fraction for salt-and-pepper."""
    seed: int = 42

    def __post_init__(self) -> None:
        if self.level < 0:
            raise InvalidConfig(f"noise level must be >= 0, got {self.level}")
        if self.kind is NoiseKind.SALT_PEPPER and self.level > 1:
            raise InvalidConfig(f"salt-and-pepper amount must be <= 1, got {self.level}")

    @classmethod
    def parse(cls, text: str, seed: int = 42) -> NoiseSpec:
        """``"gaussian:10"`` or ``"salt-pepper:0.05"``."""
        kind, _, level = text.partition(":")
        try:
            return cls(NoiseKind(kind), float(level), seed)
        except ValueError as exc:
            raise InvalidConfig(f"invalid noise spec {text!r}: {exc}") from exc

    def apply(self, img: Image) -> Image:
        if self.kind is NoiseKind.GAUSSIAN:
            return add_gaussian_noise(img, self.level, self.seed)
        return add_salt_and_pepper_noise(img, self.level, self.seed)


def add_gaussian_noise(img: Image, sigma: float, seed: int) -> Image:
    rng = np.random.default_rng(seed)
    noisy = img.samples + rng.normal(0.0, sigma, size=img.samples.shape)
    return Image(np.clip(noisy, 0.0, 255.0))


def add_salt_and_pepper_noise(img: Image, amount: float, seed: int) -> Image:
    rng = np.random.default_rng(seed)
    hit = rng.random(img.samples.shape) < amount
    salt = rng.random(img.samples.shape) < 0.5
    noisy = img.samples.copy()
    noisy[hit & salt] = 255.0
    noisy[hit & ~salt] = 0.0
    return Image(noisy)


def degrade(img: Image, spec: NoiseSpec | None) -> Image:
    return img if spec is None else spec.apply(img)
