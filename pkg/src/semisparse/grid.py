"""Dense image grids.

Images are stored channel-planar as float64 arrays of shape ``(C, H, W)``.
Finite differences need at least two samples per axis, so ``H, W >= 2``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, ParameterError


@dataclass(frozen=True, eq=False)
class ChannelImage:
    """Immutable multi-channel image with nominal intensity range [0, 1].

    Parameters
    ----------
    data : ndarray, shape (C, H, W)
        Channel-planar intensities. Copied, cast to float64 and made
        read-only on construction.
    """

    data: np.ndarray

    def __post_init__(self):
        arr = np.array(self.data, dtype=np.float64, copy=True)
        if arr.ndim != 3:
            raise DimensionError(f"expected (C, H, W) array, got shape {arr.shape}")
        c, h, w = arr.shape
        if c < 1:
            raise DimensionError("image needs at least one channel")
        if h < 2 or w < 2:
            raise DimensionError(f"image must be at least 2x2, got {h}x{w}")
        if not np.all(np.isfinite(arr)):
            raise ParameterError("image contains NaN or Inf")
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @classmethod
    def from_array(cls, arr) -> "ChannelImage":
        """Build from an ``(H, W)`` or interleaved ``(H, W, C)`` array."""
        arr = np.asarray(arr, dtype=np.float64)
        if arr.ndim == 2:
            return cls(arr[np.newaxis])
        if arr.ndim == 3:
            return cls(np.moveaxis(arr, -1, 0))
        raise DimensionError(f"expected 2-D or 3-D array, got shape {arr.shape}")

    @property
    def channels(self) -> int:
        return self.data.shape[0]

    @property
    def height(self) -> int:
        return self.data.shape[1]

    @property
    def width(self) -> int:
        return self.data.shape[2]

    @property
    def shape(self) -> tuple:
        return self.data.shape

    def to_array(self) -> np.ndarray:
        """Interleaved ``(H, W, C)`` copy, or ``(H, W)`` for one channel."""
        if self.channels == 1:
            return self.data[0].copy()
        return np.moveaxis(self.data, 0, -1).copy()

    def __repr__(self):
        return f"ChannelImage({self.width}x{self.height}x{self.channels})"


def as_channel_image(img) -> ChannelImage:
    if isinstance(img, ChannelImage):
        return img
    return ChannelImage.from_array(img)


def from_bytes(raw, width: int, height: int, channels: int) -> ChannelImage:
    """Decode interleaved 8-bit samples into a unit-range image.

    ``raw`` is in pixel order (row-major, channels interleaved), the layout
    produced by image decoders. Each sample maps to ``byte / 255``.
    """
    buf = np.frombuffer(bytes(raw), dtype=np.uint8) if not isinstance(raw, np.ndarray) \
        else np.asarray(raw, dtype=np.uint8).ravel()
    if buf.size != width * height * channels:
        raise DimensionError(
            f"got {buf.size} samples for {width}x{height}x{channels} image")
    planar = buf.reshape(height, width, channels).transpose(2, 0, 1)
    return ChannelImage(planar / 255.0)


def to_bytes(img: ChannelImage) -> np.ndarray:
    """Encode to interleaved uint8 samples, clamping to [0, 1] first."""
    q = np.rint(np.clip(img.data, 0.0, 1.0) * 255.0).astype(np.uint8)
    return np.ascontiguousarray(q.transpose(1, 2, 0)).ravel()
