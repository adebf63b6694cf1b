import numpy as np
import pytest

from semisparse.errors import DimensionError, ParameterError
from semisparse.grid import ChannelImage, as_channel_image, from_bytes, to_bytes


def test_from_bytes_endpoints():
    img = from_bytes(bytes([0, 255, 128, 7]), 2, 2, 1)
    assert img.shape == (1, 2, 2)
    assert img.data[0, 0, 0] == 0.0
    assert img.data[0, 0, 1] == 1.0
    assert img.data[0, 1, 0] == pytest.approx(128 / 255)
    assert img.data[0, 1, 0] == pytest.approx(0.50196, abs=1e-5)


def test_from_bytes_interleaved_layout():
    # 2x2 RGB, pixels in row-major order with channels interleaved
    raw = [255, 0, 0,   0, 0, 255,
           0, 255, 0,   9, 9, 9]
    img = from_bytes(raw, 2, 2, 3)
    assert img.channels == 3
    np.testing.assert_array_equal(img.data[0] * 255, [[255, 0], [0, 9]])
    np.testing.assert_array_equal(img.data[2] * 255, [[0, 255], [0, 9]])


def test_from_bytes_length_mismatch():
    with pytest.raises(DimensionError):
        from_bytes(bytes(5), 2, 2, 1)


def test_to_bytes_rounding_and_clamp():
    img = ChannelImage(np.array([[[0.50196, -0.2], [1.7, 1.0]]]))
    np.testing.assert_array_equal(to_bytes(img), [128, 0, 255, 255])


def test_bytes_roundtrip_exact(rng):
    raw = rng.integers(0, 256, size=5 * 4 * 3, dtype=np.uint8)
    back = to_bytes(from_bytes(raw, 5, 4, 3))
    np.testing.assert_array_equal(back, raw)


@pytest.mark.parametrize("shape", [(1, 1, 5), (1, 5, 1), (0, 3, 3), (3, 3)])
def test_rejects_bad_shapes(shape):
    with pytest.raises(DimensionError):
        ChannelImage(np.zeros(shape))


@pytest.mark.parametrize("bad", [np.nan, np.inf, -np.inf])
def test_rejects_nonfinite(bad):
    a = np.zeros((1, 3, 3))
    a[0, 1, 1] = bad
    with pytest.raises(ParameterError):
        ChannelImage(a)


def test_data_is_readonly_copy():
    src = np.zeros((1, 2, 3))
    img = ChannelImage(src)
    src[0, 0, 0] = 5.0
    assert img.data[0, 0, 0] == 0.0
    with pytest.raises(ValueError):
        img.data[0, 0, 0] = 1.0


def test_from_array_layouts(rng):
    hw = rng.random((4, 5))
    assert ChannelImage.from_array(hw).shape == (1, 4, 5)
    hwc = rng.random((4, 5, 3))
    img = ChannelImage.from_array(hwc)
    assert (img.channels, img.height, img.width) == (3, 4, 5)
    np.testing.assert_array_equal(img.to_array(), hwc)
    np.testing.assert_array_equal(ChannelImage.from_array(hw).to_array(), hw)


def test_as_channel_image_passthrough():
    img = ChannelImage(np.zeros((2, 3, 3)))
    assert as_channel_image(img) is img
