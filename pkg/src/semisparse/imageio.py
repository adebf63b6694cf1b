"""Reading and writing 8-bit images.

Supported containers are PNG (8-bit gray or RGB) and binary PGM/PPM
(``P5``/``P6``). Decoding is delegated to Pillow; this module only checks
bit depth, maps samples to [0, 1] and back, and applies the offset
convention for signed layers.

Signed layers
-------------
A texture layer ``v`` is roughly centred on zero. When ``signed`` is set
(or the file name carries a ``.tex`` suffix, e.g. ``v.tex.png``) it is
stored as ``clip(v / 2 + 1/2, 0, 1)`` and read back through the inverse
map ``2 x - 1``. For lossless export use :func:`write_raw`, a small binary
dump of the float64 samples.
"""
from __future__ import annotations

import enum
import os
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import DimensionError, ImageDecodeError, ImageFormatError
from .grid import ChannelImage, as_channel_image, from_bytes, to_bytes

RAW_MAGIC = b"SSDT1\n"


class ImageFormat(enum.Enum):
    PNG = "png"
    PPM = "ppm"   # binary P6, three channels
    PGM = "pgm"   # binary P5, one channel

    @classmethod
    def from_path(cls, path) -> "ImageFormat":
        ext = Path(path).suffix.lower()
        try:
            return _EXTENSIONS[ext]
        except KeyError:
            raise ImageFormatError(f"cannot infer image format from extension {ext!r}") from None


_EXTENSIONS = {".png": ImageFormat.PNG, ".ppm": ImageFormat.PPM,
               ".pgm": ImageFormat.PGM, ".pnm": ImageFormat.PPM}
_PIL_FORMATS = {"PNG": ImageFormat.PNG, "PPM": ImageFormat.PPM}


def is_signed_path(path) -> bool:
    """True when the file name marks a signed layer (``.tex`` suffix)."""
    return ".tex" in [s.lower() for s in Path(path).suffixes]


def _decode(path):
    try:
        with Image.open(path) as im:
            fmt = im.format
            mode = im.mode
            im.load()
            if fmt not in _PIL_FORMATS:
                raise ImageFormatError(f"{path}: unsupported format {fmt}")
            if mode == "P":
                im = im.convert("RGBA" if "transparency" in im.info else "RGB")
                mode = im.mode
            elif mode == "1":
                im = im.convert("L")
                mode = "L"
            if mode not in ("L", "RGB"):
                raise ImageFormatError(
                    f"{path}: unsupported pixel mode {mode!r} (need 8-bit gray or RGB)")
            return np.asarray(im, dtype=np.uint8)
    except UnidentifiedImageError as exc:
        raise ImageDecodeError(f"{path}: not a decodable image") from exc
    except (SyntaxError, ValueError) as exc:
        if isinstance(exc, ImageFormatError):
            raise
        raise ImageDecodeError(f"{path}: {exc}") from exc
    except OSError as exc:
        if isinstance(exc, FileNotFoundError) or not os.path.isfile(path):
            raise
        # Pillow reports truncated or corrupt payloads as plain OSError
        raise ImageDecodeError(f"{path}: {exc}") from exc


def read_image(path, signed=None) -> ChannelImage:
    """Decode an 8-bit PNG, PGM or PPM file into a unit-range image.

    Parameters
    ----------
    path : str or Path
    signed : bool, optional
        Undo the offset convention (``2 x - 1``). Defaults to
        :func:`is_signed_path`.

    Raises
    ------
    FileNotFoundError
        Missing file.
    ImageFormatError
        Unsupported container or bit depth (16-bit sources are rejected).
    ImageDecodeError
        Corrupt payload.
    """
    arr = _decode(path)
    h, w = arr.shape[:2]
    c = 1 if arr.ndim == 2 else arr.shape[2]
    img = from_bytes(arr, w, h, c)
    if signed is None:
        signed = is_signed_path(path)
    if signed:
        img = ChannelImage(2.0 * img.data - 1.0)
    return img


def write_image(path, img, format=None, signed=None) -> None:
    """Encode ``img`` as 8-bit PNG, PGM or PPM.

    One-channel images become gray PNG or ``P5``; three-channel images RGB
    PNG or ``P6``. Values outside [0, 1] are clamped. ``format`` defaults to
    the one implied by the extension, ``signed`` to :func:`is_signed_path`.
    """
    img = as_channel_image(img)
    fmt = ImageFormat.from_path(path) if format is None else ImageFormat(format)
    if signed is None:
        signed = is_signed_path(path)
    if img.channels not in (1, 3):
        raise DimensionError(f"can only write 1 or 3 channels, got {img.channels}")
    if fmt is ImageFormat.PGM and img.channels != 1:
        raise DimensionError("PGM holds a single channel")
    if fmt is ImageFormat.PPM and img.channels != 3:
        # a gray image written to .ppm still gets the gray container
        fmt = ImageFormat.PGM
    if signed:
        img = ChannelImage(0.5 * img.data + 0.5)
    q = to_bytes(img).reshape(img.height, img.width, img.channels)
    mode = "L" if img.channels == 1 else "RGB"
    pil = Image.fromarray(q[..., 0] if img.channels == 1 else q, mode=mode)
    pil.save(path, format="PNG" if fmt is ImageFormat.PNG else "PPM")


def write_raw(path, img) -> None:
    """Dump float64 samples losslessly.

    Layout: ``SSDT1\\n<width> <height> <channels>\\n`` then little-endian
    doubles, channel-planar, each plane row-major.
    """
    img = as_channel_image(img)
    header = RAW_MAGIC + f"{img.width} {img.height} {img.channels}\n".encode("ascii")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(img.data.astype("<f8", copy=False).tobytes())


def read_raw(path) -> ChannelImage:
    """Inverse of :func:`write_raw`."""
    with open(path, "rb") as fh:
        blob = fh.read()
    if not blob.startswith(RAW_MAGIC):
        raise ImageFormatError(f"{path}: missing raw-dump magic")
    end = blob.find(b"\n", len(RAW_MAGIC))
    try:
        w, h, c = (int(t) for t in blob[len(RAW_MAGIC):end].split())
    except ValueError as exc:
        raise ImageDecodeError(f"{path}: bad raw-dump header") from exc
    payload = blob[end + 1:]
    if len(payload) != 8 * w * h * c:
        raise ImageDecodeError(f"{path}: expected {8 * w * h * c} data bytes, got {len(payload)}")
    data = np.frombuffer(payload, dtype="<f8").reshape(c, h, w)
    return ChannelImage(data.astype(np.float64))
