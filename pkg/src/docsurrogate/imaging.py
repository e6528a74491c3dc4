"""Raster containers, PGM/PBM I/O and Otsu thresholding.

Polarity convention used throughout the package: ink is dark, and the
*foreground* label means ink.  A :class:`BinaryImage` stores ``True`` for
foreground pixels.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .errors import ImageFormatError, NotBilevelError

__all__ = [
    "GrayImage",
    "BinaryImage",
    "load_gray",
    "load_binary",
    "save_gray",
    "save_binary",
    "otsu_threshold",
    "otsu_binarize",
]


def _frozen(arr):
    arr = np.ascontiguousarray(arr)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class GrayImage:
    """Grayscale image holding the original 8-bit levels.

    ``levels`` is a ``(height, width)`` uint8 array; :attr:`intensities`
    gives the normalized view ``levels / 255``.
    """

    levels: np.ndarray

    def __post_init__(self):
        lv = np.asarray(self.levels)
        if lv.ndim != 2 or lv.shape[0] < 1 or lv.shape[1] < 1:
            raise ValueError(f"expected a non-empty 2-D level array, got shape {lv.shape}")
        if lv.dtype != np.uint8:
            if np.any(lv < 0) or np.any(lv > 255) or np.any(lv != np.round(lv)):
                raise ValueError("levels must be integers in [0, 255]")
            lv = lv.astype(np.uint8)
        object.__setattr__(self, "levels", _frozen(lv))

    @classmethod
    def from_intensities(cls, values) -> "GrayImage":
        """Quantize reals in [0, 1] to the nearest 8-bit level."""
        v = np.asarray(values, dtype=float)
        if np.any(~np.isfinite(v)) or np.any(v < 0) or np.any(v > 1):
            raise ValueError("intensities must lie in [0, 1]")
        return cls(np.rint(v * 255.0).astype(np.uint8))

    @property
    def intensities(self) -> np.ndarray:
        return self.levels / 255.0

    @property
    def height(self) -> int:
        return self.levels.shape[0]

    @property
    def width(self) -> int:
        return self.levels.shape[1]

    @property
    def shape(self):
        return self.levels.shape

    def __eq__(self, other):
        if not isinstance(other, GrayImage):
            return NotImplemented
        return np.array_equal(self.levels, other.levels)


@dataclass(frozen=True, eq=False)
class BinaryImage:
    """Two-label image; ``mask`` is True where a pixel is foreground (ink)."""

    mask: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.mask)
        if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
            raise ValueError(f"expected a non-empty 2-D mask, got shape {m.shape}")
        if m.dtype != bool:
            if not np.all((m == 0) | (m == 1)):
                raise ValueError("mask must be two-valued (0/1 or bool)")
            m = m.astype(bool)
        object.__setattr__(self, "mask", _frozen(m))

    @property
    def height(self) -> int:
        return self.mask.shape[0]

    @property
    def width(self) -> int:
        return self.mask.shape[1]

    @property
    def shape(self):
        return self.mask.shape

    def complement(self) -> "BinaryImage":
        return BinaryImage(~self.mask)

    def to_levels(self) -> np.ndarray:
        """Foreground -> 0, background -> 255."""
        return np.where(self.mask, 0, 255).astype(np.uint8)

    def __eq__(self, other):
        if not isinstance(other, BinaryImage):
            return NotImplemented
        return np.array_equal(self.mask, other.mask)


# --------------------------------------------------------------------------
# Netpbm parsing
# --------------------------------------------------------------------------


def _read_bytes(path) -> bytes:
    try:
        with open(os.fspath(path), "rb") as fh:
            return fh.read()
    except FileNotFoundError:
        raise ImageFormatError(f"{path}: no such file") from None
    except IsADirectoryError:
        raise ImageFormatError(f"{path}: is a directory") from None


def _parse_header(data: bytes, ntokens: int, path):
    """Return (tokens, payload offset) for a binary Netpbm header."""
    tokens = []
    pos = 0
    n = len(data)
    while len(tokens) < ntokens:
        while pos < n and data[pos : pos + 1].isspace():
            pos += 1
        if pos < n and data[pos : pos + 1] == b"#":
            while pos < n and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < n and not data[pos : pos + 1].isspace() and data[pos : pos + 1] != b"#":
            pos += 1
        if start == pos:
            raise ImageFormatError(f"{path}: malformed header")
        tokens.append(data[start:pos])
    # exactly one whitespace byte separates the header from the raster
    if pos >= n or not data[pos : pos + 1].isspace():
        raise ImageFormatError(f"{path}: malformed header")
    return tokens, pos + 1


def _dims(tokens, path):
    try:
        w, h = int(tokens[1]), int(tokens[2])
    except ValueError:
        raise ImageFormatError(f"{path}: malformed header") from None
    if w < 1 or h < 1:
        raise ImageFormatError(f"{path}: invalid dimensions {w}x{h}")
    return w, h


def _decode_pgm(data: bytes, path) -> np.ndarray:
    tokens, off = _parse_header(data, 4, path)
    w, h = _dims(tokens, path)
    try:
        maxval = int(tokens[3])
    except ValueError:
        raise ImageFormatError(f"{path}: malformed header") from None
    if maxval != 255:
        raise ImageFormatError(f"{path}: unsupported bit depth (maxval {maxval}, need 255)")
    payload = data[off : off + w * h]
    if len(payload) < w * h:
        raise ImageFormatError(f"{path}: truncated pixel data ({len(payload)} of {w * h} bytes)")
    return np.frombuffer(payload, dtype=np.uint8).reshape(h, w).copy()


def _decode_pbm(data: bytes, path) -> np.ndarray:
    """Return a bool array, True where the PBM bit is 1 (black)."""
    tokens, off = _parse_header(data, 3, path)
    w, h = _dims(tokens, path)
    row_bytes = (w + 7) // 8
    payload = data[off : off + row_bytes * h]
    if len(payload) < row_bytes * h:
        raise ImageFormatError(f"{path}: truncated pixel data")
    packed = np.frombuffer(payload, dtype=np.uint8).reshape(h, row_bytes)
    return np.unpackbits(packed, axis=1)[:, :w].astype(bool)


def _decode_png(path) -> np.ndarray:
    try:
        from PIL import Image
    except ImportError:  # pragma: no cover - optional dependency
        raise ImageFormatError(f"{path}: PNG support requires Pillow") from None
    try:
        with Image.open(os.fspath(path)) as im:
            if im.mode == "1":
                return np.where(np.asarray(im), 255, 0).astype(np.uint8)
            if im.mode != "L":
                raise ImageFormatError(f"{path}: unsupported PNG mode {im.mode!r} (need 8-bit grayscale)")
            return np.asarray(im, dtype=np.uint8).copy()
    except OSError as exc:
        raise ImageFormatError(f"{path}: {exc}") from None


def _read_levels(path):
    """Read any supported file; returns ('gray', uint8 array) or ('bits', bool array)."""
    data = _read_bytes(path)
    magic = data[:2]
    if magic == b"P5":
        return "gray", _decode_pgm(data, path)
    if magic == b"P4":
        return "bits", _decode_pbm(data, path)
    if data[:8] == b"\x89PNG\r\n\x1a\n":
        return "gray", _decode_png(path)
    raise ImageFormatError(f"{path}: unsupported format (expected P5 PGM, P4 PBM or PNG)")


def load_gray(path) -> GrayImage:
    kind, arr = _read_levels(path)
    if kind == "bits":
        arr = np.where(arr, 0, 255).astype(np.uint8)
    return GrayImage(arr)


def load_binary(path) -> BinaryImage:
    """Load a bilevel image; dark pixels become foreground.

    Grayscale sources are accepted only if every level is 0 or 255.
    """
    kind, arr = _read_levels(path)
    if kind == "bits":
        return BinaryImage(arr)
    bad = (arr != 0) & (arr != 255)
    if bad.any():
        raise NotBilevelError(
            f"{path}: not bilevel (found intermediate level {int(arr[bad][0])})"
        )
    return BinaryImage(arr == 0)


def save_gray(img: GrayImage, path) -> None:
    header = f"P5\n{img.width} {img.height}\n255\n".encode("ascii")
    with open(os.fspath(path), "wb") as fh:
        fh.write(header + img.levels.tobytes())


def save_binary(img: BinaryImage, path) -> None:
    header = f"P4\n{img.width} {img.height}\n".encode("ascii")
    packed = np.packbits(img.mask.astype(np.uint8), axis=1)
    with open(os.fspath(path), "wb") as fh:
        fh.write(header + packed.tobytes())


# --------------------------------------------------------------------------
# Otsu
# --------------------------------------------------------------------------


def otsu_threshold(img: GrayImage) -> int | None:
    """Level ``t`` maximizing between-class variance of the 256-bin histogram.

    Pixels with level <= t form the dark class.  Returns None when the image
    has a single level (no threshold separates anything).  Ties go to the
    smallest t.
    """
    hist = np.bincount(img.levels.ravel(), minlength=256).astype(float)
    if np.count_nonzero(hist) < 2:
        return None
    p = hist / hist.sum()
    levels = np.arange(256, dtype=float)
    w0 = np.cumsum(p)
    mu = np.cumsum(p * levels)
    mu_t = mu[-1]
    w1 = 1.0 - w0
    with np.errstate(divide="ignore", invalid="ignore"):
        between = (mu_t * w0 - mu) ** 2 / (w0 * w1)
    # t = 255 and empty classes are not valid splits
    between[(hist.cumsum() == 0) | (hist.cumsum() == hist.sum())] = -np.inf
    return int(np.argmax(between))


def otsu_binarize(img: GrayImage) -> BinaryImage:
    t = otsu_threshold(img)
    if t is None:
        return BinaryImage(np.zeros(img.shape, dtype=bool))
    return BinaryImage(img.levels <= t)
