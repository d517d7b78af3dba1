"""Pixel containers and color handling.

docbin represents images as plain numpy arrays:

- a *raster* is a 2-D ``uint8`` array of shape ``(height, width)``;
- an *RGB image* is a ``uint8`` array of shape ``(height, width, 3)``;
- a *mask* is a 2-D ``bool`` array where ``True`` marks foreground (text).

When a mask is stored as pixels, foreground is 0 (black) and background
is 255 (white).
"""
import numpy as np

from .errors import ShapeError

FOREGROUND = 0
BACKGROUND = 255


def as_raster(img):
    """Validate and return `img` as a contiguous 2-D uint8 array."""
    arr = np.asarray(img)
    if arr.ndim != 2:
        raise ShapeError(f"expected a 2-D raster, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ShapeError(f"raster dimensions must be >= 1, got {arr.shape}")
    if arr.dtype != np.uint8:
        if arr.size and (arr.min() < 0 or arr.max() > 255):
            raise ValueError("raster intensities must lie in [0, 255]")
        arr = arr.astype(np.uint8)
    return np.ascontiguousarray(arr)


def as_rgb(img):
    """Validate and return `img` as a contiguous ``(H, W, 3)`` uint8 array."""
    arr = np.asarray(img)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise ShapeError(f"expected an (H, W, 3) image, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ShapeError(f"image dimensions must be >= 1, got {arr.shape}")
    return np.ascontiguousarray(arr, dtype=np.uint8)


def as_mask(mask):
    """Validate and return `mask` as a 2-D boolean foreground array."""
    arr = np.asarray(mask)
    if arr.ndim != 2:
        raise ShapeError(f"expected a 2-D mask, got shape {arr.shape}")
    if arr.dtype != bool:
        raise TypeError(f"masks must be boolean arrays, got dtype {arr.dtype}")
    return arr


def mask_to_raster(mask):
    """Encode a foreground mask as pixels: foreground 0, background 255."""
    return np.where(as_mask(mask), FOREGROUND, BACKGROUND).astype(np.uint8)


def raster_to_mask(img, threshold=127):
    """Decode stored mask pixels; values ``<= threshold`` are foreground."""
    return as_raster(img) <= threshold


def to_gray(img):
    """Convert an RGB image to gray with BT.601 luma weights.

    ``gray = round(0.299 R + 0.587 G + 0.114 B)`` with halves rounded up,
    computed in exact integer arithmetic.
    """
    rgb = as_rgb(img).astype(np.int32)
    acc = 299 * rgb[..., 0] + 587 * rgb[..., 1] + 114 * rgb[..., 2]
    return ((acc + 500) // 1000).astype(np.uint8)


def ensure_gray(img):
    """Return `img` unchanged if it is a raster, else its gray conversion."""
    arr = np.asarray(img)
    if arr.ndim == 3:
        return to_gray(arr)
    return as_raster(arr)


def split_channels(img):
    """Split an RGB image into its red, green, blue and gray planes."""
    rgb = as_rgb(img)
    red, green, blue = (np.ascontiguousarray(rgb[..., i]) for i in range(3))
    return red, green, blue, to_gray(rgb)


def saturating_add(a, b):
    """Per-pixel ``min(a + b, 255)`` of two rasters of equal shape."""
    a = as_raster(a)
    b = as_raster(b)
    if a.shape != b.shape:
        raise ShapeError(f"shape mismatch: {a.shape} vs {b.shape}")
    total = a.astype(np.uint16) + b
    return np.minimum(total, 255).astype(np.uint8)
