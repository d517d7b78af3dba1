"""Single-level 2-D Haar transform and the LL-subband downscaler.

For each 2x2 block ``[[a, b], [c, d]]`` the orthonormal Haar transform gives

    LL = (a + b + c + d) / 2
    LH = (a - b + c - d) / 2
    HL = (a + b - c - d) / 2
    HH = (a - b - c + d) / 2

so LL is twice the block mean. Odd dimensions are padded by edge
replication before the transform.
"""
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ShapeError
from .raster import as_raster


@dataclass(frozen=True)
class SubbandSet:
    """The four half-resolution Haar subbands of one image."""

    ll: np.ndarray
    lh: np.ndarray
    hl: np.ndarray
    hh: np.ndarray
    source_width: int
    source_height: int

    @property
    def shape(self):
        return self.ll.shape


def _pad_even(img):
    h, w = img.shape
    ph, pw = h % 2, w % 2
    if ph or pw:
        img = np.pad(img, ((0, ph), (0, pw)), mode="edge")
    return img


def _blocks(img):
    """Return the four 2x2 block corners of an even-sized image as int32."""
    px = _pad_even(as_raster(img)).astype(np.int32)
    return px[0::2, 0::2], px[0::2, 1::2], px[1::2, 0::2], px[1::2, 1::2]


def haar_forward(img):
    """Decompose a raster into its Haar subbands.

    Examples
    --------
    >>> s = haar_forward(np.array([[100, 50], [30, 20]], dtype=np.uint8))
    >>> s.ll[0, 0], s.lh[0, 0], s.hl[0, 0], s.hh[0, 0]
    (100.0, 30.0, 50.0, 20.0)
    """
    raster = as_raster(img)
    a, b, c, d = _blocks(raster)
    ll = (a + b + c + d) / 2.0
    lh = (a - b + c - d) / 2.0
    hl = (a + b - c - d) / 2.0
    hh = (a - b - c + d) / 2.0
    h, w = raster.shape
    return SubbandSet(ll, lh, hl, hh, source_width=w, source_height=h)


def haar_inverse(s):
    """Reconstruct a raster from its subbands.

    Values are rounded half up and clamped to [0, 255]; padding added by
    the forward transform is dropped.
    """
    planes = (s.ll, s.lh, s.hl, s.hh)
    shape = np.shape(s.ll)
    if any(np.shape(p) != shape for p in planes) or len(shape) != 2:
        raise ShapeError("subband planes must share one 2-D shape")
    expect = ((s.source_height + 1) // 2, (s.source_width + 1) // 2)
    if shape != expect:
        raise ShapeError(
            f"subbands of shape {shape} do not match a "
            f"{s.source_height}x{s.source_width} source")
    ll, lh, hl, hh = (np.asarray(p, dtype=np.float64) for p in planes)
    out = np.empty((2 * shape[0], 2 * shape[1]))
    out[0::2, 0::2] = (ll + lh + hl + hh) / 2.0
    out[0::2, 1::2] = (ll - lh + hl - hh) / 2.0
    out[1::2, 0::2] = (ll + lh - hl - hh) / 2.0
    out[1::2, 1::2] = (ll - lh - hl + hh) / 2.0
    out = np.clip(np.floor(out + 0.5), 0, 255).astype(np.uint8)
    return np.ascontiguousarray(out[:s.source_height, :s.source_width])


def ll_downscale(img, mode="normalized"):
    """Halve an image by keeping only its Haar LL subband.

    Parameters
    ----------
    img : ndarray
        2-D uint8 raster.
    mode : {"normalized", "raw"}
        ``"normalized"`` min-max stretches LL to [0, 255]; a constant LL
        plane instead maps to the block mean ``LL / 2``. ``"raw"`` clamps
        LL itself to [0, 255], so any block with mean above 127.5
        saturates to white.

    Returns
    -------
    ndarray
        uint8 raster of shape ``(ceil(H/2), ceil(W/2))``.
    """
    a, b, c, d = _blocks(img)
    # block sum S = 2 * LL; integer arithmetic keeps half-up rounding exact
    s = a + b + c + d
    if mode == "raw":
        # round(S / 2) half up
        return np.minimum((s + 1) // 2, 255).astype(np.uint8)
    if mode != "normalized":
        raise DomainError(f"unknown mode {mode!r}")
    lo = int(s.min())
    hi = int(s.max())
    if hi == lo:
        # round(S / 4) half up
        return np.full(s.shape, min((lo + 2) // 4, 255), dtype=np.uint8)
    span = hi - lo
    # round(255 * (S - lo) / span) = floor((510 * (S - lo) + span) / (2 * span))
    out = (510 * (s - lo) + span) // (2 * span)
    return out.astype(np.uint8)
