"""Classical global and local binarization.

Pixels at or below a threshold are foreground (dark text); everything
brighter is background.
"""
from fractions import Fraction

import numpy as np

from .errors import DomainError, ShapeError
from .raster import as_raster

NIBLACK_K = -0.2
SAUVOLA_K = 0.2
SAUVOLA_R = 128.0
DEFAULT_WINDOW = 25


def histogram(img):
    """256-bin intensity histogram of a raster, as int64 counts."""
    return np.bincount(as_raster(img).ravel(), minlength=256).astype(np.int64)


def _check_hist(hist):
    h = np.asarray(hist)
    if h.shape != (256,):
        raise ShapeError(f"histogram must have 256 bins, got shape {h.shape}")
    if np.any(h < 0):
        raise DomainError("histogram counts must be non-negative")
    h = h.astype(np.int64)
    if h.sum() < 1:
        raise DomainError("histogram is empty")
    return h


def _between_class_key(n0, s0, n, s):
    """Exact between-class variance (up to the constant factor 1/n^2)."""
    n1 = n - n0
    if n0 == 0 or n1 == 0:
        return Fraction(0)
    num = s0 * n1 - (s - s0) * n0
    return Fraction(num * num, n0 * n1)


def otsu_threshold(hist):
    """Otsu's threshold for a 256-bin histogram.

    The threshold ``t`` splits pixels into ``<= t`` and ``> t`` and
    maximizes the between-class variance ``w0 * w1 * (mu0 - mu1)**2``.
    Ties resolve to the smallest ``t``.

    Returns
    -------
    int or None
        The threshold in [0, 255], or None when the histogram has a single
        occupied bin (constant image, zero variance for every ``t``).
    """
    h = _check_hist(hist)
    levels = np.arange(256, dtype=np.int64)
    n0 = np.cumsum(h)
    s0 = np.cumsum(h * levels)
    n, s = int(n0[-1]), int(s0[-1])
    n1 = n - n0
    with np.errstate(divide="ignore", invalid="ignore"):
        mu0 = s0 / n0
        mu1 = (s - s0) / n1
        var = n0 * n1 * (mu0 - mu1) ** 2
    var = np.where((n0 == 0) | (n1 == 0), 0.0, var)
    best = float(var.max())
    if best <= 0.0:
        return None
    # float ranking is only trusted up to rounding; settle near-ties exactly
    candidates = np.flatnonzero(var >= best * (1 - 1e-9))
    if candidates.size == 1:
        return int(candidates[0])
    keys = [_between_class_key(int(n0[t]), int(s0[t]), n, s) for t in candidates]
    top = max(keys)
    return int(candidates[keys.index(top)])


def apply_threshold(img, t):
    """Binarize with a global threshold; ``t=None`` yields an all-background mask."""
    raster = as_raster(img)
    if t is None:
        return np.zeros(raster.shape, dtype=bool)
    return raster <= t


def otsu(img):
    """Otsu binarization of a raster."""
    return apply_threshold(img, otsu_threshold(histogram(img)))


def window_stats(img, window):
    """Local mean and standard deviation over a window clipped to the image.

    Computed from integral images in exact integer arithmetic before the
    final division.
    """
    raster = as_raster(img)
    if window < 3 or window % 2 == 0:
        raise DomainError(f"window must be odd and >= 3, got {window}")
    px = raster.astype(np.int64)
    h, w = px.shape
    r = window // 2

    def integral(a):
        out = np.zeros((h + 1, w + 1), dtype=np.int64)
        out[1:, 1:] = a.cumsum(0).cumsum(1)
        return out

    sat, sat2 = integral(px), integral(px * px)
    y0 = np.clip(np.arange(h) - r, 0, h)
    y1 = np.clip(np.arange(h) + r + 1, 0, h)
    x0 = np.clip(np.arange(w) - r, 0, w)
    x1 = np.clip(np.arange(w) + r + 1, 0, w)

    def box(t):
        return (t[y1][:, x1] - t[y0][:, x1] - t[y1][:, x0] + t[y0][:, x0])

    count = (y1 - y0)[:, None] * (x1 - x0)[None, :]
    total, total2 = box(sat), box(sat2)
    mean = total / count
    # count * sum(x^2) - sum(x)^2 is exact in integers
    var = (count * total2 - total * total) / (count * count)
    return mean, np.sqrt(np.maximum(var, 0.0))


def local_threshold(img, method="sauvola", window=DEFAULT_WINDOW, k=None, R=SAUVOLA_R):
    """Niblack or Sauvola adaptive binarization.

    Niblack uses ``t = m + k * s`` and Sauvola ``t = m * (1 + k * (s / R - 1))``
    with ``m`` and ``s`` the windowed mean and standard deviation.
    `k` defaults to -0.2 for Niblack and 0.2 for Sauvola.
    """
    mean, std = window_stats(img, window)
    if method == "niblack":
        t = mean + (NIBLACK_K if k is None else k) * std
    elif method == "sauvola":
        t = mean * (1 + (SAUVOLA_K if k is None else k) * (std / R - 1))
    else:
        raise DomainError(f"unknown local method {method!r}")
    return as_raster(img) <= t


def binarize(img, method="otsu", **params):
    """Dispatch to Otsu or a local method by name."""
    if method == "otsu":
        return otsu(img)
    return local_threshold(img, method, **params)
