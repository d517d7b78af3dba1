"""DIBCO-style evaluation of binarization results.

All functions take boolean masks where ``True`` marks foreground (text).
The foreground is the positive class for precision and recall.

PSNR is computed on unit-range masks, so the MSE is the fraction of
differing pixels. Two peak conventions are offered:

- ``"dibco"``: peak 1, the usual competition scoring (values near 20 dB);
- ``"table2"``: peak 255 against unit-difference masks (values near 70 dB).
"""
import math
from fractions import Fraction
from dataclasses import asdict, dataclass

import numpy as np

from .errors import DomainError, ShapeError
from .raster import as_mask

PSNR_PEAKS = {"dibco": 1.0, "table2": 255.0}
PSNR_CAP = 100.0
REPORT_FIELDS = ("image", "fm", "pfm", "psnr", "drd", "nubn", "avg", "psnr_mode")


def _pair(out, gt):
    out = as_mask(out)
    gt = as_mask(gt)
    if out.shape != gt.shape:
        raise ShapeError(f"shape mismatch: output {out.shape} vs ground truth {gt.shape}")
    return out, gt


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def total(self):
        return self.tp + self.fp + self.fn + self.tn


def confusion(out, gt):
    out, gt = _pair(out, gt)
    tp = int(np.count_nonzero(out & gt))
    fp = int(np.count_nonzero(out & ~gt))
    fn = int(np.count_nonzero(~out & gt))
    return ConfusionCounts(tp, fp, fn, out.size - tp - fp - fn)


def _fscore(tp, fp, fn):
    if tp == 0 and fp == 0 and fn == 0:
        return 100.0
    if tp == 0:
        return 0.0
    precision = tp / (tp + fp)
    recall = tp / (tp + fn)
    return 100.0 * 2.0 * precision * recall / (precision + recall)


def f_measure(c):
    """F-measure in percent.

    Zero precision or recall denominators give 0, except that an empty
    output against an empty ground truth scores 100.
    """
    return _fscore(c.tp, c.fp, c.fn)


def psnr(out, gt, peak=1.0):
    """Peak signal-to-noise ratio in dB; ``inf`` when the masks are identical."""
    out, gt = _pair(out, gt)
    if peak <= 0:
        raise DomainError("peak must be positive")
    wrong = int(np.count_nonzero(out != gt))
    if wrong == 0:
        return math.inf
    mse = wrong / out.size
    return 10.0 * math.log10(peak * peak / mse)


# -- skeleton ----------------------------------------------------------------


def _neighbours(img):
    """The eight neighbour planes P2..P9 (clockwise from north), zero padded."""
    p = np.pad(img, 1)
    h, w = img.shape
    c = lambda dy, dx: p[1 + dy:1 + dy + h, 1 + dx:1 + dx + w]
    return [c(-1, 0), c(-1, 1), c(0, 1), c(1, 1), c(1, 0), c(1, -1), c(0, -1), c(-1, -1)]


def skeletonize(mask):
    """Zhang-Suen thinning of the foreground, iterated to a fixpoint.

    Examples
    --------
    >>> dot = np.zeros((3, 3), dtype=bool); dot[1, 1] = True
    >>> bool(skeletonize(dot)[1, 1])
    True
    """
    img = as_mask(mask).astype(np.uint8)
    while True:
        changed = False
        for step in (0, 1):
            n = _neighbours(img)
            p2, p3, p4, p5, p6, p7, p8, p9 = n
            b = sum(x.astype(np.int32) for x in n)
            ring = n + [p2]
            a = sum(((ring[i] == 0) & (ring[i + 1] == 1)).astype(np.int32) for i in range(8))
            if step == 0:
                c1 = (p2 * p4 * p6) == 0
                c2 = (p4 * p6 * p8) == 0
            else:
                c1 = (p2 * p4 * p8) == 0
                c2 = (p2 * p6 * p8) == 0
            delete = (img == 1) & (b >= 2) & (b <= 6) & (a == 1) & c1 & c2
            if delete.any():
                img[delete] = 0
                changed = True
        if not changed:
            return img.astype(bool)


def pseudo_f_measure(out, gt, skeleton=None):
    """Pseudo F-measure in percent.

    Recall is measured against the skeleton of the ground-truth text,
    precision against the full ground truth.
    """
    out, gt = _pair(out, gt)
    skel = skeletonize(gt) if skeleton is None else as_mask(skeleton)
    s_tp = int(np.count_nonzero(out & skel))
    s_fn = int(np.count_nonzero(~out & skel))
    tp = int(np.count_nonzero(out & gt))
    fp = int(np.count_nonzero(out & ~gt))
    if s_tp == 0 and s_fn == 0 and fp == 0:
        return 100.0
    if s_tp == 0 or tp == 0:
        return 0.0
    p_recall = s_tp / (s_tp + s_fn)
    precision = tp / (tp + fp)
    return 100.0 * 2.0 * p_recall * precision / (p_recall + precision)


# -- DRD ---------------------------------------------------------------------


def drd_weights(size=5):
    """Normalized reciprocal-distance weight matrix with a zero center."""
    c = size // 2
    yy, xx = np.mgrid[0:size, 0:size]
    dist = np.sqrt(((yy - c) ** 2 + (xx - c) ** 2).astype(np.float64))
    w = np.zeros((size, size))
    np.divide(1.0, dist, out=w, where=dist > 0)
    return w / math.fsum(w.ravel())


def nubn(gt, block=8):
    """Number of grid-aligned ``block x block`` ground-truth blocks holding both classes.

    Partial blocks at the right and bottom edges are counted like full ones.
    """
    gt = as_mask(gt)
    h, w = gt.shape
    fg = np.add.reduceat(np.add.reduceat(gt.astype(np.int64), np.arange(0, h, block), axis=0),
                         np.arange(0, w, block), axis=1)
    bh = np.minimum(block, h - np.arange(0, h, block))
    bw = np.minimum(block, w - np.arange(0, w, block))
    area = bh[:, None] * bw[None, :]
    return int(np.count_nonzero((fg > 0) & (fg < area)))


@dataclass(frozen=True)
class DRDResult:
    drd: float
    nubn: int
    nubn_clamped: bool = False


def drd(out, gt):
    """Distance reciprocal distortion.

    Each flipped pixel contributes the weighted count of 5x5 ground-truth
    neighbours that disagree with its output value; out-of-image
    neighbours contribute nothing. The total is divided by NUBN. When the
    ground truth has no mixed block but pixels were flipped, NUBN is
    clamped to 1 and the result is flagged.
    """
    out, gt = _pair(out, gt)
    w = drd_weights(5)
    r = 2
    ys, xs = np.nonzero(out != gt)
    blocks = nubn(gt)
    if ys.size == 0:
        return DRDResult(0.0, blocks)
    padded = np.pad(gt.astype(np.int8), r, constant_values=-1)
    val = out[ys, xs].astype(np.int8)
    # count disagreeing neighbours per weight position, then sum exactly so
    # the result is the correctly rounded total whatever the pixel order
    total = Fraction(0)
    for dy in range(-r, r + 1):
        for dx in range(-r, r + 1):
            nb = padded[ys + r + dy, xs + r + dx]
            n = int(np.count_nonzero((nb >= 0) & (nb != val)))
            if n:
                total += Fraction(float(w[dy + r, dx + r])) * n
    total = float(total)
    if blocks == 0:
        return DRDResult(total, 0, nubn_clamped=True)
    return DRDResult(total / blocks, blocks)


def avg_score(fm, pfm, psnr_db, drd_value):
    """Composite score ``(FM + p-FM + PSNR + (100 - DRD)) / 4``."""
    return (fm + pfm + psnr_db + (100.0 - drd_value)) / 4.0


# -- reports -----------------------------------------------------------------


@dataclass(frozen=True)
class MetricReport:
    """Scores of one binarized image against its ground truth.

    `psnr` holds the capped value whenever the masks are identical
    (`psnr_saturated` is then True), so `avg` is always finite.
    """

    image: str
    fm: float
    pfm: float
    psnr: float
    drd: float
    nubn: int
    avg: float
    psnr_mode: str
    psnr_saturated: bool = False
    nubn_clamped: bool = False

    def row(self):
        d = asdict(self)
        return {k: d[k] for k in REPORT_FIELDS}


def evaluate(out, gt, image="", psnr_mode="dibco", psnr_cap=PSNR_CAP):
    """Score one output mask with FM, p-FM, PSNR, DRD and Avg-Score."""
    if psnr_mode not in PSNR_PEAKS:
        raise DomainError(f"unknown psnr mode {psnr_mode!r}")
    out, gt = _pair(out, gt)
    fm = f_measure(confusion(out, gt))
    pfm = pseudo_f_measure(out, gt)
    p = psnr(out, gt, PSNR_PEAKS[psnr_mode])
    saturated = math.isinf(p)
    if saturated:
        p = psnr_cap
    d = drd(out, gt)
    return MetricReport(image, fm, pfm, p, d.drd, d.nubn, avg_score(fm, pfm, p, d.drd),
                        psnr_mode, saturated, d.nubn_clamped)


def aggregate(reports, pooled_psnr=False):
    """Mean of each metric over a list of reports.

    With ``pooled_psnr`` the PSNR entry is recomputed from the mean
    per-image MSE instead of averaging the per-image dB values.
    """
    reports = list(reports)
    if not reports:
        raise DomainError("cannot aggregate an empty report list")
    n = len(reports)
    mean = {k: math.fsum(getattr(r, k) for r in reports) / n
            for k in ("fm", "pfm", "psnr", "drd", "nubn", "avg")}
    if pooled_psnr:
        modes = {r.psnr_mode for r in reports}
        if len(modes) != 1:
            raise DomainError("pooled PSNR needs a single psnr mode")
        peak = PSNR_PEAKS[modes.pop()]
        mse = math.fsum(0.0 if r.psnr_saturated else peak * peak * 10 ** (-r.psnr / 10)
                        for r in reports) / n
        mean["psnr"] = PSNR_CAP if mse == 0 else 10 * math.log10(peak * peak / mse)
    return mean
