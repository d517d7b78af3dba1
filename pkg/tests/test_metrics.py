import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from docbin.errors import DomainError, ShapeError
from docbin.metrics import (aggregate, avg_score, confusion, drd, drd_weights, evaluate,
                            f_measure, nubn, pseudo_f_measure, psnr, skeletonize)
from oracles import confusion_naive, drd_naive, nubn_naive, pfm_naive, zhang_suen_naive

shapes = st.tuples(st.integers(1, 20), st.integers(1, 20))


@st.composite
def mask_pairs(draw):
    shape = draw(shapes)
    return draw(arrays(bool, shape)), draw(arrays(bool, shape))


@settings(max_examples=80, deadline=None)
@given(mask_pairs())
def test_confusion_naive(pair):
    out, gt = pair
    c = confusion(out, gt)
    assert (c.tp, c.fp, c.fn, c.tn) == confusion_naive(out, gt)
    assert c.total == out.size


@settings(max_examples=80, deadline=None)
@given(mask_pairs())
def test_drd_naive(pair):
    out, gt = pair
    r = drd(out, gt)
    ref = drd_naive(out, gt)
    assert (r.drd, r.nubn, r.nubn_clamped) == ref


@settings(max_examples=60, deadline=None)
@given(arrays(bool, shapes))
def test_nubn_naive(gt):
    assert nubn(gt) == nubn_naive(gt)


@settings(max_examples=60, deadline=None)
@given(arrays(bool, shapes))
def test_skeleton_naive(mask):
    assert np.array_equal(skeletonize(mask), zhang_suen_naive(mask))


@settings(max_examples=60, deadline=None)
@given(mask_pairs())
def test_pfm_naive(pair):
    out, gt = pair
    assert pseudo_f_measure(out, gt) == pfm_naive(out, gt)


@settings(max_examples=40, deadline=None)
@given(arrays(bool, shapes))
def test_skeleton_is_subset_and_idempotent(mask):
    skel = skeletonize(mask)
    assert not (skel & ~mask).any()
    assert np.array_equal(skeletonize(skel), skel)


def test_skeleton_of_thick_bar_is_thin():
    m = np.zeros((11, 30), dtype=bool)
    m[3:8, 2:28] = True
    skel = skeletonize(m)
    assert skel.any()
    assert skel.sum(axis=0).max() == 1  # one pixel per column


def test_drd_weights():
    w = drd_weights(5)
    assert w[2, 2] == 0 and math.isclose(w.sum(), 1.0)
    assert math.isclose(w[2, 3] / w[0, 0], math.sqrt(8))


def test_psnr_closed_form():
    gt = np.zeros((10, 10), dtype=bool)
    out = gt.copy()
    out[3, 4] = True
    assert abs(psnr(out, gt, 1.0) - 20.0) < 1e-9
    assert abs(psnr(out, gt, 255.0) - (20.0 + 20 * math.log10(255))) < 1e-9
    assert psnr(gt, gt) == math.inf
    with pytest.raises(DomainError):
        psnr(out, gt, 0)


def test_f_measure_degenerate_cases():
    empty = np.zeros((4, 4), dtype=bool)
    full = np.ones((4, 4), dtype=bool)
    assert f_measure(confusion(empty, empty)) == 100.0
    assert f_measure(confusion(empty, full)) == 0.0
    assert f_measure(confusion(full, empty)) == 0.0
    assert f_measure(confusion(full, full)) == 100.0


def test_f_measure_value():
    gt = np.array([[1, 1, 1, 1, 0, 0]], dtype=bool)
    out = np.array([[1, 1, 0, 0, 1, 0]], dtype=bool)
    p, r = 2 / 3, 2 / 4
    assert math.isclose(f_measure(confusion(out, gt)), 100 * 2 * p * r / (p + r))


def test_avg_score_formula():
    assert math.isclose(avg_score(89.69, 90.78, 19.15, 4.45), 73.7925)


def test_evaluate_identical_saturates():
    gt = np.zeros((16, 16), dtype=bool)
    gt[4:10, 4:6] = True
    r = evaluate(gt, gt, "x")
    assert r.psnr == 100.0 and r.psnr_saturated and r.fm == 100.0 and r.drd == 0.0
    assert math.isfinite(r.avg)
    assert list(r.row()) == ["image", "fm", "pfm", "psnr", "drd", "nubn", "avg", "psnr_mode"]


def test_evaluate_flags_nubn_clamp():
    gt = np.zeros((8, 8), dtype=bool)
    out = gt.copy()
    out[2, 2] = True
    r = evaluate(out, gt)
    assert r.nubn == 0 and r.nubn_clamped and r.drd > 0


def test_shape_mismatch():
    with pytest.raises(ShapeError):
        confusion(np.zeros((2, 2), bool), np.zeros((2, 3), bool))
    with pytest.raises(DomainError):
        evaluate(np.zeros((2, 2), bool), np.zeros((2, 2), bool), psnr_mode="x")


def test_aggregate():
    rng = np.random.default_rng(5)
    gt = rng.random((20, 20)) < 0.2
    reports = [evaluate(rng.random((20, 20)) < 0.2, gt) for _ in range(3)]
    agg = aggregate(reports)
    assert math.isclose(agg["fm"], sum(r.fm for r in reports) / 3)
    pooled = aggregate(reports, pooled_psnr=True)
    mse = sum(10 ** (-r.psnr / 10) for r in reports) / 3
    assert math.isclose(pooled["psnr"], -10 * math.log10(mse))
    with pytest.raises(DomainError):
        aggregate([])


# (FM, p-FM, PSNR, DRD, printed Avg) for six generator architectures
ARCHITECTURE_SCORES = [
    (87.87, 88.57, 18.82, 5.17, 72.52),
    (88.88, 89.65, 18.93, 4.85, 73.15),
    (88.83, 89.87, 19.07, 4.86, 73.23),
    (89.40, 90.38, 19.01, 4.87, 73.48),
    (89.76, 90.75, 19.15, 4.51, 73.79),
    (89.69, 90.78, 19.15, 4.45, 73.79),
]


@pytest.mark.parametrize("row", ARCHITECTURE_SCORES)
def test_avg_score_architecture_rows(row):
    *scores, printed = row
    assert abs(avg_score(*scores) - printed) <= 0.01


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 12), st.integers(2, 12), st.data())
def test_psnr_strictly_decreasing_in_errors(h, w, data):
    gt = data.draw(arrays(bool, (h, w)))
    order = data.draw(st.permutations(range(h * w)))
    out = gt.copy()
    prev = math.inf
    for k in order[: min(6, h * w)]:
        out.flat[k] = not out.flat[k]
        cur = psnr(out, gt)
        assert cur < prev
        prev = cur


@settings(max_examples=40, deadline=None)
@given(mask_pairs())
def test_scores_in_range(pair):
    out, gt = pair
    r = evaluate(out, gt)
    assert 0 <= r.fm <= 100 and 0 <= r.pfm <= 100 and r.drd >= 0
    assert r.avg == (r.fm + r.pfm + r.psnr + (100 - r.drd)) / 4
    if gt.any():
        assert (r.fm == 100.0) == np.array_equal(out, gt)
