import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from docbin.errors import DomainError, ShapeError
from docbin.threshold import (apply_threshold, binarize, histogram, local_threshold, otsu,
                              otsu_threshold, window_stats)
from oracles import otsu_naive, window_stats_naive

sparse_hist = st.lists(st.tuples(st.integers(0, 255), st.integers(1, 50)), min_size=1,
                       max_size=6)


def _hist(pairs):
    h = np.zeros(256, dtype=np.int64)
    for level, count in pairs:
        h[level] += count
    return h


@settings(max_examples=150, deadline=None)
@given(sparse_hist)
def test_otsu_sparse_matches_exhaustive(pairs):
    h = _hist(pairs)
    assert otsu_threshold(h) == otsu_naive(h)


def test_otsu_two_levels():
    h = _hist([(10, 5), (200, 5)])
    assert otsu_threshold(h) == 10  # every t in [10, 199] ties; smallest wins


def test_otsu_constant_image():
    assert otsu_threshold(_hist([(42, 9)])) is None
    mask = otsu(np.full((3, 3), 42, dtype=np.uint8))
    assert not mask.any()


def test_otsu_symmetric_tie():
    # levels 0, 100, 200 with equal counts: t=0 and t=100 give equal variance
    h = _hist([(0, 1), (100, 1), (200, 1)])
    assert otsu_threshold(h) == otsu_naive(h) == 0


def test_otsu_errors():
    with pytest.raises(DomainError):
        otsu_threshold(np.zeros(256))
    with pytest.raises(DomainError):
        otsu_threshold(-np.ones(256))
    with pytest.raises(ShapeError):
        otsu_threshold(np.ones(10))


def test_apply_threshold_semantics():
    img = np.array([[0, 99, 100, 101, 255]], dtype=np.uint8)
    assert apply_threshold(img, 100).tolist() == [[True, True, True, False, False]]
    assert histogram(img).sum() == 5


@settings(max_examples=30, deadline=None)
@given(arrays(np.uint8, st.tuples(st.integers(1, 9), st.integers(1, 9))),
       st.sampled_from([3, 5, 7]))
def test_window_stats_naive(img, window):
    mean, std = window_stats(img, window)
    m_ref, s_ref = window_stats_naive(img, window)
    assert np.allclose(mean, m_ref, rtol=0, atol=1e-9)
    assert np.allclose(std, s_ref, rtol=0, atol=1e-7)


@pytest.mark.parametrize("method,k", [("niblack", -0.2), ("sauvola", 0.2), ("sauvola", 0.5)])
def test_local_threshold_formula(rng, method, k):
    img = rng.integers(0, 256, (12, 15), dtype=np.uint8)
    m, s = window_stats_naive(img, 5)
    t = m + k * s if method == "niblack" else m * (1 + k * (s / 128.0 - 1))
    got = local_threshold(img, method, window=5, k=k)
    # pixels sitting within rounding of their threshold may go either way
    decided = np.abs(img - t) > 1e-9
    assert np.array_equal(got[decided], (img <= t)[decided])


def test_local_threshold_finds_dark_text():
    img = np.full((40, 40), 200, dtype=np.uint8)
    img[18:22, 5:35] = 40
    for method in ("niblack", "sauvola"):
        assert binarize(img, method, window=15)[18:22, 5:35].all()
    # on a flat background Sauvola's threshold drops below the mean; Niblack's equals it
    assert not binarize(img, "sauvola", window=15)[:10].any()
    assert binarize(img, "niblack", window=15)[:10].all()


def test_local_threshold_validation():
    img = np.zeros((5, 5), dtype=np.uint8)
    with pytest.raises(DomainError):
        window_stats(img, 4)
    with pytest.raises(DomainError):
        window_stats(img, 1)
    with pytest.raises(DomainError):
        local_threshold(img, "bernsen")


@settings(max_examples=60, deadline=None)
@given(sparse_hist, st.integers(2, 50))
def test_otsu_invariant_under_count_scaling(pairs, factor):
    h = _hist(pairs)
    assert otsu_threshold(h * factor) == otsu_threshold(h)


@settings(max_examples=60, deadline=None)
@given(arrays(np.uint8, st.tuples(st.integers(1, 12), st.integers(1, 12)),
              elements=st.integers(0, 50)),
       st.integers(1, 4), st.integers(0, 50))
def test_otsu_mask_invariant_under_affine_maps(img, a, b):
    mapped = (img.astype(int) * a + b).astype(np.uint8)
    assert np.array_equal(otsu(mapped), otsu(img))
