import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from docbin.errors import DomainError, ShapeError
from docbin.patchwork import (AugmentSpec, augment_global, augment_local, fuse, merge_patches,
                              rotate, split_patches)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 700), st.integers(1, 700), st.sampled_from([64, 100, 256]))
def test_patch_count(w, h, p):
    grid = split_patches(np.zeros((h, w), dtype=np.uint8), p)
    assert len(grid) == -(-w // p) * -(-h // p)
    assert all(patch.shape == (p, p) for patch in grid.patches)


def test_600_by_500_gives_six():
    grid = split_patches(np.zeros((500, 600), dtype=np.uint8))
    assert (len(grid), grid.cols, grid.rows) == (6, 3, 2)


@settings(max_examples=40, deadline=None)
@given(arrays(np.uint8, st.tuples(st.integers(1, 40), st.integers(1, 40))),
       st.integers(1, 16))
def test_split_merge_round_trip(img, p):
    assert np.array_equal(merge_patches(split_patches(img, p)), img)


def test_split_merge_masks():
    m = np.random.default_rng(0).random((23, 31)) < 0.3
    back = merge_patches(split_patches(m, 8))
    assert back.dtype == bool and np.array_equal(back, m)


def test_padding_replicates_edges():
    img = np.arange(6, dtype=np.uint8).reshape(2, 3)
    patch = split_patches(img, 4).patches[0]
    assert patch[3].tolist() == [3, 4, 5, 5] and patch[:, 3].tolist() == [2, 5, 5, 5]


def test_row_major_order():
    img = np.zeros((4, 6), dtype=np.uint8)
    img[0:2, 2:4] = 9
    grid = split_patches(img, 2)
    assert grid.position(1) == (0, 1) and (grid.patches[1] == 9).all()


def test_merge_validation():
    grid = split_patches(np.zeros((5, 5), dtype=np.uint8), 4)
    grid.patches.pop()
    with pytest.raises(ShapeError):
        merge_patches(grid)
    grid = split_patches(np.zeros((5, 5), dtype=np.uint8), 4)
    grid.patches[0] = np.zeros((3, 4), dtype=np.uint8)
    with pytest.raises(ShapeError):
        merge_patches(grid)


def test_rotate_counter_clockwise():
    img = np.array([[1, 2], [3, 4]], dtype=np.uint8)
    assert rotate(img, 90).tolist() == [[2, 4], [1, 3]]
    assert rotate(img, 270).tolist() == [[3, 1], [4, 2]]
    assert np.array_equal(rotate(img, 360), img)
    with pytest.raises(DomainError):
        rotate(img, 45)


def test_augment_local_default_count_and_shapes():
    img = np.random.default_rng(1).integers(0, 256, (40, 60), dtype=np.uint8)
    variants = augment_local(img)
    assert len(variants) == 8
    assert variants[0].shape == (30, 45) and variants[1].shape == (45, 30)
    assert np.array_equal(variants[2], img) and variants[2] is not img
    assert variants[7].shape == (90, 60)


@settings(max_examples=20, deadline=None)
@given(st.lists(st.sampled_from([0.5, 0.75, 1.0, 2.0]), min_size=1, max_size=4),
       st.lists(st.sampled_from([90, 180, 270]), max_size=3))
def test_augment_local_count_rule(scales, rotations):
    spec = AugmentSpec(scales=tuple(scales), patch_rotations=tuple(rotations))
    img = np.zeros((8, 12), dtype=np.uint8)
    assert len(augment_local(img, spec)) == len(scales) * (1 + len(rotations))


def test_augment_global():
    img = np.random.default_rng(2).integers(0, 256, (70, 50), dtype=np.uint8)
    variants = augment_global(img, AugmentSpec(global_size=32))
    assert len(variants) == 6
    base = variants[0]
    assert base.shape == (32, 32)
    assert np.array_equal(variants[1], base[:, ::-1])
    assert np.array_equal(variants[2], base[::-1])
    assert np.array_equal(variants[4], np.rot90(base, 2))


def test_augment_spec_validation():
    with pytest.raises(DomainError):
        AugmentSpec(scales=(0,))
    with pytest.raises(DomainError):
        AugmentSpec(patch_rotations=(30,))
    with pytest.raises(DomainError):
        AugmentSpec(global_ops=("shear",))


def test_fuse_truth_tables():
    a = np.array([[True, True, False, False]])
    b = np.array([[True, False, True, False]])
    assert fuse(a, b).tolist() == [[True, False, False, False]]
    assert fuse(a, b, "or").tolist() == [[True, True, True, False]]
    with pytest.raises(ShapeError):
        fuse(a, b[:, :3])
    with pytest.raises(DomainError):
        fuse(a, b, "xor")


@settings(max_examples=40, deadline=None)
@given(arrays(bool, (6, 7)), arrays(bool, (6, 7)))
def test_fuse_and_is_intersection(a, b):
    assert np.array_equal(fuse(a, b), a & b)
    assert np.array_equal(fuse(a, b), fuse(b, a))


@settings(max_examples=40, deadline=None)
@given(arrays(bool, (4, 5)), arrays(bool, (4, 5)), arrays(bool, (4, 5)),
       st.sampled_from(["and", "or"]))
def test_fuse_algebra(a, b, c, mode):
    assert np.array_equal(fuse(fuse(a, b, mode), c, mode), fuse(a, fuse(b, c, mode), mode))
    full, empty = np.ones_like(a), np.zeros_like(a)
    if mode == "and":
        assert np.array_equal(fuse(a, full), a) and not fuse(a, empty).any()
    else:
        assert np.array_equal(fuse(a, empty, "or"), a) and fuse(a, full, "or").all()
