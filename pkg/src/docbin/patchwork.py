"""Patch tiling, training-time augmentation and local/global fusion."""
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ShapeError
from .raster import as_mask, as_raster, mask_to_raster, saturating_add
from .resample import rescale, resize

PATCH_SIZE = 256
GLOBAL_SIZE = 512
GLOBAL_OPS = ("hflip", "vflip", "rot90", "rot180", "rot270")


@dataclass
class PatchGrid:
    """Row-major tiles of an edge-padded image plus what is needed to undo it."""

    patch_size: int
    cols: int
    rows: int
    source_width: int
    source_height: int
    patches: list = field(default_factory=list)

    def __len__(self):
        return len(self.patches)

    def position(self, i):
        """(row, col) of patch `i`."""
        return divmod(i, self.cols)


@dataclass(frozen=True)
class AugmentSpec:
    scales: tuple = (0.75, 1.0, 1.25, 1.5)
    patch_rotations: tuple = (270,)
    global_size: int = GLOBAL_SIZE
    global_ops: tuple = GLOBAL_OPS

    def __post_init__(self):
        if any(s <= 0 for s in self.scales):
            raise DomainError("scales must be positive")
        if any(r % 90 for r in self.patch_rotations):
            raise DomainError("rotations must be multiples of 90 degrees")
        unknown = set(self.global_ops) - set(GLOBAL_OPS)
        if unknown:
            raise DomainError(f"unknown global ops {sorted(unknown)}")


def rotate(img, degrees):
    """Counter-clockwise rotation by a multiple of 90 degrees."""
    if degrees % 90:
        raise DomainError("rotations must be multiples of 90 degrees")
    return np.ascontiguousarray(np.rot90(img, k=(degrees // 90) % 4))


_OPS = {
    "hflip": lambda a: np.ascontiguousarray(a[:, ::-1]),
    "vflip": lambda a: np.ascontiguousarray(a[::-1, :]),
    "rot90": lambda a: rotate(a, 90),
    "rot180": lambda a: rotate(a, 180),
    "rot270": lambda a: rotate(a, 270),
}


def split_patches(img, patch_size=PATCH_SIZE):
    """Tile an image into square patches.

    The image is padded on the bottom and right by edge replication up to a
    multiple of `patch_size`, so there are ``ceil(W / p) * ceil(H / p)``
    patches, ordered row-major. Works for rasters and for boolean masks.
    """
    if patch_size < 1:
        raise DomainError("patch_size must be >= 1")
    arr = np.asarray(img)
    if arr.ndim != 2:
        raise ShapeError(f"expected a 2-D image, got shape {arr.shape}")
    h, w = arr.shape
    rows = -(-h // patch_size)
    cols = -(-w // patch_size)
    padded = np.pad(arr, ((0, rows * patch_size - h), (0, cols * patch_size - w)), mode="edge")
    patches = [
        np.ascontiguousarray(padded[r * patch_size:(r + 1) * patch_size,
                                    c * patch_size:(c + 1) * patch_size])
        for r in range(rows) for c in range(cols)
    ]
    return PatchGrid(patch_size, cols, rows, w, h, patches)


def merge_patches(grid):
    """Reassemble a :class:`PatchGrid` and crop to the recorded source size."""
    p = grid.patch_size
    if len(grid.patches) != grid.rows * grid.cols:
        raise ShapeError(
            f"grid expects {grid.rows * grid.cols} patches, got {len(grid.patches)}")
    if grid.rows != -(-grid.source_height // p) or grid.cols != -(-grid.source_width // p):
        raise ShapeError("grid rows/cols inconsistent with its source dimensions")
    first = np.asarray(grid.patches[0])
    out = np.empty((grid.rows * p, grid.cols * p), dtype=first.dtype)
    for i, patch in enumerate(grid.patches):
        patch = np.asarray(patch)
        if patch.shape != (p, p):
            raise ShapeError(f"patch {i} has shape {patch.shape}, expected {(p, p)}")
        r, c = grid.position(i)
        out[r * p:(r + 1) * p, c * p:(c + 1) * p] = patch
    return np.ascontiguousarray(out[:grid.source_height, :grid.source_width])


def augment_local(img, spec=AugmentSpec()):
    """Scale and rotation variants used to expand the local training set.

    For every scale (bilinear resize) the scaled image is emitted first,
    followed by each configured rotation of it.
    """
    raster = as_raster(img)
    variants = []
    for s in spec.scales:
        scaled = raster.copy() if s == 1 else rescale(raster, s, "bilinear")
        variants.append(scaled)
        variants.extend(rotate(scaled, deg) for deg in spec.patch_rotations)
    return variants


def augment_global(img, spec=AugmentSpec()):
    """The resized image and its flips/rotations for the global branch.

    Yields ``1 + len(spec.global_ops)`` square variants, six by default.
    """
    size = spec.global_size
    base = resize(as_raster(img), size, size, "bilinear")
    return [base] + [_OPS[op](base) for op in spec.global_ops]


def fuse(local, global_, mode="and"):
    """Combine local and global binarization results pixel-wise.

    The default ``"and"`` mode is the saturating sum of the stored encodings
    (foreground 0, background 255): a pixel stays text only where both
    inputs call it text. ``"or"`` keeps text found by either branch.
    """
    local = as_mask(local)
    global_ = as_mask(global_)
    if local.shape != global_.shape:
        raise ShapeError(f"shape mismatch: {local.shape} vs {global_.shape}")
    if mode == "and":
        summed = saturating_add(mask_to_raster(local), mask_to_raster(global_))
        return summed == 0
    if mode == "or":
        return local | global_
    raise DomainError(f"unknown fusion mode {mode!r}")
