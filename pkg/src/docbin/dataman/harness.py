"""Experiment harnesses over a dataset manifest.

- :func:`evaluate_pairs` scores a binarizer on every test entry;
- :func:`resize_compare` measures how well each 2x reduction method keeps
  the page binarizable (mean PSNR after global Otsu binarization);
- :func:`pipeline_run` runs the patch-local / resized-global two-branch
  pipeline and scores the fused masks.

All three are deterministic for a given manifest and configuration,
whatever the worker count.
"""
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..codec import read_image, read_mask, write_image
from ..errors import DocbinError, DomainError, ExternalBinarizerError
from ..metrics import PSNR_CAP, PSNR_PEAKS, evaluate, psnr
from ..patchwork import GLOBAL_SIZE, PATCH_SIZE, fuse, merge_patches, split_patches
from ..raster import ensure_gray, mask_to_raster, raster_to_mask
from ..resample import resize
from ..threshold import otsu
from ..wavelet import ll_downscale
from .binarizers import Job, resolve_binarizer
from .report import ErrorRow, EvalReport

RESIZE_METHODS = ("bicubic", "bilinear", "area", "nearest", "lanczos", "dwt-raw", "dwt-norm")
METHOD_LABELS = {
    "bicubic": "Bicubic", "bilinear": "Bilinear", "area": "Area", "nearest": "Nearest",
    "lanczos": "Lanczos", "dwt-raw": "DWT", "dwt-norm": "DWT&Norm",
}


def _map(fn, items, threads):
    if threads <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _load_pair(entry):
    return read_image(entry.input_path), read_mask(entry.gt_path)


def _error_row(name, exc):
    kind = "external" if isinstance(exc, ExternalBinarizerError) else "data"
    return ErrorRow(name, str(exc) or type(exc).__name__, kind)


def _score(name, out, gt, psnr_mode, psnr_cap):
    if isinstance(out, Exception):
        return _error_row(name, out)
    if out.shape != gt.shape:
        return ErrorRow(name, f"output shape {out.shape} differs from ground truth {gt.shape}")
    return evaluate(out, gt, image=name, psnr_mode=psnr_mode, psnr_cap=psnr_cap)


def _try_load(entry):
    try:
        return _load_pair(entry)
    except (DocbinError, OSError) as exc:
        return exc


def evaluate_pairs(manifest, binarizer="otsu", psnr_mode="dibco", psnr_cap=PSNR_CAP,
                   threads=1, seed=42, split="test", **binarizer_params):
    """Binarize and score every entry of `split` (``None`` for all entries).

    Failures, either unreadable data or a failing external binarizer, become
    error rows; the remaining entries are still scored.
    """
    if psnr_mode not in PSNR_PEAKS:
        raise DomainError(f"unknown psnr mode {psnr_mode!r}")
    binarizer = resolve_binarizer(binarizer, **binarizer_params)
    entries = manifest.select(split)
    loaded = _map(_try_load, entries, threads)
    jobs, job_index = [], []
    for i, (entry, data) in enumerate(zip(entries, loaded)):
        if not isinstance(data, Exception):
            jobs.append(Job(entry.name, data[0], data[1]))
            job_index.append(i)
    outputs = dict(zip(job_index, binarizer.run(jobs, threads=threads)))

    def score(i):
        entry, data = entries[i], loaded[i]
        if isinstance(data, Exception):
            return _error_row(entry.name, data)
        return _score(entry.name, outputs[i], data[1], psnr_mode, psnr_cap)

    results = _map(score, list(range(len(entries))), threads)
    config = {
        "manifest": manifest.name,
        "binarizer": binarizer.describe(),
        "psnr_mode": psnr_mode,
        "psnr_cap": psnr_cap,
        "split": split,
        "seed": seed,
    }
    return EvalReport(results, config)


# -- reduction comparison --------------------------------------------------------


def reduce_half(img, method):
    """Halve a raster (ceil division) with one of :data:`RESIZE_METHODS`."""
    if method == "dwt-raw":
        return ll_downscale(img, "raw")
    if method == "dwt-norm":
        return ll_downscale(img, "normalized")
    if method not in RESIZE_METHODS:
        raise DomainError(f"unknown reduction method {method!r}")
    h, w = img.shape
    return resize(img, (w + 1) // 2, (h + 1) // 2, method)


def _reduce_mask(mask):
    h, w = mask.shape
    return raster_to_mask(resize(mask_to_raster(mask), (w + 1) // 2, (h + 1) // 2, "nearest"))


def reduced_binarization(gray, gt, method, patch_size=PATCH_SIZE):
    """Reduce, Otsu-binarize and return ``(output mask, reduced ground truth)``.

    With `patch_size` the page is tiled first and every tile is reduced and
    binarized on its own, then the half-size tiles are reassembled.
    """
    if patch_size is None:
        return otsu(reduce_half(gray, method)), _reduce_mask(gt)
    if patch_size % 2:
        raise DomainError("patch_size must be even for 2x reduction")
    grid = split_patches(gray, patch_size)
    gt_grid = split_patches(gt, patch_size)
    half = patch_size // 2
    h, w = gray.shape

    def reassemble(patches):
        g = split_patches(np.zeros(((h + 1) // 2, (w + 1) // 2), dtype=patches[0].dtype), half)
        g.patches = patches
        return merge_patches(g)

    out = reassemble([otsu(reduce_half(p, method)) for p in grid.patches])
    ref = reassemble([_reduce_mask(p) for p in gt_grid.patches])
    return out, ref


@dataclass
class ResizeTable:
    """Mean PSNR per reduction method and source dataset.

    ``mean_values`` averages the per-dataset means, giving each dataset equal
    weight.
    """

    methods: list
    datasets: list
    values: dict
    mean_values: dict
    per_image: list = field(default_factory=list)
    config: dict = field(default_factory=dict)

    def to_dict(self):
        return {"config": self.config, "methods": self.methods, "datasets": self.datasets,
                "values": self.values, "mean_values": self.mean_values,
                "per_image": self.per_image}

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def to_csv(self):
        lines = [",".join(["method", *self.datasets, "mean"])]
        for m in self.methods:
            cells = [f"{self.values[m][d]:.3f}" for d in self.datasets]
            lines.append(",".join([METHOD_LABELS.get(m, m), *cells, f"{self.mean_values[m]:.3f}"]))
        return "\n".join(lines) + "\n"

    def to_text(self):
        head = ["Method", *self.datasets, "Mean Values"]
        body = [[METHOD_LABELS.get(m, m), *(f"{self.values[m][d]:.3f}" for d in self.datasets),
                 f"{self.mean_values[m]:.3f}"] for m in self.methods]
        widths = [max(len(r[i]) for r in [head, *body]) for i in range(len(head))]
        fmt = lambda r: "  ".join(c.ljust(widths[0]) if i == 0 else c.rjust(widths[i])
                                  for i, c in enumerate(r))
        return "\n".join([fmt(head), *(fmt(r) for r in body)]) + "\n"


def resize_compare(manifest, methods=RESIZE_METHODS, patch_size=PATCH_SIZE,
                   psnr_mode="table2", psnr_cap=PSNR_CAP, split=None, threads=1):
    """Compare 2x reduction methods by PSNR after global binarization.

    Each page (or each `patch_size` tile of it) is reduced by the method and
    Otsu-binarized; the ground truth is reduced with nearest neighbour so
    it stays binary. PSNR uses the chosen convention (peak 255 by
    default) with identical masks scored at `psnr_cap`.
    """
    methods = list(methods)
    for m in methods:
        if m not in RESIZE_METHODS:
            raise DomainError(f"unknown reduction method {m!r}")
    peak = PSNR_PEAKS[psnr_mode]
    entries = manifest.select(split)
    if not entries:
        raise DomainError("no entries to compare")

    def per_entry(entry):
        img, gt = _load_pair(entry)
        gray = ensure_gray(img)
        row = {"image": entry.name, "source": entry.source}
        for m in methods:
            out, ref = reduced_binarization(gray, gt, m, patch_size)
            value = psnr(out, ref, peak)
            row[m] = psnr_cap if math.isinf(value) else value
        return row

    rows = _map(per_entry, entries, threads)
    datasets = list(dict.fromkeys(r["source"] for r in rows))
    values = {m: {} for m in methods}
    for d in datasets:
        sel = [r for r in rows if r["source"] == d]
        for m in methods:
            values[m][d] = math.fsum(r[m] for r in sel) / len(sel)
    mean_values = {m: math.fsum(values[m].values()) / len(datasets) for m in methods}
    config = {"manifest": manifest.name, "patch_size": patch_size, "psnr_mode": psnr_mode,
              "psnr_cap": psnr_cap, "gt_reduction": "nearest", "binarization": "otsu"}
    return ResizeTable(methods, datasets, values, mean_values, rows, config)


# -- two-branch pipeline ------------------------------------------------------------


def _flatten(name):
    return name.replace("/", "__")


def pipeline_run(manifest, local_binarizer="otsu", global_binarizer="otsu", out_dir=None,
                 dwt=None, patch_size=PATCH_SIZE, global_size=GLOBAL_SIZE, fusion="and",
                 psnr_mode="dibco", psnr_cap=PSNR_CAP, split="test", threads=1, seed=42):
    """Run the local/global binarization pipeline and score the fused masks.

    Per page: the gray image is tiled into `patch_size` patches, optionally
    reduced by ``ll_downscale(mode=dwt)``, binarized patch by patch and
    reassembled (reduced patch masks are upscaled with nearest neighbour).
    Separately the page is resized to ``global_size`` squared (bilinear),
    binarized, and resized back with nearest neighbour. The two masks are
    fused and scored. Masks are written to `out_dir` as
    ``<entry name>.png`` together with ``report.json`` and ``report.csv``.
    """
    local_b = resolve_binarizer(local_binarizer)
    global_b = resolve_binarizer(global_binarizer)
    if dwt not in (None, "normalized", "raw"):
        raise DomainError(f"unknown dwt mode {dwt!r}")
    entries = manifest.select(split)

    def prepare(entry):
        try:
            img, gt = _load_pair(entry)
        except (DocbinError, OSError) as exc:
            return exc
        gray = ensure_gray(img)
        grid = split_patches(gray, patch_size)
        gt_grid = split_patches(gt, patch_size)
        local_jobs = []
        for i, (p, g) in enumerate(zip(grid.patches, gt_grid.patches)):
            r, c = grid.position(i)
            if dwt is not None:
                p = ll_downscale(p, dwt)
                g = _reduce_mask(g)
            local_jobs.append(Job(f"{_flatten(entry.name)}__r{r:03d}c{c:03d}", p, g))
        g512 = resize(gray, global_size, global_size, "bilinear")
        gt512 = raster_to_mask(resize(mask_to_raster(gt), global_size, global_size, "nearest"))
        return grid, gt, local_jobs, Job(_flatten(entry.name), g512, gt512)

    prepared = _map(prepare, entries, threads)
    ok = [i for i, p in enumerate(prepared) if not isinstance(p, Exception)]
    # external binarizers see one directory batch per branch
    local_jobs = [j for i in ok for j in prepared[i][2]]
    local_out = local_b.run(local_jobs, threads=threads)
    global_out = global_b.run([prepared[i][3] for i in ok], threads=threads)

    per_entry_local, pos = {}, 0
    for i in ok:
        n = len(prepared[i][2])
        per_entry_local[i] = local_out[pos:pos + n]
        pos += n
    global_by_entry = dict(zip(ok, global_out))

    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)

    def assemble(i):
        entry, prep = entries[i], prepared[i]
        if isinstance(prep, Exception):
            return _error_row(entry.name, prep)
        grid, gt, _, _ = prep
        masks = per_entry_local[i]
        failed = next((m for m in masks if isinstance(m, Exception)), None)
        if failed is None and isinstance(global_by_entry[i], Exception):
            failed = global_by_entry[i]
        if failed is not None:
            return _error_row(entry.name, failed)
        if dwt is not None:
            masks = [raster_to_mask(resize(mask_to_raster(m), patch_size, patch_size, "nearest"))
                     for m in masks]
        grid = split_patches(np.zeros((grid.source_height, grid.source_width), dtype=bool),
                             patch_size)
        grid.patches = list(masks)
        local_mask = merge_patches(grid)
        h, w = local_mask.shape
        global_mask = raster_to_mask(
            resize(mask_to_raster(global_by_entry[i]), w, h, "nearest"))
        fused = fuse(local_mask, global_mask, fusion)
        if out_dir is not None:
            path = os.path.join(out_dir, entry.name + ".png")
            os.makedirs(os.path.dirname(path), exist_ok=True)
            write_image(path, fused)
        return _score(entry.name, fused, gt, psnr_mode, psnr_cap)

    results = _map(assemble, list(range(len(entries))), threads)
    config = {
        "manifest": manifest.name,
        "local_binarizer": local_b.describe(),
        "global_binarizer": global_b.describe(),
        "dwt": dwt,
        "patch_size": patch_size,
        "global_size": global_size,
        "fusion": fusion,
        "psnr_mode": psnr_mode,
        "psnr_cap": psnr_cap,
        "split": split,
        "seed": seed,
    }
    report = EvalReport(results, config)
    if out_dir is not None:
        report.write(os.path.join(out_dir, "report.csv"), os.path.join(out_dir, "report.json"))
    return report
