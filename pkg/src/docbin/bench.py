"""Throughput benchmarks for the preprocessing kernels.

Every kernel runs on the same seeded synthetic page. Timings are wall-clock
medians over the measured repetitions; warm-up runs are discarded.
"""
import json
import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

from .errors import DomainError
from .patchwork import merge_patches, split_patches
from .raster import split_channels, to_gray
from .resample import KERNELS, resize
from .synthetic import make_document
from .threshold import otsu
from .wavelet import ll_downscale


@dataclass(frozen=True)
class BenchResult:
    kernel: str
    input_dims: tuple
    reps: int
    median_ns: int
    throughput: float  # input megapixels per second


def _time(fn, reps, warmup):
    for _ in range(warmup):
        fn()
    samples = []
    for _ in range(reps):
        t0 = time.perf_counter_ns()
        fn()
        samples.append(time.perf_counter_ns() - t0)
    return int(statistics.median(samples))


def bench_input(dims, seed=42):
    """The seeded RGB page and its gray plane used by :func:`bench_kernels`."""
    rgb, _ = make_document(dims, dims, seed=seed)
    return rgb, to_gray(rgb)


def stage1_preprocess(rgb, patch_size=256, threads=1):
    """Channel split, patch tiling and LL reduction of every patch.

    Returns the reduced patches for the red, green, blue and gray planes.
    """
    planes = split_channels(rgb)
    patches = [p for plane in planes for p in split_patches(plane, patch_size).patches]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(ll_downscale, patches))
    return [ll_downscale(p) for p in patches]


def bench_kernels(dims=2048, reps=9, seed=42, warmup=1, threads=1, kernels=None):
    """Time each preprocessing kernel on a ``dims x dims`` page.

    `threads` only affects the channel-split preprocess, whose patches can be
    reduced in parallel; every other kernel is single-threaded.
    """
    if dims < 256:
        raise DomainError("dims must be >= 256")
    if reps < 5:
        raise DomainError("reps must be >= 5")
    rgb, gray = bench_input(dims, seed)
    half = dims // 2
    cases = {"ll_downscale": lambda: ll_downscale(gray, "normalized")}
    for k in KERNELS:
        cases[f"resize_{k}"] = lambda k=k: resize(gray, half, half, k)
    cases["otsu_apply"] = lambda: otsu(gray)
    cases["split_merge"] = lambda: merge_patches(split_patches(gray, 256))
    cases["stage1_preprocess"] = lambda: stage1_preprocess(rgb, 256, threads)
    if kernels is not None:
        unknown = set(kernels) - set(cases)
        if unknown:
            raise DomainError(f"unknown kernels {sorted(unknown)}")
        cases = {k: v for k, v in cases.items() if k in kernels}
    results = []
    for name, fn in cases.items():
        ns = _time(fn, reps, warmup)
        mpix = dims * dims / 1e6
        results.append(BenchResult(name, (dims, dims), reps, ns, mpix / (ns / 1e9)))
    return results


def results_to_json(results, config=None):
    rows = [dict(asdict(r), input_dims=list(r.input_dims)) for r in results]
    return json.dumps({"config": config or {}, "results": rows}, indent=2) + "\n"
