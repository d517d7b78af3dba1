import filecmp
import json
import os

import numpy as np
import pytest

from docbin.bench import bench_kernels, results_to_json, stage1_preprocess
from docbin.errors import DomainError
from docbin.synthetic import make_document, write_corpus


def test_make_document_deterministic():
    a, ga = make_document(64, 80, seed=7)
    b, gb = make_document(64, 80, seed=7)
    assert np.array_equal(a, b) and np.array_equal(ga, gb)
    assert a.shape == (64, 80, 3) and a.dtype == np.uint8 and ga.dtype == bool
    assert 0.01 < ga.mean() < 0.4


def test_shipped_minicorpus_is_reproducible(tmp_path, minicorpus):
    write_corpus(str(tmp_path))
    for source in ("synth-a", "synth-b"):
        names = sorted(os.listdir(os.path.join(minicorpus, source)))
        assert names == sorted(os.listdir(tmp_path / source))
        match, mismatch, errors = filecmp.cmpfiles(
            os.path.join(minicorpus, source), str(tmp_path / source), names, shallow=False)
        assert not mismatch and not errors


def test_bench_small():
    results = bench_kernels(dims=256, reps=5, warmup=0,
                            kernels=["ll_downscale", "resize_bicubic", "stage1_preprocess"])
    assert [r.kernel for r in results] == ["ll_downscale", "resize_bicubic", "stage1_preprocess"]
    assert all(r.median_ns > 0 and r.throughput > 0 and r.reps == 5 for r in results)
    d = json.loads(results_to_json(results, {"dims": 256}))
    assert d["config"] == {"dims": 256} and d["results"][0]["input_dims"] == [256, 256]


def test_bench_validation():
    with pytest.raises(DomainError):
        bench_kernels(dims=100)
    with pytest.raises(DomainError):
        bench_kernels(dims=256, reps=3)
    with pytest.raises(DomainError):
        bench_kernels(dims=256, reps=5, kernels=["fft"])


def test_stage1_thread_invariant():
    rgb, _ = make_document(300, 260, seed=1)
    a = stage1_preprocess(rgb, 128, threads=1)
    b = stage1_preprocess(rgb, 128, threads=3)
    assert len(a) == 4 * 9 and all(np.array_equal(x, y) for x, y in zip(a, b))


def test_bench_time_grows_with_area():
    small, = bench_kernels(256, reps=5, kernels=["ll_downscale"])
    large, = bench_kernels(512, reps=5, kernels=["ll_downscale"])
    # 4x the pixels should not run faster than half the small-input time
    assert large.median_ns >= small.median_ns / 2
