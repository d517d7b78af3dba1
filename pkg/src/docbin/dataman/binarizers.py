"""Binarizer references: built-in methods and the external-command contract.

An external binarizer is any command that accepts
``--input-dir A --output-dir B``, reads every image in ``A`` and writes one
mask per input to ``B`` under the same file name, then exits 0. Masks are
read back with dark pixels as foreground. One command invocation handles a
whole batch of images.
"""
import os
import shlex
import subprocess
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..codec import read_mask, write_image
from ..errors import DomainError, ExternalBinarizerError
from ..raster import ensure_gray
from ..threshold import local_threshold, otsu

BUILTIN = ("otsu", "niblack", "sauvola", "gt", "all-background")
ALIASES = {"identity-on-gt": "gt", "identity": "gt", "blank": "all-background"}


@dataclass
class Job:
    """One image to binarize; `gt` is only consulted by the ``gt`` oracle."""

    name: str
    image: np.ndarray
    gt: np.ndarray = None


class Binarizer:
    name = "binarizer"

    def describe(self):
        return self.name

    def run(self, jobs, threads=1):
        """Binarize `jobs`, returning one mask or exception per job, in order."""
        raise NotImplementedError


class BuiltinBinarizer(Binarizer):
    def __init__(self, method, **params):
        method = ALIASES.get(method, method)
        if method not in BUILTIN:
            raise DomainError(f"unknown binarizer {method!r}")
        self.name = method
        self.params = {k: v for k, v in params.items() if v is not None}

    def describe(self):
        if not self.params:
            return self.name
        args = ",".join(f"{k}={self.params[k]}" for k in sorted(self.params))
        return f"{self.name}({args})"

    def binarize(self, image, gt=None):
        if self.name == "gt":
            if gt is None:
                raise DomainError("the gt binarizer needs ground truth")
            return np.array(gt, dtype=bool)
        gray = ensure_gray(image)
        if self.name == "all-background":
            return np.zeros(gray.shape, dtype=bool)
        if self.name == "otsu":
            return otsu(gray)
        return local_threshold(gray, self.name, **self.params)

    def _safe(self, job):
        try:
            return self.binarize(job.image, job.gt)
        except Exception as exc:  # reported per image, the run continues
            return exc

    def run(self, jobs, threads=1):
        if threads <= 1 or len(jobs) < 2:
            return [self._safe(j) for j in jobs]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(self._safe, jobs))


class ExternalBinarizer(Binarizer):
    """Runs an external command once per batch of images."""

    def __init__(self, command, timeout=None):
        self.command = command
        self.argv = shlex.split(command)
        if not self.argv:
            raise DomainError("empty external binarizer command")
        self.timeout = timeout
        self.name = f"cmd:{command}"

    @staticmethod
    def _filename(job):
        return job.name.replace("/", "__") + ".png"

    def run(self, jobs, threads=1):
        if not jobs:
            return []
        with tempfile.TemporaryDirectory(prefix="docbin-") as tmp:
            in_dir = os.path.join(tmp, "input")
            out_dir = os.path.join(tmp, "output")
            os.makedirs(in_dir)
            os.makedirs(out_dir)
            names = [self._filename(j) for j in jobs]
            if len(set(names)) != len(names):
                raise DomainError("job names collide after flattening")
            for fname, job in zip(names, jobs):
                write_image(os.path.join(in_dir, fname), job.image)
            argv = self.argv + ["--input-dir", in_dir, "--output-dir", out_dir]
            try:
                proc = subprocess.run(argv, capture_output=True, text=True, timeout=self.timeout)
            except (OSError, subprocess.TimeoutExpired) as exc:
                err = ExternalBinarizerError(f"cannot run {self.command!r}: {exc}")
                return [err] * len(jobs)
            if proc.returncode != 0:
                tail = proc.stderr.strip().splitlines()[-1:] or [""]
                err = ExternalBinarizerError(
                    f"{self.command!r} exited with status {proc.returncode}: {tail[0]}")
                return [err] * len(jobs)
            results = []
            for fname, job in zip(names, jobs):
                path = os.path.join(out_dir, fname)
                if not os.path.exists(path):
                    results.append(ExternalBinarizerError(f"no output mask {fname}"))
                    continue
                try:
                    mask = read_mask(path)
                except Exception as exc:
                    results.append(ExternalBinarizerError(f"unreadable output {fname}: {exc}"))
                    continue
                if mask.shape != np.asarray(job.image).shape[:2]:
                    results.append(ExternalBinarizerError(
                        f"output {fname} has shape {mask.shape}, "
                        f"expected {np.asarray(job.image).shape[:2]}"))
                    continue
                results.append(mask)
            return results


def resolve_binarizer(ref, **params):
    """Turn a binarizer reference into a :class:`Binarizer`.

    `ref` is a built-in name (``otsu``, ``niblack``, ``sauvola``, ``gt``,
    ``all-background``), ``cmd:<command line>``, or an existing
    :class:`Binarizer`.
    """
    if isinstance(ref, Binarizer):
        return ref
    if ref.startswith("cmd:"):
        return ExternalBinarizer(ref[4:])
    return BuiltinBinarizer(ref, **params)
