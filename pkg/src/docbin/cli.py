"""Command line interface: ``docbin <subcommand> ...``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 external binarizer
failure.
"""
import argparse
import json
import logging
import os
import sys

from . import __version__
from .bench import bench_kernels, results_to_json
from .codec import read_image, read_mask, write_image
from .dataman import (EXIT_DATA, EXIT_EXTERNAL, EXIT_OK, EXIT_USAGE, RESIZE_METHODS,
                      evaluate_pairs, load_manifest, pipeline_run, resize_compare, scan_manifest)
from .errors import DocbinError, ExternalBinarizerError
from .losses import selftest
from .patchwork import AugmentSpec, PatchGrid, augment_global, augment_local, fuse, merge_patches, split_patches
from .raster import ensure_gray
from .resample import KERNELS, ResizeKernel, resize
from .threshold import binarize
from .wavelet import ll_downscale

log = logging.getLogger("docbin")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _common(p, suppress):
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--seed", type=int, default=d(42), help="random seed (default 42)")
    p.add_argument("--threads", type=int, default=d(os.cpu_count() or 1),
                   help="worker threads (default: all cores)")
    p.add_argument("--verbose", "-v", action="store_true", default=d(False))


def _local_params(p):
    p.add_argument("--window", type=int, default=None)
    p.add_argument("--k", type=float, default=None)
    p.add_argument("--R", dest="R", type=float, default=None)


def _manifest_args(p):
    p.add_argument("--manifest", required=True,
                   help="manifest JSON file, or a dataset directory to scan")
    p.add_argument("--layout", choices=("dibco", "flat-pairs"), default="dibco")


def build_parser():
    parser = _Parser(prog="docbin", description="Document binarization toolkit.")
    parser.add_argument("--version", action="version", version=f"docbin {__version__}")
    _common(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    def cmd(name, helptext):
        p = sub.add_parser(name, help=helptext, description=helptext)
        _common(p, suppress=True)
        return p

    p = cmd("dwt-downscale", "halve an image by keeping its Haar LL subband")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--mode", choices=("normalized", "raw"), default="normalized")

    p = cmd("resize", "resize a grayscale image")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--width", type=int, required=True)
    p.add_argument("--height", type=int, required=True)
    p.add_argument("--kernel", choices=KERNELS, default="bilinear")
    p.add_argument("--bicubic-a", type=float, default=-0.75)
    p.add_argument("--lanczos-taps", type=int, default=4)

    p = cmd("binarize", "binarize an image with a classical method")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--method", choices=("otsu", "niblack", "sauvola"), default="otsu")
    _local_params(p)

    p = cmd("split", "tile an image into square patches")
    p.add_argument("input")
    p.add_argument("output_dir")
    p.add_argument("--patch-size", type=int, default=256)

    p = cmd("merge", "reassemble patches written by 'split'")
    p.add_argument("grid_dir")
    p.add_argument("output")

    p = cmd("augment", "write training augmentation variants")
    p.add_argument("input")
    p.add_argument("output_dir")
    p.add_argument("--mode", choices=("local", "global"), required=True)
    p.add_argument("--scales", type=float, nargs="+", default=[0.75, 1.0, 1.25, 1.5])
    p.add_argument("--rotations", type=int, nargs="*", default=[270])
    p.add_argument("--global-size", type=int, default=512)

    p = cmd("fuse", "combine local and global masks")
    p.add_argument("local")
    p.add_argument("global_", metavar="global")
    p.add_argument("output")
    p.add_argument("--mode", choices=("and", "or"), default="and")

    p = cmd("scan", "pair inputs with ground truth and write a manifest")
    p.add_argument("root")
    p.add_argument("--layout", choices=("dibco", "flat-pairs"), default="dibco")
    p.add_argument("--name", default=None)
    p.add_argument("--out", default=None, help="manifest JSON path (default: stdout)")

    p = cmd("evaluate", "binarize and score every test entry of a manifest")
    _manifest_args(p)
    p.add_argument("--binarizer", default="otsu",
                   help="otsu, niblack, sauvola, gt, all-background or cmd:<command>")
    p.add_argument("--psnr-mode", choices=("dibco", "table2"), default="dibco")
    p.add_argument("--psnr-cap", type=float, default=100.0)
    p.add_argument("--split", choices=("train", "test", "all"), default="test")
    p.add_argument("--csv")
    p.add_argument("--json")
    _local_params(p)

    p = cmd("resize-compare", "compare 2x reduction methods by PSNR after Otsu")
    _manifest_args(p)
    p.add_argument("--methods", nargs="+", choices=RESIZE_METHODS, default=list(RESIZE_METHODS))
    p.add_argument("--patch-size", type=int, default=256, help="0 reduces whole pages")
    p.add_argument("--psnr-mode", choices=("dibco", "table2"), default="table2")
    p.add_argument("--split", choices=("train", "test", "all"), default="all")
    p.add_argument("--csv")
    p.add_argument("--json")

    p = cmd("pipeline-run", "run the local/global binarization pipeline")
    _manifest_args(p)
    p.add_argument("--local", default="otsu")
    p.add_argument("--global", dest="global_", default="otsu")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--dwt", choices=("normalized", "raw"), default=None)
    p.add_argument("--patch-size", type=int, default=256)
    p.add_argument("--global-size", type=int, default=512)
    p.add_argument("--fusion", choices=("and", "or"), default="and")
    p.add_argument("--psnr-mode", choices=("dibco", "table2"), default="dibco")
    p.add_argument("--split", choices=("train", "test", "all"), default="test")

    p = cmd("bench", "time the preprocessing kernels")
    p.add_argument("--dims", type=int, default=2048)
    p.add_argument("--reps", type=int, default=9)
    p.add_argument("--json")
    p.add_argument("--parallel", action="store_true",
                   help="reduce preprocessing patches on --threads workers")

    p = cmd("losses", "loss-kernel utilities")
    lsub = p.add_subparsers(dest="losses_command", metavar="ACTION")
    lp = lsub.add_parser("selftest", help="gradient-check BCE and Soft Dice")
    lp.add_argument("--batches", type=int, default=100)
    lp.add_argument("--tol", type=float, default=1e-5)
    return parser


def _split_arg(s):
    return None if s == "all" else s


def _local_kwargs(args):
    return {k: getattr(args, k) for k in ("window", "k", "R") if getattr(args, k) is not None}


def _summary(report):
    agg = report.aggregate
    if agg:
        print(" ".join(f"{k}={agg[k]:.4f}" for k in ("fm", "pfm", "psnr", "drd", "avg")))
    for e in report.errors:
        print(f"error: {e.image}: {e.error}", file=sys.stderr)


def run(args):
    c = args.command
    if c == "dwt-downscale":
        write_image(args.output, ll_downscale(ensure_gray(read_image(args.input)), args.mode))
    elif c == "resize":
        kernel = ResizeKernel(args.kernel, args.bicubic_a, args.lanczos_taps)
        write_image(args.output,
                    resize(ensure_gray(read_image(args.input)), args.width, args.height, kernel))
    elif c == "binarize":
        gray = ensure_gray(read_image(args.input))
        write_image(args.output, binarize(gray, args.method, **_local_kwargs(args)))
    elif c == "split":
        grid = split_patches(ensure_gray(read_image(args.input)), args.patch_size)
        os.makedirs(args.output_dir, exist_ok=True)
        names = []
        for i, patch in enumerate(grid.patches):
            r, col = grid.position(i)
            names.append(f"patch_r{r:03d}c{col:03d}.png")
            write_image(os.path.join(args.output_dir, names[-1]), patch)
        meta = {"patch_size": grid.patch_size, "cols": grid.cols, "rows": grid.rows,
                "source_width": grid.source_width, "source_height": grid.source_height,
                "patches": names}
        with open(os.path.join(args.output_dir, "grid.json"), "w") as fh:
            fh.write(json.dumps(meta, indent=2) + "\n")
    elif c == "merge":
        with open(os.path.join(args.grid_dir, "grid.json")) as fh:
            meta = json.load(fh)
        patches = [ensure_gray(read_image(os.path.join(args.grid_dir, n)))
                   for n in meta.pop("patches")
                   if os.path.exists(os.path.join(args.grid_dir, n))]
        write_image(args.output, merge_patches(PatchGrid(patches=patches, **meta)))
    elif c == "augment":
        spec = AugmentSpec(scales=tuple(args.scales), patch_rotations=tuple(args.rotations),
                           global_size=args.global_size)
        gray = ensure_gray(read_image(args.input))
        variants = augment_local(gray, spec) if args.mode == "local" else augment_global(gray, spec)
        os.makedirs(args.output_dir, exist_ok=True)
        stem = os.path.splitext(os.path.basename(args.input))[0]
        for i, v in enumerate(variants):
            write_image(os.path.join(args.output_dir, f"{stem}_{args.mode}{i:02d}.png"), v)
    elif c == "fuse":
        write_image(args.output, fuse(read_mask(args.local), read_mask(args.global_), args.mode))
    elif c == "scan":
        m = scan_manifest(args.root, args.layout, name=args.name)
        for w in m.warnings:
            log.warning(w)
        if args.out:
            m.save(args.out)
        else:
            sys.stdout.write(m.to_json())
    elif c == "evaluate":
        m = load_manifest(args.manifest, args.layout)
        report = evaluate_pairs(m, args.binarizer, psnr_mode=args.psnr_mode,
                                psnr_cap=args.psnr_cap, threads=args.threads, seed=args.seed,
                                split=_split_arg(args.split), **_local_kwargs(args))
        log.info("configuration: %s", json.dumps(report.config))
        report.write(args.csv, args.json)
        _summary(report)
        return report.exit_code
    elif c == "resize-compare":
        m = load_manifest(args.manifest, args.layout)
        table = resize_compare(m, args.methods, patch_size=args.patch_size or None,
                               psnr_mode=args.psnr_mode, split=_split_arg(args.split),
                               threads=args.threads)
        log.info("configuration: %s", json.dumps(table.config))
        if args.csv:
            with open(args.csv, "w") as fh:
                fh.write(table.to_csv())
        if args.json:
            with open(args.json, "w") as fh:
                fh.write(table.to_json())
        sys.stdout.write(table.to_text())
    elif c == "pipeline-run":
        m = load_manifest(args.manifest, args.layout)
        report = pipeline_run(m, args.local, args.global_, args.out_dir, dwt=args.dwt,
                              patch_size=args.patch_size, global_size=args.global_size,
                              fusion=args.fusion, psnr_mode=args.psnr_mode,
                              split=_split_arg(args.split), threads=args.threads, seed=args.seed)
        log.info("configuration: %s", json.dumps(report.config))
        _summary(report)
        return report.exit_code
    elif c == "bench":
        threads = args.threads if args.parallel else 1
        results = bench_kernels(args.dims, args.reps, seed=args.seed, threads=threads)
        config = {"dims": args.dims, "reps": args.reps, "seed": args.seed, "threads": threads}
        if args.json:
            with open(args.json, "w") as fh:
                fh.write(results_to_json(results, config))
        for r in results:
            print(f"{r.kernel:<20} {r.median_ns / 1e6:10.3f} ms {r.throughput:10.2f} MP/s")
    elif c == "losses":
        if args.losses_command != "selftest":
            raise UsageError("losses: expected the 'selftest' action")
        res = selftest(batches=args.batches, seed=args.seed, tol=args.tol)
        print(f"bce max rel error       {res['bce']:.3e}")
        print(f"soft_dice max rel error {res['soft_dice']:.3e}")
        print("PASS" if res["passed"] else "FAIL")
        return EXIT_OK if res["passed"] else EXIT_DATA
    return EXIT_OK


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    if args.command is None:
        parser.print_help(sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return run(args)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    except ExternalBinarizerError as exc:
        print(f"docbin: {exc}", file=sys.stderr)
        return EXIT_EXTERNAL
    except (DocbinError, OSError) as exc:
        print(f"docbin: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
