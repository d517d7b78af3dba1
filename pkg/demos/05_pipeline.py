"""
The local/global pipeline with a plug-in binarizer
==================================================

Pages are cut into patches for the local branch and squashed to 512x512
for the global branch; the two masks are fused. Any command following the
``--input-dir/--output-dir`` contract can stand in for a trained model;
here Python itself plays that role.
"""

import os
import sys
import tempfile

from docbin.dataman import evaluate_pairs, pipeline_run, scan_manifest

here = os.path.dirname(os.path.abspath(__file__))
manifest = scan_manifest(os.path.join(here, "..", "tests", "data", "minicorpus"))

script = """
import argparse, os
import numpy as np
from PIL import Image
ap = argparse.ArgumentParser()
ap.add_argument("--input-dir"); ap.add_argument("--output-dir")
a = ap.parse_args()
for name in os.listdir(a.input_dir):
    img = np.asarray(Image.open(os.path.join(a.input_dir, name)).convert("L"))
    Image.fromarray(np.where(img < img.mean() - 20, 0, 255).astype(np.uint8)).save(
        os.path.join(a.output_dir, name))
"""

with tempfile.TemporaryDirectory() as tmp:
    path = os.path.join(tmp, "mean_threshold.py")
    with open(path, "w") as fh:
        fh.write(script)
    external = f"cmd:{sys.executable} {path}"

    plain = evaluate_pairs(manifest, "otsu")
    print("otsu on whole pages  Avg", round(plain.aggregate["avg"], 2))

    for local, dwt in [("otsu", None), ("otsu", "normalized"), (external, "normalized")]:
        report = pipeline_run(manifest, local, "otsu", os.path.join(tmp, "out"), dwt=dwt)
        label = "external" if local.startswith("cmd:") else local
        print(f"pipeline local={label:8s} dwt={str(dwt):10s} Avg",
              round(report.aggregate["avg"], 2))
