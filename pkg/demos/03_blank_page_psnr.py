"""
Why PSNR alone misleads on sparse pages
=======================================

When text covers a few percent of the page, predicting no text at all
already scores a respectable PSNR while its F-measure is zero.
"""

import numpy as np

from docbin.metrics import evaluate
from docbin.synthetic import text_mask

rng = np.random.default_rng(0)
gt = text_mask(256, 256, rng)
gt[160:] = False  # keep the page sparse
print(f"foreground fraction: {gt.mean():.3f}")

candidates = {
    "all background": np.zeros_like(gt),
    "random 50%": rng.random(gt.shape) < 0.5,
    "gt with 2% flipped": gt ^ (rng.random(gt.shape) < 0.02),
}
for name, mask in candidates.items():
    r = evaluate(mask, gt)
    print(f"{name:20s} FM {r.fm:6.2f}  PSNR {r.psnr:6.2f} dB")
