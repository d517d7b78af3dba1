"""
Halving a page with the Haar LL subband
=======================================

The LL subband of a one-level Haar transform is twice the 2x2 block mean.
Kept as-is it saturates on light pages; stretched back to [0, 255] it
stays usable for binarization.
"""

import numpy as np

from docbin.raster import to_gray
from docbin.synthetic import make_document
from docbin.wavelet import haar_forward, haar_inverse, ll_downscale

rgb, gt = make_document(320, 384, seed=3)
gray = to_gray(rgb)

# the transform is exactly invertible
bands = haar_forward(gray)
print("subband shape:", bands.shape)
print("round trip exact:", np.array_equal(haar_inverse(bands), gray))

# raw LL clips every block brighter than 127.5
raw = ll_downscale(gray, "raw")
norm = ll_downscale(gray, "normalized")
print(f"raw LL: {np.mean(raw == 255):.1%} of pixels saturated at 255")
print(f"normalized LL: range {norm.min()}..{norm.max()}, "
      f"{np.mean(norm == 255):.1%} at 255")
