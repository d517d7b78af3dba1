"""
Global and local thresholds on a stained page
=============================================

Otsu picks one threshold for the page; Niblack and Sauvola adapt it to a
local window. Scores are DIBCO-style FM and PSNR against the exact mask.
"""

from docbin.metrics import evaluate
from docbin.raster import to_gray
from docbin.synthetic import make_document
from docbin.threshold import binarize, histogram, otsu_threshold

rgb, gt = make_document(320, 384, seed=11)
gray = to_gray(rgb)
print("Otsu threshold:", otsu_threshold(histogram(gray)))

for method, params in [("otsu", {}), ("niblack", {"window": 25}),
                       ("sauvola", {"window": 25, "k": 0.2})]:
    r = evaluate(binarize(gray, method, **params), gt, image=method)
    print(f"{method:8s} FM {r.fm:6.2f}  p-FM {r.pfm:6.2f}  PSNR {r.psnr:5.2f}  "
          f"DRD {r.drd:6.2f}  Avg {r.avg:6.2f}")
