"""
Comparing 2x reduction methods
==============================

Each page of the fixture corpus is tiled into 256x256 patches, every patch
is halved by one method and Otsu-binarized, and the reassembled mask is
scored against a nearest-neighbour reduced ground truth.

Point ``--manifest`` of ``docbin resize-compare`` at a DIBCO-layout
directory to run the same table on real data.
"""

import os

from docbin.dataman import resize_compare, scan_manifest

here = os.path.dirname(os.path.abspath(__file__))
corpus = os.path.join(here, "..", "tests", "data", "minicorpus")

table = resize_compare(scan_manifest(corpus))
print(table.to_text())
