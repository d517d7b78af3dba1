"""Seeded synthetic degraded documents with exact ground truth.

Pages have a light, slightly yellowed background with stains and sensor
noise, and faded pseudo-glyph strokes whose ink is often lighter than
mid-gray once averaged with the page around it.
"""
import os

import numpy as np

from .codec import write_image


def _stroke(mask, y0, x0, y1, x1, radius):
    """Set every pixel within `radius` of the segment (y0, x0)-(y1, x1)."""
    h, w = mask.shape
    ya = int(max(0, np.floor(min(y0, y1) - radius)))
    yb = int(min(h, np.ceil(max(y0, y1) + radius) + 1))
    xa = int(max(0, np.floor(min(x0, x1) - radius)))
    xb = int(min(w, np.ceil(max(x0, x1) + radius) + 1))
    if ya >= yb or xa >= xb:
        return
    yy, xx = np.mgrid[ya:yb, xa:xb]
    dy, dx = y1 - y0, x1 - x0
    length2 = dy * dy + dx * dx
    t = 0.0 if length2 == 0 else np.clip(((yy - y0) * dy + (xx - x0) * dx) / length2, 0, 1)
    dist2 = (yy - (y0 + t * dy)) ** 2 + (xx - (x0 + t * dx)) ** 2
    mask[ya:yb, xa:xb] |= dist2 <= radius * radius


def text_mask(height, width, rng, line_height=None, char_width=None):
    """Boolean mask of pseudo-text: lines of random multi-stroke glyphs."""
    mask = np.zeros((height, width), dtype=bool)
    lh = line_height or int(rng.integers(22, 34))
    lh = min(lh, max(6, height // 3))  # small pages still get a few lines
    cw = char_width or int(lh * 0.6)
    margin = max(4, lh // 2)
    y = margin
    while y + lh <= height - margin:
        x = margin
        while x + cw <= width - margin:
            if rng.random() < 0.15:  # word gap
                x += cw
                continue
            radius = float(rng.choice([0.5, 1.0, 1.0, 1.5]))
            for _ in range(int(rng.integers(2, 5))):
                pts = rng.uniform(0, 1, 4) * [lh * 0.7, cw * 0.8, lh * 0.7, cw * 0.8]
                _stroke(mask, y + pts[0], x + pts[1], y + pts[2], x + pts[3], radius)
            x += cw
        y += lh
    return mask


def _box_blur3(a):
    p = np.pad(a, 1, mode="edge")
    h, w = a.shape
    return sum(p[dy:dy + h, dx:dx + w] for dy in range(3) for dx in range(3)) / 9.0


def make_document(height=320, width=384, seed=0):
    """Render one degraded page.

    Returns
    -------
    rgb : ndarray
        ``(height, width, 3)`` uint8 page.
    gt : ndarray
        Boolean text mask.
    """
    rng = np.random.default_rng(seed)
    gt = text_mask(height, width, rng)
    yy, xx = np.mgrid[0:height, 0:width]
    base = rng.uniform(200, 225) + rng.uniform(-10, 10) * (xx / width)
    for _ in range(int(rng.integers(1, 4))):
        cy, cx = rng.uniform(0, height), rng.uniform(0, width)
        sigma = rng.uniform(0.08, 0.25) * min(height, width)
        base = base - rng.uniform(8, 22) * np.exp(-((yy - cy) ** 2 + (xx - cx) ** 2) / (2 * sigma ** 2))
    # ink strength varies smoothly across the page to mimic fading
    fade = 0.35 + 0.45 * np.clip(
        0.5 + 0.5 * np.sin(xx / width * rng.uniform(2, 6) + rng.uniform(0, 6.3)), 0, 1)
    coverage = _box_blur3(gt.astype(np.float64)) * 0.5 + gt * 0.5
    gray = base - coverage * fade * (base - rng.uniform(40, 70))
    gray = gray + rng.normal(0, 5, gray.shape)
    tint = np.array([1.0, 0.97, 0.88])
    rgb = np.clip(np.floor(gray[..., None] * tint + 0.5), 0, 255).astype(np.uint8)
    return rgb, gt


def write_corpus(root, sources=("synth-a", "synth-b"), per_source=3, seed=2024,
                 height=320, width=384):
    """Write a DIBCO-layout corpus: ``<root>/<source>/<name>.png`` plus ``<name>_gt.png``."""
    paths = []
    for si, source in enumerate(sources):
        d = os.path.join(root, source)
        os.makedirs(d, exist_ok=True)
        for i in range(per_source):
            rgb, gt = make_document(height, width, seed=seed + 100 * si + i)
            stem = f"doc{i + 1:02d}"
            write_image(os.path.join(d, stem + ".png"), rgb)
            write_image(os.path.join(d, stem + "_gt.png"), gt)
            paths.append(os.path.join(d, stem + ".png"))
    return paths
