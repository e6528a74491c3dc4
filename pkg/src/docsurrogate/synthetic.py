"""Seeded synthetic degraded documents with exact ground truth.

Handy for demos and for exercising the whole pipeline without DIBCO data.
Each document is a set of pen strokes arranged in text lines, rendered on
uneven paper with stains, faint bleed-through, blur and sensor noise.
"""

from __future__ import annotations

import os

import numpy as np
from scipy import ndimage

from .dataset import ManifestEntry, write_manifest
from .imaging import BinaryImage, GrayImage, save_binary, save_gray

__all__ = ["stroke_mask", "make_document", "make_corpus", "write_corpus"]


def _stamp_path(mask, pts, radius):
    h, w = mask.shape
    yy, xx = np.mgrid[-radius : radius + 1, -radius : radius + 1]
    disk = yy * yy + xx * xx <= radius * radius + 0.5
    for y, x in np.rint(pts).astype(int):
        y0, y1 = max(y - radius, 0), min(y + radius + 1, h)
        x0, x1 = max(x - radius, 0), min(x + radius + 1, w)
        if y0 >= y1 or x0 >= x1:
            continue
        mask[y0:y1, x0:x1] |= disk[y0 - y + radius : y1 - y + radius, x0 - x + radius : x1 - x + radius]


def stroke_mask(rng, height, width, line_gap=None):
    """Boolean ink mask of handwriting-like strokes laid out in lines."""
    mask = np.zeros((height, width), dtype=bool)
    line_gap = line_gap or int(rng.integers(14, 22))
    radius = int(rng.integers(0, 3))
    for base in range(line_gap // 2 + 4, height - 6, line_gap):
        x = float(rng.integers(2, 10))
        while x < width - 8:
            word_len = rng.integers(10, 36)
            end = min(x + word_len, width - 4)
            # one word = a wavy baseline stroke plus a few letter loops
            t = np.linspace(0.0, 1.0, int(4 * (end - x)) + 2)
            xs = x + t * (end - x)
            amp = rng.uniform(1.5, 4.0)
            freq = rng.uniform(0.25, 0.6)
            ys = base + amp * np.sin(freq * (xs - x) + rng.uniform(0, 2 * np.pi))
            _stamp_path(mask, np.column_stack([ys, xs]), radius)
            for _ in range(int(rng.integers(1, 4))):
                cx = rng.uniform(x, end)
                cy = base - rng.uniform(2.0, 6.0)
                rad = rng.uniform(1.5, 3.5)
                a = np.linspace(0, 2 * np.pi, 40)
                _stamp_path(mask, np.column_stack([cy + rad * np.sin(a), cx + rad * np.cos(a)]), radius)
            x = end + rng.uniform(4, 10)
    return mask


def make_document(rng, height=96, width=128):
    """Return ``(degraded GrayImage, ground-truth BinaryImage)``."""
    ink = stroke_mask(rng, height, width)
    yy, xx = np.mgrid[0:height, 0:width] / max(height, width)

    paper = rng.uniform(0.65, 0.95)
    gradient = rng.uniform(-0.25, 0.25) * (xx - 0.5) + rng.uniform(-0.25, 0.25) * (yy - 0.5)
    img = paper + gradient
    for _ in range(int(rng.integers(0, 4))):
        cy, cx = rng.uniform(0, 1, size=2)
        rad = rng.uniform(0.08, 0.35)
        img -= rng.uniform(0.05, 0.35) * np.exp(-((yy - cy) ** 2 + (xx - cx) ** 2) / (2 * rad * rad))

    # bleed-through from a mirrored page
    if rng.random() < 0.6:
        ghost = stroke_mask(rng, height, width)[:, ::-1]
        img -= rng.uniform(0.05, 0.3) * ndimage.gaussian_filter(ghost.astype(float), 1.0)

    ink_level = rng.uniform(0.05, 0.45)
    fade = rng.uniform(0.0, 0.5) * ndimage.gaussian_filter(rng.random((height, width)), 6.0)
    strength = np.clip(1.0 - fade / max(fade.max(), 1e-12) * rng.uniform(0.0, 0.7), 0.0, 1.0)
    img = np.where(ink, img - strength * (img - ink_level), img)

    img = ndimage.gaussian_filter(img, rng.uniform(0.3, 1.3))
    img += rng.normal(0.0, rng.uniform(0.01, 0.1), size=img.shape)
    return GrayImage.from_intensities(np.clip(img, 0.0, 1.0)), BinaryImage(ink)


def make_corpus(n, seed=0, height=96, width=128):
    """List of ``(id, GrayImage, BinaryImage)`` triples, one independent stream per document."""
    return [
        (f"doc{i:03d}", *make_document(np.random.default_rng([seed, i]), height, width))
        for i in range(n)
    ]


def write_corpus(corpus, directory, processed=None):
    """Write PGM originals, PBM ground truths and ``manifest.csv`` into ``directory``.

    ``processed`` optionally maps ids to processed BinaryImages.
    """
    os.makedirs(directory, exist_ok=True)
    entries = []
    for doc_id, gray, gt in corpus:
        orig = f"{doc_id}.pgm"
        gt_name = f"{doc_id}_gt.pbm"
        save_gray(gray, os.path.join(directory, orig))
        save_binary(gt, os.path.join(directory, gt_name))
        proc_name = None
        if processed is not None and doc_id in processed:
            proc_name = f"{doc_id}_bin.pbm"
            save_binary(processed[doc_id], os.path.join(directory, proc_name))
        entries.append(ManifestEntry(doc_id, orig, proc_name, gt_name))
    path = os.path.join(directory, "manifest.csv")
    write_manifest(entries, path)
    return path
