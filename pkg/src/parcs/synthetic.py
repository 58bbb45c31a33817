"""Deterministic synthetic inputs for experiments and tests.

Natural photographs are not shipped with the repository, so the harness
fabricates piecewise-smooth stand-ins: smooth blob scenes whose DCT spectra
concentrate in low-index layers (like photographs do), spectra drawn
directly from the layer-occupancy model, and slow-motion frame sequences.
"""

from __future__ import annotations

import numpy as np

from . import _rng
from .codec import idct2
from .core import Signal2D
from .layermodel import LayerModelParams, sample_support

__all__ = ["smooth_image", "layer_model_image", "smooth_video"]


def _blob_scene(rows: int, cols: int, gen: np.random.Generator,
                blobs: int, drift: float = 0.0) -> np.ndarray:
    """Sum of anisotropic Gaussian bumps over a sloped background."""
    yy, xx = np.mgrid[0:rows, 0:cols].astype(np.float64)
    u = _rng.uniform_open01(gen, (blobs, 6))
    img = 0.4 * (xx / cols) + 0.25 * (yy / rows)
    for cy, cx, sy, sx, amp, sign in u:
        cy = (cy + drift) * rows
        cx = (cx + drift * 0.6) * cols
        sy = (0.04 + 0.2 * sy) * rows
        sx = (0.04 + 0.2 * sx) * cols
        bump = np.exp(-(((yy - cy) / sy) ** 2 + ((xx - cx) / sx) ** 2))
        img += (1.0 if sign > 0.5 else -1.0) * (0.3 + amp) * bump
    return img


def smooth_image(rows: int, cols: int, seed: int, blobs: int = 12) -> np.ndarray:
    """Photo-like piecewise-smooth test image, uint8, full [0, 255] range."""
    gen = _rng.generator(_rng.derive_key(seed, 0))
    img = _blob_scene(rows, cols, gen, blobs)
    img -= img.min()
    img *= 255.0 / img.max()
    return np.rint(img).astype(np.uint8)


def layer_model_image(params: LayerModelParams, seed: int) -> Signal2D:
    """Image whose DCT spectrum is supported per the layer-occupancy model.

    A support is drawn from ``params``; on-support coefficients get random
    signs and magnitudes that shrink with the layer index, mimicking the
    energy decay of photographic spectra. Pixels are mapped affinely onto
    [0, 255], which only shifts the spectrum's DC coefficient (already
    on-support for models with r0 = 0).
    """
    rows, cols = params.shape
    mask = sample_support(params, _rng.derive_key(seed, 1)).to_mask()
    gen = _rng.generator(_rng.derive_key(seed, 2))
    layers = np.add.outer(np.arange(rows), np.arange(cols)) + 1.0
    magnitude = (0.5 + _rng.uniform_open01(gen, (rows, cols))) * np.exp(-0.08 * (layers - 1.0))
    signs = np.where(_rng.uniform_open01(gen, (rows, cols)) < 0.5, -1.0, 1.0)
    spectrum = np.where(mask, magnitude * signs, 0.0)
    spectrum[0, 0] = np.abs(spectrum[0, 0]) + 1.0  # keep the scene mean dominant
    pixels = idct2(Signal2D(spectrum)).entries
    pixels = pixels - pixels.min()
    pixels *= 255.0 / pixels.max()
    return Signal2D(np.clip(pixels, 0.0, 255.0))


def smooth_video(frames: int, rows: int = 144, cols: int = 176, seed: int = 0,
                 motion: float = 0.0) -> list[np.ndarray]:
    """Sequence of smooth frames; ``motion`` drifts the scene per frame.

    With motion = 0 every frame is identical (a static scene).
    """
    out = []
    for t in range(frames):
        gen = _rng.generator(_rng.derive_key(seed, 3))  # same scene every frame
        img = _blob_scene(rows, cols, gen, blobs=10, drift=motion * t)
        img -= img.min()
        img *= 255.0 / img.max()
        out.append(np.rint(img).astype(np.uint8))
    return out
