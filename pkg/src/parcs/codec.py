"""Image/video compression through column-parallel compressed sensing.

Reference frames (odd 1-based indices) are coded by measuring the
zigzag-permuted 2D DCT spectrum column by column; non-reference frames
(even indices) are coded as the pixel difference from their preceding
reference frame, measured without any permutation. Decoding reverses each
pipeline and clamps pixels to the 8-bit display range [0, 255] (values stay
float; no re-quantization is applied).

Per-pair measurement budgets come from one average compression ratio and a
reference:non-reference split (default 4:1): for split f,
r_ref = 2*avg*f/(f+1) and r_nonref = 2*avg/(f+1), so the two average to
``avg`` exactly and r_ref = f * r_nonref.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.fft import dctn, idctn

from . import _rng
from .core import Signal2D
from .permute import PermutationMap, identity_permutation, zigzag_permutation
from .recon import ParallelReconstruction, SolverOptions, reconstruct_2d
from .sensing import MeasurementBatch, gaussian_sensing, sample_parallel

__all__ = [
    "Frame",
    "FrameCode",
    "FramePairCode",
    "DecodedFrame",
    "dct2",
    "idct2",
    "allocate_ratios",
    "encode_reference",
    "encode_nonreference",
    "encode_image",
    "decode_reference",
    "decode_nonreference",
    "decode_image",
    "encode_pair",
    "decode_pair",
    "encode_sequence",
    "decode_sequence",
    "psnr",
]

REFERENCE = "reference"
NONREFERENCE = "nonreference"
IMAGE = "image"


@dataclass(frozen=True)
class Frame:
    """One 8-bit luminance plane; odd 1-based indices are reference frames."""

    luminance: Signal2D
    index: int

    def __post_init__(self):
        if self.index < 1:
            raise ValueError("frame indices are 1-based")
        lo = float(self.luminance.entries.min())
        hi = float(self.luminance.entries.max())
        if lo < 0.0 or hi > 255.0:
            raise ValueError(f"luminance must lie in [0, 255], got [{lo}, {hi}]")

    @property
    def kind(self) -> str:
        return REFERENCE if self.index % 2 == 1 else NONREFERENCE

    @classmethod
    def from_array(cls, pixels: np.ndarray, index: int) -> "Frame":
        return cls(Signal2D(np.asarray(pixels, dtype=np.float64)), index)


@dataclass(frozen=True)
class FrameCode:
    """Encoded payload of one frame; exactly what the measurement file holds.

    The sensing matrix itself is never stored: (k, rows, seed) regenerate it.
    """

    rows: int
    cols: int
    k: int
    seed: int
    perm_tag: str
    frame_index: int
    kind: str
    measurements: np.ndarray

    def __post_init__(self):
        arr = np.ascontiguousarray(self.measurements, dtype=np.float64)
        if arr.shape != (self.k, self.cols):
            raise ValueError(f"measurements shape {arr.shape} != ({self.k}, {self.cols})")
        if self.kind not in (REFERENCE, NONREFERENCE, IMAGE):
            raise ValueError(f"unknown frame kind {self.kind!r}")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "measurements", arr)

    @property
    def batch(self) -> MeasurementBatch:
        return MeasurementBatch(self.measurements, self.seed, self.perm_tag)


@dataclass(frozen=True)
class FramePairCode:
    """Codes of a reference frame and its following non-reference frame."""

    ref: FrameCode
    nonref: FrameCode
    ratios: tuple[float, float]

    def __post_init__(self):
        r_ref, r_nonref = self.ratios
        if self.ref.k != _round_half_up(r_ref * self.ref.rows):
            raise ValueError("reference measurement count does not match its ratio")
        if self.nonref.k != _round_half_up(r_nonref * self.nonref.rows):
            raise ValueError("non-reference measurement count does not match its ratio")


@dataclass(frozen=True)
class DecodedFrame:
    """A decoded frame plus the per-column solver outcomes behind it."""

    frame: Frame
    recon: ParallelReconstruction


def dct2(x: Signal2D) -> Signal2D:
    """Orthonormal 2D type-II DCT."""
    return Signal2D(dctn(x.entries, type=2, norm="ortho"))


def idct2(x: Signal2D) -> Signal2D:
    """Exact inverse of :func:`dct2`."""
    return Signal2D(idctn(x.entries, type=2, norm="ortho"))


def allocate_ratios(avg_ratio: float, split: float = 4.0) -> tuple[float, float]:
    """Split an average compression ratio into (reference, non-reference).

    The pair averages to ``avg_ratio`` exactly and keeps the measurement
    split r_ref = split * r_nonref; e.g. avg 0.5 at the default 4:1 split
    gives (0.8, 0.2).
    """
    if avg_ratio <= 0:
        raise ValueError("average ratio must be positive")
    if split <= 0:
        raise ValueError("split must be positive")
    r_ref = 2.0 * avg_ratio * split / (split + 1.0)
    r_nonref = 2.0 * avg_ratio / (split + 1.0)
    if r_ref > 1.0:
        raise ValueError(
            f"reference ratio {r_ref:.4f} exceeds 1; lower the average ratio or the split"
        )
    return r_ref, r_nonref


def _round_half_up(value: float) -> int:
    return int(math.floor(value + 0.5))


def _measurement_count(ratio: float, rows: int) -> int:
    if not 0.0 < ratio <= 1.0:
        raise ValueError(f"compression ratio must lie in (0, 1], got {ratio}")
    return max(1, _round_half_up(ratio * rows))


def _permutation_for_tag(tag: str, rows: int, cols: int) -> PermutationMap:
    if tag == "zigzag":
        return zigzag_permutation(rows, cols)
    if tag == "identity":
        return identity_permutation(rows, cols)
    raise ValueError(f"cannot rebuild permutation for tag {tag!r}")


def _encode_spectrum(pixels: Signal2D, ratio: float, seed: int,
                     permutation: PermutationMap, frame_index: int, kind: str) -> FrameCode:
    k = _measurement_count(ratio, pixels.rows)
    a = gaussian_sensing(k, pixels.rows, seed)
    permuted = permutation.apply(dct2(pixels))
    batch = sample_parallel(a, permuted, perm_tag=permutation.tag)
    return FrameCode(pixels.rows, pixels.cols, k, _rng.check_seed(seed),
                     permutation.tag, frame_index, kind, batch.columns)


def encode_reference(f: Frame, ratio: float, seed: int) -> FrameCode:
    """DCT spectrum -> zigzag permutation -> column-parallel measurement."""
    if f.kind != REFERENCE:
        raise ValueError(f"frame {f.index} is not a reference frame")
    zz = zigzag_permutation(f.luminance.rows, f.luminance.cols)
    return _encode_spectrum(f.luminance, ratio, seed, zz, f.index, REFERENCE)


def encode_nonreference(f: Frame, preceding_ref: Frame, ratio: float, seed: int) -> FrameCode:
    """Measure the pixel difference from the preceding reference frame.

    No permutation is applied: the difference is sparse enough that its
    per-column counts do not vary much.
    """
    if f.kind != NONREFERENCE:
        raise ValueError(f"frame {f.index} is not a non-reference frame")
    if f.luminance.shape != preceding_ref.luminance.shape:
        raise ValueError("frame shapes differ")
    diff = Signal2D(f.luminance.entries - preceding_ref.luminance.entries)
    k = _measurement_count(ratio, diff.rows)
    a = gaussian_sensing(k, diff.rows, seed)
    batch = sample_parallel(a, diff, perm_tag="identity")
    return FrameCode(diff.rows, diff.cols, k, _rng.check_seed(seed),
                     "identity", f.index, NONREFERENCE, batch.columns)


def encode_image(image: Signal2D, ratio: float, seed: int,
                 permutation: PermutationMap | None = None) -> FrameCode:
    """Still-image variant of the reference pipeline with a selectable
    permutation (None means no permutation)."""
    perm = permutation if permutation is not None else identity_permutation(image.rows, image.cols)
    return _encode_spectrum(image, ratio, seed, perm, 0, IMAGE)


def _clamp_pixels(entries: np.ndarray) -> Signal2D:
    return Signal2D(np.clip(entries, 0.0, 255.0))


def _decode_spectrum(code: FrameCode, opts: SolverOptions | None,
                     workers: int) -> ParallelReconstruction:
    a = gaussian_sensing(code.k, code.rows, code.seed)
    perm = _permutation_for_tag(code.perm_tag, code.rows, code.cols)
    return reconstruct_2d(a, code.batch, perm, opts, workers)


def decode_reference(code: FrameCode, opts: SolverOptions | None = None,
                     workers: int = 1) -> DecodedFrame:
    """Column reconstruction -> inverse zigzag -> inverse DCT -> clamp."""
    if code.kind != REFERENCE:
        raise ValueError(f"expected a reference-frame code, got {code.kind!r}")
    rec = _decode_spectrum(code, opts, workers)
    pixels = _clamp_pixels(idct2(rec.signal).entries)
    return DecodedFrame(Frame(pixels, code.frame_index), rec)


def decode_nonreference(code: FrameCode, decoded_ref: Frame,
                        opts: SolverOptions | None = None,
                        workers: int = 1) -> DecodedFrame:
    """Reconstruct the difference and add it to the decoded reference.

    Error in the decoded reference propagates into the result by design;
    the decoder never sees the original frames.
    """
    if code.kind != NONREFERENCE:
        raise ValueError(f"expected a non-reference-frame code, got {code.kind!r}")
    if decoded_ref.luminance.shape != (code.rows, code.cols):
        raise ValueError("decoded reference shape does not match the code")
    a = gaussian_sensing(code.k, code.rows, code.seed)
    rec = reconstruct_2d(a, code.batch, identity_permutation(code.rows, code.cols),
                         opts, workers)
    pixels = _clamp_pixels(decoded_ref.luminance.entries + rec.signal.entries)
    return DecodedFrame(Frame(pixels, code.frame_index), rec)


def decode_image(code: FrameCode, opts: SolverOptions | None = None,
                 workers: int = 1) -> tuple[Signal2D, ParallelReconstruction]:
    """Inverse of :func:`encode_image`; returns clamped pixels."""
    if code.kind != IMAGE:
        raise ValueError(f"expected an image code, got {code.kind!r}")
    rec = _decode_spectrum(code, opts, workers)
    return _clamp_pixels(idct2(rec.signal).entries), rec


def encode_pair(ref: Frame, nonref: Frame, avg_ratio: float, seed: int,
                split: float = 4.0) -> FramePairCode:
    """Encode one reference/non-reference pair under an average ratio.

    Each frame's sensing seed is derived from (seed, frame index), so a
    sequence encoded with one seed never reuses a measurement matrix.
    """
    if nonref.index != ref.index + 1:
        raise ValueError("pair must be a reference frame and the next frame")
    r_ref, r_nonref = allocate_ratios(avg_ratio, split)
    ref_code = encode_reference(ref, r_ref, _rng.derive_key(seed, ref.index))
    nonref_code = encode_nonreference(nonref, ref, r_nonref,
                                      _rng.derive_key(seed, nonref.index))
    return FramePairCode(ref_code, nonref_code, (r_ref, r_nonref))


def decode_pair(pair: FramePairCode, opts: SolverOptions | None = None,
                workers: int = 1) -> tuple[DecodedFrame, DecodedFrame]:
    ref = decode_reference(pair.ref, opts, workers)
    nonref = decode_nonreference(pair.nonref, ref.frame, opts, workers)
    return ref, nonref


def encode_sequence(frames: list[Frame], avg_ratio: float, seed: int,
                    split: float = 4.0) -> list[FramePairCode]:
    """Encode consecutive (reference, non-reference) pairs."""
    if not frames or len(frames) % 2 != 0:
        raise ValueError("need a nonempty even-length frame sequence")
    pairs = []
    for ref, nonref in zip(frames[0::2], frames[1::2]):
        pairs.append(encode_pair(ref, nonref, avg_ratio, seed, split))
    return pairs


def decode_sequence(pairs: list[FramePairCode], opts: SolverOptions | None = None,
                    workers: int = 1) -> list[tuple[DecodedFrame, DecodedFrame]]:
    return [decode_pair(pair, opts, workers) for pair in pairs]


def psnr(a: Frame, b: Frame) -> float:
    """Peak signal-to-noise ratio in dB against the 8-bit peak of 255.

    Identical frames return +inf.
    """
    if a.luminance.shape != b.luminance.shape:
        raise ValueError("frame shapes differ")
    mse = float(np.mean((a.luminance.entries - b.luminance.entries) ** 2))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(255.0 ** 2 / mse)
