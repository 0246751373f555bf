"""Attack channels: pixel-domain white Gaussian noise and JPEG-style
transform-domain quantization.

The JPEG attack quantizes and dequantizes every block DCT coefficient with
the standard luminance table scaled by the conventional quality mapping; no
entropy coding is involved, which keeps the channel bit-deterministic while
preserving the coefficient-level effect a real codec would have.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources

import numpy as np

from .blockdct import BLOCK, _round_half_away, block_dct, block_idct

KIND_NONE = "none"
KIND_AWGN = "awgn"
KIND_JPEG = "jpeg"
ATTACK_KINDS = (KIND_NONE, KIND_AWGN, KIND_JPEG)

_default_quant = None


def load_quantization_table(path=None) -> np.ndarray:
    """8x8 integer quantization steps; defaults to the packaged luminance table."""
    global _default_quant
    if path is None:
        if _default_quant is None:
            ref = resources.files("dctmark").joinpath("data/jpeg_luminance_quant.txt")
            _default_quant = _parse_quant(ref.read_bytes())
        return _default_quant.copy()
    with open(path, "rb") as f:
        return _parse_quant(f.read())


def _parse_quant(raw: bytes) -> np.ndarray:
    rows = []
    for line in raw.decode("ascii").splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            rows.append([int(tok) for tok in line.split()])
    table = np.array(rows, dtype=np.int64)
    if table.shape != (BLOCK, BLOCK):
        raise ValueError(f"quantization table must be 8x8, got {table.shape}")
    if np.any(table < 1):
        raise ValueError("quantization steps must be >= 1")
    return table


@dataclass(frozen=True)
class AttackSpec:
    """Which channel to apply: none, awgn(noise_sigma, seed) or jpeg(quality)."""

    kind: str = KIND_NONE
    noise_sigma: float = 0.0
    quality: int = 50
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ATTACK_KINDS:
            raise ValueError(f"unknown attack kind {self.kind!r}, expected one of {ATTACK_KINDS}")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be nonnegative")
        if not 1 <= self.quality <= 100:
            raise ValueError(f"quality must lie in [1, 100], got {self.quality}")

    def label(self) -> str:
        if self.kind == KIND_AWGN:
            return f"awgn(sigma={self.noise_sigma!r})"
        if self.kind == KIND_JPEG:
            return f"jpeg(quality={self.quality})"
        return KIND_NONE


def quantization_steps(quality: int, table: np.ndarray | None = None) -> np.ndarray:
    """Quantization steps for a quality factor in [1, 100].

    scale = 5000/QF below 50, else 200 - 2*QF; each step is
    clamp(round(table * scale / 100), 1, 255), so QF 50 reproduces the table
    and QF 100 clamps every step to 1.
    """
    if not 1 <= quality <= 100:
        raise ValueError(f"quality must lie in [1, 100], got {quality}")
    if table is None:
        table = load_quantization_table()
    scale = 5000.0 / quality if quality < 50 else 200.0 - 2.0 * quality
    steps = _round_half_away(table.astype(np.float64) * scale / 100.0)
    return np.clip(steps, 1, 255).astype(np.int64)


def attack_awgn_field(field: np.ndarray, sigma: float, seed: int) -> np.ndarray:
    """Gaussian pixel noise on a real-valued pixel field, delivered as uint8.

    The field may come straight from an inverse block DCT; quantization to
    8 bits happens only after the noise, as it would in a delivered image.
    """
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    noisy = np.asarray(field, dtype=np.float64)
    if sigma > 0:
        rng = np.random.Generator(np.random.PCG64(seed))
        noisy = noisy + sigma * rng.standard_normal(noisy.shape)
    return np.clip(_round_half_away(noisy), 0, 255).astype(np.uint8)


def attack_awgn(img: np.ndarray, sigma: float, seed: int) -> np.ndarray:
    """Add zero-mean Gaussian pixel noise of variance sigma^2, then clamp."""
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    if sigma == 0:
        return np.array(img, copy=True)
    return attack_awgn_field(img.astype(np.float64), sigma, seed)


def quantize_spectrum(spec: np.ndarray, quality: int, table: np.ndarray | None = None) -> np.ndarray:
    """Quantize and dequantize every block DCT coefficient at the given quality."""
    steps = quantization_steps(quality, table).astype(np.float64)
    spec = np.asarray(spec, dtype=np.float64)
    return _round_half_away(spec / steps) * steps


def attack_jpeg(img: np.ndarray, quality: int, table: np.ndarray | None = None) -> np.ndarray:
    """Quantize and dequantize every block DCT coefficient, then invert."""
    return block_idct(quantize_spectrum(block_dct(img), quality, table))


def apply_attack(img: np.ndarray, spec: AttackSpec) -> np.ndarray:
    """Dispatch on spec.kind; the identity for kind none."""
    if spec.kind == KIND_AWGN:
        return attack_awgn(img, spec.noise_sigma, spec.seed)
    if spec.kind == KIND_JPEG:
        return attack_jpeg(img, spec.quality)
    return np.array(img, copy=True)
