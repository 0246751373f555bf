"""8x8 block DCT utilities and binary PGM image I/O.

Images are uint8 numpy arrays of shape (height, width) with both dimensions
multiples of 8. Block spectra are float64 arrays of shape (rows, cols, 8, 8)
holding the orthonormal type-II 2-D DCT of each block, so Parseval holds
per block and a constant block of value v maps to a DC coefficient of 8*v.
"""

from __future__ import annotations

import numpy as np
from scipy.fft import dct, idct

BLOCK = 8


class PgmError(ValueError):
    """Raised for malformed PGM files."""


def _zigzag_order() -> tuple[tuple[int, int], ...]:
    order = []
    for s in range(2 * BLOCK - 1):
        diag = [(i, s - i) for i in range(s + 1) if i < BLOCK and s - i < BLOCK]
        order.extend(diag if s % 2 else diag[::-1])
    return tuple(order)


# Standard JPEG zigzag scan as (row, col) pairs; ZIGZAG_ORDER[0] is the DC term
# and ZIGZAG_ORDER[4] (1-based position 5) is (1, 1).
ZIGZAG_ORDER = _zigzag_order()


def _round_half_away(x: np.ndarray) -> np.ndarray:
    """Round to nearest integer with halves away from zero."""
    return np.trunc(x + np.copysign(0.5, x))


def _check_image(img: np.ndarray) -> np.ndarray:
    img = np.asarray(img)
    if img.ndim != 2:
        raise ValueError(f"expected a 2-D grayscale image, got shape {img.shape}")
    if img.dtype != np.uint8:
        raise ValueError(f"expected uint8 pixels, got {img.dtype}")
    h, w = img.shape
    if h % BLOCK or w % BLOCK:
        raise ValueError(f"image is {w}x{h}, dimensions must be multiples of {BLOCK}")
    return img


def _check_spectrum(spec: np.ndarray) -> np.ndarray:
    spec = np.asarray(spec, dtype=np.float64)
    if spec.ndim != 4 or spec.shape[2:] != (BLOCK, BLOCK):
        raise ValueError(f"expected spectrum of shape (rows, cols, 8, 8), got {spec.shape}")
    if not np.all(np.isfinite(spec)):
        raise ValueError("spectrum contains non-finite coefficients")
    return spec


def _next_token(f) -> bytes:
    """Read the next whitespace-delimited header token, skipping comments."""
    c = f.read(1)
    while c:
        if c == b"#":
            while c and c not in (b"\n", b"\r"):
                c = f.read(1)
        elif c.isspace():
            c = f.read(1)
        else:
            break
    if not c:
        raise PgmError("truncated PGM header")
    token = bytearray()
    while c and not c.isspace():
        token += c
        c = f.read(1)
    # the single whitespace byte after the token is consumed here, which for
    # the maxval token leaves the stream positioned at the raw payload
    return bytes(token)


def load_pgm(path) -> np.ndarray:
    """Load a binary 8-bit PGM (magic P5, maxval 255) as a uint8 image array.

    Images whose dimensions are not multiples of 8 are rejected rather than
    padded, since padding would inject synthetic content into the host.
    """
    with open(path, "rb") as f:
        magic = _next_token(f)
        if magic != b"P5":
            raise PgmError(f"unsupported magic {magic!r}, expected binary PGM (P5)")
        try:
            width = int(_next_token(f))
            height = int(_next_token(f))
            maxval = int(_next_token(f))
        except ValueError as exc:
            raise PgmError(f"malformed PGM header: {exc}") from None
        if width <= 0 or height <= 0:
            raise PgmError(f"invalid dimensions {width}x{height}")
        if maxval != 255:
            raise PgmError(f"unsupported maxval {maxval}, expected 255")
        payload = f.read(width * height)
    if len(payload) != width * height:
        raise PgmError(f"truncated payload: expected {width * height} bytes, got {len(payload)}")
    img = np.frombuffer(payload, dtype=np.uint8).reshape(height, width)
    return _check_image(img)


def save_pgm(img: np.ndarray, path) -> None:
    """Write a uint8 image array as a binary PGM (P5, maxval 255)."""
    img = _check_image(img)
    h, w = img.shape
    with open(path, "wb") as f:
        f.write(b"P5\n%d %d\n255\n" % (w, h))
        f.write(img.tobytes())


def _to_blocks(img: np.ndarray) -> np.ndarray:
    h, w = img.shape
    return (
        img.astype(np.float64)
        .reshape(h // BLOCK, BLOCK, w // BLOCK, BLOCK)
        .transpose(0, 2, 1, 3)
    )


def _from_blocks(blocks: np.ndarray) -> np.ndarray:
    rows, cols = blocks.shape[:2]
    return blocks.transpose(0, 2, 1, 3).reshape(rows * BLOCK, cols * BLOCK)


def block_dct(img: np.ndarray) -> np.ndarray:
    """Orthonormal 8x8 block DCT of a uint8 image, shape (rows, cols, 8, 8)."""
    blocks = _to_blocks(_check_image(img))
    return dct(dct(blocks, axis=-1, norm="ortho"), axis=-2, norm="ortho")


def block_idct(spec: np.ndarray) -> np.ndarray:
    """Inverse of block_dct: pixels rounded half away from zero, clamped to [0, 255]."""
    pixels = _round_half_away(block_idct_field(spec))
    return np.clip(pixels, 0, 255).astype(np.uint8)


def block_idct_field(spec: np.ndarray) -> np.ndarray:
    """Inverse of block_dct as a real-valued pixel field, no rounding or clamping.

    This is the signal an attack channel acts on before the delivered image
    is quantized to 8 bits: rounding first would erase any coefficient change
    whose pixel footprint stays below half a gray level, which at usual
    embedding strengths is all of them (one mid-band coefficient moved by d
    shifts each pixel by at most 0.232*d).
    """
    spec = _check_spectrum(spec)
    blocks = idct(idct(spec, axis=-1, norm="ortho"), axis=-2, norm="ortho")
    return _from_blocks(blocks)


def coefficient_basis(index: int) -> np.ndarray:
    """8x8 pixel pattern of a unit coefficient at the given zigzag position."""
    i, j = _zigzag_coords(index)
    unit = np.zeros((BLOCK, BLOCK))
    unit[i, j] = 1.0
    return idct(idct(unit, axis=-1, norm="ortho"), axis=-2, norm="ortho")


def quantize_image_preserving(spec: np.ndarray, index: int, tol: float = 0.05) -> np.ndarray:
    """Integer image whose coefficient at zigzag `index` tracks spec per block.

    Plain rounding of the inverse transform reverts sub-half-pixel changes,
    so each block is fixed up after rounding: pixels move by +-1 in order of
    decreasing basis weight, only when the move shrinks the coefficient
    error, until the error is within tol. Pixels pinned at 0 or 255 are
    skipped. Blocks already within tol (in particular every block whose
    coefficients were never touched) keep their rounded pixels exactly.
    """
    spec = _check_spectrum(spec)
    if tol <= 0:
        raise ValueError("tol must be positive")
    i, j = _zigzag_coords(index)
    basis = coefficient_basis(index).reshape(-1)
    order = np.argsort(-np.abs(basis), kind="stable")

    blocks = idct(idct(spec, axis=-1, norm="ortho"), axis=-2, norm="ortho")
    pixels = np.clip(_round_half_away(blocks), 0.0, 255.0)
    targets = spec[:, :, i, j]
    actual = np.einsum("rcuv,uv->rc", pixels, basis.reshape(BLOCK, BLOCK))
    rows, cols = np.nonzero(np.abs(targets - actual) > tol)
    for r, c in zip(rows, cols):
        flat = pixels[r, c].reshape(-1)
        err = float(targets[r, c] - actual[r, c])
        for _ in range(4):
            moved = False
            for t in order:
                if abs(err) <= tol:
                    break
                step = 1.0 if err * basis[t] > 0 else -1.0
                nudged = flat[t] + step
                if not 0.0 <= nudged <= 255.0:
                    continue
                shrunk = err - step * basis[t]
                if abs(shrunk) < abs(err):
                    flat[t] = nudged
                    err = shrunk
                    moved = True
            if abs(err) <= tol or not moved:
                break
        if abs(err) > tol:
            raise ValueError(
                f"cannot place coefficient {index} of block ({r}, {c}) within "
                f"{tol} of its target; residual error {err:.4f}"
            )
    return _from_blocks(pixels).astype(np.uint8)


def _zigzag_coords(index: int) -> tuple[int, int]:
    if not 1 <= index <= BLOCK * BLOCK:
        raise ValueError(f"zigzag index {index} out of range 1..{BLOCK * BLOCK}")
    return ZIGZAG_ORDER[index - 1]


def zigzag_extract(spec: np.ndarray, index: int) -> np.ndarray:
    """Coefficient at zigzag position `index` (1 = DC) from every block.

    Blocks are ordered row-major, so element k belongs to block
    (k // cols, k % cols).
    """
    spec = _check_spectrum(spec)
    i, j = _zigzag_coords(index)
    return spec[:, :, i, j].reshape(-1).copy()


def zigzag_insert(spec: np.ndarray, index: int, values: np.ndarray) -> np.ndarray:
    """New spectrum with zigzag position `index` replaced by `values` per block."""
    spec = _check_spectrum(spec)
    i, j = _zigzag_coords(index)
    values = np.asarray(values, dtype=np.float64)
    count = spec.shape[0] * spec.shape[1]
    if values.shape != (count,):
        raise ValueError(f"expected {count} values, got shape {values.shape}")
    out = spec.copy()
    out[:, :, i, j] = values.reshape(spec.shape[0], spec.shape[1])
    return out


def psnr(a: np.ndarray, b: np.ndarray) -> float:
    """Peak signal-to-noise ratio in dB between two 8-bit images."""
    a = _check_image(a)
    b = _check_image(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    mse = np.mean((a.astype(np.float64) - b.astype(np.float64)) ** 2)
    if mse == 0:
        return float("inf")
    return float(10.0 * np.log10(255.0 ** 2 / mse))
