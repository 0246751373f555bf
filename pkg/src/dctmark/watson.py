"""Watson's perceptual model for 8x8 block DCT coefficients.

Produces just-noticeable-difference thresholds per coefficient: a frequency
sensitivity table t(i,j), luminance masking

    m(i,j,k) = t(i,j) * (x(0,0,k) / mean_dc) ** a_t

and contrast masking

    m'(i,j,k) = max(m(i,j,k), |x(i,j,k)| ** w * m(i,j,k) ** (1 - w)).

The threshold m_i used by the embedders is one zigzag position of this mask
set, one value per block.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources

import numpy as np

from .blockdct import BLOCK, _check_spectrum, _zigzag_coords

DEFAULT_LUMINANCE_EXPONENT = 0.649
DEFAULT_CONTRAST_EXPONENT = 0.7
DC_FLOOR = 1e-6

MODE_FREQ_LUM = "freq-lum"
MODE_FREQ_LUM_CONTRAST = "freq-lum-contrast"
MASK_MODES = (MODE_FREQ_LUM, MODE_FREQ_LUM_CONTRAST)

_default_table = None


def load_sensitivity_table(path=None) -> np.ndarray:
    """Load an 8x8 frequency sensitivity table from a whitespace text file.

    With no path, returns the packaged Watson threshold table.
    """
    global _default_table
    if path is None:
        if _default_table is None:
            ref = resources.files("dctmark").joinpath("data/watson_sensitivity.txt")
            with ref.open("rb") as f:
                _default_table = _parse_table(f.read())
        return _default_table.copy()
    with open(path, "rb") as f:
        return _parse_table(f.read())


def _parse_table(raw: bytes) -> np.ndarray:
    rows = []
    for line in raw.decode("ascii").splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            rows.append([float(tok) for tok in line.split()])
    table = np.array(rows, dtype=np.float64)
    if table.shape != (BLOCK, BLOCK):
        raise ValueError(f"sensitivity table must be 8x8, got {table.shape}")
    if np.any(table <= 0):
        raise ValueError("sensitivity table entries must be positive")
    return table


@dataclass(frozen=True)
class MaskParams:
    """Masking configuration: mode, exponents, DC handling, sensitivity table."""

    mode: str = MODE_FREQ_LUM
    a_t: float = DEFAULT_LUMINANCE_EXPONENT
    w_exp: float = DEFAULT_CONTRAST_EXPONENT
    dc_floor: bool = False
    table: np.ndarray | None = None

    def __post_init__(self):
        if self.mode not in MASK_MODES:
            raise ValueError(f"unknown mask mode {self.mode!r}, expected one of {MASK_MODES}")
        if self.a_t <= 0:
            raise ValueError("luminance exponent a_t must be positive")
        if not 0 < self.w_exp < 1:
            raise ValueError("contrast exponent w_exp must lie in (0, 1)")

    def sensitivity(self) -> np.ndarray:
        return self.table if self.table is not None else load_sensitivity_table()


def _checked_dc(dc: np.ndarray, dc_floor: bool) -> np.ndarray:
    if dc_floor:
        return np.maximum(dc, DC_FLOOR)
    if np.any(dc <= 0):
        k = int(np.argmax(dc.reshape(-1) <= 0))
        raise ValueError(
            f"non-positive DC coefficient at block {k}; "
            "luminance masking needs positive block means (or enable the DC floor)"
        )
    return dc


def luminance_mask(
    table: np.ndarray,
    spec: np.ndarray,
    a_t: float = DEFAULT_LUMINANCE_EXPONENT,
    dc_floor: bool = False,
) -> np.ndarray:
    """Frequency plus luminance masking thresholds, shape (rows, cols, 8, 8).

    The reference luminance is the mean DC coefficient of the spectrum being
    processed, so blind recomputation at the detector uses the received image.
    """
    spec = _check_spectrum(spec)
    table = np.asarray(table, dtype=np.float64)
    if table.shape != (BLOCK, BLOCK):
        raise ValueError(f"sensitivity table must be 8x8, got {table.shape}")
    dc = _checked_dc(spec[:, :, 0, 0], dc_floor)
    mean_dc = dc.mean()
    if mean_dc <= 0:
        raise ValueError("mean DC coefficient must be positive")
    ratio = (dc / mean_dc) ** a_t
    return table[None, None, :, :] * ratio[:, :, None, None]


def contrast_mask(
    lum: np.ndarray,
    spec: np.ndarray,
    w_exp: float = DEFAULT_CONTRAST_EXPONENT,
) -> np.ndarray:
    """Contrast masking: raise each luminance threshold toward |x|^w * m^(1-w)."""
    spec = _check_spectrum(spec)
    lum = np.asarray(lum, dtype=np.float64)
    if lum.shape != spec.shape:
        raise ValueError(f"mask set shape {lum.shape} does not match spectrum {spec.shape}")
    if not 0 < w_exp < 1:
        raise ValueError("contrast exponent w_exp must lie in (0, 1)")
    return np.maximum(lum, np.abs(spec) ** w_exp * lum ** (1.0 - w_exp))


def mask_values(
    dc: np.ndarray,
    coeffs: np.ndarray,
    t_freq: float,
    params: MaskParams,
    mean_dc: float | None = None,
) -> np.ndarray:
    """Mask thresholds for one frequency, from per-block DC and coefficient values.

    This is the single-position form of the full mask set, used where only the
    watermarked coefficient's threshold is needed. `mean_dc` defaults to the
    mean of `dc`; pass the image-wide mean when `dc` is a subset of blocks.
    """
    dc = _checked_dc(np.asarray(dc, dtype=np.float64), params.dc_floor)
    if mean_dc is None:
        mean_dc = dc.mean()
    if mean_dc <= 0:
        raise ValueError("mean DC coefficient must be positive")
    lum = t_freq * (dc / mean_dc) ** params.a_t
    if params.mode == MODE_FREQ_LUM:
        return lum
    coeffs = np.asarray(coeffs, dtype=np.float64)
    return np.maximum(lum, np.abs(coeffs) ** params.w_exp * lum ** (1.0 - params.w_exp))


def mask_vector(spec: np.ndarray, index: int, params: MaskParams) -> np.ndarray:
    """Per-block mask thresholds at one zigzag position, length = block count.

    Equals computing the full mask set for `params.mode` and zigzag-extracting
    position `index`, without the cost of the 63 unused frequencies.
    """
    spec = _check_spectrum(spec)
    i, j = _zigzag_coords(index)
    table = params.sensitivity()
    dc = spec[:, :, 0, 0].reshape(-1)
    coeffs = spec[:, :, i, j].reshape(-1)
    return mask_values(dc, coeffs, float(table[i, j]), params)
