"""Embedding rules and detection statistics for spread-spectrum watermarks.

Single-sided embedding adds a*m_i*w_i to each host coefficient. The
double-sided variants first project the host onto the watermark and flip the
embedding sign to agree with it, so host interference adds to the statistic
magnitude instead of fighting it. Detection statistics: linear correlator,
generalized-Gaussian likelihood increment, and the Cauchy score statistic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

RULE_SINGLE = "single-sided"
RULE_DOUBLE = "double-sided"
RULES = (RULE_SINGLE, RULE_DOUBLE)
H0 = "H0"
H1 = "H1"


@dataclass(frozen=True)
class DetectionResult:
    statistic: float
    threshold: float
    decision: str
    rule: str


def _as_vector(v, name: str) -> np.ndarray:
    v = np.asarray(v, dtype=np.float64).reshape(-1)
    if v.size == 0:
        raise ValueError(f"{name} is empty")
    return v


def _pair(x, w) -> tuple[np.ndarray, np.ndarray]:
    x = _as_vector(x, "host vector")
    w = _as_vector(w, "watermark")
    if x.size != w.size:
        raise ValueError(f"length mismatch: {x.size} vs {w.size}")
    return x, w


def _masks(m, n: int) -> np.ndarray:
    m = _as_vector(m, "mask vector")
    if m.size != n:
        raise ValueError(f"mask length {m.size} does not match vector length {n}")
    if np.any(m <= 0):
        raise ValueError("masks must be positive")
    return m


def generate_watermark(n: int, seed: int) -> np.ndarray:
    """Seeded random arrangement of n/2 plus-ones and n/2 minus-ones."""
    if n < 2 or n % 2:
        raise ValueError(f"watermark length must be even and >= 2, got {n}")
    w = np.concatenate([np.ones(n // 2), -np.ones(n // 2)])
    rng = np.random.Generator(np.random.PCG64(seed))
    return rng.permutation(w)


def projection(x, w) -> float:
    """xbar = (1/N) sum x_i w_i."""
    x, w = _pair(x, w)
    return float(np.sum(x * w) / x.size)


def cauchy_projection(x, w, gamma: float) -> float:
    """xbar = (1/N) sum x_i w_i / (gamma^2 + x_i^2)."""
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    x, w = _pair(x, w)
    return float(np.sum(x * w / (gamma * gamma + x * x)) / x.size)


def embed_ass(x, w, a: float, m) -> np.ndarray:
    """s_i = x_i + a m_i w_i."""
    x, w = _pair(x, w)
    m = _masks(m, x.size)
    return x + a * m * w


def embed_dsass(x, w, a: float, m) -> np.ndarray:
    """s = x + a*m*w if projection(x, w) > 0 else x - a*m*w.

    The tie xbar = 0 takes the minus branch.
    """
    x, w = _pair(x, w)
    m = _masks(m, x.size)
    sign = 1.0 if projection(x, w) > 0.0 else -1.0
    return x + sign * a * m * w


def embed_dscauchy(x, w, a: float, m, gamma: float) -> np.ndarray:
    """Like embed_dsass but with the sign taken from cauchy_projection."""
    x, w = _pair(x, w)
    m = _masks(m, x.size)
    sign = 1.0 if cauchy_projection(x, w, gamma) > 0.0 else -1.0
    return x + sign * a * m * w


def detect_correlator(s, w) -> float:
    """Linear correlator L = (1/N) sum s_i w_i."""
    return projection(s, w)


def detect_ggd(s, w, a: float, m, c: float) -> float:
    """Likelihood-increment statistic L = (1/N) sum |s_i|^c - |s_i - a m_i w_i|^c.

    Needs the nominal embedding strength a and the masks as side information;
    that requirement is exactly what the double-sided schemes avoid.
    """
    if c <= 0:
        raise ValueError("shape parameter c must be positive")
    s, w = _pair(s, w)
    m = _masks(m, s.size)
    return float(np.sum(np.abs(s) ** c - np.abs(s - a * m * w) ** c) / s.size)


def detect_cauchy(s, w, gamma: float) -> float:
    """Cauchy score statistic L = (1/N) sum s_i w_i / (gamma^2 + s_i^2).

    |L| <= 1/(2*gamma) for any input since |t|/(gamma^2 + t^2) <= 1/(2*gamma).
    """
    return cauchy_projection(s, w, gamma)


def decide(statistic: float, psi: float, rule: str) -> DetectionResult:
    """Threshold test: H1 iff |L| > psi (double-sided) or L > psi (single-sided)."""
    if rule not in RULES:
        raise ValueError(f"unknown rule {rule!r}, expected one of {RULES}")
    if rule == RULE_DOUBLE and psi < 0:
        raise ValueError("double-sided threshold must be nonnegative")
    value = abs(statistic) if rule == RULE_DOUBLE else statistic
    decision = H1 if value > psi else H0
    return DetectionResult(float(statistic), float(psi), decision, rule)


def lattice_quantize(v: float, delta: float) -> float:
    """Nearest point of the shifted lattice delta*Z + delta/2.

    A value exactly midway between two lattice points (v on delta*Z) resolves
    to the point above it.
    """
    if delta <= 0:
        raise ValueError("step size delta must be positive")
    return delta * math.floor(v / delta) + 0.5 * delta


def embed_stdm_perceptual(x, w, m, delta: float, a_max: float) -> tuple[np.ndarray, float]:
    """Quantize the host projection to delta*Z + delta/2 along the watermark.

    The required strength a = (q(xbar) - xbar) / mean(m) follows from the
    quantization target and is not a free parameter; a_max is the caller's
    perceptual cap, returned alongside so |a| > a_max overshoots are
    observable (they are the reason this construction cannot respect the
    masks). Returns (s, effective a) with projection(s, w) = q(xbar).
    """
    x, w = _pair(x, w)
    m = _masks(m, x.size)
    if a_max <= 0:
        raise ValueError("a_max must be positive")
    mean_mask = float(np.sum(m) / m.size)
    if mean_mask == 0.0:
        raise ValueError("mask sum is zero")
    xbar = projection(x, w)
    target = lattice_quantize(xbar, delta)
    a = (target - xbar) / mean_mask
    return x + a * m * w, float(a)
