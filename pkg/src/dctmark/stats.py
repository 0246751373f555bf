"""Coefficient statistics and closed-form detection performance.

Covers the generalized Gaussian model A*exp(-|beta*x|^c) with moment-matching
shape estimation, maximum-likelihood Cauchy scale estimation, Gaussian tail
functions, and the closed-form miss probability of the double-sided additive
scheme under a Gaussian host projection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc, gammaln, ndtri

GGD_SHAPE_RANGE = (0.1, 5.0)
_SHAPE_TOL = 1e-6
_SQRT2 = math.sqrt(2.0)


class FitError(ValueError):
    """Raised when a distribution fit is impossible on the given data."""


@dataclass(frozen=True)
class GgdParams:
    """Generalized Gaussian parameters: shape c and standard deviation sigma_x.

    The scale beta and the normalizer are derived so the density
    A*exp(-|beta*x|^c) has standard deviation sigma_x.
    """

    c: float
    sigma_x: float

    def __post_init__(self):
        if self.c <= 0:
            raise ValueError("shape parameter c must be positive")
        if self.sigma_x <= 0:
            raise ValueError("sigma_x must be positive")

    @property
    def beta(self) -> float:
        c = self.c
        return math.exp(0.5 * (gammaln(3.0 / c) - gammaln(1.0 / c))) / self.sigma_x

    @property
    def norm_const(self) -> float:
        c = self.c
        return self.beta * c / (2.0 * math.exp(gammaln(1.0 / c)))


@dataclass(frozen=True)
class CauchyParams:
    """Cauchy parameters; the location delta is fixed at zero for symmetric hosts."""

    gamma: float
    delta: float = 0.0

    def __post_init__(self):
        if self.gamma <= 0:
            raise ValueError("scale parameter gamma must be positive")
        if self.delta != 0.0:
            raise ValueError("only the symmetric delta = 0 form is supported")


@dataclass(frozen=True)
class PerformancePoint:
    """One operating point: false-alarm and miss probabilities with the
    mean displacement k and mean squared distortion D_w that produced it."""

    p_fa: float
    p_m: float
    k: float = 0.0
    d_w: float = 0.0

    def __post_init__(self):
        for name, p in (("p_fa", self.p_fa), ("p_m", self.p_m)):
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {p}")
        if self.k < 0:
            raise ValueError("k must be nonnegative")
        if self.k * self.k > self.d_w * (1.0 + 1e-12) + 1e-300:
            raise ValueError("k^2 must not exceed D_w")


def q_function(x):
    """Gaussian upper-tail probability P(Z > x)."""
    return 0.5 * erfc(np.asarray(x, dtype=np.float64) / _SQRT2)


def q_inverse(p: float) -> float:
    """Inverse of q_function on (0, 1)."""
    if not 0.0 < p < 1.0:
        raise ValueError(f"probability must lie in (0, 1), got {p}")
    return float(-ndtri(p))


def moment_ratio(c: float) -> float:
    """E|X| / sqrt(E X^2) for a generalized Gaussian with shape c."""
    return math.exp(gammaln(2.0 / c) - 0.5 * (gammaln(1.0 / c) + gammaln(3.0 / c)))


def fit_ggd(data) -> GgdParams:
    """Fit a generalized Gaussian by moment matching.

    The shape c solves moment_ratio(c) = mean|x| / rms(x) by bisection on
    [0.1, 5]; sigma_x is the sample standard deviation. The ratio is scale
    free, so c is exactly scale invariant.
    """
    x = np.asarray(data, dtype=np.float64).reshape(-1)
    if x.size < 100:
        raise FitError(f"need at least 100 samples, got {x.size}")
    rms = math.sqrt(float(np.mean(x * x)))
    if rms == 0.0 or float(np.std(x)) == 0.0:
        raise FitError("degenerate data: zero variance")
    r = float(np.mean(np.abs(x))) / rms
    lo, hi = GGD_SHAPE_RANGE
    if not moment_ratio(lo) <= r <= moment_ratio(hi):
        raise FitError(
            f"moment ratio {r:.6f} outside the achievable range "
            f"[{moment_ratio(lo):.6f}, {moment_ratio(hi):.6f}] for c in [{lo}, {hi}]"
        )
    while hi - lo > _SHAPE_TOL:
        mid = 0.5 * (lo + hi)
        if moment_ratio(mid) < r:
            lo = mid
        else:
            hi = mid
    return GgdParams(c=0.5 * (lo + hi), sigma_x=float(np.std(x, ddof=1)))


def ggd_pdf(params: GgdParams, x):
    """Generalized Gaussian density A*exp(-|beta*x|^c) at x (scalar or array)."""
    xx = np.asarray(x, dtype=np.float64)
    out = params.norm_const * np.exp(-np.abs(params.beta * xx) ** params.c)
    return float(out) if out.ndim == 0 else out


def fit_cauchy(data) -> CauchyParams:
    """Maximum-likelihood Cauchy scale for zero-location data.

    Solves sum(gamma^2 / (gamma^2 + x^2)) = n/2 (the stationarity condition of
    the log likelihood) by bracketed bisection, starting from half the
    interquartile range. All steps commute with rescaling, so the estimate is
    exactly scale equivariant.
    """
    x = np.asarray(data, dtype=np.float64).reshape(-1)
    if x.size < 100:
        raise FitError(f"need at least 100 samples, got {x.size}")
    if np.mean(x == 0.0) >= 0.5:
        raise FitError("scale fit impossible: half or more of the samples are zero")
    xsq = x * x

    def excess(gamma: float) -> float:
        g2 = gamma * gamma
        return float(np.mean(g2 / (g2 + xsq))) - 0.5

    q75, q25 = np.percentile(x, [75.0, 25.0])
    g0 = 0.5 * (q75 - q25)
    if g0 <= 0.0:
        g0 = float(np.mean(np.abs(x)))
    lo = hi = g0
    while excess(lo) > 0.0:
        lo /= 4.0
    while excess(hi) < 0.0:
        hi *= 4.0
    for _ in range(200):
        mid = math.sqrt(lo * hi)
        if excess(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    return CauchyParams(gamma=math.sqrt(lo * hi))


def dsass_miss_probability(p_fa: float, k: float, n: int, sigma_x: float) -> float:
    """Closed-form miss probability of the double-sided additive scheme.

    Assumes a Gaussian host projection and uniform masks: with threshold
    psi = (sigma_x/sqrt(N)) * Qinv(p_fa/2), the statistic magnitude under H1
    is |xbar| + k, so p_m = 1 - 2Q(Qinv(p_fa/2) - k*sqrt(N)/sigma_x) when
    psi > k and 0 otherwise.
    """
    if not 0.0 < p_fa < 1.0:
        raise ValueError(f"p_fa must lie in (0, 1), got {p_fa}")
    if k < 0:
        raise ValueError("k must be nonnegative")
    if n < 2:
        raise ValueError("N must be at least 2")
    if sigma_x <= 0:
        raise ValueError("sigma_x must be positive")
    qi = q_inverse(0.5 * p_fa)
    psi = sigma_x / math.sqrt(n) * qi
    if psi > k:
        return float(1.0 - 2.0 * q_function(qi - k * math.sqrt(n) / sigma_x))
    return 0.0


def distortion_summary(masks, a: float) -> tuple[float, float]:
    """Mean displacement k = (a/N)*sum(m) and distortion D_w = (a^2/N)*sum(m^2).

    k^2 <= D_w always (Cauchy-Schwarz), with equality exactly for uniform
    masks; the gap is what separates perceptually shaped embedding from the
    best detectability the same distortion budget could buy.
    """
    m = np.asarray(masks, dtype=np.float64).reshape(-1)
    if m.size == 0:
        raise ValueError("mask vector is empty")
    if np.any(m <= 0):
        raise ValueError("masks must be positive")
    if a <= 0:
        raise ValueError("embedding strength a must be positive")
    k = a * float(np.mean(m))
    d_w = a * a * float(np.mean(m * m))
    assert k * k <= d_w * (1.0 + 1e-12), "Cauchy-Schwarz violated"
    return k, d_w
