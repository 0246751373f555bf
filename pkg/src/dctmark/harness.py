"""Monte Carlo ROC experiments.

Each trial permutes the host coefficients with a per-trial derived seed, runs
the configured scheme's detect-only pipeline on the clean subvector for H0
and its embed, attack, detect pipeline for H1, then reads empirical miss
rates off the pooled statistics at thresholds calibrated on the H0
population. Everything downstream of TrialConfig is deterministic in the
master seed, including under parallel execution, because per-trial
randomness is derived from (seed, stream, trial) counters rather than drawn
from a shared generator.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .attacks import (
    KIND_AWGN,
    KIND_JPEG,
    KIND_NONE,
    AttackSpec,
    attack_awgn_field,
    quantize_spectrum,
)
from .blockdct import (
    ZIGZAG_ORDER,
    block_dct,
    block_idct,
    block_idct_field,
    load_pgm,
    zigzag_extract,
    zigzag_insert,
)
from .schemes import (
    RULE_DOUBLE,
    RULE_SINGLE,
    RULES,
    detect_cauchy,
    detect_correlator,
    detect_ggd,
    embed_ass,
    embed_dsass,
    embed_dscauchy,
    generate_watermark,
)
from .seeds import derive_seed
from .stats import dsass_miss_probability, fit_cauchy, fit_ggd, q_inverse
from .watson import MASK_MODES, MODE_FREQ_LUM, MaskParams, mask_values, mask_vector

# Seed-derivation streams; disjoint first path element per purpose.
STREAM_WATERMARK = 0
STREAM_PERMUTATION = 1
STREAM_ATTACK = 2
STREAM_SYNTHETIC = 3
STREAM_ESTIMATION = 4

_ESTIMATION_POOL = 100_000

EMBED_ASS = "ass"
EMBED_DS_ASS = "ds-ass"
EMBED_DS_CAUCHY = "ds-cauchy"
DETECTOR_CORRELATOR = "correlator"
DETECTOR_GGD = "ggd"
DETECTOR_CAUCHY = "cauchy"
DETECTORS = (DETECTOR_CORRELATOR, DETECTOR_GGD, DETECTOR_CAUCHY)


@dataclass(frozen=True)
class Scheme:
    """An embedder, the detector run against it, and the decision rule."""

    embedder: str
    detector: str
    rule: str


SCHEMES = {
    "ass-cor": Scheme(EMBED_ASS, DETECTOR_CORRELATOR, RULE_SINGLE),
    "hernandez": Scheme(EMBED_ASS, DETECTOR_GGD, RULE_SINGLE),
    "briassouli": Scheme(EMBED_ASS, DETECTOR_CAUCHY, RULE_SINGLE),
    "ds-ass": Scheme(EMBED_DS_ASS, DETECTOR_CORRELATOR, RULE_DOUBLE),
    "ds-cauchy": Scheme(EMBED_DS_CAUCHY, DETECTOR_CAUCHY, RULE_DOUBLE),
}


@dataclass(frozen=True)
class TrialConfig:
    """One benchmark run: scheme, host, embedding and attack parameters.

    With image = None the host is synthetic: each trial draws n i.i.d.
    N(0, synthetic_sigma^2) coefficients with uniform masks equal to
    synthetic_mask, which is the regime the closed-form miss probability
    describes. coeff_domain_noise adds the awgn attack directly to the
    watermarked coefficients instead of round-tripping through the image,
    mask_side_info hands the detector the embedding-time masks instead of
    recomputing them from the received data.
    """

    scheme: str
    image: str | None
    zigzag_index: int = 5
    n: int = 2000
    a: float = 1.0
    mask_mode: str = MODE_FREQ_LUM
    attack: AttackSpec = AttackSpec()
    trials: int = 10_000
    seed: int = 0
    pfa_grid: tuple[float, ...] | None = None
    mask_side_info: bool = False
    coeff_domain_noise: bool = False
    synthetic_sigma: float | None = None
    synthetic_mask: float = 1.0

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}, expected one of {sorted(SCHEMES)}")
        if self.n < 2 or self.n % 2:
            raise ValueError(f"subsequence length must be even and >= 2, got {self.n}")
        if self.a < 0:
            raise ValueError("embedding strength a must be nonnegative")
        if self.mask_mode not in MASK_MODES:
            raise ValueError(f"unknown mask mode {self.mask_mode!r}, expected one of {MASK_MODES}")
        if not 1 <= self.zigzag_index <= 64:
            raise ValueError(f"zigzag index {self.zigzag_index} out of range 1..64")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if not isinstance(self.attack, AttackSpec):
            raise ValueError("attack must be an AttackSpec")
        if self.coeff_domain_noise and self.attack.kind != KIND_AWGN:
            raise ValueError("coeff_domain_noise applies only to the awgn attack")
        if self.image is None:
            if self.synthetic_sigma is None or self.synthetic_sigma <= 0:
                raise ValueError("synthetic host needs a positive synthetic_sigma")
            if self.synthetic_mask <= 0:
                raise ValueError("synthetic_mask must be positive")
            if self.attack.kind == KIND_JPEG:
                raise ValueError("jpeg attack needs an image host")
            if self.attack.kind == KIND_AWGN and not self.coeff_domain_noise:
                raise ValueError("image-domain awgn needs an image host; set coeff_domain_noise")
        elif self.synthetic_sigma is not None:
            raise ValueError("synthetic_sigma is only meaningful with image = None")
        if self.pfa_grid is not None:
            grid = tuple(float(p) for p in self.pfa_grid)
            for p in grid:
                if not 0.0 < p < 1.0:
                    raise ValueError(f"p_fa targets must lie in (0, 1), got {p}")
            if any(b <= a for a, b in zip(grid, grid[1:])):
                raise ValueError("pfa_grid must be strictly increasing")
            object.__setattr__(self, "pfa_grid", grid)


@dataclass(frozen=True)
class RocCurve:
    """Empirical operating points for one TrialConfig, ordered by p_fa."""

    p_fa: tuple[float, ...]
    p_m: tuple[float, ...]
    config: TrialConfig
    trials: int

    def __post_init__(self):
        if len(self.p_fa) != len(self.p_m):
            raise ValueError("p_fa and p_m lengths differ")
        for p in (*self.p_fa, *self.p_m):
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"probabilities must lie in [0, 1], got {p}")
        if any(b <= a for a, b in zip(self.p_fa, self.p_fa[1:])):
            raise ValueError("p_fa must be strictly increasing")


def default_pfa_grid(trials: int) -> tuple[float, ...]:
    """Ten log-spaced false-alarm targets from max(1e-3, 10/trials) to 0.5."""
    lo = max(1e-3, 10.0 / trials)
    if lo >= 0.5:
        return (0.5,)
    return tuple(float(p) for p in np.geomspace(lo, 0.5, 10))


@dataclass
class _Context:
    cfg: TrialConfig
    sch: Scheme
    w: np.ndarray
    mask_params: MaskParams
    c: float | None = None
    gamma: float | None = None
    # image-host fields; None for synthetic hosts
    spec: np.ndarray | None = None
    coeffs: np.ndarray | None = None
    masks: np.ndarray | None = None
    dc: np.ndarray | None = None
    dc_mean: float = 0.0
    t_freq: float = 0.0
    total: int = 0


def _build_context(cfg: TrialConfig) -> _Context:
    sch = SCHEMES[cfg.scheme]
    w = generate_watermark(cfg.n, derive_seed(cfg.seed, STREAM_WATERMARK))
    params = MaskParams(mode=cfg.mask_mode)
    ctx = _Context(cfg=cfg, sch=sch, w=w, mask_params=params)

    needs_c = sch.detector == DETECTOR_GGD
    needs_gamma = sch.detector == DETECTOR_CAUCHY or sch.embedder == EMBED_DS_CAUCHY

    if cfg.image is None:
        ctx.total = cfg.n
        if needs_c or needs_gamma:
            rng = np.random.Generator(np.random.PCG64(derive_seed(cfg.seed, STREAM_ESTIMATION)))
            pool = rng.normal(0.0, cfg.synthetic_sigma, _ESTIMATION_POOL)
            if needs_c:
                ctx.c = fit_ggd(pool).c
            if needs_gamma:
                ctx.gamma = fit_cauchy(pool).gamma
        return ctx

    img = load_pgm(cfg.image)
    ctx.spec = block_dct(img)
    ctx.coeffs = zigzag_extract(ctx.spec, cfg.zigzag_index)
    ctx.total = ctx.coeffs.size
    if cfg.n > ctx.total:
        raise ValueError(
            f"subsequence length {cfg.n} exceeds the {ctx.total} blocks of {cfg.image}"
        )
    ctx.dc = zigzag_extract(ctx.spec, 1)
    ctx.dc_mean = float(ctx.dc.mean())
    ctx.masks = mask_vector(ctx.spec, cfg.zigzag_index, params)
    i, j = ZIGZAG_ORDER[cfg.zigzag_index - 1]
    ctx.t_freq = float(params.sensitivity()[i, j])
    if needs_c:
        ctx.c = fit_ggd(ctx.coeffs).c
    if needs_gamma:
        ctx.gamma = fit_cauchy(ctx.coeffs).gamma
    return ctx


def _embed(ctx: _Context, x: np.ndarray, m: np.ndarray) -> np.ndarray:
    if ctx.sch.embedder == EMBED_ASS:
        return embed_ass(x, ctx.w, ctx.cfg.a, m)
    if ctx.sch.embedder == EMBED_DS_ASS:
        return embed_dsass(x, ctx.w, ctx.cfg.a, m)
    return embed_dscauchy(x, ctx.w, ctx.cfg.a, m, ctx.gamma)


def _detect(ctx: _Context, s: np.ndarray, m: np.ndarray) -> float:
    if ctx.sch.detector == DETECTOR_CORRELATOR:
        return detect_correlator(s, ctx.w)
    if ctx.sch.detector == DETECTOR_GGD:
        return detect_ggd(s, ctx.w, ctx.cfg.a, m, ctx.c)
    return detect_cauchy(s, ctx.w, ctx.gamma)


def _one_trial(ctx: _Context, t: int) -> tuple[float, float]:
    cfg = ctx.cfg
    if cfg.image is None:
        rng = np.random.Generator(np.random.PCG64(derive_seed(cfg.seed, STREAM_SYNTHETIC, t)))
        x = rng.normal(0.0, cfg.synthetic_sigma, cfg.n)
        m = np.full(cfg.n, float(cfg.synthetic_mask))
        idx = None
    else:
        rng = np.random.Generator(np.random.PCG64(derive_seed(cfg.seed, STREAM_PERMUTATION, t)))
        idx = rng.permutation(ctx.total)[: cfg.n]
        x = ctx.coeffs[idx]
        m = ctx.masks[idx]

    stat0 = _detect(ctx, x, m)
    s = _embed(ctx, x, m)

    if cfg.attack.kind == KIND_NONE:
        s_recv = s
        dc_sel = None if idx is None else ctx.dc[idx]
        dc_mean = ctx.dc_mean
    elif cfg.coeff_domain_noise:
        noise_rng = np.random.Generator(
            np.random.PCG64(derive_seed(cfg.seed, STREAM_ATTACK, cfg.attack.seed, t))
        )
        s_recv = s + cfg.attack.noise_sigma * noise_rng.standard_normal(cfg.n)
        dc_sel = None if idx is None else ctx.dc[idx]
        dc_mean = ctx.dc_mean
    else:
        # round trip through the pixel domain so the attack sees an image; the
        # watermarked signal stays real-valued until the attacked image is
        # delivered, where 8-bit quantization belongs
        full = ctx.coeffs.copy()
        full[idx] = s
        spec_w = zigzag_insert(ctx.spec, cfg.zigzag_index, full)
        if cfg.attack.kind == KIND_AWGN:
            delivered = attack_awgn_field(
                block_idct_field(spec_w),
                cfg.attack.noise_sigma,
                derive_seed(cfg.seed, STREAM_ATTACK, cfg.attack.seed, t),
            )
        else:
            delivered = block_idct(quantize_spectrum(spec_w, cfg.attack.quality))
        spec_recv = block_dct(delivered)
        s_recv = zigzag_extract(spec_recv, cfg.zigzag_index)[idx]
        dc_recv = zigzag_extract(spec_recv, 1)
        dc_sel = dc_recv[idx]
        dc_mean = float(dc_recv.mean())

    m_det = m
    if ctx.sch.detector == DETECTOR_GGD and not cfg.mask_side_info and dc_sel is not None:
        m_det = mask_values(dc_sel, s_recv, ctx.t_freq, ctx.mask_params, mean_dc=dc_mean)

    return stat0, _detect(ctx, s_recv, m_det)


_worker_ctx: _Context | None = None


def _init_worker(ctx: _Context) -> None:
    global _worker_ctx
    _worker_ctx = ctx


def _run_span(span: tuple[int, int]) -> list[tuple[float, float]]:
    lo, hi = span
    return [_one_trial(_worker_ctx, t) for t in range(lo, hi)]


def empirical_threshold(h0_stats, p_fa: float, rule: str) -> float:
    """Threshold whose realized H0 rejection rate is nearest the target.

    Sorts |L| (double-sided) or L (single-sided) and picks the order statistic
    exceeded by round(p_fa * trials) samples, clamped to [1, trials - 1], so
    the realized rate sits within one order statistic of p_fa.
    """
    if rule not in RULES:
        raise ValueError(f"unknown rule {rule!r}, expected one of {RULES}")
    if not 0.0 < p_fa < 1.0:
        raise ValueError(f"p_fa must lie in (0, 1), got {p_fa}")
    vals = np.asarray(h0_stats, dtype=np.float64).reshape(-1)
    if vals.size < 2:
        raise ValueError("need at least two H0 statistics to set a threshold")
    trials = vals.size
    if p_fa < 1.0 / trials:
        raise ValueError(
            f"p_fa = {p_fa} is below the 1/{trials} resolution of {trials} trials; "
            f"run at least {int(np.ceil(1.0 / p_fa))} trials"
        )
    if rule == RULE_DOUBLE:
        vals = np.abs(vals)
    exceed = int(np.floor(p_fa * trials + 0.5))
    exceed = min(max(exceed, 1), trials - 1)
    return float(np.sort(vals)[trials - exceed - 1])


def run_roc(cfg: TrialConfig, jobs: int = 1) -> RocCurve:
    """Estimate the ROC of cfg.scheme over cfg.trials permutation trials.

    jobs > 1 runs trials in parallel processes; results are identical to the
    serial run because every trial derives its own randomness and the
    statistics are reduced in trial order.
    """
    if jobs < 1:
        raise ValueError("jobs must be at least 1")
    ctx = _build_context(cfg)
    if jobs == 1 or cfg.trials < 2 * jobs:
        pairs = [_one_trial(ctx, t) for t in range(cfg.trials)]
    else:
        size = -(-cfg.trials // (jobs * 4))
        spans = [(lo, min(lo + size, cfg.trials)) for lo in range(0, cfg.trials, size)]
        pairs = []
        with ProcessPoolExecutor(max_workers=jobs, initializer=_init_worker, initargs=(ctx,)) as ex:
            for chunk in ex.map(_run_span, spans):
                pairs.extend(chunk)
    stats0 = np.array([p[0] for p in pairs])
    stats1 = np.array([p[1] for p in pairs])

    grid = cfg.pfa_grid if cfg.pfa_grid is not None else default_pfa_grid(cfg.trials)
    h1 = np.abs(stats1) if ctx.sch.rule == RULE_DOUBLE else stats1
    p_m = []
    for target in grid:
        psi = empirical_threshold(stats0, target, ctx.sch.rule)
        p_m.append(float(np.mean(h1 <= psi)))
    return RocCurve(tuple(float(p) for p in grid), tuple(p_m), cfg, cfg.trials)


@dataclass(frozen=True)
class ValidationRow:
    """One grid point of the closed-form check."""

    p_fa: float
    formula: float
    empirical: float
    std_error: float

    @property
    def deviation(self) -> float:
        return abs(self.empirical - self.formula)

    def within(self, sigmas: float) -> bool:
        if self.std_error == 0.0:
            return self.empirical == self.formula
        return self.deviation <= sigmas * self.std_error


@dataclass(frozen=True)
class ValidationReport:
    rows: tuple[ValidationRow, ...]
    n: int
    k: float
    sigma: float
    trials: int
    seed: int

    @property
    def max_abs_deviation(self) -> float:
        return max((row.deviation for row in self.rows), default=0.0)

    def passed(self, sigmas: float = 3.0) -> bool:
        return all(row.within(sigmas) for row in self.rows)


def validate_closed_form(
    n: int,
    k: float,
    sigma: float,
    pfa_grid=None,
    trials: int = 100_000,
    seed: int = 0,
) -> ValidationReport:
    """Monte Carlo check of the double-sided additive miss probability.

    Simulates the host projection xbar ~ N(0, sigma^2/n) directly; for fixed
    uniform masks the H1 statistic magnitude is exactly |xbar| + k, so each
    grid point compares the empirical miss rate below the analytic threshold
    against dsass_miss_probability, with the binomial standard error at the
    predicted rate attached for tolerance checks.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if pfa_grid is None:
        pfa_grid = (1e-3, 1e-2, 1e-1)
    rng = np.random.Generator(np.random.PCG64(derive_seed(seed, STREAM_SYNTHETIC)))
    root_n = float(np.sqrt(n))
    h1 = np.abs(rng.normal(0.0, sigma / root_n, trials)) + k
    rows = []
    for p_fa in pfa_grid:
        formula = dsass_miss_probability(p_fa, k, n, sigma)
        psi = sigma / root_n * q_inverse(0.5 * p_fa)
        empirical = float(np.mean(h1 <= psi))
        se = float(np.sqrt(formula * (1.0 - formula) / trials))
        rows.append(ValidationRow(float(p_fa), formula, empirical, se))
    return ValidationReport(tuple(rows), n, k, sigma, trials, seed)


def _image_field(cfg: TrialConfig) -> str:
    return cfg.image if cfg.image is not None else "synthetic"


def export_csv(curves, path) -> None:
    """Write curves as CSV with header scheme,image,attack,mask_mode,a,N,trials,p_fa,p_m.

    Floats are rendered with repr so identical curves always serialize to
    identical bytes.
    """
    if isinstance(curves, RocCurve):
        curves = [curves]
    lines = ["scheme,image,attack,mask_mode,a,N,trials,p_fa,p_m"]
    for curve in curves:
        cfg = curve.config
        prefix = (
            f"{cfg.scheme},{_image_field(cfg)},{cfg.attack.label()},"
            f"{cfg.mask_mode},{cfg.a!r},{cfg.n},{curve.trials}"
        )
        for p_fa, p_m in zip(curve.p_fa, curve.p_m):
            lines.append(f"{prefix},{p_fa!r},{p_m!r}")
    with open(path, "w", newline="\n") as f:
        f.write("\n".join(lines) + "\n")


def export_plot_data(curves, path) -> None:
    """Write whitespace-separated p_fa p_m columns, one block per curve."""
    if isinstance(curves, RocCurve):
        curves = [curves]
    blocks = []
    for curve in curves:
        cfg = curve.config
        rows = [f"# {cfg.scheme} {_image_field(cfg)} {cfg.attack.label()} {cfg.mask_mode}"]
        rows.extend(f"{p_fa!r} {p_m!r}" for p_fa, p_m in zip(curve.p_fa, curve.p_m))
        blocks.append("\n".join(rows))
    with open(path, "w", newline="\n") as f:
        f.write("\n\n".join(blocks) + "\n")
