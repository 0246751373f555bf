"""Acceptance checks, one verdict line per criterion.

Every test prints "criterion <label> (<what it checks>): PASS|FAIL" straight
to the terminal before asserting, so a full run always shows the scoreboard.
The Monte Carlo criteria are pinned to seed 2026 and the trial counts below;
they are statements about those runs, not about luck.
"""

import math
import time

import numpy as np
import pytest
from test_blockdct import oracle_dct_block

from dctmark.attacks import AttackSpec
from dctmark.blockdct import block_dct, load_pgm, zigzag_extract
from dctmark.harness import TrialConfig, export_csv, run_roc, validate_closed_form
from dctmark.schemes import (
    detect_cauchy,
    embed_dsass,
    embed_stdm_perceptual,
    generate_watermark,
    lattice_quantize,
    projection,
)
from dctmark.stats import GgdParams, distortion_summary, fit_cauchy, fit_ggd
from dctmark.watson import MaskParams, mask_vector

SEED = 2026
N, SIGMA = 2000, 20.0


def verdict(announce, label, description, ok):
    announce(f"criterion {label} ({description}): {'PASS' if ok else 'FAIL'}")
    assert ok, f"criterion {label} failed"


def pm_at_one_percent(image, scheme, a, mask_mode, trials=10_000):
    cfg = TrialConfig(
        scheme=scheme,
        image=image,
        a=a,
        mask_mode=mask_mode,
        trials=trials,
        seed=SEED,
        pfa_grid=(1e-2,),
    )
    return run_roc(cfg, jobs=4).p_m[0]


def test_criterion_1_closed_form(announce):
    t0 = time.monotonic()
    ok = True
    for r in (0.5, 1.0, 2.0):
        rep = validate_closed_form(
            N,
            r * SIGMA / math.sqrt(N),
            SIGMA,
            pfa_grid=(1e-3, 1e-2, 1e-1),
            trials=100_000,
            seed=SEED,
        )
        ok = ok and rep.passed(3.0)
    # past the threshold the formula's zero branch must be met exactly
    rep = validate_closed_form(
        N, 3.0 * SIGMA / math.sqrt(N), SIGMA, pfa_grid=(1e-2,), trials=100_000, seed=SEED
    )
    row = rep.rows[0]
    ok = ok and row.formula == 0.0 and row.empirical == 0.0 and row.within(3.0)
    ok = ok and (time.monotonic() - t0) < 60.0
    verdict(announce, "1", "closed-form miss probability within 3 binomial SE", ok)


def test_criterion_2_double_sided_identity(announce):
    rng = np.random.Generator(np.random.PCG64(SEED))
    w = generate_watermark(N, 1)
    worst = 0.0
    for _ in range(1000):
        x = rng.normal(0.0, SIGMA, N)
        m = rng.uniform(0.2, 4.0, N)
        a = float(rng.uniform(0.3, 3.0))
        got = abs(projection(embed_dsass(x, w, a, m), w))
        want = abs(projection(x, w)) + a * float(np.mean(m))
        worst = max(worst, abs(got - want))
    verdict(
        announce,
        "2",
        "double-sided statistic magnitude adds host and displacement",
        worst < 1e-9,
    )


def test_criterion_3a_near_gaussian_host(announce, images_dir):
    gravel = str(images_dir / "gravel.pgm")
    pm = {
        scheme: pm_at_one_percent(gravel, scheme, a=1.0, mask_mode="freq-lum")
        for scheme in ("ass-cor", "ds-ass", "briassouli", "ds-cauchy")
    }
    ok = pm["ds-ass"] < pm["ass-cor"] and pm["ds-cauchy"] < pm["briassouli"]
    verdict(
        announce,
        "3a",
        "double-sided variants beat their single-sided counterparts",
        ok,
    )


def test_criterion_3b_contrast_masking_regime(announce, images_dir):
    chelsea = str(images_dir / "chelsea.pgm")
    pm = {
        scheme: pm_at_one_percent(chelsea, scheme, a=0.3, mask_mode="freq-lum-contrast")
        for scheme in ("ass-cor", "hernandez", "briassouli", "ds-ass", "ds-cauchy")
    }
    ok = (
        pm["hernandez"] > pm["ass-cor"]
        and pm["briassouli"] > pm["ass-cor"]
        and pm["ds-ass"] < pm["ds-cauchy"]
    )
    verdict(
        announce,
        "3b",
        "contrast masking flips the model-based detectors below the correlator",
        ok,
    )


def test_criterion_4_estimator_recovery(announce, smooth_host):
    draws = 100_000
    ok = True

    rng = np.random.Generator(np.random.PCG64(SEED))
    ok = ok and abs(fit_ggd(rng.normal(0.0, 1.0, draws)).c - 2.0) <= 0.1

    rng = np.random.Generator(np.random.PCG64(SEED))
    u = rng.random(draws) - 0.5
    b = 1.0 / math.sqrt(2.0)
    ok = ok and abs(fit_ggd(-b * np.sign(u) * np.log1p(-2.0 * np.abs(u))).c - 1.0) <= 0.1

    rng = np.random.Generator(np.random.PCG64(SEED))
    beta = GgdParams(c=0.7, sigma_x=1.0).beta
    mags = rng.gamma(1.0 / 0.7, 1.0, draws) ** (1.0 / 0.7) / beta
    heavy = np.where(rng.random(draws) < 0.5, -mags, mags)
    ok = ok and abs(fit_ggd(heavy).c - 0.7) <= 0.1

    rng = np.random.Generator(np.random.PCG64(SEED))
    cauchy = np.tan(math.pi * (rng.random(draws) - 0.5))
    ok = ok and abs(fit_cauchy(cauchy).gamma - 1.0) <= 0.05

    # the committed smooth host must sit in the documented statistics band
    coeffs = zigzag_extract(block_dct(load_pgm(smooth_host)), 5)
    fit = fit_ggd(coeffs)
    gamma = fit_cauchy(coeffs).gamma
    for got, target in ((fit.c, 0.69), (fit.sigma_x, 19.74), (gamma, 6.69)):
        ok = ok and abs(got - target) <= 0.25 * target

    verdict(announce, "4", "shape, scale and spread estimators recover truth", ok)


def test_criterion_5_structural_invariants(announce, images_dir, rng):
    ok = True

    # balanced binary watermarks for a thousand keys
    for seed in range(1000):
        w = generate_watermark(64, seed)
        if float(np.sum(w)) != 0.0 or not set(np.unique(w)) <= {-1.0, 1.0}:
            ok = False
            break

    # the Cauchy statistic bound holds at any input scale
    w = generate_watermark(256, 1)
    for gamma in (0.5, 2.0):
        for scale in (1e-4, 1.0, 1e5):
            s = scale * rng.standard_cauchy(256)
            if abs(detect_cauchy(s, w, gamma)) > 1.0 / (2.0 * gamma) + 1e-15:
                ok = False

    # displacement-distortion inequality, equality exactly for uniform masks
    for _ in range(1000):
        m = rng.uniform(0.05, 8.0, size=int(rng.integers(2, 300)))
        k, d_w = distortion_summary(m, float(rng.uniform(0.2, 3.0)))
        if k * k > d_w * (1.0 + 1e-12):
            ok = False
    k_u, d_u = distortion_summary(np.full(64, 1.7), 0.9)
    ok = ok and abs(k_u * k_u - d_u) <= 1e-12 * d_u

    # contrast masks never fall below the luminance-only masks, on every host
    for name in ("camera", "chelsea", "gravel", "synthetic"):
        spec = block_dct(load_pgm(images_dir / f"{name}.pgm"))
        lum = mask_vector(spec, 5, MaskParams(mode="freq-lum"))
        con = mask_vector(spec, 5, MaskParams(mode="freq-lum-contrast"))
        if not np.all(con >= lum):
            ok = False

    # transform agrees with the quadruple-loop definition; energy is conserved
    img = rng.integers(0, 256, (160, 400)).astype(np.uint8)  # 1000 blocks
    spec = block_dct(img)
    worst = 0.0
    for bi in range(20):
        for bj in range(50):
            block = img[8 * bi : 8 * bi + 8, 8 * bj : 8 * bj + 8]
            worst = max(worst, float(np.max(np.abs(spec[bi, bj] - oracle_dct_block(block)))))
    ok = ok and worst < 1e-9
    energy_img = float(np.sum(img.astype(np.float64) ** 2))
    energy_spec = float(np.sum(spec**2))
    ok = ok and abs(energy_spec - energy_img) <= 1e-6 * energy_img

    # the quantizer lands on its lattice and never moves more than delta/2
    w = generate_watermark(64, 2)
    for _ in range(200):
        x = rng.normal(0.0, 10.0, 64)
        m = rng.uniform(0.2, 3.0, 64)
        delta = float(rng.uniform(0.5, 5.0))
        s, _ = embed_stdm_perceptual(x, w, m, delta, a_max=1e6)
        target = lattice_quantize(projection(x, w), delta)
        if abs(projection(s, w) - target) > 1e-9:
            ok = False
    for v in rng.uniform(-50.0, 50.0, 1000):
        if abs(lattice_quantize(float(v), 2.0) - v) > 1.0 + 1e-9:
            ok = False
    ok = ok and lattice_quantize(6.0, 2.0) == 7.0

    verdict(announce, "5", "watermark, bound, mask and transform invariants", ok)


def test_criterion_6_attack_robustness(announce, smooth_host):
    attacks = (
        AttackSpec(kind="awgn", noise_sigma=5.0, seed=0),
        AttackSpec(kind="jpeg", quality=50),
    )
    powers = []
    for attack in attacks:
        cfg = TrialConfig(
            scheme="ds-ass",
            image=smooth_host,
            a=1.0,
            mask_mode="freq-lum",
            attack=attack,
            trials=1000,
            seed=SEED,
            pfa_grid=(1e-2,),
        )
        powers.append(1.0 - run_roc(cfg, jobs=4).p_m[0])
    verdict(
        announce,
        "6",
        "power at least 0.95 under pixel noise and quantization",
        all(p >= 0.95 for p in powers),
    )


def test_criterion_7_reproducibility(announce, images_dir, tmp_path):
    cfg = TrialConfig(
        scheme="ds-ass",
        image=str(images_dir / "gravel.pgm"),
        a=1.0,
        trials=500,
        seed=7,
        pfa_grid=(0.05, 0.2),
    )
    serial = run_roc(cfg, jobs=1)
    again = run_roc(cfg, jobs=1)
    parallel = run_roc(cfg, jobs=3)
    paths = []
    for tag, curve in (("serial", serial), ("again", again), ("parallel", parallel)):
        path = tmp_path / f"{tag}.csv"
        export_csv(curve, path)
        paths.append(path.read_bytes())
    ok = serial == again == parallel and paths[0] == paths[1] == paths[2]
    verdict(announce, "7", "identical curves and CSV bytes across runs and jobs", ok)
