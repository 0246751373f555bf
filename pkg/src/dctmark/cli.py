"""Command-line frontend.

Verbs: estimate (fit host statistics), embed, detect, attack, roc (Monte
Carlo benchmark to CSV and figure), validate (closed-form miss probability
check). Exit codes: 0 success (for detect: watermark present), 1 watermark
absent or validation failure, 2 usage or runtime error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .attacks import ATTACK_KINDS, AttackSpec, apply_attack
from .blockdct import (
    ZIGZAG_ORDER,
    block_dct,
    load_pgm,
    psnr,
    quantize_image_preserving,
    save_pgm,
    zigzag_extract,
    zigzag_insert,
)
from .harness import (
    DETECTOR_CAUCHY,
    DETECTOR_CORRELATOR,
    DETECTOR_GGD,
    DETECTORS,
    EMBED_ASS,
    EMBED_DS_ASS,
    SCHEMES,
    STREAM_PERMUTATION,
    STREAM_WATERMARK,
    TrialConfig,
    empirical_threshold,
    export_csv,
    export_plot_data,
    run_roc,
    validate_closed_form,
)
from .schemes import (
    H1,
    decide,
    detect_cauchy,
    detect_correlator,
    detect_ggd,
    embed_ass,
    embed_dsass,
    embed_dscauchy,
    generate_watermark,
)
from .seeds import derive_seed
from .stats import fit_cauchy, fit_ggd
from .watson import MASK_MODES, MODE_FREQ_LUM, MaskParams, mask_values, mask_vector

# calibration draws live far from the harness streams in the derivation tree
STREAM_CALIBRATION = 1000

SIDECAR_KEYS = ("seed", "scheme", "a", "N", "mask_mode", "zigzag_index")


def write_sidecar(path, seed: int, scheme: str, a: float, n: int, mask_mode: str,
                  zigzag_index: int) -> None:
    with open(path, "w", newline="\n") as f:
        f.write(
            f"seed={seed}\nscheme={scheme}\na={a!r}\nN={n}\n"
            f"mask_mode={mask_mode}\nzigzag_index={zigzag_index}\n"
        )


def read_sidecar(path) -> dict:
    """Parse a key=value sidecar; every key required, none unknown."""
    raw = {}
    with open(path, "r") as f:
        for lineno, line in enumerate(f, 1):
            line = line.strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {line!r}")
            if key in raw:
                raise ValueError(f"{path}:{lineno}: duplicate key {key!r}")
            if key not in SIDECAR_KEYS:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            raw[key] = value
    missing = [k for k in SIDECAR_KEYS if k not in raw]
    if missing:
        raise ValueError(f"{path}: missing sidecar keys {missing}")
    try:
        meta = {
            "seed": int(raw["seed"]),
            "scheme": raw["scheme"],
            "a": float(raw["a"]),
            "N": int(raw["N"]),
            "mask_mode": raw["mask_mode"],
            "zigzag_index": int(raw["zigzag_index"]),
        }
    except ValueError as exc:
        raise ValueError(f"{path}: malformed sidecar value: {exc}") from None
    if meta["scheme"] not in SCHEMES:
        raise ValueError(f"{path}: unknown scheme {meta['scheme']!r}")
    if meta["mask_mode"] not in MASK_MODES:
        raise ValueError(f"{path}: unknown mask mode {meta['mask_mode']!r}")
    return meta


def _host(image_path, zigzag_index: int):
    img = load_pgm(image_path)
    spec = block_dct(img)
    return img, spec, zigzag_extract(spec, zigzag_index), zigzag_extract(spec, 1)


def _permuted_indices(seed: int, total: int, n: int) -> np.ndarray:
    rng = np.random.Generator(np.random.PCG64(derive_seed(seed, STREAM_PERMUTATION)))
    return rng.permutation(total)[:n]


def cmd_estimate(args) -> int:
    _, _, coeffs, _ = _host(args.image, args.zigzag_index)
    ggd = fit_ggd(coeffs)
    cauchy = fit_cauchy(coeffs)
    print(f"c={ggd.c!r}")
    print(f"sigma_x={ggd.sigma_x!r}")
    print(f"gamma={cauchy.gamma!r}")
    return 0


def cmd_embed(args) -> int:
    img, spec, coeffs, _ = _host(args.image, args.zigzag_index)
    if args.n > coeffs.size:
        raise ValueError(f"N = {args.n} exceeds the {coeffs.size} blocks of {args.image}")
    params = MaskParams(mode=args.mask_mode)
    masks = mask_vector(spec, args.zigzag_index, params)
    idx = _permuted_indices(args.seed, coeffs.size, args.n)
    x = coeffs[idx]
    m = masks[idx]
    w = generate_watermark(args.n, derive_seed(args.seed, STREAM_WATERMARK))
    embedder = SCHEMES[args.scheme].embedder
    if embedder == EMBED_ASS:
        s = embed_ass(x, w, args.a, m)
    elif embedder == EMBED_DS_ASS:
        s = embed_dsass(x, w, args.a, m)
    else:
        s = embed_dscauchy(x, w, args.a, m, fit_cauchy(coeffs).gamma)
    full = coeffs.copy()
    full[idx] = s
    out_img = quantize_image_preserving(zigzag_insert(spec, args.zigzag_index, full),
                                        args.zigzag_index)
    save_pgm(out_img, args.out)
    sidecar = args.out + ".meta"
    write_sidecar(sidecar, args.seed, args.scheme, args.a, args.n, args.mask_mode,
                  args.zigzag_index)
    print(f"psnr_db={psnr(img, out_img)!r}")
    print(f"sidecar={sidecar}")
    return 0


def cmd_detect(args) -> int:
    meta = read_sidecar(args.sidecar)
    _, spec, coeffs, dc = _host(args.image, meta["zigzag_index"])
    n = meta["N"]
    if n > coeffs.size:
        raise ValueError(
            f"sidecar N = {n} exceeds the {coeffs.size} blocks of {args.image}; "
            "sidecar does not match this image"
        )
    scheme = SCHEMES[meta["scheme"]]
    detector = args.detector if args.detector is not None else scheme.detector
    rule = scheme.rule

    c = fit_ggd(coeffs).c if detector == DETECTOR_GGD else None
    gamma = fit_cauchy(coeffs).gamma if detector == DETECTOR_CAUCHY else None
    params = MaskParams(mode=meta["mask_mode"])
    i, j = ZIGZAG_ORDER[meta["zigzag_index"] - 1]
    t_freq = float(params.sensitivity()[i, j])
    dc_mean = float(dc.mean())

    def statistic(vec: np.ndarray, wm: np.ndarray, sel: np.ndarray) -> float:
        if detector == DETECTOR_CORRELATOR:
            return detect_correlator(vec, wm)
        if detector == DETECTOR_GGD:
            m_det = mask_values(dc[sel], vec, t_freq, params, mean_dc=dc_mean)
            return detect_ggd(vec, wm, meta["a"], m_det, c)
        return detect_cauchy(vec, wm, gamma)

    idx = _permuted_indices(meta["seed"], coeffs.size, n)
    w = generate_watermark(n, derive_seed(meta["seed"], STREAM_WATERMARK))
    stat = statistic(coeffs[idx], w, idx)

    if args.psi is not None:
        psi = args.psi
    else:
        # null population: the same image probed with independent keys
        h0 = np.empty(args.calibration_trials)
        for trial in range(args.calibration_trials):
            key = derive_seed(meta["seed"], STREAM_CALIBRATION, trial)
            w_t = generate_watermark(n, derive_seed(key, STREAM_WATERMARK))
            idx_t = _permuted_indices(key, coeffs.size, n)
            h0[trial] = statistic(coeffs[idx_t], w_t, idx_t)
        psi = empirical_threshold(h0, args.pfa, rule)

    result = decide(stat, psi, rule)
    print(f"statistic={result.statistic!r}")
    print(f"threshold={result.threshold!r}")
    print(f"decision={result.decision}")
    return 0 if result.decision == H1 else 1


def cmd_attack(args) -> int:
    img = load_pgm(args.image)
    spec = AttackSpec(kind=args.kind, noise_sigma=args.sigma, quality=args.quality,
                      seed=args.seed)
    out = apply_attack(img, spec)
    save_pgm(out, args.out)
    print(f"psnr_db={psnr(img, out)!r}")
    return 0


def _parse_grid(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(tok) for tok in text.split(",") if tok.strip())
    except ValueError as exc:
        raise ValueError(f"malformed p_fa grid {text!r}: {exc}") from None


def cmd_roc(args) -> int:
    attack = AttackSpec(kind=args.attack, noise_sigma=args.noise_sigma,
                        quality=args.quality)
    grid = _parse_grid(args.pfa_grid) if args.pfa_grid is not None else None
    curves = []
    for scheme in args.scheme:
        cfg = TrialConfig(
            scheme=scheme,
            image=args.image,
            zigzag_index=args.zigzag_index,
            n=args.n,
            a=args.a,
            mask_mode=args.mask_mode,
            attack=attack,
            trials=args.trials,
            seed=args.seed,
            pfa_grid=grid,
            mask_side_info=args.mask_side_info,
            coeff_domain_noise=args.coeff_domain_noise,
            synthetic_sigma=args.synthetic_sigma,
            synthetic_mask=args.synthetic_mask,
        )
        curves.append(run_roc(cfg, jobs=args.jobs))
    export_csv(curves, args.out)
    print(f"csv={args.out}")
    if args.plot_data is not None:
        export_plot_data(curves, args.plot_data)
        print(f"plot_data={args.plot_data}")
    if not args.no_plot:
        from .report import save_roc_figure

        figure = str(Path(args.out).with_suffix(".png"))
        save_roc_figure(curves, figure)
        print(f"figure={figure}")
    return 0


def cmd_validate(args) -> int:
    grid = _parse_grid(args.pfa_grid) if args.pfa_grid is not None else None
    report = validate_closed_form(args.n, args.k, args.sigma, grid, args.trials,
                                  args.seed)
    for row in report.rows:
        print(
            f"p_fa={row.p_fa!r} formula={row.formula!r} "
            f"empirical={row.empirical!r} std_error={row.std_error!r}"
        )
    print(f"max_abs_deviation={report.max_abs_deviation!r}")
    if args.plot is not None:
        from .report import save_validation_figure

        save_validation_figure(report, args.plot)
        print(f"figure={args.plot}")
    passed = report.passed(args.sigmas)
    print(f"result={'PASS' if passed else 'FAIL'}")
    return 0 if passed else 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dctmark",
        description="Perceptual spread-spectrum watermarking in the block DCT domain.",
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    est = sub.add_parser("estimate", help="fit GGD and Cauchy host statistics")
    est.add_argument("image", help="PGM host image")
    est.add_argument("--zigzag-index", type=int, default=5)
    est.set_defaults(func=cmd_estimate)

    emb = sub.add_parser("embed", help="embed a watermark, write image plus sidecar")
    emb.add_argument("image", help="PGM host image")
    emb.add_argument("--scheme", choices=sorted(SCHEMES), default="ds-ass")
    emb.add_argument("--a", type=float, default=1.0, help="embedding strength")
    emb.add_argument("--N", dest="n", type=int, default=2000,
                     help="watermarked subsequence length")
    emb.add_argument("--seed", type=int, default=0)
    emb.add_argument("--mask-mode", choices=MASK_MODES, default=MODE_FREQ_LUM)
    emb.add_argument("--zigzag-index", type=int, default=5)
    emb.add_argument("--out", required=True, help="output PGM path")
    emb.set_defaults(func=cmd_embed)

    det = sub.add_parser("detect", help="test an image for the sidecar's watermark")
    det.add_argument("image", help="PGM image under test")
    det.add_argument("sidecar", help="sidecar written by embed")
    det.add_argument("--detector", choices=DETECTORS, default=None,
                     help="override the scheme's default detector statistic")
    group = det.add_mutually_exclusive_group()
    group.add_argument("--psi", type=float, default=None, help="explicit threshold")
    group.add_argument("--pfa", type=float, default=0.01,
                       help="calibrate the threshold to this false-alarm rate")
    det.add_argument("--calibration-trials", type=int, default=2000)
    det.set_defaults(func=cmd_detect)

    att = sub.add_parser("attack", help="apply a channel attack to an image")
    att.add_argument("image", help="PGM input image")
    att.add_argument("--kind", choices=ATTACK_KINDS, required=True)
    att.add_argument("--sigma", type=float, default=5.0, help="awgn noise std dev")
    att.add_argument("--quality", type=int, default=50, help="jpeg quality factor")
    att.add_argument("--seed", type=int, default=0)
    att.add_argument("--out", required=True, help="output PGM path")
    att.set_defaults(func=cmd_attack)

    roc = sub.add_parser("roc", help="Monte Carlo ROC benchmark to CSV and figure")
    roc.add_argument("--scheme", nargs="+", choices=sorted(SCHEMES), required=True)
    roc.add_argument("--image", default=None, help="PGM host; omit for a synthetic host")
    roc.add_argument("--zigzag-index", type=int, default=5)
    roc.add_argument("--N", dest="n", type=int, default=2000)
    roc.add_argument("--a", type=float, default=1.0)
    roc.add_argument("--mask-mode", choices=MASK_MODES, default=MODE_FREQ_LUM)
    roc.add_argument("--attack", choices=ATTACK_KINDS, default="none")
    roc.add_argument("--noise-sigma", type=float, default=0.0, help="awgn std dev")
    roc.add_argument("--quality", type=int, default=50, help="jpeg quality factor")
    roc.add_argument("--trials", type=int, default=10_000)
    roc.add_argument("--seed", type=int, default=0)
    roc.add_argument("--pfa-grid", default=None,
                     help="comma-separated false-alarm targets, e.g. 1e-3,1e-2,0.1")
    roc.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    roc.add_argument("--mask-side-info", action="store_true",
                     help="give the detector the embedding-time masks")
    roc.add_argument("--coeff-domain-noise", action="store_true",
                     help="add awgn to the coefficients instead of the pixels")
    roc.add_argument("--synthetic-sigma", type=float, default=None,
                     help="std dev of the synthetic Gaussian host (with no --image)")
    roc.add_argument("--synthetic-mask", type=float, default=1.0,
                     help="uniform mask value for the synthetic host")
    roc.add_argument("--out", required=True, help="output CSV path")
    roc.add_argument("--plot-data", default=None,
                     help="also write whitespace-separated p_fa p_m columns here")
    roc.add_argument("--no-plot", action="store_true",
                     help="skip the PNG figure next to the CSV")
    roc.set_defaults(func=cmd_roc)

    val = sub.add_parser("validate", help="check the closed-form miss probability")
    val.add_argument("--N", dest="n", type=int, default=2000)
    val.add_argument("--k", type=float, default=0.447, help="mean displacement")
    val.add_argument("--sigma", type=float, default=20.0, help="host std dev")
    val.add_argument("--pfa-grid", default=None,
                     help="comma-separated false-alarm targets")
    val.add_argument("--trials", type=int, default=100_000)
    val.add_argument("--seed", type=int, default=0)
    val.add_argument("--sigmas", type=float, default=3.0,
                     help="binomial standard errors allowed per grid point")
    val.add_argument("--plot", default=None, help="write a comparison figure here")
    val.set_defaults(func=cmd_validate)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code
        return code if isinstance(code, int) else (0 if code is None else 2)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
