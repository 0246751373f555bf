"""Perceptual spread-spectrum watermarking in the 8x8 block DCT domain.

Embedding shapes the watermark with a visual threshold model, detection runs
correlator, generalized-Gaussian or Cauchy statistics under single- or
double-sided rules, and the harness estimates ROC curves by Monte Carlo over
seeded coefficient permutations.
"""

from .attacks import (
    AttackSpec,
    apply_attack,
    attack_awgn,
    attack_awgn_field,
    attack_jpeg,
    load_quantization_table,
    quantization_steps,
    quantize_spectrum,
)
from .blockdct import (
    ZIGZAG_ORDER,
    PgmError,
    block_dct,
    block_idct,
    block_idct_field,
    coefficient_basis,
    load_pgm,
    psnr,
    quantize_image_preserving,
    save_pgm,
    zigzag_extract,
    zigzag_insert,
)
from .harness import (
    SCHEMES,
    RocCurve,
    TrialConfig,
    ValidationReport,
    ValidationRow,
    default_pfa_grid,
    empirical_threshold,
    export_csv,
    export_plot_data,
    run_roc,
    validate_closed_form,
)
from .schemes import (
    RULE_DOUBLE,
    RULE_SINGLE,
    DetectionResult,
    cauchy_projection,
    decide,
    detect_cauchy,
    detect_correlator,
    detect_ggd,
    embed_ass,
    embed_dsass,
    embed_dscauchy,
    embed_stdm_perceptual,
    generate_watermark,
    lattice_quantize,
    projection,
)
from .seeds import derive_seed, splitmix64
from .stats import (
    CauchyParams,
    FitError,
    GgdParams,
    PerformancePoint,
    distortion_summary,
    dsass_miss_probability,
    fit_cauchy,
    fit_ggd,
    ggd_pdf,
    moment_ratio,
    q_function,
    q_inverse,
)
from .watson import (
    MODE_FREQ_LUM,
    MODE_FREQ_LUM_CONTRAST,
    MaskParams,
    contrast_mask,
    load_sensitivity_table,
    luminance_mask,
    mask_values,
    mask_vector,
)

__version__ = "0.1.0"
