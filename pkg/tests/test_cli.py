"""End-to-end command-line tests, run in process through main(argv).

Exit codes are the contract: 0 success or watermark present, 1 absent or
validation failure, 2 usage and runtime errors.
"""

import filecmp

import numpy as np
import pytest

import dctmark.harness as harness_mod
from dctmark.blockdct import block_dct, load_pgm, save_pgm, zigzag_extract
from dctmark.cli import main, read_sidecar
from dctmark.stats import fit_cauchy, fit_ggd

VALID_SIDECAR = (
    "seed=0\nscheme=ds-ass\na=1.0\nN=2000\nmask_mode=freq-lum\nzigzag_index=5\n"
)


def out_lines(capsys):
    return capsys.readouterr().out.splitlines()


@pytest.fixture
def marked(tmp_path, synthetic_image):
    """Watermarked copy of the synthetic host plus its sidecar path."""
    out = tmp_path / "marked.pgm"
    rc = main(["embed", synthetic_image, "--scheme", "ds-ass", "--a", "1.0",
               "--seed", "0", "--out", str(out)])
    assert rc == 0
    return out, tmp_path / "marked.pgm.meta"


class TestEstimate:
    def test_prints_the_library_fits(self, synthetic_image, capsys):
        assert main(["estimate", synthetic_image]) == 0
        got = dict(line.split("=", 1) for line in out_lines(capsys))
        coeffs = zigzag_extract(block_dct(load_pgm(synthetic_image)), 5)
        assert got["c"] == repr(fit_ggd(coeffs).c)
        assert got["sigma_x"] == repr(fit_ggd(coeffs).sigma_x)
        assert got["gamma"] == repr(fit_cauchy(coeffs).gamma)

    def test_constant_image_is_a_runtime_error(self, tmp_path, capsys):
        flat = tmp_path / "flat.pgm"
        save_pgm(np.full((64, 64), 128, dtype=np.uint8), flat)
        assert main(["estimate", str(flat)]) == 2
        assert "error:" in capsys.readouterr().err

    def test_missing_file(self, capsys):
        assert main(["estimate", "/no/such/file.pgm"]) == 2


class TestEmbed:
    def test_zero_strength_leaves_the_file_byte_identical(
        self, tmp_path, synthetic_image, capsys
    ):
        out = tmp_path / "zero.pgm"
        assert main(["embed", synthetic_image, "--a", "0.0", "--out", str(out)]) == 0
        assert filecmp.cmp(synthetic_image, out, shallow=False)
        lines = out_lines(capsys)
        assert lines[0] == "psnr_db=inf"
        assert lines[1] == f"sidecar={out}.meta"

    def test_sidecar_round_trips(self, marked):
        _, sidecar = marked
        meta = read_sidecar(sidecar)
        assert meta == {
            "seed": 0,
            "scheme": "ds-ass",
            "a": 1.0,
            "N": 2000,
            "mask_mode": "freq-lum",
            "zigzag_index": 5,
        }

    def test_distortion_grows_with_strength(self, tmp_path, synthetic_image, capsys):
        psnrs = {}
        for a in ("0.5", "2.0"):
            out = tmp_path / f"a{a}.pgm"
            assert main(["embed", synthetic_image, "--a", a, "--out", str(out)]) == 0
            psnrs[a] = float(out_lines(capsys)[0].split("=", 1)[1])
        assert psnrs["0.5"] > psnrs["2.0"] > 40.0

    def test_oversized_subsequence(self, tmp_path, synthetic_image, capsys):
        out = tmp_path / "big.pgm"
        assert main(["embed", synthetic_image, "--N", "5000", "--out", str(out)]) == 2
        assert "exceeds" in capsys.readouterr().err


class TestDetect:
    def test_marked_image_is_found(self, marked, capsys):
        img, sidecar = marked
        rc = main(["detect", str(img), str(sidecar), "--calibration-trials", "500"])
        assert rc == 0
        lines = out_lines(capsys)
        assert lines[0].startswith("statistic=")
        assert lines[1].startswith("threshold=")
        assert lines[2] == "decision=H1"

    def test_clean_image_is_not(self, marked, synthetic_image, capsys):
        _, sidecar = marked
        rc = main(["detect", synthetic_image, str(sidecar), "--calibration-trials", "500"])
        assert rc == 1
        assert out_lines(capsys)[2] == "decision=H0"

    def test_wrong_key_misses(self, marked, tmp_path, capsys):
        img, sidecar = marked
        forged = tmp_path / "forged.meta"
        forged.write_text(sidecar.read_text().replace("seed=0", "seed=999"))
        rc = main(["detect", str(img), str(forged), "--calibration-trials", "500"])
        assert rc == 1

    def test_explicit_threshold_skips_calibration(self, marked):
        img, sidecar = marked
        assert main(["detect", str(img), str(sidecar), "--psi", "0.0"]) == 0
        assert main(["detect", str(img), str(sidecar), "--psi", "1e9"]) == 1

    def test_threshold_flags_are_mutually_exclusive(self, marked, capsys):
        img, sidecar = marked
        rc = main(["detect", str(img), str(sidecar), "--psi", "1.0", "--pfa", "0.01"])
        assert rc == 2

    def test_detector_override_runs(self, marked, capsys):
        img, sidecar = marked
        rc = main(["detect", str(img), str(sidecar), "--detector", "cauchy",
                   "--calibration-trials", "500"])
        assert rc in (0, 1)
        assert out_lines(capsys)[2].startswith("decision=")

    def test_survives_pixel_noise(self, marked, tmp_path):
        img, sidecar = marked
        noisy = tmp_path / "noisy.pgm"
        assert main(["attack", str(img), "--kind", "awgn", "--sigma", "5.0",
                     "--out", str(noisy)]) == 0
        assert main(["detect", str(noisy), str(sidecar), "--calibration-trials", "500"]) == 0

    def test_survives_jpeg_quantization(self, marked, tmp_path):
        img, sidecar = marked
        squashed = tmp_path / "squashed.pgm"
        assert main(["attack", str(img), "--kind", "jpeg", "--quality", "50",
                     "--out", str(squashed)]) == 0
        assert main(["detect", str(squashed), str(sidecar), "--calibration-trials", "500"]) == 0


class TestSidecarStrictness:
    @pytest.mark.parametrize(
        "mutate",
        [
            lambda t: t.replace("a=1.0\n", ""),  # missing key
            lambda t: t + "seed=1\n",  # duplicate
            lambda t: t + "color=blue\n",  # unknown key
            lambda t: t.replace("a=1.0", "a 1.0"),  # no separator
            lambda t: t.replace("a=1.0", "a=strong"),  # bad float
            lambda t: t.replace("N=2000", "N=many"),  # bad int
            lambda t: t.replace("scheme=ds-ass", "scheme=stego"),  # bad scheme
            lambda t: t.replace("mask_mode=freq-lum", "mask_mode=loud"),
        ],
        ids=[
            "missing", "duplicate", "unknown", "no-separator",
            "bad-float", "bad-int", "bad-scheme", "bad-mask-mode",
        ],
    )
    def test_corrupt_sidecars_are_usage_errors(
        self, tmp_path, synthetic_image, capsys, mutate
    ):
        sidecar = tmp_path / "bad.meta"
        sidecar.write_text(mutate(VALID_SIDECAR))
        assert main(["detect", synthetic_image, str(sidecar)]) == 2
        assert "error:" in capsys.readouterr().err

    def test_blank_lines_are_tolerated(self, tmp_path):
        sidecar = tmp_path / "spaced.meta"
        sidecar.write_text(VALID_SIDECAR.replace("a=1.0\n", "a=1.0\n\n"))
        assert read_sidecar(sidecar)["a"] == 1.0


class TestAttackVerb:
    def test_awgn_writes_and_reports(self, tmp_path, synthetic_image, capsys):
        out = tmp_path / "noisy.pgm"
        rc = main(["attack", synthetic_image, "--kind", "awgn", "--sigma", "5.0",
                   "--seed", "3", "--out", str(out)])
        assert rc == 0
        assert out_lines(capsys)[0].startswith("psnr_db=")
        assert load_pgm(out).shape == (512, 512)

    def test_attack_seed_is_respected(self, tmp_path, synthetic_image):
        a, b, c = (tmp_path / n for n in ("a.pgm", "b.pgm", "c.pgm"))
        for path, seed in ((a, "3"), (b, "3"), (c, "4")):
            main(["attack", synthetic_image, "--kind", "awgn", "--sigma", "5.0",
                  "--seed", seed, "--out", str(path)])
        assert filecmp.cmp(a, b, shallow=False)
        assert not filecmp.cmp(a, c, shallow=False)

    def test_none_kind_copies(self, tmp_path, synthetic_image):
        out = tmp_path / "copy.pgm"
        assert main(["attack", synthetic_image, "--kind", "none", "--out", str(out)]) == 0
        assert filecmp.cmp(synthetic_image, out, shallow=False)

    def test_unknown_kind(self, tmp_path, synthetic_image):
        out = tmp_path / "x.pgm"
        assert main(["attack", synthetic_image, "--kind", "shear", "--out", str(out)]) == 2


ROC_ARGS = [
    "roc", "--scheme", "ds-ass", "ass-cor", "--N", "200", "--a", "2.0",
    "--trials", "60", "--synthetic-sigma", "20", "--pfa-grid", "0.1,0.4",
]


class TestRocVerb:
    def test_writes_csv_figure_and_plot_data(self, tmp_path, capsys):
        csv = tmp_path / "curves.csv"
        dat = tmp_path / "curves.dat"
        rc = main(ROC_ARGS + ["--out", str(csv), "--plot-data", str(dat)])
        assert rc == 0
        lines = out_lines(capsys)
        assert lines[0] == f"csv={csv}"
        assert lines[1] == f"plot_data={dat}"
        assert lines[2] == f"figure={tmp_path / 'curves.png'}"
        assert csv.read_text().startswith("scheme,image,attack,mask_mode,a,N,trials,p_fa,p_m\n")
        assert len(csv.read_text().splitlines()) == 5
        assert (tmp_path / "curves.png").read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
        assert np.loadtxt(dat).shape == (4, 2)

    def test_no_plot_skips_the_figure(self, tmp_path):
        csv = tmp_path / "curves.csv"
        assert main(ROC_ARGS + ["--out", str(csv), "--no-plot"]) == 0
        assert not (tmp_path / "curves.png").exists()

    def test_csv_bytes_are_reproducible(self, tmp_path):
        c1, c2 = tmp_path / "one.csv", tmp_path / "two.csv"
        main(ROC_ARGS + ["--out", str(c1), "--no-plot"])
        main(ROC_ARGS + ["--out", str(c2), "--no-plot"])
        assert c1.read_bytes() == c2.read_bytes()

    def test_resolution_guard(self, tmp_path, capsys):
        csv = tmp_path / "x.csv"
        rc = main(["roc", "--scheme", "ds-ass", "--N", "200", "--trials", "50",
                   "--synthetic-sigma", "20", "--pfa-grid", "1e-4",
                   "--out", str(csv), "--no-plot"])
        assert rc == 2
        assert "resolution" in capsys.readouterr().err

    def test_malformed_grid(self, tmp_path, capsys):
        rc = main(["roc", "--scheme", "ds-ass", "--synthetic-sigma", "20",
                   "--trials", "20", "--pfa-grid", "0.1,huge",
                   "--out", str(tmp_path / "x.csv"), "--no-plot"])
        assert rc == 2
        assert "malformed" in capsys.readouterr().err

    def test_synthetic_host_requires_sigma(self, tmp_path, capsys):
        rc = main(["roc", "--scheme", "ds-ass", "--trials", "20",
                   "--out", str(tmp_path / "x.csv"), "--no-plot"])
        assert rc == 2
        assert "synthetic_sigma" in capsys.readouterr().err


class TestValidateVerb:
    def test_defaults_pass(self, capsys):
        assert main(["validate"]) == 0
        lines = out_lines(capsys)
        assert lines[-1] == "result=PASS"
        assert lines[0].startswith("p_fa=0.001 formula=")
        assert any(line.startswith("max_abs_deviation=") for line in lines)

    def test_wrong_formula_fails(self, capsys, monkeypatch):
        # negative control: flip the closed form and the Monte Carlo check
        # must reject it
        real = harness_mod.dsass_miss_probability
        monkeypatch.setattr(
            harness_mod,
            "dsass_miss_probability",
            lambda p_fa, k, n, sigma: 1.0 - real(p_fa, k, n, sigma),
        )
        assert main(["validate"]) == 1
        assert out_lines(capsys)[-1] == "result=FAIL"

    def test_figure_option(self, tmp_path, capsys):
        fig = tmp_path / "val.png"
        assert main(["validate", "--trials", "2000", "--plot", str(fig)]) == 0
        assert fig.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
        assert f"figure={fig}" in capsys.readouterr().out


class TestUsage:
    def test_no_arguments(self, capsys):
        assert main([]) == 2

    def test_unknown_verb(self, capsys):
        assert main(["transmogrify"]) == 2

    def test_unknown_flag(self, synthetic_image, capsys):
        assert main(["estimate", synthetic_image, "--loud"]) == 2

    def test_missing_required_output(self, synthetic_image, capsys):
        assert main(["embed", synthetic_image]) == 2

    def test_help_exits_zero(self, capsys):
        assert main(["--help"]) == 0
        assert "estimate" in capsys.readouterr().out
