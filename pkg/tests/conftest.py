import os
from pathlib import Path

import numpy as np
import pytest

IMAGES_DIR = Path(__file__).resolve().parent.parent / "images"
IMAGE_NAMES = ("camera", "chelsea", "gravel", "synthetic")


@pytest.fixture(scope="session")
def images_dir() -> Path:
    if not IMAGES_DIR.is_dir():
        pytest.fail(f"test image directory missing: {IMAGES_DIR}")
    return IMAGES_DIR


@pytest.fixture(scope="session")
def synthetic_image(images_dir) -> str:
    return str(images_dir / "synthetic.pgm")


@pytest.fixture(scope="session")
def smooth_host() -> str:
    """Host for the smooth-photograph experiments.

    DCTMARK_LENA can point at a 512x512 Lena PGM to run them on the
    classical host; the committed stand-in is calibrated to the same
    mid-band coefficient statistics.
    """
    override = os.environ.get("DCTMARK_LENA")
    if override:
        if not Path(override).is_file():
            pytest.fail(f"DCTMARK_LENA points at a missing file: {override}")
        return override
    return str(IMAGES_DIR / "synthetic.pgm")


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(99))


@pytest.fixture
def announce(capsys):
    """Print one line straight to the terminal, bypassing capture."""

    def _announce(line: str) -> None:
        with capsys.disabled():
            print(line, flush=True)

    return _announce
