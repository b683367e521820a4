import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from predvote.dataset import StudyFrame


@pytest.fixture
def linear_frame() -> StudyFrame:
    """Noiseless y = 2 + 3x with a small out-of-sample block."""
    x = np.arange(1.0, 13.0).reshape(-1, 1)
    return StudyFrame(
        x_sample=x[:9],
        y_sample=2.0 + 3.0 * x[:9, 0],
        x_out=x[9:],
        column_names=["x"],
    )


def make_positive_frame(n: int = 60, k: int = 12, seed: int = 0, noise: float = 0.1) -> StudyFrame:
    """Strictly positive low-noise response; safe for every model family."""
    rng = np.random.default_rng(seed)
    x = rng.uniform(0.0, 2.0, size=(n + k, 2))
    eta = 1.0 + 0.5 * x[:, 0] - 0.3 * x[:, 1]
    y = np.exp(eta + noise * rng.standard_normal(n + k))
    return StudyFrame(
        x_sample=x[:n],
        y_sample=y[:n],
        x_out=x[n:],
        column_names=["x1", "x2"],
    )


@pytest.fixture
def positive_frame() -> StudyFrame:
    return make_positive_frame()
