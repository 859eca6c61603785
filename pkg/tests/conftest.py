import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))  # for the oracles helper module


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def make_bonn_dir(root: Path, n_segments: int = 3, n_samples: int = 2604, seed: int = 0):
    """Synthetic two-class segment directory in the plain-text format."""
    rng = np.random.default_rng(seed)
    root.mkdir(parents=True, exist_ok=True)
    for prefix, scale, wobble in (("Z", 50.0, 0.0), ("S", 200.0, 20.0)):
        for i in range(n_segments):
            x = rng.standard_normal(n_samples) * scale
            if wobble:
                x += wobble * np.sin(np.arange(n_samples) * 0.1)
            np.savetxt(root / f"{prefix}{i:03d}.txt", x, fmt="%.4f")
    return root
