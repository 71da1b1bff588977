import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from triality import DetectorGram, PathAmplitudes, QuantonDetectorState


@pytest.fixture
def asymmetric():
    """Populations 0.8/0.2 with detector overlap 0.5."""
    return QuantonDetectorState(
        PathAmplitudes([np.sqrt(0.8), np.sqrt(0.2)]),
        DetectorGram([[1, 0.5], [0.5, 1]]),
    )


@pytest.fixture
def max_entangled_n3():
    return QuantonDetectorState(PathAmplitudes.equal(3), DetectorGram(np.eye(3)))


@pytest.fixture
def disentangled_n3():
    return QuantonDetectorState(PathAmplitudes.equal(3), DetectorGram(np.ones((3, 3))))
