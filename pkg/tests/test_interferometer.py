import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import brute_force_visibility
from triality.interferometer import (
    PhaseConfig,
    coherence_from_pairwise_scans,
    fringe_scan_two_path,
    output_intensity,
    pairwise_scans,
)
from triality.measures import ConsistencyError, coherence
from triality.state import (
    DetectorGram,
    PathAmplitudes,
    QuantonDetectorState,
    bare_density,
    random_state,
    reduced_density,
)

RHO_02 = np.array([[0.5, 0.2], [0.2, 0.5]])


def test_intensity_diagonal_state():
    rho = np.diag([0.1, 0.2, 0.3, 0.4])
    for phases in ([0, 0, 0, 0], [0.3, 1.0, 2.0, -1.0]):
        assert output_intensity(rho, PhaseConfig(phases)) == pytest.approx(0.25, abs=1e-15)


def test_intensity_two_path_values():
    assert output_intensity(RHO_02, [0, 0]) == pytest.approx(0.7, abs=1e-15)
    assert output_intensity(RHO_02, [0, np.pi]) == pytest.approx(0.3, abs=1e-15)


def test_intensity_rejects_non_hermitian():
    with pytest.raises(ConsistencyError):
        output_intensity(np.array([[0.5, 0.2j], [0.2j, 0.5]]), [0, 0])


def test_intensity_phase_count_checked():
    with pytest.raises(ValueError):
        output_intensity(RHO_02, [0, 0, 0])


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 7), st.integers(1, 5), st.integers(0, 2**32 - 1))
def test_intensity_bounds_and_global_phase(n, m, seed):
    rho = reduced_density(random_state(n, m, seed))
    rng = np.random.default_rng(seed)
    phases = rng.uniform(0, 2 * np.pi, n)
    val = output_intensity(rho, phases)
    assert -1e-15 <= val <= 1 + 1e-15
    assert output_intensity(rho, phases + 1.234) == pytest.approx(val, abs=1e-14)


def test_flat_scan_for_incoherent_state():
    scan = fringe_scan_two_path(np.diag([0.3, 0.7]), 64)
    assert scan.visibility == pytest.approx(0, abs=1e-15)
    assert scan.analytic_visibility == 0


def test_full_visibility_for_equal_superposition():
    scan = fringe_scan_two_path(bare_density(PathAmplitudes.equal(2)), 1024)
    assert scan.visibility == pytest.approx(1, abs=1e-12)
    assert scan.analytic_visibility == pytest.approx(1, abs=1e-15)


def test_worked_scenario_visibility(asymmetric):
    rho = reduced_density(asymmetric)
    scan = fringe_scan_two_path(rho, 1024)
    assert scan.analytic_visibility == pytest.approx(0.4, abs=1e-15)
    assert scan.visibility == pytest.approx(0.4, abs=1e-5)
    assert scan.analytic_i_max == pytest.approx(0.7) and scan.analytic_i_min == pytest.approx(0.3)
    assert brute_force_visibility(rho.rho.tolist(), grid=20000) == pytest.approx(0.4, abs=1e-8)


def test_scan_matches_output_intensity():
    rho = reduced_density(random_state(2, 2, 4))
    scan = fringe_scan_two_path(rho, 16)
    for th, val in zip(scan.phase, scan.intensity):
        assert output_intensity(rho, [0, th]) == pytest.approx(val, abs=1e-15)


def test_scan_input_checks():
    with pytest.raises(ValueError):
        fringe_scan_two_path(RHO_02, 4)
    with pytest.raises(ValueError):
        fringe_scan_two_path(np.eye(3) / 3, 64)


@pytest.mark.parametrize("grid", [16, 64, 256, 1024])
def test_grid_visibility_converges(grid):
    rho = reduced_density(random_state(2, 3, 10))
    scan = fringe_scan_two_path(rho, grid)
    # cosine fringe sampled at spacing h misses its peak by at most 1 - cos(h/2)
    h = 2 * np.pi / grid
    assert abs(scan.visibility - scan.analytic_visibility) <= 2 * (1 - np.cos(h / 2)) + 1e-15


def test_pairwise_reconstruction_examples():
    assert coherence_from_pairwise_scans(np.diag([0.2, 0.3, 0.5])) == 0
    rho2 = reduced_density(random_state(2, 2, 1))
    assert coherence_from_pairwise_scans(rho2) == pytest.approx(fringe_scan_two_path(rho2).analytic_visibility, abs=1e-15)
    state = QuantonDetectorState(PathAmplitudes.from_populations([0.5, 0.3, 0.2]), DetectorGram(np.ones((3, 3))))
    expected = np.sqrt(0.15) + np.sqrt(0.10) + np.sqrt(0.06)
    assert coherence_from_pairwise_scans(reduced_density(state)) == pytest.approx(expected, abs=1e-14)
    assert expected == pytest.approx(0.9484750749, abs=1e-10)


def test_pairwise_skips_empty_pairs():
    scans = pairwise_scans(np.diag([1.0, 0.0, 0.0]))
    assert set(scans) == {(0, 1), (0, 2)}


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 8), st.integers(1, 8), st.integers(0, 2**32 - 1))
def test_pairwise_reconstruction_equals_coherence(n, m, seed):
    rho = reduced_density(random_state(n, m, seed))
    assert coherence_from_pairwise_scans(rho) == pytest.approx(coherence(rho), abs=1e-12)
    assert coherence_from_pairwise_scans(rho, analytic=False, grid=1024) == pytest.approx(coherence(rho), abs=1e-4)
