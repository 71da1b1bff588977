import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import joint_state, partial_trace_detector
from triality.state import (
    DensityMatrix,
    DetectorGram,
    DetectorVectors,
    PathAmplitudes,
    QuantonDetectorState,
    ValidationError,
    bare_density,
    gram_from_vectors,
    random_detector_vectors,
    random_mixed_densities,
    random_mixed_density,
    random_state,
    random_states,
    reduced_density,
    validate_gram,
)

dims = st.tuples(st.integers(2, 6), st.integers(1, 6), st.integers(0, 2**32 - 1))


def test_gram_orthonormal_pair():
    G = gram_from_vectors(DetectorVectors([[1, 0], [0, 1]]))
    np.testing.assert_array_equal(G.G, np.eye(2))


def test_gram_identical_states():
    G = gram_from_vectors(DetectorVectors([[1, 0], [1, 0]]))
    np.testing.assert_array_equal(G.G, np.ones((2, 2)))


def test_gram_half_overlap():
    r = 1 / np.sqrt(2)
    G = gram_from_vectors(DetectorVectors([[1, 0], [r, r]]))
    assert G.G[0, 1] == pytest.approx(r, abs=1e-15)


def test_gram_is_conjugate_linear_in_first_argument():
    G = gram_from_vectors(DetectorVectors([[1j, 0], [1, 0]]))
    # <d_1|d_2> = conj(i) * 1
    assert G.G[0, 1] == pytest.approx(-1j)


def test_non_normalized_vector_names_index():
    with pytest.raises(ValidationError, match="detector vector 1"):
        gram_from_vectors(DetectorVectors([[1, 0], [1, 1]]))


def test_slightly_off_vector_is_renormalized_with_warning():
    with pytest.warns(UserWarning, match="renormalized"):
        v = DetectorVectors([[1 + 1e-8, 0], [0, 1]])
    assert np.linalg.norm(v.d[0]) == pytest.approx(1, abs=1e-15)


def test_validate_gram_identity():
    assert validate_gram(np.eye(3)) == []


def test_validate_gram_cauchy_schwarz_violation():
    problems = validate_gram([[1, 1.5], [1.5, 1]])
    assert any("modulus" in p for p in problems)
    assert any("semidefinite" in p for p in problems)


def test_validate_gram_uniform_negative_overlap():
    G = np.full((3, 3), -0.6)
    np.fill_diagonal(G, 1)
    problems = validate_gram(G)
    assert len(problems) == 1 and "semidefinite" in problems[0]
    # eigenvalues of the uniform matrix are 1 + 2t and 1 - t
    assert np.linalg.eigvalsh(G).min() == pytest.approx(-0.2)


def test_validate_gram_non_hermitian_and_bad_diagonal():
    problems = validate_gram([[1, 0.5j], [0.5j, 2]])
    assert any("Hermitian" in p for p in problems)
    assert any("diagonal" in p for p in problems)


def test_invalid_gram_rejected_on_construction():
    with pytest.raises(ValidationError):
        DetectorGram([[1, 1.5], [1.5, 1]])


def test_rank_deficient_gram_accepted():
    # tiny negative eigenvalues from the solver must not reject this
    G = np.full((5, 5), 1.0)
    assert validate_gram(G) == []


@pytest.mark.parametrize("c, expected", [
    ([1, 0], np.diag([1, 0])),
    ([1 / np.sqrt(2)] * 2, np.full((2, 2), 0.5)),
    ([np.sqrt(0.8), np.sqrt(0.2)], [[0.8, 0.4], [0.4, 0.2]]),
])
def test_bare_density(c, expected):
    rho = bare_density(PathAmplitudes(c))
    np.testing.assert_allclose(rho.rho, expected, atol=1e-15)
    assert np.linalg.matrix_rank(rho.rho) == 1


def test_amplitude_normalization_policy():
    with pytest.raises(ValidationError):
        PathAmplitudes([1, 1])
    with pytest.warns(UserWarning):
        a = PathAmplitudes([1 + 1e-9, 0])
    assert abs(a.c[0]) == pytest.approx(1, abs=1e-15)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        PathAmplitudes([1 + 1e-14, 0])


def test_amplitude_shape_errors():
    with pytest.raises(ValidationError):
        PathAmplitudes([1])
    with pytest.raises(ValidationError):
        PathAmplitudes([[1, 0]])


def test_zero_amplitudes_allowed():
    state = QuantonDetectorState(PathAmplitudes([1, 0, 0]), DetectorGram(np.eye(3)))
    assert state.n == 3


def test_state_dimension_mismatch():
    with pytest.raises(ValidationError, match="paths"):
        QuantonDetectorState(PathAmplitudes([1, 0]), DetectorGram(np.eye(3)))


def test_reduced_orthogonal_detectors_kill_coherence():
    state = QuantonDetectorState(PathAmplitudes.equal(2), DetectorGram(np.eye(2)))
    np.testing.assert_allclose(reduced_density(state).rho, np.diag([0.5, 0.5]), atol=1e-15)


def test_reduced_identical_detectors_is_bare(asymmetric):
    amps = asymmetric.amplitudes
    state = QuantonDetectorState(amps, DetectorGram(np.ones((2, 2))))
    np.testing.assert_allclose(reduced_density(state).rho, bare_density(amps).rho, atol=1e-14)


def test_reduced_worked_coherence(asymmetric):
    assert abs(reduced_density(asymmetric).rho[0, 1]) == pytest.approx(0.2, abs=1e-15)


def test_reduced_matches_explicit_partial_trace():
    rng = np.random.default_rng(5)
    for n, m in [(2, 1), (3, 2), (4, 4), (5, 3)]:
        c = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        c /= np.linalg.norm(c)
        d = random_detector_vectors(rng, n, m, 1)[0]
        state = QuantonDetectorState.from_vectors(c, d)
        expected = partial_trace_detector(joint_state(c, d), n, m)
        np.testing.assert_allclose(reduced_density(state).rho, expected, atol=1e-14)


def test_random_state_one_dim_detector_full_overlap():
    state = random_state(2, 1, 3)
    assert abs(state.G[0, 1]) == pytest.approx(1, abs=1e-14)


def test_random_state_deterministic():
    a, b = random_state(3, 3, 11), random_state(3, 3, 11)
    np.testing.assert_array_equal(a.c, b.c)
    np.testing.assert_array_equal(a.G, b.G)
    assert not np.array_equal(a.c, random_state(3, 3, 12).c)


def test_random_state_rank_bound():
    state = random_state(4, 2, 8)
    assert np.linalg.matrix_rank(state.G, tol=1e-10) <= 2


def test_random_states_batch_shapes_and_replay():
    c, G = random_states(4, 3, 50, (1, 2))
    assert c.shape == (50, 4) and G.shape == (50, 4, 4)
    c2, G2 = random_states(4, 3, 50, (1, 2))
    np.testing.assert_array_equal(c[17], c2[17])
    np.testing.assert_array_equal(G[17], G2[17])


def test_random_dimension_errors():
    with pytest.raises(ValidationError):
        random_state(1, 2, 0)
    with pytest.raises(ValidationError):
        random_state(2, 0, 0)
    with pytest.raises(ValidationError):
        random_mixed_density(1, 0)


def test_random_mixed_density():
    rho = random_mixed_density(4, 21)
    assert np.trace(rho.rho).real == pytest.approx(1, abs=1e-14)
    assert np.linalg.eigvalsh(rho.rho).min() >= -1e-14
    assert rho.purity < 1 - 1e-3


def test_density_matrix_validation():
    with pytest.raises(ValidationError, match="trace"):
        DensityMatrix(np.eye(2))
    with pytest.raises(ValidationError, match="Hermitian"):
        DensityMatrix([[0.5, 0.1], [0.3, 0.5]])
    with pytest.raises(ValidationError, match="PSD"):
        DensityMatrix([[0.5, 0.9], [0.9, 0.5]])


def test_types_are_immutable(asymmetric):
    with pytest.raises(ValueError):
        asymmetric.c[0] = 0


@settings(max_examples=60, deadline=None)
@given(dims)
def test_reduced_density_invariants(nms):
    n, m, seed = nms
    state = random_state(n, m, seed)
    assert validate_gram(state.G) == []
    rho = reduced_density(state).rho
    assert np.max(np.abs(rho - rho.conj().T)) <= 1e-15
    assert abs(np.trace(rho) - 1) <= 1e-12
    assert np.linalg.eigvalsh(rho).min() >= -1e-10
    # populations are untouched by the detector, bit for bit
    np.testing.assert_array_equal(np.diag(rho), np.diag(bare_density(state.amplitudes).rho))


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 6), st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_gram_from_random_vectors_valid(n, m, seed):
    d = random_detector_vectors(np.random.default_rng(seed), n, m, 1)[0]
    assert validate_gram(gram_from_vectors(DetectorVectors(d)).G) == []


def test_mixed_batch_is_valid():
    rhos = random_mixed_densities(5, 200, 3)
    for rho in rhos[:20]:
        DensityMatrix(rho)
    assert np.all(np.linalg.eigvalsh(rhos).min(axis=-1) >= -1e-12)
