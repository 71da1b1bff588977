"""Quanton/path-detector states and their density matrices.

A pure joint state ``sum_k c_k |psi_k>|d_k>`` is stored as the amplitude
vector ``c`` together with the detector Gram matrix ``G[i, j] = <d_i|d_j>``.
Every quantity computed downstream depends on the detector states only
through ``G``, so detector vectors are reduced to their Gram matrix on entry.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

NORM_TOL = 1e-12
RENORM_TOL = 1e-6
PSD_TOL = 1e-10
HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-12

Seed = Union[int, Sequence[int], None]


class ValidationError(ValueError):
    """An input violates a state invariant."""


def _renormalize(vec: np.ndarray, what: str) -> np.ndarray:
    """Apply the normalization policy to a single vector."""
    norm_sq = float(np.vdot(vec, vec).real)
    err = abs(norm_sq - 1.0)
    if err <= NORM_TOL:
        return vec
    if err <= RENORM_TOL:
        warnings.warn(f"{what}: squared norm {norm_sq!r} renormalized", stacklevel=3)
        return vec / np.sqrt(norm_sq)
    raise ValidationError(f"{what}: squared norm {norm_sq!r} is not 1")


@dataclass(frozen=True, eq=False)
class PathAmplitudes:
    """Complex path amplitudes ``c_k``; ``|c_k|**2`` is the path population."""

    c: np.ndarray

    def __post_init__(self):
        c = np.array(self.c, dtype=np.complex128)
        if c.ndim != 1:
            raise ValidationError(f"amplitudes must be a vector, got shape {c.shape}")
        if c.size < 2:
            raise ValidationError(f"need at least 2 paths, got {c.size}")
        if not np.all(np.isfinite(c)):
            raise ValidationError("amplitudes contain non-finite entries")
        c = _renormalize(c, "amplitudes")
        c.setflags(write=False)
        object.__setattr__(self, "c", c)

    @property
    def n(self) -> int:
        return self.c.size

    @property
    def populations(self) -> np.ndarray:
        return populations_array(self.c)

    @classmethod
    def equal(cls, n: int) -> "PathAmplitudes":
        return cls(np.full(n, 1 / np.sqrt(n)))

    @classmethod
    def from_populations(cls, probs, phases=None) -> "PathAmplitudes":
        probs = np.asarray(probs, dtype=float)
        phases = np.zeros_like(probs) if phases is None else np.asarray(phases, dtype=float)
        return cls(np.sqrt(probs) * np.exp(1j * phases))


def validate_gram(G) -> list[str]:
    """Return the list of Gram-matrix invariants violated by ``G``.

    An empty list means ``G`` is a valid detector Gram matrix: Hermitian,
    unit diagonal, off-diagonal moduli at most 1 and positive semidefinite
    up to an eigenvalue floor of ``-PSD_TOL``.
    """
    G = np.asarray(G, dtype=np.complex128)
    if G.ndim != 2 or G.shape[0] != G.shape[1]:
        return [f"not square: shape {G.shape}"]
    if not np.all(np.isfinite(G)):
        return ["non-finite entries"]
    problems = []
    herm_err = float(np.max(np.abs(G - G.conj().T)))
    if herm_err > HERMITIAN_TOL:
        problems.append(f"not Hermitian (max |G - G^H| = {herm_err:.3g})")
    diag_err = float(np.max(np.abs(np.diag(G) - 1.0)))
    if diag_err > HERMITIAN_TOL:
        problems.append(f"diagonal not unit (max deviation {diag_err:.3g})")
    max_mod = float(np.max(np.abs(G)))
    if max_mod > 1.0 + HERMITIAN_TOL:
        problems.append(f"entry modulus exceeds 1 (max {max_mod:.6g})")
    # eigvalsh reads only one triangle, so symmetrize first
    min_eig = float(np.linalg.eigvalsh((G + G.conj().T) / 2).min())
    if min_eig < -PSD_TOL:
        problems.append(f"not positive semidefinite (min eigenvalue {min_eig:.6g})")
    return problems


@dataclass(frozen=True, eq=False)
class DetectorGram:
    """Overlap matrix ``G[i, j] = <d_i|d_j>`` of the detector states."""

    G: np.ndarray

    def __post_init__(self):
        G = np.array(self.G, dtype=np.complex128)
        problems = validate_gram(G)
        if problems:
            raise ValidationError("invalid detector Gram matrix: " + "; ".join(problems))
        G.setflags(write=False)
        object.__setattr__(self, "G", G)

    @property
    def n(self) -> int:
        return self.G.shape[0]

    @classmethod
    def uniform(cls, n: int, t: float) -> "DetectorGram":
        """All off-diagonal overlaps equal to ``t``; PSD for ``-1/(n-1) <= t <= 1``."""
        G = np.full((n, n), t, dtype=np.complex128)
        np.fill_diagonal(G, 1.0)
        return cls(G)


@dataclass(frozen=True, eq=False)
class DetectorVectors:
    """Explicit detector states, one row per path, each of length ``m``."""

    d: np.ndarray

    def __post_init__(self):
        d = np.array(self.d, dtype=np.complex128)
        if d.ndim != 2 or d.shape[0] < 2 or d.shape[1] < 1:
            raise ValidationError(f"detector vectors must be an (n>=2, m>=1) array, got shape {d.shape}")
        rows = [_renormalize(row, f"detector vector {i}") for i, row in enumerate(d)]
        d = np.array(rows)
        d.setflags(write=False)
        object.__setattr__(self, "d", d)

    @property
    def n(self) -> int:
        return self.d.shape[0]

    @property
    def m(self) -> int:
        return self.d.shape[1]


def gram_from_vectors(vecs: DetectorVectors) -> DetectorGram:
    if not isinstance(vecs, DetectorVectors):
        vecs = DetectorVectors(vecs)
    G = vecs.d.conj() @ vecs.d.T
    # vectors are unit norm by construction; pin the diagonal
    np.fill_diagonal(G, 1.0)
    return DetectorGram(G)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    rho: np.ndarray

    def __post_init__(self):
        rho = np.array(self.rho, dtype=np.complex128)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise ValidationError(f"density matrix must be square, got shape {rho.shape}")
        if rho.shape[0] < 2:
            raise ValidationError("density matrix dimension must be at least 2")
        herm_err = float(np.max(np.abs(rho - rho.conj().T)))
        if herm_err > HERMITIAN_TOL:
            raise ValidationError(f"density matrix not Hermitian (max error {herm_err:.3g})")
        tr = np.trace(rho)
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValidationError(f"density matrix trace {tr!r} is not 1")
        min_eig = float(np.linalg.eigvalsh((rho + rho.conj().T) / 2).min())
        if min_eig < -PSD_TOL:
            raise ValidationError(f"density matrix not PSD (min eigenvalue {min_eig:.6g})")
        rho.setflags(write=False)
        object.__setattr__(self, "rho", rho)

    @property
    def n(self) -> int:
        return self.rho.shape[0]

    @property
    def purity(self) -> float:
        return float(np.einsum("ij,ji->", self.rho, self.rho).real)


@dataclass(frozen=True, eq=False)
class QuantonDetectorState:
    amplitudes: PathAmplitudes
    gram: DetectorGram

    def __post_init__(self):
        if not isinstance(self.amplitudes, PathAmplitudes):
            object.__setattr__(self, "amplitudes", PathAmplitudes(self.amplitudes))
        if not isinstance(self.gram, DetectorGram):
            object.__setattr__(self, "gram", DetectorGram(self.gram))
        if self.amplitudes.n != self.gram.n:
            raise ValidationError(
                f"amplitudes have {self.amplitudes.n} paths but Gram matrix is {self.gram.n}x{self.gram.n}"
            )

    @property
    def n(self) -> int:
        return self.amplitudes.n

    @property
    def c(self) -> np.ndarray:
        return self.amplitudes.c

    @property
    def G(self) -> np.ndarray:
        return self.gram.G

    @classmethod
    def from_vectors(cls, amplitudes, vectors) -> "QuantonDetectorState":
        return cls(PathAmplitudes(amplitudes) if not isinstance(amplitudes, PathAmplitudes) else amplitudes,
                   gram_from_vectors(vectors))


def populations_array(c: np.ndarray) -> np.ndarray:
    return c.real**2 + c.imag**2


def _outer_array(c: np.ndarray) -> np.ndarray:
    rho = c[..., :, None] * c.conj()[..., None, :]
    idx = np.arange(c.shape[-1])
    # complex products leave rounding residue in Im(c_k conj(c_k))
    rho[..., idx, idx] = populations_array(c)
    return rho


def bare_density(amps: PathAmplitudes) -> DensityMatrix:
    """``|Psi_0><Psi_0|`` for the quanton without a detector."""
    return DensityMatrix(_outer_array(amps.c))


def reduced_density_array(c: np.ndarray, G: np.ndarray) -> np.ndarray:
    """Batched ``rho_r[i, j] = c_i conj(c_j) <d_j|d_i>`` over leading axes."""
    rho = c[..., :, None] * c.conj()[..., None, :] * G.conj()
    # populations are untouched by the detector
    idx = np.arange(c.shape[-1])
    rho[..., idx, idx] = populations_array(c)
    return rho


def reduced_density(state: QuantonDetectorState) -> DensityMatrix:
    """Quanton state after tracing out the path detector."""
    return DensityMatrix(reduced_density_array(state.c, state.G))


def _check_dims(n: int, m: int | None = None) -> None:
    if int(n) != n or n < 2:
        raise ValidationError(f"path count must be an integer >= 2, got {n}")
    if m is not None and (int(m) != m or m < 1):
        raise ValidationError(f"detector dimension must be an integer >= 1, got {m}")


def random_amplitudes(rng: np.random.Generator, n: int, count: int) -> np.ndarray:
    """Flat-Dirichlet populations with independent uniform phases, shape ``(count, n)``."""
    probs = rng.dirichlet(np.ones(n), size=count)
    phases = rng.uniform(0.0, 2 * np.pi, size=(count, n))
    return np.sqrt(probs) * np.exp(1j * phases)


def random_detector_vectors(rng: np.random.Generator, n: int, m: int, count: int) -> np.ndarray:
    """Haar-random unit vectors, shape ``(count, n, m)``."""
    d = rng.standard_normal((count, n, m)) + 1j * rng.standard_normal((count, n, m))
    return d / np.linalg.norm(d, axis=-1, keepdims=True)


def gram_array(d: np.ndarray) -> np.ndarray:
    """Batched Gram matrices of detector vectors ``(..., n, m)``."""
    G = np.einsum("...ik,...jk->...ij", d.conj(), d)
    idx = np.arange(d.shape[-2])
    G[..., idx, idx] = 1.0
    return G


def random_states(n: int, m: int, count: int, seed: Seed = None) -> tuple[np.ndarray, np.ndarray]:
    """Sample ``count`` states as raw ``(c, G)`` arrays of shapes ``(count, n)``, ``(count, n, n)``.

    The arrays are not wrapped in validated types; use :func:`random_state`
    for a single validated state. A sample is reproduced by repeating the
    call with the same ``(n, m, count, seed)`` and indexing the result.
    """
    _check_dims(n, m)
    if count < 1:
        raise ValidationError(f"count must be >= 1, got {count}")
    rng = np.random.default_rng(seed)
    c = random_amplitudes(rng, n, count)
    d = random_detector_vectors(rng, n, m, count)
    return c, gram_array(d)


def random_state(n: int, m: int, seed: Seed = None) -> QuantonDetectorState:
    c, G = random_states(n, m, 1, seed)
    return QuantonDetectorState(PathAmplitudes(c[0]), DetectorGram(G[0]))


def random_mixed_densities(n: int, count: int, seed: Seed = None) -> np.ndarray:
    """Partial traces of Haar-random pure states on an ``n x n`` bipartite space."""
    _check_dims(n)
    if count < 1:
        raise ValidationError(f"count must be >= 1, got {count}")
    rng = np.random.default_rng(seed)
    psi = rng.standard_normal((count, n, n)) + 1j * rng.standard_normal((count, n, n))
    psi /= np.linalg.norm(psi, axis=(-2, -1), keepdims=True)
    return psi @ np.swapaxes(psi.conj(), -1, -2)


def random_mixed_density(n: int, seed: Seed = None) -> DensityMatrix:
    return DensityMatrix(random_mixed_densities(n, 1, seed)[0])
