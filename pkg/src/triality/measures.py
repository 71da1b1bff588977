"""Predictability, coherence, distinguishability and entanglement measures.

All sums over path pairs run over ordered pairs ``j != k``. The array
kernels (``*_array``) accept arbitrary leading batch axes and are shared by
the scalar API and by the batch identity runner.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .state import DensityMatrix, QuantonDetectorState, _outer_array, populations_array, reduced_density_array

CLAMP_TOL = 1e-12
CROSS_CHECK_TOL = 1e-12


class ConsistencyError(ArithmeticError):
    """Two routes to the same quantity disagree, or a radicand is clearly negative."""


def _sqrt_clamped(x, what: str, strict: bool = True):
    x = np.asarray(x, dtype=float)
    if strict and np.any(x < -CLAMP_TOL):
        raise ConsistencyError(f"{what}: negative radicand {float(np.min(x))!r}")
    return np.sqrt(np.maximum(x, 0.0))


def _offdiag_sum(M: np.ndarray) -> np.ndarray:
    """Sum of ``M[..., j, k]`` over ``j != k``."""
    return M.sum(axis=(-2, -1)) - np.trace(M, axis1=-2, axis2=-1)


def _matrix(rho) -> np.ndarray:
    return rho.rho if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=np.complex128)


def _scalar(x):
    return float(x) if np.ndim(x) == 0 else x


# --- array kernels -----------------------------------------------------------

def overlap_sum_array(p: np.ndarray, A: np.ndarray | None = None) -> np.ndarray:
    """``(1/(n-1)) sum_{i!=j} sqrt(p_i p_j) A_ij``; ``A`` defaults to all ones."""
    n = p.shape[-1]
    s = np.sqrt(np.maximum(p, 0.0))
    M = s[..., :, None] * s[..., None, :]
    if A is not None:
        M = M * A
    return _offdiag_sum(M) / (n - 1)


def predictability_q_array(p: np.ndarray) -> np.ndarray:
    """``1 - (1/(n-1)) sum_{j!=k} sqrt(p_j p_k)`` in the cancellation-free form.

    With ``sum p = 1`` the defining expression equals
    ``(1/(n-1)) sum_{j<k} (sqrt(p_j) - sqrt(p_k))**2``, which is exactly zero
    for equal populations and never negative.
    """
    n = p.shape[-1]
    s = np.sqrt(np.maximum(p, 0.0))
    diff = s[..., :, None] - s[..., None, :]
    return (diff**2).sum(axis=(-2, -1)) / (2 * (n - 1))


def coherence_array(rho: np.ndarray) -> np.ndarray:
    n = rho.shape[-1]
    return _offdiag_sum(np.abs(rho)) / (n - 1)


def i_concurrence_sq_array(rho: np.ndarray) -> np.ndarray:
    """``2 sum_{i!=j} (rho_ii rho_jj - |rho_ij|^2)``."""
    d = np.real(np.diagonal(rho, axis1=-2, axis2=-1))
    M = d[..., :, None] * d[..., None, :] - np.abs(rho) ** 2
    return 2 * _offdiag_sum(M)


def purity_concurrence_sq_array(rho: np.ndarray) -> np.ndarray:
    """``2 (1 - Tr rho^2)``."""
    return 2 * (1 - np.real(np.einsum("...ij,...ji->...", rho, rho)))


def entanglement_q_rho_array(rho: np.ndarray) -> np.ndarray:
    """``(1/(n-1)) sum_{i!=j} (sqrt(rho_ii rho_jj) - |rho_ij|)`` on the reduced state."""
    n = rho.shape[-1]
    d = np.maximum(np.real(np.diagonal(rho, axis1=-2, axis2=-1)), 0.0)
    M = np.sqrt(d[..., :, None] * d[..., None, :]) - np.abs(rho)
    return _offdiag_sum(M) / (n - 1)


def measures_array(c: np.ndarray, G: np.ndarray, strict: bool = True) -> dict[str, np.ndarray]:
    """Every measure for a batch of states given as raw arrays.

    Keys follow :class:`MeasureReport`; the extra keys ``EQ_rho`` (reduced
    state form of ``EQ``), ``Ec_sq``, ``Ec_sq_purity`` and ``E_sq`` carry the
    unrooted and cross-check values. With ``strict=False`` every radicand is
    clamped at zero instead of raising.
    """
    c = np.asarray(c, dtype=np.complex128)
    G = np.asarray(G, dtype=np.complex128)
    n = c.shape[-1]
    p = populations_array(c)
    A = np.abs(G)
    rho_bare = _outer_array(c)
    rho_r = reduced_density_array(c, G)

    s_bare = overlap_sum_array(p)
    s_det = overlap_sum_array(p, A)
    PQ = predictability_q_array(p)
    # 1 - S**2 = PQ (2 - PQ)
    P = _sqrt_clamped(PQ * (2 - PQ), "predictability", strict)
    DQ = 1 - s_det
    D = _sqrt_clamped(DQ * (2 - DQ), "distinguishability", strict)

    sq = np.sqrt(p)
    pair = sq[..., :, None] * sq[..., None, :]
    EQ = _offdiag_sum(pair - pair * A) / (n - 1)
    EQ_rho = entanglement_q_rho_array(rho_r)

    # difference of squares, factored so that E_sq >= 0 termwise
    E_sq = EQ * (s_bare + s_det)
    E = _sqrt_clamped(E_sq, "quadratic entanglement", strict)

    Ec_sq = i_concurrence_sq_array(rho_r)
    Ec_sq_purity = purity_concurrence_sq_array(rho_r)
    Ec = _sqrt_clamped(Ec_sq, "I-concurrence", strict)
    PF = _sqrt_clamped(1 - E_sq, "generalized polarization", strict)

    return {
        "P": P,
        "PQ": PQ,
        "C_bare": coherence_array(rho_bare),
        "C": coherence_array(rho_r),
        "DQ": DQ,
        "D": D,
        "EQ": EQ,
        "E": E,
        "Ec": Ec,
        "PF": PF,
        "EQ_rho": EQ_rho,
        "E_sq": E_sq,
        "Ec_sq": Ec_sq,
        "Ec_sq_purity": Ec_sq_purity,
    }


# --- density-matrix measures -------------------------------------------------

def predictability(rho):
    """Generalized path predictability ``sqrt(1 - S**2)``, ``S`` the normalized population overlap sum.

    Reduces to ``|rho_11 - rho_22|`` for two paths.
    """
    m = _matrix(rho)
    pq = predictability_q_array(np.real(np.diagonal(m, axis1=-2, axis2=-1)))
    return _scalar(_sqrt_clamped(pq * (2 - pq), "predictability"))


def predictability_q(rho):
    """Linear predictability; assumes unit trace (see :func:`predictability_q_array`)."""
    m = _matrix(rho)
    return _scalar(predictability_q_array(np.real(np.diagonal(m, axis1=-2, axis2=-1))))


def coherence(rho):
    """Normalized l1 coherence ``(1/(n-1)) sum_{j!=k} |rho_jk|`` in the path basis."""
    return _scalar(coherence_array(_matrix(rho)))


def i_concurrence(rho_r):
    """I-concurrence of the reduced state, checked against ``sqrt(2(1 - Tr rho^2))``.

    The two forms are compared squared: the root is ill-conditioned near zero.
    """
    m = _matrix(rho_r)
    ec_sq = i_concurrence_sq_array(m)
    oracle = purity_concurrence_sq_array(m)
    err = float(np.max(np.abs(ec_sq - oracle)))
    if err > CROSS_CHECK_TOL:
        raise ConsistencyError(f"I-concurrence forms disagree by {err!r}")
    return _scalar(_sqrt_clamped(ec_sq, "I-concurrence"))


# --- state measures ----------------------------------------------------------

def distinguishability_q(state: QuantonDetectorState) -> float:
    """Unambiguous-discrimination path distinguishability ``1 - (1/(n-1)) sum sqrt(p_i p_j)|<d_i|d_j>|``."""
    return 1 - float(overlap_sum_array(state.amplitudes.populations, np.abs(state.G)))


def distinguishability(state: QuantonDetectorState) -> float:
    dq = distinguishability_q(state)
    return float(_sqrt_clamped(dq * (2 - dq), "distinguishability"))


def entanglement_q(state: QuantonDetectorState) -> float:
    n = state.n
    sq = np.sqrt(state.amplitudes.populations)
    pair = np.outer(sq, sq)
    via_gram = float(_offdiag_sum(pair - pair * np.abs(state.G))) / (n - 1)
    via_rho = float(entanglement_q_rho_array(reduced_density_array(state.c, state.G)))
    if abs(via_gram - via_rho) > CROSS_CHECK_TOL:
        raise ConsistencyError(f"entanglement forms disagree: {via_gram!r} vs {via_rho!r}")
    return via_gram


def entanglement_sq_value(state: QuantonDetectorState) -> float:
    """The unrooted quadratic entanglement ``E**2 = S**2 - S_det**2``.

    ``S`` and ``S_det`` are the normalized pair sums without and with the
    detector overlaps; the difference is evaluated as
    ``(S - S_det)(S + S_det)`` to avoid cancellation.
    """
    n = state.n
    sq = np.sqrt(state.amplitudes.populations)
    pair = np.outer(sq, sq)
    s_bare = _offdiag_sum(pair) / (n - 1)
    s_det = _offdiag_sum(pair * np.abs(state.G)) / (n - 1)
    gap = _offdiag_sum(pair - pair * np.abs(state.G)) / (n - 1)
    return float(gap * (s_bare + s_det))


def entanglement_sq(state: QuantonDetectorState) -> float:
    """Quadratic entanglement ``E``, the root of :func:`entanglement_sq_value`."""
    return float(_sqrt_clamped(entanglement_sq_value(state), "quadratic entanglement"))


def generalized_polarization(state: QuantonDetectorState) -> float:
    return float(_sqrt_clamped(1 - entanglement_sq_value(state), "generalized polarization"))


def uqsd_bound_two_path(state: QuantonDetectorState) -> float:
    """``1 - 2 sqrt(p_1 p_2)|<d_1|d_2>|`` for a two-path state."""
    if state.n != 2:
        raise ValueError(f"two-path bound needs n=2, got n={state.n}")
    p1, p2 = state.amplitudes.populations
    return 1 - 2 * np.sqrt(p1 * p2) * abs(state.G[0, 1])


def uqsd_optimal_two_path(priors, overlap: float) -> float:
    """Optimal unambiguous discrimination of two pure states with given priors.

    Standard two-state result: when ``overlap <= sqrt(p_min/p_max)`` the
    optimal measurement identifies both states and succeeds with
    ``1 - 2 sqrt(p_1 p_2) s``; otherwise only the likelier state is ever
    identified and the success probability is ``p_max (1 - s**2)``.
    """
    p1, p2 = (float(x) for x in priors)
    s = abs(float(overlap))
    lo, hi = min(p1, p2), max(p1, p2)
    if hi == 0:
        return 0.0
    if s <= np.sqrt(lo / hi):
        return 1 - 2 * np.sqrt(p1 * p2) * s
    return hi * (1 - s * s)


@dataclass(frozen=True)
class MeasureReport:
    n: int
    P: float
    PQ: float
    C_bare: float
    C: float
    DQ: float
    D: float
    EQ: float
    E: float
    Ec: float
    PF: float

    FIELDS = ("P", "PQ", "C_bare", "C", "DQ", "D", "EQ", "E", "Ec", "PF")

    def as_dict(self) -> dict:
        return asdict(self)


def full_report(state: QuantonDetectorState) -> MeasureReport:
    """All measures for one state, with the internal cross-checks enforced."""
    vals = measures_array(state.c, state.G)
    checks = {
        "entanglement forms": abs(vals["EQ"] - vals["EQ_rho"]),
        "I-concurrence forms": abs(vals["Ec_sq"] - vals["Ec_sq_purity"]),
        "DQ = PQ + EQ": abs(vals["DQ"] - vals["PQ"] - vals["EQ"]),
    }
    for name, err in checks.items():
        if err > CROSS_CHECK_TOL:
            raise ConsistencyError(f"{name}: mismatch {float(err)!r}")
    return MeasureReport(n=state.n, **{k: float(vals[k]) for k in MeasureReport.FIELDS})
