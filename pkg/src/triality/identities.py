"""Duality and triality relations evaluated as residuals."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields
from typing import Callable, Iterable

import numpy as np

from .measures import (
    MeasureReport,
    coherence_array,
    full_report,
    measures_array,
    predictability_q_array,
    _matrix,
)
from .state import DetectorGram, PathAmplitudes, QuantonDetectorState, random_mixed_densities, random_states

DEFAULT_TOLERANCE = 1e-10

# equality relations that must hold for every pure joint state
EQUALITY_IDENTITIES = ("r_pqc", "r_dqc", "r_nduality", "r_pceq", "r_pce", "r_dpq", "r_dpc", "r_pct")
# independent second routes to the same quantity
ORACLE_CHECKS = ("r_eq_forms", "r_ec_oracle")
ONE_SIDED = ("s_gy",)
ALL_CHECKS = EQUALITY_IDENTITIES + ORACLE_CHECKS + ONE_SIDED


@dataclass(frozen=True)
class IdentityResiduals:
    r_pqc: float
    r_dqc: float
    r_nduality: float
    r_pceq: float
    r_pce: float
    r_dpq: float
    r_dpc: float
    r_pct: float
    s_gy: float
    r_eq_forms: float = 0.0
    r_ec_oracle: float = 0.0

    def as_dict(self) -> dict[str, float]:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def max(self) -> float:
        return max(self.as_dict().values())


def _residuals(v: dict) -> dict:
    """Residual arrays from a dict of measure values (scalars or batches)."""
    P2, C2, E2 = v["P"] ** 2, v["C"] ** 2, v["E"] ** 2
    D2 = v["D"] ** 2
    out = {
        "r_pqc": np.abs(v["PQ"] + v["C_bare"] - 1),
        "r_dqc": np.abs(v["DQ"] + v["C"] - 1),
        "r_nduality": np.abs(D2 + C2 - 1),
        "r_pceq": np.abs(v["PQ"] + v["C"] + v["EQ"] - 1),
        "r_pce": np.abs(P2 + C2 + E2 - 1),
        "r_dpq": np.abs(v["DQ"] - v["PQ"] - v["EQ"]),
        "r_dpc": np.abs(D2 - P2 - E2),
        "r_pct": np.abs(v["PF"] ** 2 - P2 - C2),
        # the reduced quanton state is itself a mixed state
        "s_gy": np.maximum(0.0, P2 + C2 - 1),
    }
    if "EQ_rho" in v:
        out["r_eq_forms"] = np.abs(v["EQ"] - v["EQ_rho"])
        out["r_ec_oracle"] = np.abs(v["Ec_sq"] - v["Ec_sq_purity"])
    return out


def check_identities(state: QuantonDetectorState) -> IdentityResiduals:
    report = full_report(state)
    res = _residuals(report.as_dict())
    vals = measures_array(state.c, state.G)
    res["r_eq_forms"] = abs(vals["EQ"] - vals["EQ_rho"])
    res["r_ec_oracle"] = abs(vals["Ec_sq"] - vals["Ec_sq_purity"])
    return IdentityResiduals(**{k: float(x) for k, x in res.items()})


def check_mixed_inequality(rho):
    """``P**2 + C**2 - 1``; non-positive for every density matrix, zero for pure states."""
    m = _matrix(rho)
    p = np.real(np.diagonal(m, axis1=-2, axis2=-1))
    # unrooted predictability, so the clamp cannot hide a violation
    pq = predictability_q_array(p)
    val = pq * (2 - pq) + coherence_array(m) ** 2 - 1
    return float(val) if np.ndim(val) == 0 else val


@dataclass(frozen=True)
class Failure:
    """Residual above tolerance; the state is ``sampler(n, m, count, seed)`` at ``index``."""

    seed: object
    n: int
    m: int
    index: int
    identity: str
    residual: float


@dataclass
class BatchVerdict:
    count: int
    tolerance: float
    max_residual: dict[str, float] = field(default_factory=dict)
    failures: list[Failure] = field(default_factory=list)
    blocks: list[tuple[int, int, dict[str, float]]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


Sampler = Callable[[int, int, int, object], tuple[np.ndarray, np.ndarray]]


def block_seed(seed, n: int, m: int) -> tuple:
    base = tuple(seed) if isinstance(seed, (tuple, list)) else (int(seed),)
    return base + (n, m)


def _run_block(n, m, count, seed, tolerance, sampler, mixed):
    bseed = block_seed(seed, n, m)
    c, G = sampler(n, m, count, bseed)
    res = _residuals(measures_array(c, G, strict=False))
    if mixed:
        rho = random_mixed_densities(n, count, bseed + (0,))
        res["s_gy"] = np.maximum(res["s_gy"], np.maximum(0.0, check_mixed_inequality(rho)))
    maxima = {}
    failures = []
    for name in ALL_CHECKS:
        arr = np.asarray(res[name])
        # NaN from a corrupted sample must count as a failure
        arr = np.where(np.isnan(arr), np.inf, arr)
        maxima[name] = float(arr.max())
        for idx in np.flatnonzero(arr > tolerance):
            failures.append(Failure(bseed, n, m, int(idx), name, float(arr[idx])))
    return maxima, failures


def run_batch(
    n_range: Iterable[int],
    m_range: Iterable[int],
    count: int,
    seed=0,
    tolerance: float = DEFAULT_TOLERANCE,
    *,
    sampler: Sampler = random_states,
    mixed: bool = True,
    workers: int = 1,
) -> BatchVerdict:
    """Check every identity on ``count`` random states per ``(n, m)`` pair.

    Blocks are seeded from ``(seed, n, m)`` so each block is reproducible on
    its own. With ``mixed=True`` the one-sided inequality is also checked on
    ``count`` random mixed densities per block. Results do not depend on
    ``workers``.
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    if not tolerance >= 0:
        raise ValueError(f"tolerance must be non-negative, got {tolerance}")
    pairs = [(int(n), int(m)) for n in n_range for m in m_range]
    if not pairs:
        raise ValueError("empty (n, m) range")

    def job(nm):
        return _run_block(nm[0], nm[1], count, seed, tolerance, sampler, mixed)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(job, pairs))
    else:
        results = [job(nm) for nm in pairs]

    verdict = BatchVerdict(count=count, tolerance=tolerance)
    for (n, m), (maxima, failures) in zip(pairs, results):
        verdict.blocks.append((n, m, maxima))
        for k, v in maxima.items():
            verdict.max_residual[k] = max(verdict.max_residual.get(k, 0.0), v)
        verdict.failures.extend(failures)
    return verdict


def uniform_overlap_state(amps: PathAmplitudes, t: float) -> QuantonDetectorState:
    return QuantonDetectorState(amps, DetectorGram.uniform(amps.n, t))


def transition_sweep(amps: PathAmplitudes, steps: int) -> list[tuple[float, MeasureReport]]:
    """Reports along ``G(t)`` with every off-diagonal overlap equal to ``t``, ``t`` in ``[0, 1]``.

    ``t = 0`` is a perfect path detector, ``t = 1`` no detector at all.
    """
    if steps < 2:
        raise ValueError(f"steps must be >= 2, got {steps}")
    if not isinstance(amps, PathAmplitudes):
        amps = PathAmplitudes(amps)
    return [(float(t), full_report(uniform_overlap_state(amps, t))) for t in np.linspace(0.0, 1.0, steps)]
