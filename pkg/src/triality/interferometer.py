"""Noiseless multipath fringes and operational visibility.

Paths are recombined by projecting onto the balanced output port
``|s> = (1/sqrt(n)) sum_k exp(i phi_k) |psi_k>``, so the detected
intensity is ``<s|rho|s>``.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .measures import ConsistencyError, _matrix

DEFAULT_GRID = 1024
IMAG_TOL = 1e-12


@dataclass(frozen=True)
class PhaseConfig:
    phases: np.ndarray

    def __post_init__(self):
        phases = np.array(self.phases, dtype=float)
        if phases.ndim != 1 or not np.all(np.isfinite(phases)):
            raise ValueError("phases must be a finite vector")
        object.__setattr__(self, "phases", phases)


@dataclass(frozen=True)
class FringeScan:
    """Intensity versus relative phase for one pair of paths.

    ``i_max``/``i_min``/``visibility`` are read off the sampled grid; the
    ``analytic_*`` fields are the exact extremes of the cosine fringe.
    """

    phase: np.ndarray
    intensity: np.ndarray
    i_max: float
    i_min: float
    visibility: float
    analytic_i_max: float
    analytic_i_min: float
    analytic_visibility: float
    pair: tuple[int, int] = (0, 1)


def _contrast(hi: float, lo: float) -> float:
    total = hi + lo
    return 0.0 if total <= 0 else (hi - lo) / total


def output_intensity(rho_r, phases) -> float:
    rho = _matrix(rho_r)
    phi = phases.phases if isinstance(phases, PhaseConfig) else np.asarray(phases, dtype=float)
    if phi.shape != (rho.shape[0],):
        raise ValueError(f"need {rho.shape[0]} phases, got shape {phi.shape}")
    s = np.exp(1j * phi) / np.sqrt(rho.shape[0])
    val = np.vdot(s, rho @ s)
    if abs(val.imag) > IMAG_TOL:
        raise ConsistencyError(f"intensity has imaginary part {val.imag!r}")
    return float(val.real)


def _scan_block(block: np.ndarray, grid: int) -> tuple[np.ndarray, np.ndarray]:
    theta = 2 * np.pi * np.arange(grid) / grid
    # I(theta) = (rho_11 + rho_22)/2 + Re(rho_12 e^{i theta}), vectorized over the grid
    inten = 0.5 * np.real(block[0, 0] + block[1, 1]) + np.real(block[0, 1] * np.exp(1j * theta))
    return theta, inten


def fringe_scan_two_path(rho_r, grid: int = DEFAULT_GRID, pair: tuple[int, int] = (0, 1)) -> FringeScan:
    rho = _matrix(rho_r)
    if rho.shape != (2, 2):
        raise ValueError(f"two-path scan needs a 2x2 density matrix, got {rho.shape}")
    if grid < 8:
        raise ValueError(f"grid must be >= 8, got {grid}")
    theta, inten = _scan_block(rho, grid)
    mean = 0.5 * float(np.real(rho[0, 0] + rho[1, 1]))
    amp = float(abs(rho[0, 1]))
    return FringeScan(
        phase=theta,
        intensity=inten,
        i_max=float(inten.max()),
        i_min=float(inten.min()),
        visibility=_contrast(float(inten.max()), float(inten.min())),
        analytic_i_max=mean + amp,
        analytic_i_min=mean - amp,
        analytic_visibility=_contrast(mean + amp, mean - amp),
        pair=pair,
    )


def pairwise_scans(rho_r, grid: int = DEFAULT_GRID) -> dict[tuple[int, int], FringeScan]:
    """Scan every path pair with the remaining paths blocked.

    Each 2x2 sub-block is renormalized to unit trace before scanning; pairs
    with no population are skipped.
    """
    rho = _matrix(rho_r)
    scans = {}
    for j, k in combinations(range(rho.shape[0]), 2):
        block = rho[np.ix_([j, k], [j, k])]
        weight = float(np.real(np.trace(block)))
        if weight <= 0:
            continue
        scans[(j, k)] = fringe_scan_two_path(block / weight, grid, pair=(j, k))
    return scans


def coherence_from_pairwise_scans(rho_r, analytic: bool = True, grid: int = DEFAULT_GRID) -> float:
    """Reassemble l1 coherence from slit-pair fringe visibilities.

    For each pair the visibility of the renormalized sub-block equals
    ``2|rho_jk|/(rho_jj + rho_kk)``, which is inverted for ``|rho_jk|``.
    """
    rho = _matrix(rho_r)
    n = rho.shape[0]
    total = 0.0
    for (j, k), scan in pairwise_scans(rho, grid).items():
        vis = scan.analytic_visibility if analytic else scan.visibility
        weight = float(np.real(rho[j, j] + rho[k, k]))
        # |rho_jk| = vis * weight / 2, counted for both (j, k) and (k, j)
        total += vis * weight
    return total / (n - 1)
