"""Spontaneous emission rates inside a rectangular waveguide.

The in-guide rate divided by the free-space rate is, per propagating mode,

    eta_directional = sum 3 / (2 pi gamma_x gamma_y) * sin^2(theta) / sqrt(1 - u)
    eta_mean        = sum 1 / (pi sqrt(gamma_x^2 gamma_y^2 (1 - u)))

where theta is the angle between the dipole and the emitted wavevector.
``eta_mean`` is the solid-angle average of ``eta_directional``.

Natural Heaviside units, hbar = c = 1.  Conversion to SI for the free-space
rate: ``e**2 -> e**2 / (4 pi eps0 hbar c) * 4 pi`` (i.e. ``e**2 = 4 pi alpha``),
``omega`` in s^-1 with lengths multiplied by ``c``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .modes import (
    PropagatingMode,
    WaveguideGeometry,
    classify_modes,
    enumerate_modes,
)

# A mode with |1 - u| below this is treated as sitting on its cutoff.
DIVERGENCE_THRESHOLD = 1e-12


class DivergentSumError(ArithmeticError):
    """Raised when a mode sits (numerically) on its cutoff and the sum diverges."""

    def __init__(self, mode: Tuple[int, int], u: float):
        self.mode = mode
        self.u = u
        super().__init__(
            f"mode {mode} is at cutoff (1 - u = {1.0 - u:.3e}); rate sum diverges"
        )


@dataclass(frozen=True)
class TransitionSpec:
    omega: float
    dipole_e_r: float
    energy_upper: Optional[float] = None
    energy_lower: Optional[float] = None

    def __post_init__(self):
        if not (math.isfinite(self.omega) and self.omega > 0):
            raise ValueError("omega must be finite and > 0")
        if not self.dipole_e_r >= 0:
            raise ValueError("dipole_e_r must be >= 0")
        if self.energy_upper is not None and self.energy_lower is not None:
            gap = self.energy_upper - self.energy_lower
            if not math.isclose(gap, self.omega, rel_tol=1e-12):
                raise ValueError(f"omega={self.omega} != E_a - E_b = {gap}")

    @classmethod
    def from_levels(cls, energy_upper: float, energy_lower: float, dipole_e_r: float):
        return cls(energy_upper - energy_lower, dipole_e_r, energy_upper, energy_lower)


@dataclass(frozen=True)
class DipoleOrientation:
    """Direction of the transition dipole: polar angle ``alpha`` from the guide
    axis (z), azimuth ``beta`` measured from the x wall normal."""

    alpha: float
    beta: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.alpha <= math.pi:
            raise ValueError("alpha must lie in [0, pi]")
        if not 0.0 <= self.beta < 2.0 * math.pi:
            raise ValueError("beta must lie in [0, 2 pi)")

    def unit_vector(self) -> np.ndarray:
        sa = math.sin(self.alpha)
        return np.array([sa * math.cos(self.beta), sa * math.sin(self.beta), math.cos(self.alpha)])


def free_space_rate(t: TransitionSpec) -> float:
    return t.dipole_e_r**2 * t.omega**3 / (3.0 * math.pi)


def sin2_theta(mode: PropagatingMode, d: DipoleOrientation, branch: int = +1) -> float:
    """sin^2 of the angle between the dipole and the mode wavevector.

    ``branch`` selects the +z (+1) or -z (-1) travelling photon.
    """
    if not mode.k0 > 0:
        raise ValueError("sin2_theta needs a propagating mode (k0 > 0)")
    if branch not in (1, -1):
        raise ValueError("branch must be +1 or -1")
    ex, ey, ez = d.unit_vector()
    k = math.sqrt(mode.k_x**2 + mode.k_y**2 + mode.k0**2)
    cos_t = (mode.k_x * ex + mode.k_y * ey + branch * mode.k0 * ez) / k
    return min(1.0, max(0.0, 1.0 - cos_t * cos_t))


def _check_divergence(geom: WaveguideGeometry, threshold: float) -> None:
    # classify_modes covers the first evanescent shell, so modes just above
    # cutoff are caught too.
    for r in classify_modes(geom, epsilon=0.5):
        if abs(r.distance) < threshold:
            raise DivergentSumError(r.index, r.u)


def _mode_arrays(modes: Sequence[PropagatingMode]):
    nx = np.array([m.n_x for m in modes], dtype=float)
    ny = np.array([m.n_y for m in modes], dtype=float)
    u = np.array([m.u for m in modes], dtype=float)
    return nx, ny, u


def eta_mean_terms(
    geom: WaveguideGeometry, threshold: float = DIVERGENCE_THRESHOLD
) -> List[Tuple[Tuple[int, int], float]]:
    """Per-mode contributions to ``eta_mean``, in mode order."""
    _check_divergence(geom, threshold)
    gx, gy = geom.gamma_x, geom.gamma_y
    return [
        (m.index, 1.0 / (math.pi * gx * gy * math.sqrt(1.0 - m.u)))
        for m in enumerate_modes(geom)
    ]


def eta_mean(geom: WaveguideGeometry, threshold: float = DIVERGENCE_THRESHOLD) -> float:
    """Orientation-averaged ratio of in-guide to free-space decay rate.

    Zero when no mode propagates (gamma_x, gamma_y < 1 or similar).

    Raises
    ------
    DivergentSumError
        If any mode has ``|1 - u| < threshold``.
    """
    return math.fsum(term for _, term in eta_mean_terms(geom, threshold))


def _branch_averaged_sin2(nx, ny, u, gx, gy, alpha, beta):
    """sin^2(theta) averaged over the +z and -z photon, broadcast over
    modes (last axis) and orientations (leading axes)."""
    sa = np.sin(alpha)[..., None]
    transverse = sa * (np.cos(beta)[..., None] * (nx / gx) + np.sin(beta)[..., None] * (ny / gy))
    axial = np.cos(alpha)[..., None] * np.sqrt(1.0 - u)
    # mean of 1 - (T + K)^2 and 1 - (T - K)^2
    return 1.0 - transverse**2 - axial**2


def eta_directional(
    geom: WaveguideGeometry,
    d: DipoleOrientation,
    threshold: float = DIVERGENCE_THRESHOLD,
) -> float:
    """Rate ratio for a dipole with fixed orientation ``d``.

    Each mode's sin^2(theta) is averaged over the two propagation directions
    +-k0, which keeps the result symmetric under z -> -z.
    """
    _check_divergence(geom, threshold)
    modes = enumerate_modes(geom)
    if not modes:
        return 0.0
    values = eta_directional_many(geom, np.array([d.alpha]), np.array([d.beta]), modes)
    return float(values[0])


def eta_directional_many(
    geom: WaveguideGeometry,
    alpha: np.ndarray,
    beta: np.ndarray,
    modes: Optional[Sequence[PropagatingMode]] = None,
) -> np.ndarray:
    """Vectorized ``eta_directional`` over arrays of orientations.

    No divergence check is performed here; callers go through
    ``eta_directional`` or check the geometry themselves.
    """
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    if modes is None:
        modes = enumerate_modes(geom)
    if not modes:
        return np.zeros(np.broadcast(alpha, beta).shape)
    gx, gy = geom.gamma_x, geom.gamma_y
    nx, ny, u = _mode_arrays(modes)
    s2 = _branch_averaged_sin2(nx, ny, u, gx, gy, alpha, beta)
    weights = 3.0 / (2.0 * math.pi * gx * gy * np.sqrt(1.0 - u))
    return s2 @ weights


def eta_mean_monte_carlo(
    geom: WaveguideGeometry,
    n_samples: int = 1_000_000,
    seed: int = 0,
    chunk: int = 200_000,
) -> Tuple[float, float]:
    """Estimate ``eta_mean`` by averaging ``eta_directional`` over uniformly
    random dipole directions.

    Returns ``(mean, standard_error)``.  Chunks are drawn sequentially from a
    single seeded generator so the result does not depend on ``chunk``
    beyond floating-point summation order.
    """
    if n_samples < 2:
        raise ValueError("need at least two samples")
    _check_divergence(geom, DIVERGENCE_THRESHOLD)
    modes = enumerate_modes(geom)
    if not modes:
        return 0.0, 0.0
    rng = np.random.default_rng(seed)
    total = 0.0
    total_sq = 0.0
    done = 0
    while done < n_samples:
        m = min(chunk, n_samples - done)
        cos_alpha = rng.uniform(-1.0, 1.0, m)
        beta = rng.uniform(0.0, 2.0 * math.pi, m)
        vals = eta_directional_many(geom, np.arccos(cos_alpha), beta, modes)
        total += float(vals.sum())
        total_sq += float((vals * vals).sum())
        done += m
    mean = total / n_samples
    var = max(total_sq / n_samples - mean * mean, 0.0) * n_samples / (n_samples - 1)
    return mean, math.sqrt(var / n_samples)


def in_guide_rate(
    t: TransitionSpec,
    geom: WaveguideGeometry,
    d: Optional[DipoleOrientation] = None,
    threshold: float = DIVERGENCE_THRESHOLD,
) -> float:
    """Spontaneous emission rate inside the guide.

    Uses the orientation average when ``d`` is None (unpolarized atoms).
    """
    ratio = eta_mean(geom, threshold) if d is None else eta_directional(geom, d, threshold)
    return free_space_rate(t) * ratio


def large_gamma_window_average(gamma: float, half_width: float = 0.25, samples: int = 201) -> float:
    """Mean of ``eta_mean`` over a square guide, averaged over
    ``gamma +- half_width`` to wash out the resonance spikes.

    Diagnostic only: for large guides this tends to 1/2 rather than 1, since
    each (n_x, n_y) branch carries a single effective polarization.
    """
    grid = np.linspace(gamma - half_width, gamma + half_width, samples)
    vals = []
    for g in grid:
        try:
            vals.append(eta_mean(WaveguideGeometry(g, g * (1 + 1 / math.pi**3))))
        except DivergentSumError:
            continue
    return float(np.mean(vals))
