"""Propagating photon modes of a hollow rectangular waveguide.

Everything is computed in the dimensionless parameterization

    gamma_x = L_x / (lambda / 2),   gamma_y = L_y / (lambda / 2),
    u(n_x, n_y) = n_x**2 / gamma_x**2 + n_y**2 / gamma_y**2,

where ``u`` is the transverse fraction (k_x**2 + k_y**2) / omega**2 of the
photon wavevector. A mode propagates when ``u < 1``; ``u == 1`` is the cutoff
where the longitudinal wavenumber ``k0`` vanishes.

Natural units (hbar = c = 1) are used, so omega = 2*pi / wavelength.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import List, Tuple

# The (0, 0) branch is never a photon mode of a hollow guide (no TEM mode),
# and counting it would give non-zero decay in the forbidden region.
EXCLUDE_ZERO_MODE = True

DEFAULT_RESONANCE_EPSILON = 1e-9

# With no wavelength given, lengths are measured in units of 1/omega.
DEFAULT_WAVELENGTH = 2.0 * math.pi


class ModeStatus(str, Enum):
    PROPAGATING = "propagating"
    RESONANT = "resonant-within-epsilon"
    EVANESCENT = "evanescent"


@dataclass(frozen=True)
class WaveguideGeometry:
    """Transverse guide size in half-wavelengths of the transition photon."""

    gamma_x: float
    gamma_y: float
    wavelength: float = DEFAULT_WAVELENGTH

    def __post_init__(self):
        for name in ("gamma_x", "gamma_y", "wavelength"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be finite and > 0, got {value!r}")

    @classmethod
    def from_lengths(cls, L_x: float, L_y: float, wavelength: float) -> "WaveguideGeometry":
        return cls(2.0 * L_x / wavelength, 2.0 * L_y / wavelength, wavelength)

    @property
    def omega(self) -> float:
        return 2.0 * math.pi / self.wavelength

    @property
    def L_x(self) -> float:
        return self.gamma_x * self.wavelength / 2.0

    @property
    def L_y(self) -> float:
        return self.gamma_y * self.wavelength / 2.0

    def swapped(self) -> "WaveguideGeometry":
        return WaveguideGeometry(self.gamma_y, self.gamma_x, self.wavelength)

    def transverse_fraction(self, n_x: int, n_y: int) -> float:
        return (n_x / self.gamma_x) ** 2 + (n_y / self.gamma_y) ** 2


@dataclass(frozen=True)
class PropagatingMode:
    """One (n_x, n_y) photon branch.

    ``k_x``, ``k_y`` and ``k0`` are dimensional (inverse length, in the units
    of the parent geometry's wavelength); ``u`` is dimensionless.
    """

    n_x: int
    n_y: int
    k_x: float
    k_y: float
    k0: float
    u: float

    @property
    def index(self) -> Tuple[int, int]:
        return (self.n_x, self.n_y)


@dataclass(frozen=True)
class ResonanceReport:
    n_x: int
    n_y: int
    u: float
    distance: float  # 1 - u
    status: ModeStatus

    @property
    def index(self) -> Tuple[int, int]:
        return (self.n_x, self.n_y)


def make_mode(geom: WaveguideGeometry, n_x: int, n_y: int) -> PropagatingMode:
    """Build the mode record for (n_x, n_y); raises if it does not propagate."""
    if n_x < 0 or n_y < 0:
        raise ValueError("mode indices must be non-negative")
    if EXCLUDE_ZERO_MODE and n_x == 0 and n_y == 0:
        raise ValueError("(0, 0) is not a waveguide mode")
    u = geom.transverse_fraction(n_x, n_y)
    if not u < 1.0:
        raise ValueError(f"mode ({n_x}, {n_y}) does not propagate (u = {u!r})")
    w = geom.omega
    return PropagatingMode(
        n_x=n_x,
        n_y=n_y,
        k_x=n_x * math.pi / geom.L_x,
        k_y=n_y * math.pi / geom.L_y,
        k0=w * math.sqrt(1.0 - u),
        u=u,
    )


def _candidate_indices(geom: WaveguideGeometry, extra: int = 0):
    nx_max = math.ceil(geom.gamma_x) + extra
    ny_max = math.ceil(geom.gamma_y) + extra
    for n_x in range(nx_max + 1):
        for n_y in range(ny_max + 1):
            if EXCLUDE_ZERO_MODE and n_x == 0 and n_y == 0:
                continue
            yield n_x, n_y


def enumerate_modes(geom: WaveguideGeometry) -> List[PropagatingMode]:
    """All modes with u < 1, sorted lexicographically by (n_x, n_y).

    An empty list means no photon can be emitted at this frequency.
    """
    # n_x <= ceil(gamma_x) covers every candidate since u < 1 needs n_x < gamma_x
    return [
        make_mode(geom, n_x, n_y)
        for n_x, n_y in _candidate_indices(geom)
        if geom.transverse_fraction(n_x, n_y) < 1.0
    ]


def classify_modes(
    geom: WaveguideGeometry, epsilon: float = DEFAULT_RESONANCE_EPSILON
) -> List[ResonanceReport]:
    """Label every low-order branch as propagating, resonant or evanescent.

    Branches up to ``ceil(gamma) + 1`` on each axis are reported so that the
    first evanescent shell is always visible.
    """
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon!r}")
    reports = []
    for n_x, n_y in _candidate_indices(geom, extra=1):
        u = geom.transverse_fraction(n_x, n_y)
        if abs(1.0 - u) <= epsilon:
            status = ModeStatus.RESONANT
        elif u > 1.0:
            status = ModeStatus.EVANESCENT
        else:
            status = ModeStatus.PROPAGATING
        reports.append(ResonanceReport(n_x, n_y, u, 1.0 - u, status))
    return reports


def nearest_resonance(geom: WaveguideGeometry) -> ResonanceReport:
    """The branch whose cutoff lies closest to the transition frequency."""
    return min(classify_modes(geom), key=lambda r: abs(r.distance))


def resonance_loci(
    gamma_y: float, gamma_x_max: float, rel_tol: float = 1e-12
) -> List[Tuple[float, List[Tuple[int, int]]]]:
    """Values of gamma_x in (0, gamma_x_max] where some mode sits at cutoff.

    For n_y = 0 the cutoff is at gamma_x = n_x; for 1 <= n_y < gamma_y it is
    at gamma_x = gamma_y * n_x / sqrt(gamma_y**2 - n_y**2).  Loci closer than
    ``rel_tol`` are merged and list every contributing mode.
    """
    if gamma_y <= 0 or gamma_x_max <= 0:
        raise ValueError("gamma_y and gamma_x_max must be > 0")
    raw = []
    n_y = 0
    while n_y < gamma_y:
        scale = 1.0 if n_y == 0 else gamma_y / math.sqrt(gamma_y**2 - n_y**2)
        n_x = 1
        while scale * n_x <= gamma_x_max * (1 + rel_tol):
            raw.append((scale * n_x, (n_x, n_y)))
            n_x += 1
        n_y += 1
    raw.sort()

    loci: List[Tuple[float, List[Tuple[int, int]]]] = []
    for value, mode in raw:
        if value > gamma_x_max and not math.isclose(value, gamma_x_max, rel_tol=rel_tol):
            continue
        if loci and math.isclose(loci[-1][0], value, rel_tol=rel_tol):
            loci[-1][1].append(mode)
        else:
            loci.append((value, [mode]))
    return loci
