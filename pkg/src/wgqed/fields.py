"""Mode field distribution and position-dependent absorption rates.

For a propagating mode (n_x, n_y) the electric field is

    E_x = E1 cos(k_x x) sin(k_y y) exp(i k0 z)
    E_y = E2 sin(k_x x) cos(k_y y) exp(i k0 z)
    E_z = E3 sin(k_x x) sin(k_y y) exp(i k0 z)

with the transversality constraint k_x E1 + k_y E2 - i k0 E3 = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .modes import PropagatingMode, WaveguideGeometry

# Relative slack allowed on coordinates that should lie on a wall.
_COORD_TOL = 1e-12


def sinpi(t):
    """sin(pi t), exactly zero at integer t."""
    t = np.asarray(t, dtype=float)
    r = np.remainder(t, 2.0)
    out = np.sin(np.pi * r)
    out = np.where(r == np.floor(r), 0.0, out)
    out = np.where(r == 0.5, 1.0, out)
    return np.where(r == 1.5, -1.0, out)


def cospi(t):
    """cos(pi t), exactly zero at half-integer t."""
    t = np.asarray(t, dtype=float)
    r = np.remainder(t, 2.0)
    out = np.cos(np.pi * r)
    out = np.where((r == 0.5) | (r == 1.5), 0.0, out)
    out = np.where(r == 0.0, 1.0, out)
    return np.where(r == 1.0, -1.0, out)


@dataclass(frozen=True)
class FieldAmplitudes:
    e1: complex
    e2: complex
    e3: complex
    mode: PropagatingMode
    geometry: WaveguideGeometry

    def constraint_residual(self) -> float:
        m = self.mode
        return abs(m.k_x * self.e1 + m.k_y * self.e2 - 1j * m.k0 * self.e3)

    def scaled(self, c: complex) -> "FieldAmplitudes":
        return FieldAmplitudes(self.e1 * c, self.e2 * c, self.e3 * c, self.mode, self.geometry)


@dataclass(frozen=True)
class MediumSpec:
    refractive_index: float = 1.0
    dipole_e_r: float = 1.0
    lineshape_value: float = 1.0

    def __post_init__(self):
        if not self.refractive_index > 0:
            raise ValueError("refractive_index must be > 0")
        if not self.dipole_e_r >= 0:
            raise ValueError("dipole_e_r must be >= 0")
        if not self.lineshape_value >= 0:
            raise ValueError("lineshape_value must be >= 0")


def lorentzian(detuning: float, width: float) -> float:
    """Area-normalized Lorentzian line shape with FWHM ``width``."""
    if width <= 0:
        raise ValueError("width must be > 0")
    return (width / (2.0 * math.pi)) / (detuning**2 + width**2 / 4.0)


def complete_amplitudes(
    mode: PropagatingMode, e1: complex, e2: complex, geometry: WaveguideGeometry
) -> FieldAmplitudes:
    """Solve the transversality constraint for E3."""
    if not mode.k0 > 0:
        raise ValueError(f"mode {mode.index} is at cutoff; E3 has no finite completion")
    e1, e2 = complex(e1), complex(e2)
    e3 = -1j * (mode.k_x * e1 + mode.k_y * e2) / mode.k0
    amps = FieldAmplitudes(e1, e2, e3, mode, geometry)
    scale = max(abs(mode.k_x * e1), abs(mode.k_y * e2), abs(mode.k0 * e3), 1e-300)
    assert amps.constraint_residual() <= 1e-12 * scale
    return amps


def _phases(amps: FieldAmplitudes, x, y):
    """Return (x, y) in units of half-periods, validating the coordinates."""
    g = amps.geometry
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    lo_x, hi_x = -_COORD_TOL * g.L_x, g.L_x * (1 + _COORD_TOL)
    lo_y, hi_y = -_COORD_TOL * g.L_y, g.L_y * (1 + _COORD_TOL)
    if np.any((x < lo_x) | (x > hi_x)) or np.any((y < lo_y) | (y > hi_y)):
        raise ValueError("coordinates lie outside the guide cross-section")
    # x / L first: exact 1 at the far wall and 0.5 at the centre
    return amps.mode.n_x * (x / g.L_x), amps.mode.n_y * (y / g.L_y)


def field_at(amps: FieldAmplitudes, x, y, z=0.0) -> np.ndarray:
    """Complex field vector at (x, y, z); trailing axis holds (Ex, Ey, Ez).

    Walls and nodes give exact zeros.
    """
    px, py = _phases(amps, x, y)
    sx, cx = sinpi(px), cospi(px)
    sy, cy = sinpi(py), cospi(py)
    phase = np.exp(1j * amps.mode.k0 * np.asarray(z, dtype=float))
    out = np.stack(
        np.broadcast_arrays(
            amps.e1 * cx * sy * phase,
            amps.e2 * sx * cy * phase,
            amps.e3 * sx * sy * phase,
        ),
        axis=-1,
    )
    return out


def energy_density(amps: FieldAmplitudes, medium: MediumSpec, x, y):
    """Time-averaged energy density rho(x, y); independent of z."""
    px, py = _phases(amps, x, y)
    sx2, cx2 = sinpi(px) ** 2, cospi(px) ** 2
    sy2, cy2 = sinpi(py) ** 2, cospi(py) ** 2
    e2sum = (
        abs(amps.e1) ** 2 * cx2 * sy2
        + abs(amps.e2) ** 2 * sx2 * cy2
        + abs(amps.e3) ** 2 * sx2 * sy2
    )
    rho = 0.5 * medium.refractive_index**2 * e2sum
    return float(rho) if np.ndim(rho) == 0 else rho


def _mean_sq(n: int, trig: str) -> float:
    # Area average of sin^2/cos^2(n pi x / L) over a whole number of half periods.
    if n == 0:
        return 1.0 if trig == "cos" else 0.0
    return 0.5


def mean_energy_density(amps: FieldAmplitudes, medium: MediumSpec) -> float:
    """Cross-section average of ``energy_density``.

    For n_x, n_y >= 1 this is (n^2 / 8)(|E1|^2 + |E2|^2 + |E3|^2).  When one
    index is zero the cos^2 factor on that axis averages to 1, not 1/2, and
    the sin^2 factor to 0; the exact average is returned in that case.
    """
    nx, ny = amps.mode.n_x, amps.mode.n_y
    total = (
        abs(amps.e1) ** 2 * _mean_sq(nx, "cos") * _mean_sq(ny, "sin")
        + abs(amps.e2) ** 2 * _mean_sq(nx, "sin") * _mean_sq(ny, "cos")
        + abs(amps.e3) ** 2 * _mean_sq(nx, "sin") * _mean_sq(ny, "sin")
    )
    return 0.5 * medium.refractive_index**2 * total


def _rate_prefactor(medium: MediumSpec) -> float:
    return math.pi / (3.0 * medium.refractive_index**2) * medium.dipole_e_r**2 * medium.lineshape_value


def absorption_rate_at(medium: MediumSpec, amps: FieldAmplitudes, x, y):
    """Absorption rate b -> a for an atom at (x, y) with the line shape
    already evaluated in ``medium.lineshape_value``."""
    return _rate_prefactor(medium) * energy_density(amps, medium, x, y)


def mean_absorption_rate(medium: MediumSpec, amps: FieldAmplitudes) -> float:
    return _rate_prefactor(medium) * mean_energy_density(amps, medium)


def stimulated_rate(medium: MediumSpec, amps: FieldAmplitudes, x, y):
    # |r_ab| = |r_ba| and the stimulated photon copies the driving mode.
    return absorption_rate_at(medium, amps, x, y)


def mean_stimulated_rate(medium: MediumSpec, amps: FieldAmplitudes) -> float:
    return mean_absorption_rate(medium, amps)


def field_map(amps: FieldAmplitudes, medium: MediumSpec, nx: int, ny: int):
    """Evaluate the field on an ``nx`` x ``ny`` grid spanning the walls.

    Returns a dict of flat, row-major arrays (y is the slow index, x the
    fast one) keyed by the CSV column names.
    """
    if nx < 2 or ny < 2:
        raise ValueError("grid needs at least 2 points per axis")
    g = amps.geometry
    xs = np.linspace(0.0, g.L_x, nx)
    ys = np.linspace(0.0, g.L_y, ny)
    Y, X = np.meshgrid(ys, xs, indexing="ij")
    X, Y = X.ravel(), Y.ravel()
    E = field_at(amps, X, Y, 0.0)
    rho = energy_density(amps, medium, X, Y)
    return {
        "x": X,
        "y": Y,
        "Ex_re": E[:, 0].real,
        "Ex_im": E[:, 0].imag,
        "Ey_re": E[:, 1].real,
        "Ey_im": E[:, 1].imag,
        "Ez_re": E[:, 2].real,
        "Ez_im": E[:, 2].imag,
        "rho": rho,
        "W_ab": _rate_prefactor(medium) * rho,
    }


FIELD_MAP_COLUMNS = ("x", "y", "Ex_re", "Ex_im", "Ey_re", "Ey_im", "Ez_re", "Ez_im", "rho", "W_ab")
