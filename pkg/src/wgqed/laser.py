"""CW output power and a pulsed-inversion scheme with a tunable guide.

Putting the gain medium in a waveguide rescales the upper-level spontaneous
rate by eta, i.e. tau_sp -> tau_sp / eta.  Time and rate units are whatever
the caller uses consistently; ``tau_nr = inf`` switches nonradiative decay off.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np


@dataclass(frozen=True)
class LaserParams:
    a_coeff: float
    pump_rate: float
    tau_sp: float
    tau_nr: float
    w_cp: Optional[float] = None

    def __post_init__(self):
        for name in ("a_coeff", "pump_rate", "tau_sp", "tau_nr"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0")
        if self.w_cp is not None and not self.w_cp > 0:
            raise ValueError("w_cp must be > 0")

    def decay_rate(self, eta: float = 1.0) -> float:
        """1/tau for the upper laser level with spontaneous rate scaled by eta."""
        return 1.0 / self.tau_nr + eta / self.tau_sp

    @property
    def tau(self) -> float:
        return 1.0 / self.decay_rate(1.0)

    @property
    def chi(self) -> Optional[float]:
        return None if self.w_cp is None else self.pump_rate / self.w_cp


class CWPower(NamedTuple):
    power: float
    below_threshold: bool


@dataclass(frozen=True)
class EtaSchedule:
    """Piecewise-constant eta(t): consecutive (duration, eta) segments."""

    segments: Tuple[Tuple[float, float], ...] = field(default_factory=tuple)

    def __post_init__(self):
        segs = tuple((float(d), float(e)) for d, e in self.segments)
        object.__setattr__(self, "segments", segs)
        for d, e in segs:
            if not (math.isfinite(d) and d > 0):
                raise ValueError(f"segment duration must be finite and > 0, got {d!r}")
            if not (math.isfinite(e) and e >= 0):
                raise ValueError(f"segment eta must be finite and >= 0, got {e!r}")

    @property
    def boundaries(self) -> np.ndarray:
        return np.concatenate([[0.0], np.cumsum([d for d, _ in self.segments])])

    def eta_at(self, t: float) -> float:
        edges = self.boundaries
        i = int(np.searchsorted(edges, t, side="right")) - 1
        return self.segments[min(max(i, 0), len(self.segments) - 1)][1]


def cw_power_guided(p: LaserParams, eta: float) -> CWPower:
    """Output power with the spontaneous rate scaled by ``eta``.

    Below threshold the (negative) value is returned unclamped and flagged.
    """
    if not eta >= 0:
        raise ValueError("eta must be >= 0")
    power = p.a_coeff * (p.pump_rate - 1.0 / p.tau_nr - eta / p.tau_sp)
    return CWPower(power, power < 0)


def cw_power_free(p: LaserParams) -> CWPower:
    return cw_power_guided(p, 1.0)


def cw_power_exact(p: LaserParams, eta: float = 1.0) -> CWPower:
    """A (chi - 1) / tau without the W_p ~ 1/tau substitution."""
    if p.w_cp is None:
        raise ValueError("cw_power_exact needs the critical pumping rate w_cp")
    if not eta >= 0:
        raise ValueError("eta must be >= 0")
    power = p.a_coeff * (p.pump_rate / p.w_cp - 1.0) * p.decay_rate(eta)
    return CWPower(power, power < 0)


class PulseTrace(NamedTuple):
    t: np.ndarray
    inversion: np.ndarray
    power: np.ndarray


def _segment_coeffs(p: LaserParams, n_total: float, eta: float):
    # dN/dt = source - rate * N
    rate = p.pump_rate + p.decay_rate(eta)
    return p.pump_rate * n_total, rate


def steady_state(p: LaserParams, n_total: float, eta: float) -> float:
    source, rate = _segment_coeffs(p, n_total, eta)
    return source / rate


def inversion_at_boundaries(
    p: LaserParams, schedule: EtaSchedule, n_total: float, n0: float = 0.0
) -> np.ndarray:
    """Exact N at t = 0 and at the end of every segment."""
    out = [n0]
    n = n0
    for duration, eta in schedule.segments:
        source, rate = _segment_coeffs(p, n_total, eta)
        n_inf = source / rate
        n = n_inf + (n - n_inf) * math.exp(-rate * duration)
        out.append(n)
    return np.array(out)


def simulate_pulse(
    p: LaserParams,
    schedule: EtaSchedule,
    n_total: float,
    samples_per_segment: int = 200,
) -> PulseTrace:
    """Upper-level population and radiated power under a stepped eta(t).

    Solves dN/dt = W_p (n_total - N) - N (eta/tau_sp + 1/tau_nr) exactly on
    each constant-eta segment, starting from N(0) = 0.  Radiated power is
    ``A * eta * N / tau_sp``.  Each boundary time appears twice, once with
    the old and once with the new eta, so power steps are not smeared.
    """
    if not schedule.segments:
        raise ValueError("schedule is empty")
    if not n_total > 0:
        raise ValueError("n_total must be > 0")
    if samples_per_segment < 2:
        raise ValueError("samples_per_segment must be >= 2")

    ts, ns, ps = [], [], []
    t0 = 0.0
    n_start = 0.0
    for duration, eta in schedule.segments:
        source, rate = _segment_coeffs(p, n_total, eta)
        n_inf = source / rate
        tau = np.linspace(0.0, duration, samples_per_segment)
        n = n_inf + (n_start - n_inf) * np.exp(-rate * tau)
        ts.append(t0 + tau)
        ns.append(n)
        ps.append(p.a_coeff * eta * n / p.tau_sp)
        t0 += duration
        n_start = float(n[-1])
    return PulseTrace(np.concatenate(ts), np.concatenate(ns), np.concatenate(ps))


def suppress_then_dump(
    suppress_eta: float, suppress_time: float, dump_eta: float, dump_time: float
) -> EtaSchedule:
    """Two-segment schedule: hold the guide near its forbidden size to build
    inversion, then retune it so the stored population decays quickly."""
    return EtaSchedule(((suppress_time, suppress_eta), (dump_time, dump_eta)))


def parse_schedule(records: Sequence[dict]) -> EtaSchedule:
    """Build a schedule from ``{"duration": ..., "eta": ...}`` records."""
    segs: List[Tuple[float, float]] = []
    for i, rec in enumerate(records):
        try:
            segs.append((float(rec["duration"]), float(rec["eta"])))
        except KeyError as exc:
            raise ValueError(f"segment {i}: missing field {exc.args[0]!r}") from None
        except (TypeError, ValueError):
            raise ValueError(f"segment {i}: duration and eta must be numbers") from None
    return EtaSchedule(tuple(segs))
