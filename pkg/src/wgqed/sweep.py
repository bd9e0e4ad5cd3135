"""Parameter sweeps over guide size and the serialized run record."""

from __future__ import annotations

import configparser
import json
import math
import os
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from . import __version__
from .emission import DipoleOrientation, DivergentSumError, eta_directional, eta_mean
from .modes import DEFAULT_RESONANCE_EPSILON, WaveguideGeometry, enumerate_modes, nearest_resonance

AXES = ("gamma_x", "gamma_y")
QUANTITIES = ("eta_mean", "eta_directional", "mode_count")
DEFAULT_CAP = 1e3

SWEEP_COLUMNS = ("gamma", "value", "distance", "resonant")


class ConfigError(ValueError):
    """Bad sweep/schedule configuration; message names the field and line."""


@dataclass(frozen=True)
class SweepRequest:
    axis: str
    start: float
    stop: float
    count: int
    fixed_gamma: float
    quantity: str = "eta_mean"
    alpha: float = 0.0
    beta: float = 0.0
    resonance_guard: float = DEFAULT_RESONANCE_EPSILON
    cap: float = DEFAULT_CAP

    def __post_init__(self):
        if self.axis not in AXES:
            raise ValueError(f"axis must be one of {AXES}, got {self.axis!r}")
        if self.quantity not in QUANTITIES:
            raise ValueError(f"quantity must be one of {QUANTITIES}, got {self.quantity!r}")
        if not (math.isfinite(self.start) and math.isfinite(self.stop) and self.start < self.stop):
            raise ValueError(f"need start < stop, got [{self.start}, {self.stop}]")
        if self.start <= 0:
            raise ValueError("sweep range must be positive")
        if int(self.count) != self.count or self.count < 2:
            raise ValueError(f"count must be an integer >= 2, got {self.count!r}")
        if not self.fixed_gamma > 0:
            raise ValueError("fixed_gamma must be > 0")
        if not 0.0 < self.resonance_guard < 1.0:
            raise ValueError("resonance_guard must lie in (0, 1)")
        if self.quantity == "eta_directional":
            DipoleOrientation(self.alpha, self.beta)

    def grid(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, int(self.count))

    def geometry(self, value: float) -> WaveguideGeometry:
        if self.axis == "gamma_x":
            return WaveguideGeometry(float(value), self.fixed_gamma)
        return WaveguideGeometry(self.fixed_gamma, float(value))


@dataclass(frozen=True)
class SweepRow:
    gamma: float
    value: float
    distance: float
    resonant: bool

    def as_tuple(self):
        return (self.gamma, self.value, self.distance, self.resonant)


def evaluate_point(req: SweepRequest, value: float) -> SweepRow:
    geom = req.geometry(value)
    distance = abs(nearest_resonance(geom).distance)
    resonant = distance < req.resonance_guard
    if req.quantity == "mode_count":
        return SweepRow(float(value), float(len(enumerate_modes(geom))), distance, resonant)
    if resonant:
        return SweepRow(float(value), req.cap, distance, True)
    try:
        if req.quantity == "eta_mean":
            out = eta_mean(geom)
        else:
            out = eta_directional(geom, DipoleOrientation(req.alpha, req.beta))
    except DivergentSumError:
        return SweepRow(float(value), req.cap, distance, True)
    return SweepRow(float(value), out, distance, False)


def thread_count() -> int:
    raw = os.environ.get("WGQED_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return os.cpu_count() or 1


def run_sweep(req: SweepRequest, threads: Optional[int] = None) -> List[SweepRow]:
    """Evaluate ``req.quantity`` on a uniform grid.

    Points within ``resonance_guard`` of a cutoff carry ``req.cap`` and the
    resonant flag.  Row order follows the grid regardless of ``threads``.
    """
    points = req.grid()
    threads = thread_count() if threads is None else max(1, threads)
    if threads == 1 or len(points) < 64:
        return [evaluate_point(req, v) for v in points]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda v: evaluate_point(req, v), points))


# -- configuration files --------------------------------------------------

def _key_line(text: str, section: str, key: str) -> Optional[int]:
    current = None
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        m = re.match(r"\[(.+)\]$", stripped)
        if m:
            current = m.group(1).strip()
        elif current == section and re.match(rf"{re.escape(key)}\s*[=:]", stripped):
            return lineno
    return None


def _read_config(text: str, source: str) -> configparser.ConfigParser:
    cp = configparser.ConfigParser(interpolation=None)
    try:
        cp.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from None
    return cp


def _typed(cp, text, source, section, key, conv, default=None, required=False):
    if not cp.has_option(section, key):
        if required:
            raise ConfigError(f"{source}: [{section}] missing required field '{key}'")
        return default
    raw = cp.get(section, key)
    try:
        return conv(raw)
    except ValueError:
        line = _key_line(text, section, key)
        where = f"line {line}" if line else "unknown line"
        raise ConfigError(f"{source}:{where}: [{section}] {key} = {raw!r} is not a valid {conv.__name__}") from None


def sweep_request_from_config(text: str, source: str = "<config>") -> SweepRequest:
    """Parse a ``[sweep]`` section into a request.

    Example::

        [sweep]
        axis = gamma_x
        start = 0.1
        stop = 3.0
        count = 2000
        fixed_gamma = 1.6
        quantity = eta_mean
    """
    cp = _read_config(text, source)
    if not cp.has_section("sweep"):
        raise ConfigError(f"{source}: missing [sweep] section")
    known = {f for f in SweepRequest.__dataclass_fields__}
    for key in cp.options("sweep"):
        if key not in known:
            line = _key_line(text, "sweep", key)
            raise ConfigError(f"{source}:line {line}: [sweep] unknown field '{key}'")
    g = lambda key, conv, **kw: _typed(cp, text, source, "sweep", key, conv, **kw)  # noqa: E731
    kwargs = dict(
        axis=g("axis", str, required=True),
        start=g("start", float, required=True),
        stop=g("stop", float, required=True),
        count=g("count", int, required=True),
        fixed_gamma=g("fixed_gamma", float, required=True),
        quantity=g("quantity", str, default="eta_mean"),
        alpha=g("alpha", float, default=0.0),
        beta=g("beta", float, default=0.0),
        resonance_guard=g("resonance_guard", float, default=DEFAULT_RESONANCE_EPSILON),
        cap=g("cap", float, default=DEFAULT_CAP),
    )
    try:
        return SweepRequest(**kwargs)
    except ValueError as exc:
        raise ConfigError(f"{source}: [sweep] {exc}") from None


def schedule_records_from_config(text: str, source: str = "<config>"):
    """Read ``[segment.N]`` sections (in N order) and an optional ``[laser]``
    section.  Returns ``(records, laser_fields)``."""
    cp = _read_config(text, source)
    seg_names = []
    for name in cp.sections():
        m = re.fullmatch(r"segment\.(\d+)", name)
        if m:
            seg_names.append((int(m.group(1)), name))
        elif name != "laser":
            raise ConfigError(f"{source}: unknown section [{name}]")
    if not seg_names:
        raise ConfigError(f"{source}: no [segment.N] sections")
    records = []
    for _, name in sorted(seg_names):
        records.append({
            "duration": _typed(cp, text, source, name, "duration", float, required=True),
            "eta": _typed(cp, text, source, name, "eta", float, required=True),
        })
    laser: Dict[str, float] = {}
    if cp.has_section("laser"):
        for key in cp.options("laser"):
            laser[key] = _typed(cp, text, source, "laser", key, float)
    return records, laser


# -- run record -------------------------------------------------------------

@dataclass
class RunRecord:
    command: str
    inputs: Dict[str, Any]
    columns: List[str]
    rows: List[List[Any]]
    version: str = __version__
    seed: Optional[int] = None
    timestamp: Optional[str] = None
    notes: List[str] = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, allow_nan=False)

    @classmethod
    def from_json(cls, text: str) -> "RunRecord":
        return cls(**json.loads(text))


def format_value(v: Any, digits: int = 6) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        if v == 0:
            return "0"
        return f"{float(v):.{digits}g}"
    return str(v)


def to_csv(columns: Sequence[str], rows: Sequence[Sequence[Any]], digits: int = 6) -> str:
    lines = [",".join(columns)]
    lines += [",".join(format_value(v, digits) for v in row) for row in rows]
    return "\n".join(lines) + "\n"
