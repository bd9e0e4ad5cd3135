"""Command-line front end.

Exit codes: 0 success, 1 numerical-domain error (e.g. a rate evaluated on an
exact mode cutoff), 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import math
import os
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from . import __version__
from .emission import (
    DipoleOrientation,
    DivergentSumError,
    eta_directional,
    eta_mean,
    eta_mean_monte_carlo,
)
from .fields import FIELD_MAP_COLUMNS, MediumSpec, complete_amplitudes, field_map, lorentzian
from .laser import (
    LaserParams,
    cw_power_exact,
    cw_power_free,
    cw_power_guided,
    parse_schedule,
    simulate_pulse,
)
from .modes import WaveguideGeometry, enumerate_modes, make_mode, nearest_resonance, resonance_loci
from .sweep import (
    DEFAULT_CAP,
    QUANTITIES,
    SWEEP_COLUMNS,
    ConfigError,
    RunRecord,
    SweepRequest,
    run_sweep,
    schedule_records_from_config,
    sweep_request_from_config,
    to_csv,
)

ETA_COLUMNS = ("gamma_x", "gamma_y", "quantity", "value", "n_modes", "note")
ETA_MC_COLUMNS = ETA_COLUMNS + ("mc_mean", "mc_stderr")
RESONANCE_COLUMNS = ("gamma_x", "modes")
LASER_CW_COLUMNS = ("eta", "p_free", "p_guided", "p_exact", "below_threshold")
PULSE_COLUMNS = ("t", "N", "power")


class DomainError(Exception):
    pass


class UsageError(Exception):
    pass


def _geometry(args) -> WaveguideGeometry:
    try:
        return WaveguideGeometry(args.gamma_x, args.gamma_y, args.wavelength)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _orientation(args) -> Optional[DipoleOrientation]:
    if args.alpha is None:
        return None
    try:
        return DipoleOrientation(args.alpha, args.beta)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _mode_name(mode) -> str:
    return f"{mode[0]}:{mode[1]}"


def cmd_eta(args):
    geom = _geometry(args)
    d = _orientation(args)
    quantity = "eta_mean" if d is None else "eta_directional"
    n_modes = len(enumerate_modes(geom))
    note = ""
    near = nearest_resonance(geom)
    if args.guard is not None and abs(near.distance) < args.guard:
        value = args.cap
        note = f"resonant: mode {_mode_name(near.index)} within guard"
    else:
        try:
            value = eta_mean(geom) if d is None else eta_directional(geom, d)
        except DivergentSumError as exc:
            raise DomainError(f"{exc}; pass --guard to report a capped value") from None
        if n_modes == 0:
            note = "forbidden: no propagating modes"
    row: List[Any] = [geom.gamma_x, geom.gamma_y, quantity, value, n_modes, note]
    inputs = {"gamma_x": geom.gamma_x, "gamma_y": geom.gamma_y, "alpha": args.alpha,
              "beta": args.beta, "guard": args.guard}
    if args.monte_carlo:
        if "resonant" in note:
            raise DomainError("Monte-Carlo estimate undefined at a resonance")
        mean, err = eta_mean_monte_carlo(geom, args.monte_carlo, args.seed)
        row += [mean, err]
        inputs["monte_carlo"] = args.monte_carlo
        return RunRecord("eta", inputs, list(ETA_MC_COLUMNS), [row], seed=args.seed)
    return RunRecord("eta", inputs, list(ETA_COLUMNS), [row])


def cmd_sweep(args):
    if args.config:
        try:
            text = Path(args.config).read_text()
        except OSError as exc:
            raise UsageError(f"cannot read config: {exc}") from None
        req = sweep_request_from_config(text, source=str(args.config))
    else:
        missing = [f for f in ("axis", "start", "stop", "count", "fixed") if getattr(args, f) is None]
        if missing:
            raise UsageError("sweep needs --config or all of " + ", ".join("--" + m for m in missing))
        try:
            req = SweepRequest(
                axis=args.axis, start=args.start, stop=args.stop, count=args.count,
                fixed_gamma=args.fixed, quantity=args.quantity,
                alpha=args.alpha if args.alpha is not None else 0.0, beta=args.beta,
                resonance_guard=args.guard if args.guard is not None else 1e-9, cap=args.cap,
            )
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    rows = [list(r.as_tuple()) for r in run_sweep(req)]
    inputs = {k: getattr(req, k) for k in req.__dataclass_fields__}
    return RunRecord("sweep", inputs, list(SWEEP_COLUMNS), rows)


def cmd_resonances(args):
    try:
        loci = resonance_loci(args.gamma_y, args.max)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    rows = [[g, ";".join(_mode_name(m) for m in modes)] for g, modes in loci]
    return RunRecord("resonances", {"gamma_y": args.gamma_y, "max": args.max},
                     list(RESONANCE_COLUMNS), rows)


def cmd_field_map(args):
    geom = _geometry(args)
    try:
        mode = make_mode(geom, args.mode[0], args.mode[1])
        amps = complete_amplitudes(mode, complex(args.e1), complex(args.e2), geom)
        lineshape = args.lineshape
        if args.linewidth is not None:
            lineshape = lorentzian(args.detuning, args.linewidth)
        medium = MediumSpec(args.index, args.dipole, lineshape)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    nx, ny = args.grid
    data = field_map(amps, medium, nx, ny)
    rows = [list(r) for r in zip(*(data[c].tolist() for c in FIELD_MAP_COLUMNS))]
    inputs = {"gamma_x": geom.gamma_x, "gamma_y": geom.gamma_y, "wavelength": geom.wavelength,
              "mode": list(args.mode), "e1": str(amps.e1), "e2": str(amps.e2), "e3": str(amps.e3),
              "index": args.index, "dipole": args.dipole, "lineshape": lineshape, "grid": [nx, ny]}
    return RunRecord("field-map", inputs, list(FIELD_MAP_COLUMNS), rows)


def _laser_params(args, overrides: Optional[Dict[str, float]] = None) -> LaserParams:
    vals = {"a_coeff": args.a, "pump_rate": args.pump, "tau_sp": args.tau_sp,
            "tau_nr": args.tau_nr, "w_cp": args.w_cp}
    for k, v in (overrides or {}).items():
        if vals.get(k) is None:
            vals[k] = v
    missing = [k for k in ("a_coeff", "pump_rate", "tau_sp", "tau_nr") if vals[k] is None]
    if missing:
        raise UsageError("missing laser parameters: " + ", ".join(missing))
    try:
        return LaserParams(**vals)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_laser_cw(args):
    p = _laser_params(args)
    notes = []
    if args.eta is not None:
        eta = args.eta
    elif args.gamma_x is not None and args.gamma_y is not None:
        try:
            eta = eta_mean(WaveguideGeometry(args.gamma_x, args.gamma_y))
        except DivergentSumError as exc:
            raise DomainError(str(exc)) from None
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    else:
        raise UsageError("laser-cw needs --eta or both --gamma-x and --gamma-y")
    if eta < 0:
        raise UsageError("eta must be >= 0")
    free = cw_power_free(p)
    guided = cw_power_guided(p, eta)
    exact = cw_power_exact(p, eta).power if p.w_cp is not None else ""
    if guided.below_threshold:
        notes.append("below threshold: guided power is negative")
    inputs = {"a_coeff": p.a_coeff, "pump_rate": p.pump_rate, "tau_sp": p.tau_sp,
              "tau_nr": p.tau_nr if math.isfinite(p.tau_nr) else None, "w_cp": p.w_cp, "eta": eta}
    row = [eta, free.power, guided.power, exact, guided.below_threshold]
    return RunRecord("laser-cw", inputs, list(LASER_CW_COLUMNS), [row], notes=notes)


def cmd_laser_pulse(args):
    try:
        text = Path(args.config).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config: {exc}") from None
    records, laser_fields = schedule_records_from_config(text, source=str(args.config))
    n_total = args.n_total if args.n_total is not None else laser_fields.pop("n_total", 1.0)
    laser_fields.pop("n_total", None)
    p = _laser_params(args, laser_fields)
    try:
        schedule = parse_schedule(records)
    except ValueError as exc:
        raise ConfigError(f"{args.config}: {exc}") from None
    trace = simulate_pulse(p, schedule, n_total, args.samples)
    rows = [list(r) for r in zip(trace.t.tolist(), trace.inversion.tolist(), trace.power.tolist())]
    inputs = {"a_coeff": p.a_coeff, "pump_rate": p.pump_rate, "tau_sp": p.tau_sp,
              "tau_nr": p.tau_nr if math.isfinite(p.tau_nr) else None, "n_total": n_total,
              "segments": [list(s) for s in schedule.segments], "samples": args.samples}
    return RunRecord("laser-pulse", inputs, list(PULSE_COLUMNS), rows)


def _pair(kind):
    def parse(text):
        parts = text.replace(",", " ").split()
        if len(parts) != 2:
            raise argparse.ArgumentTypeError(f"expected two values, got {text!r}")
        return tuple(kind(p) for p in parts)
    return parse


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wgqed", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", help="write to this path instead of stdout")
    common.add_argument("--digits", type=int, default=6, help="significant digits in CSV")
    common.add_argument("--timestamp", action="store_true",
                        help="stamp the JSON record with the current UTC time")
    sub = parser.add_subparsers(dest="command", required=True)

    def geometry_args(p, required=True):
        p.add_argument("--gamma-x", type=float, required=required)
        p.add_argument("--gamma-y", type=float, required=required)
        p.add_argument("--wavelength", type=float, default=2 * math.pi)

    p = sub.add_parser("eta", parents=[common], help="emission-rate ratio for one geometry")
    geometry_args(p)
    p.add_argument("--alpha", type=float, help="dipole polar angle; omit for the orientation average")
    p.add_argument("--beta", type=float, default=0.0)
    p.add_argument("--guard", type=float, help="report a capped value within this distance of cutoff")
    p.add_argument("--cap", type=float, default=DEFAULT_CAP)
    p.add_argument("--monte-carlo", type=int, metavar="N", help="also estimate eta_mean from N samples")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_eta)

    p = sub.add_parser("sweep", parents=[common], help="sweep gamma_x or gamma_y")
    p.add_argument("--config", help="INI file with a [sweep] section")
    p.add_argument("--axis", choices=("gamma_x", "gamma_y"))
    p.add_argument("--start", type=float)
    p.add_argument("--stop", type=float)
    p.add_argument("--count", type=int)
    p.add_argument("--fixed", type=float, help="value of the other gamma")
    p.add_argument("--quantity", choices=QUANTITIES, default="eta_mean")
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float, default=0.0)
    p.add_argument("--guard", type=float)
    p.add_argument("--cap", type=float, default=DEFAULT_CAP)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("resonances", parents=[common], help="list resonance loci in gamma_x")
    p.add_argument("--gamma-y", type=float, required=True)
    p.add_argument("--max", type=float, required=True, help="largest gamma_x to report")
    p.set_defaults(func=cmd_resonances)

    p = sub.add_parser("field-map", parents=[common], help="field and absorption rate on a grid")
    geometry_args(p)
    p.add_argument("--mode", type=_pair(int), required=True, metavar="NX,NY")
    p.add_argument("--e1", default="1")
    p.add_argument("--e2", default="0")
    p.add_argument("--index", type=float, default=1.0, help="refractive index")
    p.add_argument("--dipole", type=float, default=1.0, help="e|r_ab|")
    p.add_argument("--lineshape", type=float, default=1.0, help="line-shape value g(detuning)")
    p.add_argument("--linewidth", type=float, help="Lorentzian FWHM; overrides --lineshape")
    p.add_argument("--detuning", type=float, default=0.0)
    p.add_argument("--grid", type=_pair(int), default=(33, 33), metavar="NX,NY")
    p.set_defaults(func=cmd_field_map)

    def laser_args(p, required):
        p.add_argument("--a", type=float, required=required, help="power coefficient A")
        p.add_argument("--pump", type=float, required=required, help="pumping rate W_p")
        p.add_argument("--tau-sp", type=float, required=required)
        p.add_argument("--tau-nr", type=float, required=required)
        p.add_argument("--w-cp", type=float, help="critical pumping rate")

    p = sub.add_parser("laser-cw", parents=[common], help="CW output power")
    laser_args(p, True)
    p.add_argument("--eta", type=float)
    p.add_argument("--gamma-x", type=float)
    p.add_argument("--gamma-y", type=float)
    p.set_defaults(func=cmd_laser_cw)

    p = sub.add_parser("laser-pulse", parents=[common], help="stepped-eta inversion trace")
    p.add_argument("--config", required=True, help="INI file with [segment.N] sections")
    laser_args(p, False)
    p.add_argument("--n-total", type=float)
    p.add_argument("--samples", type=int, default=200, help="samples per segment")
    p.set_defaults(func=cmd_laser_pulse)
    return parser


def _timestamp() -> str:
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    now = (_dt.datetime.fromtimestamp(int(epoch), _dt.timezone.utc) if epoch
           else _dt.datetime.now(_dt.timezone.utc))
    return now.strftime("%Y-%m-%dT%H:%M:%SZ")


def render(record: RunRecord, fmt: str, digits: int) -> str:
    if fmt == "json":
        return record.to_json() + "\n"
    return to_csv(record.columns, record.rows, digits)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        record = args.func(args)
    except (UsageError, ConfigError) as exc:
        print(f"wgqed {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except DomainError as exc:
        print(f"wgqed {args.command}: {exc}", file=sys.stderr)
        return 1
    if args.timestamp:
        record.timestamp = _timestamp()
    for note in record.notes:
        print(f"note: {note}", file=sys.stderr)
    text = render(record, args.format, args.digits)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
