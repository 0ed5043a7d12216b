"""
Command-line front end.

Commands::

    gauss-onsager simulate --scenario opo --gamma 1 --chi 0.25 --mode steady
    gauss-onsager simulate --scenario opo --sweep chi=0.05..0.45:0.05 --format json
    gauss-onsager simulate --config run.cfg --output out.csv
    gauss-onsager verify --seed 42

Config files are flat ``key: value`` (or ``key = value``) documents; ``#``
starts a comment.  Scenario parameters use dotted keys (``params.chi``, or
just ``chi``).  A sweep may be written ``sweep: chi=0.05..0.45:0.05``,
``sweep.chi: 0.05..0.45 step 0.05`` or ``chi: 0.05..0.45 step 0.05``.
Command-line flags override file values.

Exit codes: 0 success, 2 usage error, 3 instability, 4 invariant violation, 5 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Optional, Sequence

import numpy as np

from . import scenarios, thermo
from .dynamics import default_horizon, default_step, integrate, stability, steady_state
from .errors import ConsistencyError, DomainError, InstabilityError, IntegrationError, NumericalError
from .linalg import max_abs
from .model import psd_tolerance, thermal_cm
from .verification import CLOSED_FORM_RTOL, run_identity_suite

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INSTABILITY = 3
EXIT_INVARIANT = 4
EXIT_IO = 5

TRAJECTORY_COLUMNS = ("t", "S", "dSdt", "Phi", "Pi", "residual_second_law", "residual_onsager", "bona_fide_margin")
MODES = ("trajectory", "steady", "sweep", "verify")
FORMATS = ("csv", "json")
SCENARIO_ALIASES = {
    "opo": "opo",
    "squeezed": "squeezed_bath",
    "squeezed_bath": "squeezed_bath",
    "twomode": "two_mode",
    "two_mode": "two_mode",
}
PARAMETER_NAMES = ("gamma", "chi", "nbar", "gamma_a", "gamma_b", "omega", "omega_p", "r", "theta")
TOP_LEVEL_KEYS = ("scenario", "mode", "t_end", "dt", "sweep", "output", "format", "seed")


class UsageError(Exception):
    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


@dataclass(frozen=True)
class Sweep:
    key: str
    grid: tuple[float, ...]


@dataclass(frozen=True)
class RunConfig:
    scenario: scenarios.ScenarioSpec
    mode: str = "steady"
    t_end: Optional[float] = None
    dt: Optional[float] = None
    sweep: Optional[Sweep] = None
    output: Optional[str] = None
    format: str = "csv"
    seed: int = 0


@dataclass
class RunReport:
    mode: str
    columns: tuple[str, ...]
    rows: list[tuple] = field(default_factory=list)
    comparisons: list[dict[str, Any]] = field(default_factory=list)
    extra: dict[str, Any] = field(default_factory=dict)
    exit_status: int = EXIT_OK
    messages: list[str] = field(default_factory=list)

    def fail(self, status: int, message: str) -> None:
        if self.exit_status == EXIT_OK:
            self.exit_status = status
        self.messages.append(message)


# ---------------------------------------------------------------------------
# configuration

def _number(key: str, raw: Any) -> float:
    try:
        value = float(raw)
    except (TypeError, ValueError):
        raise UsageError(key, f"expected a number, got {raw!r}") from None
    if not math.isfinite(value):
        raise UsageError(key, f"expected a finite number, got {raw!r}")
    return value


def parse_grid(key: str, text: str) -> tuple[float, ...]:
    """``start..end:step`` or ``start..end step s``, both ends inclusive."""
    m = re.fullmatch(r"\s*([^.\s][^\s]*?)\s*\.\.\s*([^\s:]+)\s*(?::|\s+step\s+)\s*(\S+)\s*", text)
    if not m:
        raise UsageError(key, f"grid must look like 'start..end:step' or 'start..end step s', got {text!r}")
    start, end, step = (_number(key, g) for g in m.groups())
    if step <= 0:
        raise UsageError(key, "grid step must be positive")
    if end < start:
        raise UsageError(key, "grid end must not be below its start")
    n = int(math.floor((end - start) / step + 1e-9))
    return tuple(float(f"{start + k * step:.12g}") for k in range(n + 1))


def parse_sweep(text: str) -> Sweep:
    if "=" not in text:
        raise UsageError("sweep", f"expected 'key=start..end:step', got {text!r}")
    key, grid = text.split("=", 1)
    key = key.strip().replace("-", "_")
    if key not in PARAMETER_NAMES:
        raise UsageError("sweep", f"unknown sweep parameter {key!r}")
    return Sweep(key, parse_grid(key, grid))


def parse_config_text(text: str) -> dict[str, str]:
    """Flat ``key: value`` document to a dict of normalized keys and raw string values."""
    values: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        m = re.fullmatch(r"([A-Za-z_][\w.\-]*)\s*[:=]\s*(.*)", line)
        if not m:
            raise UsageError(f"line {lineno}", f"cannot parse {line!r}")
        key, value = m.group(1).replace("-", "_"), m.group(2).strip()
        if key.startswith("sweep."):
            values["sweep"] = f"{key[len('sweep.'):]}={value}"
            continue
        if key in PARAMETER_NAMES:
            key = "params." + key
        if key.startswith("params."):
            name = key[len("params."):]
            if name not in PARAMETER_NAMES:
                raise UsageError(key, "unknown scenario parameter")
            if ".." in value:
                # a grid in place of a value makes this parameter the sweep axis
                values["sweep"] = f"{name}={value}"
                continue
        elif key not in TOP_LEVEL_KEYS:
            raise UsageError(key, "unknown configuration key")
        values[key] = value
    return values


def build_config(values: dict[str, str]) -> RunConfig:
    """Validate a flat key/value mapping (as produced by the file parser and flags) into a :class:`RunConfig`."""
    for key in values:
        if key not in TOP_LEVEL_KEYS and not (key.startswith("params.") and key[7:] in PARAMETER_NAMES):
            raise UsageError(key, "unknown configuration key")
    kind_raw = values.get("scenario", "opo")
    if kind_raw not in SCENARIO_ALIASES:
        raise UsageError("scenario", f"expected one of opo, squeezed, twomode; got {kind_raw!r}")
    kind = SCENARIO_ALIASES[kind_raw]
    params = {k[7:]: _number(k[7:], v) for k, v in values.items() if k.startswith("params.")}
    allowed = scenarios.SCENARIO_PARAMETERS[kind]
    for name in params:
        if name not in allowed:
            raise UsageError(name, f"parameter does not apply to scenario {kind_raw!r}")
    sweep = parse_sweep(values["sweep"]) if values.get("sweep") else None
    if sweep is not None and sweep.key not in allowed:
        raise UsageError("sweep", f"parameter {sweep.key!r} does not apply to scenario {kind_raw!r}")
    mode = values.get("mode") or ("sweep" if sweep else "steady")
    if mode not in MODES:
        raise UsageError("mode", f"expected one of {', '.join(MODES)}; got {mode!r}")
    if mode == "sweep" and sweep is None:
        raise UsageError("sweep", "sweep mode needs a sweep grid")
    fmt = values.get("format", "csv")
    if fmt not in FORMATS:
        raise UsageError("format", f"expected csv or json, got {fmt!r}")
    t_end = _number("t_end", values["t_end"]) if values.get("t_end") else None
    dt = _number("dt", values["dt"]) if values.get("dt") else None
    if dt is not None and dt <= 0:
        raise UsageError("dt", "must be positive")
    if t_end is not None and t_end <= 0:
        raise UsageError("t_end", "must be positive")
    seed_raw = values.get("seed", "0")
    try:
        seed = int(seed_raw)
    except ValueError:
        raise UsageError("seed", f"expected an integer, got {seed_raw!r}") from None
    try:
        spec = scenarios.ScenarioSpec(kind, params)
    except DomainError as exc:
        raise UsageError("scenario", str(exc)) from None
    return RunConfig(spec, mode, t_end, dt, sweep, values.get("output") or None, fmt, seed)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError("arguments", message)


def _make_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gauss-onsager", description="Gaussian Lyapunov dynamics and non-linear Onsager checks.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sim = sub.add_parser("simulate", help="trajectory, steady-state or sweep run")
    ver = sub.add_parser("verify", help="run the identity suite")
    for p in (sim, ver):
        p.add_argument("--config", help="flat key: value configuration file")
        p.add_argument("--output", help="output path (default: stdout)")
        p.add_argument("--format", help="csv or json")
        p.add_argument("--seed", help="seed for randomized checks")
    sim.add_argument("--scenario", help="opo, squeezed or twomode")
    for name in PARAMETER_NAMES:
        sim.add_argument("--" + name.replace("_", "-"), dest=name, metavar="X")
    sim.add_argument("--mode", help="trajectory, steady, sweep or verify")
    sim.add_argument("--t-end", dest="t_end", metavar="T")
    sim.add_argument("--dt", metavar="DT")
    sim.add_argument("--sweep", metavar="KEY=START..END:STEP")
    return parser


def parse_config(argv: Sequence[str]) -> RunConfig:
    """Parse command-line arguments, reading ``--config`` first and letting flags win."""
    args = _make_parser().parse_args(list(argv))
    values: dict[str, str] = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                values.update(parse_config_text(fh.read()))
        except OSError as exc:
            raise UsageError("config", f"cannot read {args.config}: {exc}") from None
    flags = vars(args)
    for key in ("scenario", "mode", "t_end", "dt", "sweep", "output", "format", "seed"):
        if flags.get(key) is not None:
            values[key] = flags[key]
    for name in PARAMETER_NAMES:
        if flags.get(name) is not None:
            values["params." + name] = flags[name]
    if args.command == "verify":
        values["mode"] = "verify"
    return build_config(values)


# ---------------------------------------------------------------------------
# running

def _rel(value: float, ref: float) -> float:
    if ref == 0:
        return abs(value)
    return abs(value - ref) / abs(ref)


def _run_trajectory(cfg: RunConfig) -> RunReport:
    report = RunReport("trajectory", TRAJECTORY_COLUMNS)
    sys_ = scenarios.build(cfg.scenario)
    t_end = cfg.t_end if cfg.t_end is not None else default_horizon(sys_)
    dt = cfg.dt if cfg.dt is not None else default_step(sys_)
    theta0 = thermal_cm(cfg.scenario.params["nbar"], sys_.modes)
    traj = integrate(sys_, theta0, t_end, dt)
    for t, theta in zip(traj.times, traj.states):
        report.rows.append(thermo.thermo_sample(sys_, theta, t).as_row())
    report.extra["dt"] = t_end / (len(traj) - 1)
    report.extra["t_end"] = t_end
    return report


def _steady_summary(spec: scenarios.ScenarioSpec):
    sys_ = scenarios.stationary_system(spec)
    report = stability(sys_)
    if not report.stable:
        return sys_, report, None, None
    theta = steady_state(sys_)
    return sys_, report, theta, thermo.thermo_sample(sys_, theta, 0.0)


def _comparisons(spec, sys_, theta, sample) -> list[dict[str, Any]]:
    cf = scenarios.closed_forms(spec)
    out = [
        {"quantity": "Pi", "value": sample.Pi, "reference": cf.Pi, "relative_error": _rel(sample.Pi, cf.Pi)},
        {"quantity": "Phi", "value": sample.Phi, "reference": cf.Phi, "relative_error": _rel(sample.Phi, cf.Phi)},
    ]
    if cf.theta_ss is not None:
        err = max_abs(theta - cf.theta_ss) / max_abs(cf.theta_ss)
        out.append({"quantity": "theta_ss", "value": None, "reference": None, "relative_error": err})
    if cf.flow is not None:
        upsilon = thermo.flow_matrix(sys_.damping.matrix, sys_.env(), theta)
        err = max_abs(upsilon - cf.flow) / max(max_abs(cf.flow), 1e-300)
        out.append({"quantity": "flow_matrix", "value": None, "reference": None, "relative_error": err})
    return out


def _run_steady(cfg: RunConfig) -> RunReport:
    report = RunReport("steady", TRAJECTORY_COLUMNS)
    sys_, stab, theta, sample = _steady_summary(cfg.scenario)
    report.extra["spectral_abscissa"] = stab.spectral_abscissa
    if theta is None:
        report.fail(EXIT_INSTABILITY, f"no steady state: {stab}")
        return report
    report.rows.append(sample.as_row())
    report.extra["theta_ss"] = {"real": theta.real.tolist(), "imag": theta.imag.tolist()}
    report.comparisons = _comparisons(cfg.scenario, sys_, theta, sample)
    for c in report.comparisons:
        if not c["relative_error"] <= CLOSED_FORM_RTOL:
            report.fail(EXIT_INVARIANT, f"{c['quantity']} deviates from its closed form "
                                        f"(relative error {c['relative_error']:.3e})")
    return report


def _sweep_point(spec: scenarios.ScenarioSpec, key: str, value: float) -> tuple:
    point = spec.replace(**{key: value})
    sys_, stab, theta, sample = _steady_summary(point)
    if theta is None:
        nan = float("nan")
        return (value, False, stab.spectral_abscissa) + (nan,) * 9
    try:
        ref = scenarios.closed_forms(point).Pi
    except DomainError:
        ref = float("nan")
    return (value, True, stab.spectral_abscissa, sample.S, sample.dS_dt, sample.Phi, sample.Pi,
            sample.residual_second_law, sample.residual_onsager, sample.bona_fide_margin, ref, _rel(sample.Pi, ref))


def _run_sweep(cfg: RunConfig) -> RunReport:
    key = cfg.sweep.key
    columns = (key, "stable", "spectral_abscissa", "S", "dSdt", "Phi", "Pi", "residual_second_law",
               "residual_onsager", "bona_fide_margin", "Pi_closed_form", "relative_error_Pi")
    report = RunReport("sweep", columns)
    workers = max(1, min(8, len(cfg.sweep.grid)))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        report.rows = list(pool.map(lambda v: _sweep_point(cfg.scenario, key, v), cfg.sweep.grid))
    for row in report.rows:
        if row[1] and not row[-1] <= CLOSED_FORM_RTOL:
            report.fail(EXIT_INVARIANT, f"{key} = {row[0]}: Pi deviates from closed form ({row[-1]:.3e})")
    return report


def _run_verify(cfg: RunConfig) -> RunReport:
    report = RunReport("verify", ("check", "passed", "failed", "worst", "ok"))
    for res in run_identity_suite(cfg.seed):
        report.rows.append((res.name, res.passed, res.failed, res.worst, res.ok))
        if not res.ok:
            report.fail(EXIT_INVARIANT, f"invariant violated: {res.name} ({'; '.join(res.details)})")
    return report


_RUNNERS = {"trajectory": _run_trajectory, "steady": _run_steady, "sweep": _run_sweep, "verify": _run_verify}


def run(cfg: RunConfig) -> RunReport:
    """Execute a configuration; numerical failures are folded into the report's exit status."""
    try:
        report = _RUNNERS[cfg.mode](cfg)
    except InstabilityError as exc:
        report = RunReport(cfg.mode, ())
        report.fail(EXIT_INSTABILITY, str(exc))
    except (IntegrationError, ConsistencyError, NumericalError) as exc:
        report = RunReport(cfg.mode, ())
        report.fail(EXIT_INVARIANT, str(exc))
    report.extra.setdefault("scenario", cfg.scenario.kind)
    report.extra.setdefault("params", dict(cfg.scenario.params))
    return report


# ---------------------------------------------------------------------------
# output

def _fmt(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".12g")
    return str(value)


def _jsonable(value: Any) -> Any:
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        v = float(format(float(value), ".12g"))
        return v if math.isfinite(v) else None
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def emit(report: RunReport, fmt: str = "csv") -> bytes:
    """Serialize a report; floats carry 12 significant digits."""
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        if report.columns:
            writer.writerow(report.columns)
        for row in report.rows:
            writer.writerow([_fmt(v) for v in row])
        return buf.getvalue().encode()
    if fmt == "json":
        doc = {
            "mode": report.mode,
            "columns": list(report.columns),
            "rows": [dict(zip(report.columns, row)) for row in report.rows],
            "comparisons": report.comparisons,
            "exit_status": report.exit_status,
            "messages": report.messages,
            **report.extra,
        }
        return (json.dumps(_jsonable(doc), indent=2) + "\n").encode()
    raise ValueError(f"unknown format {fmt!r}")


def write_output(data: bytes, path: Optional[str]) -> None:
    if path is None:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
        return
    with open(path, "wb") as fh:
        fh.write(data)


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        psd_tolerance()
        cfg = parse_config(argv)
    except (UsageError, DomainError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    report = run(cfg)
    for message in report.messages:
        print(message, file=sys.stderr)
    try:
        write_output(emit(report, cfg.format), cfg.output)
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return report.exit_status


if __name__ == "__main__":
    sys.exit(main())
