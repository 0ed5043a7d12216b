"""
Self-contained identity suite run by ``gauss-onsager verify``.

Each check draws its inputs from a seeded generator, so a given seed always
produces the same report.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import scenarios, thermo
from .dynamics import steady_state
from .errors import SingularMatrixError
from .linalg import inverse, max_abs
from .sampling import random_instance

IDENTITY_TOL = 1e-9
TRACE_TOL = 1e-10
CLOSED_FORM_RTOL = 1e-8
LINEAR_RESPONSE_EXPONENT = (2.8, 3.2)
LINEAR_RESPONSE_SCALES = (1e-1, 1e-2, 1e-3, 1e-4)


@dataclass
class CheckResult:
    name: str
    passed: int = 0
    failed: int = 0
    worst: float = 0.0
    details: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.failed == 0 and self.passed > 0

    def record(self, ok: bool, value: float, detail: str = "") -> None:
        self.worst = max(self.worst, value)
        if ok:
            self.passed += 1
        else:
            self.failed += 1
            if detail and len(self.details) < 5:
                self.details.append(detail)


def check_second_law_and_onsager(rng: np.random.Generator, count: int = 1000) -> list[CheckResult]:
    second = CheckResult("second_law")
    onsager = CheckResult("onsager_reconstruction")
    traces = CheckResult("trace_consistency")
    for k in range(count):
        inst = random_instance(rng)
        g, q, theta = inst.gamma, inst.q, inst.theta
        ds = thermo.entropy_rate(g, q, theta)
        phi = thermo.entropy_flux(g, q, theta)
        pi = thermo.entropy_production(g, q, theta, eps=np.inf)
        res = abs(pi - ds - phi)
        second.record(res <= IDENTITY_TOL and pi >= -IDENTITY_TOL, res,
                      f"instance {k}: residual {res:.3e}, Pi {pi:.3e}")
        upsilon = thermo.flow_matrix(g, q, theta)
        gap = abs(thermo.production_from_flow(upsilon, g) - pi)
        onsager.record(gap <= IDENTITY_TOL, gap, f"instance {k}: gap {gap:.3e}")
        tr_gap = max(abs(0.5 * np.trace(upsilon) - phi),
                     abs(0.5 * np.trace(thermo.production_matrix(g, q, theta)) - pi))
        traces.record(tr_gap <= TRACE_TOL, tr_gap, f"instance {k}: trace gap {tr_gap:.3e}")
    return [second, onsager, traces]


def well_conditioned_flows(rng: np.random.Generator, count: int, max_inverse: float = 10.0,
                           max_cond: float = 1e3):
    """Yield ``(upsilon, gamma)`` pairs whose inverses in the asymmetry identity are tame."""
    produced = 0
    while produced < count:
        inst = random_instance(rng)
        g = inst.gamma
        upsilon = thermo.flow_matrix(g, inst.q, inst.theta)
        try:
            factors = [upsilon, g + upsilon, g - upsilon]
            if any(np.linalg.cond(m) > max_cond for m in factors):
                continue
            if max_abs(inverse(upsilon)) > max_inverse:
                continue
        except SingularMatrixError:
            continue
        produced += 1
        yield upsilon, g


def check_asymmetry(rng: np.random.Generator, count: int = 100) -> CheckResult:
    result = CheckResult("asymmetry")
    for k, (upsilon, g) in enumerate(well_conditioned_flows(rng, count)):
        res = thermo.asymmetry_residual(upsilon, g)
        result.record(res <= IDENTITY_TOL, res, f"instance {k}: residual {res:.3e}")
    scalar = 1 / thermo.scalar_onsager(0.5, 1.0) - 1 / thermo.scalar_onsager(-0.5, 1.0)
    res = abs(scalar - 2 / 0.5)
    result.record(res <= IDENTITY_TOL, res, f"scalar: 1/Pi[phi] - 1/Pi[-phi] = {scalar}")
    return result


def linear_response_exponent(upsilon0, gamma, scales=LINEAR_RESPONSE_SCALES) -> float:
    """Slope of ``log |Pi - Pi_linear|`` against ``log s`` along ``s * upsilon0``."""
    gaps = [abs(thermo.production_from_flow(s * upsilon0, gamma)
                - thermo.linear_response_production(s * upsilon0, gamma)) for s in scales]
    slope, _ = np.polyfit(np.log(scales), np.log(gaps), 1)
    return float(slope)


def check_linear_response(rng: np.random.Generator, count: int = 5) -> CheckResult:
    result = CheckResult("linear_response")
    lo, hi = LINEAR_RESPONSE_EXPONENT
    opo = scenarios.opo_closed_forms(1.0, 0.25)
    samples = [(opo.flow, np.eye(2))]
    while len(samples) < count + 1:
        inst = random_instance(rng)
        upsilon = thermo.flow_matrix(inst.gamma, inst.q, inst.theta)
        # the cubic term must not vanish for the s^3 law to be visible
        gi = np.linalg.inv(inst.gamma)
        cubic = abs(np.trace(upsilon @ gi @ upsilon @ gi @ upsilon)) / max(max_abs(upsilon), 1e-300) ** 3
        if cubic > 1e-2:
            samples.append((upsilon, inst.gamma))
    for k, (upsilon, g) in enumerate(samples):
        slope = linear_response_exponent(upsilon, g)
        result.record(lo <= slope <= hi, abs(slope - 3.0), f"sample {k}: exponent {slope:.4f}")
    return result


def _rel(value: float, ref: float) -> float:
    return abs(value - ref) / max(abs(ref), 1e-300)


def check_scenarios() -> CheckResult:
    result = CheckResult("scenario_closed_forms")
    for kind in scenarios.SCENARIO_PARAMETERS:
        spec = scenarios.ScenarioSpec(kind)
        sys = scenarios.stationary_system(spec)
        theta = steady_state(sys)
        cf = scenarios.closed_forms(spec)
        g, q = sys.damping.matrix, sys.env()
        pi = thermo.entropy_production(g, q, theta)
        phi = thermo.entropy_flux(g, q, theta)
        err = max(_rel(pi, cf.Pi), _rel(phi, cf.Phi))
        if cf.theta_ss is not None:
            err = max(err, max_abs(theta - cf.theta_ss) / max_abs(cf.theta_ss))
        result.record(err <= CLOSED_FORM_RTOL, err, f"{kind}: relative error {err:.3e}")
    return result


def run_identity_suite(seed: int = 0, instances: int = 1000, asymmetry_instances: int = 100) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    results = check_second_law_and_onsager(rng, instances)
    results.append(check_asymmetry(rng, asymmetry_instances))
    results.append(check_linear_response(rng))
    results.append(check_scenarios())
    return results
