"""
Preset driven-dissipative setups and their closed-form steady states.

Drifts are written down from the Heisenberg equations of motion
``da/dt = -i [a, H] - (gamma/2) a`` in the ordering (a, a^dagger, b, b^dagger).

* OPO, ``H = -(i chi/2)(a^dagger^2 - a^2)``:  ``da/dt = -chi a^dagger - (gamma/2) a``.
* Squeezed bath, ``H = omega a^dagger a``:   ``da/dt = -i omega a - (gamma/2) a``.
* Two-mode squeezing, ``H = -(i chi/2)(a^dagger b^dagger - a b)``:
  ``da/dt = -(chi/2) b^dagger - (gamma_a/2) a`` and likewise for ``b``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import partial
from typing import Mapping, Optional

import numpy as np
from numpy.typing import NDArray

from .dynamics import rotating_frame_system
from .errors import DomainError
from .model import DampingMatrix, EnvCovMatrix, LyapunovSystem, squeezed_thermal_cm, thermal_cm

SCENARIO_PARAMETERS: dict[str, tuple[str, ...]] = {
    "opo": ("gamma", "chi", "nbar"),
    "squeezed_bath": ("gamma", "omega", "omega_p", "nbar", "r", "theta"),
    "two_mode": ("gamma_a", "gamma_b", "chi", "nbar"),
}

DEFAULTS: dict[str, dict[str, float]] = {
    "opo": {"gamma": 1.0, "chi": 0.25, "nbar": 0.0},
    "squeezed_bath": {"gamma": 1.0, "omega": 1.0, "omega_p": 1.5, "nbar": 0.0, "r": 0.5, "theta": 0.0},
    "two_mode": {"gamma_a": 1.0, "gamma_b": 2.0, "chi": 1.0, "nbar": 0.0},
}


@dataclass(frozen=True)
class ScenarioSpec:
    """A scenario kind plus its named parameters; missing parameters take the demo defaults."""

    kind: str
    params: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in SCENARIO_PARAMETERS:
            raise DomainError(f"unknown scenario {self.kind!r}; expected one of {sorted(SCENARIO_PARAMETERS)}")
        unknown = set(self.params) - set(SCENARIO_PARAMETERS[self.kind])
        if unknown:
            raise DomainError(f"parameters {sorted(unknown)} do not apply to scenario {self.kind!r}")
        merged = dict(DEFAULTS[self.kind])
        merged.update({k: float(v) for k, v in self.params.items()})
        object.__setattr__(self, "params", merged)

    def replace(self, **params) -> "ScenarioSpec":
        return ScenarioSpec(self.kind, {**self.params, **params})

    def is_stable_region(self) -> bool:
        p = self.params
        if self.kind == "opo":
            return 4 * p["chi"] ** 2 < p["gamma"] ** 2
        if self.kind == "two_mode":
            return p["chi"] ** 2 < p["gamma_a"] * p["gamma_b"]
        return p["gamma"] > 0


@dataclass(frozen=True, eq=False)
class ClosedForms:
    """
    Analytic steady-state quantities.  ``theta_ss`` is in the rotating frame
    for the squeezed bath; matrices that have no closed form are ``None``.
    """

    Pi: float
    Phi: float
    theta_ss: Optional[NDArray[np.complex128]] = None
    flow: Optional[NDArray[np.complex128]] = None
    production: Optional[NDArray[np.complex128]] = None
    m_tilde: Optional[complex] = None


def _positive(name: str, value: float) -> None:
    if not value > 0:
        raise DomainError(f"{name} must be positive, got {value}")


def build_opo(gamma: float, chi: float, nbar: float = 0.0) -> LyapunovSystem:
    _positive("gamma", gamma)
    hamiltonian = -chi * np.array([[0, 1], [1, 0]], dtype=complex)
    damping = DampingMatrix.uniform(gamma, 1)
    env = EnvCovMatrix.fixed(thermal_cm(nbar, 1))
    return LyapunovSystem.from_hamiltonian_part(hamiltonian, damping, env, "opo")


def opo_closed_forms(gamma: float, chi: float, nbar: float = 0.0) -> ClosedForms:
    _positive("gamma", gamma)
    den = gamma ** 2 - 4 * chi ** 2
    if den <= 0:
        raise DomainError(f"OPO is unstable for 4 chi^2 >= gamma^2 (gamma={gamma}, chi={chi})")
    q = nbar + 0.5
    theta = q / den * np.array([[gamma ** 2, -2 * gamma * chi], [-2 * gamma * chi, gamma ** 2]], dtype=complex)
    flow = 2 * gamma * chi / den * np.array([[2 * chi, -gamma], [-gamma, 2 * chi]], dtype=complex)
    production = 4 * gamma * chi / den * np.array(
        [[chi, -2 * chi ** 2 / gamma], [-2 * chi ** 2 / gamma, chi]], dtype=complex)
    pi = 4 * gamma * chi ** 2 / den
    return ClosedForms(Pi=pi, Phi=pi, theta_ss=theta, flow=flow, production=production)


def build_squeezed_bath(gamma: float, omega: float, omega_p: float, nbar: float = 0.0,
                        r: float = 0.0, theta: float = 0.0) -> LyapunovSystem:
    _positive("gamma", gamma)
    hamiltonian = np.diag([-1j * omega, 1j * omega])
    damping = DampingMatrix.uniform(gamma, 1)
    env = EnvCovMatrix(func=partial(squeezed_thermal_cm, nbar, r, theta, omega_p), frequency=2 * omega_p)
    return LyapunovSystem.from_hamiltonian_part(hamiltonian, damping, env, "squeezed_bath")


def squeezed_bath_closed_forms(gamma: float, omega: float, omega_p: float, nbar: float = 0.0,
                               r: float = 0.0, theta: float = 0.0) -> ClosedForms:
    """
    Long-time state in the frame co-rotating at ``omega_p``.

    The coherence becomes ``M_tilde = gamma M / (gamma - 2 i Delta)`` with
    ``Delta = omega_p - omega``; this sign follows from the drift above.
    The flux ``4 gamma Delta^2 sinh^2(2r) / (gamma^2 + 4 Delta^2)`` equals the
    production because the entropy is stationary.
    """
    _positive("gamma", gamma)
    delta = omega_p - omega
    q = nbar + 0.5
    m = np.exp(1j * theta) * q * np.sinh(2 * r)
    m_tilde = gamma * m / (gamma - 2j * delta)
    diag = q * np.cosh(2 * r)
    theta_ss = np.array([[diag, m_tilde], [np.conj(m_tilde), diag]], dtype=complex)
    phi = 4 * gamma * delta ** 2 * np.sinh(2 * r) ** 2 / (gamma ** 2 + 4 * delta ** 2)
    return ClosedForms(Pi=phi, Phi=phi, theta_ss=theta_ss, m_tilde=complex(m_tilde))


def build_two_mode(gamma_a: float, gamma_b: float, chi: float, nbar: float = 0.0) -> LyapunovSystem:
    _positive("gamma_a", gamma_a)
    _positive("gamma_b", gamma_b)
    hamiltonian = np.zeros((4, 4), dtype=complex)
    # a <- b^dagger, a^dagger <- b, b <- a^dagger, b^dagger <- a
    for i, j in ((0, 3), (1, 2), (2, 1), (3, 0)):
        hamiltonian[i, j] = -chi / 2
    damping = DampingMatrix((gamma_a, gamma_b))
    env = EnvCovMatrix.fixed(thermal_cm(nbar, 2))
    return LyapunovSystem.from_hamiltonian_part(hamiltonian, damping, env, "two_mode")


def two_mode_closed_forms(gamma_a: float, gamma_b: float, chi: float, nbar: float = 0.0) -> ClosedForms:
    _positive("gamma_a", gamma_a)
    _positive("gamma_b", gamma_b)
    g = gamma_a * gamma_b
    if chi ** 2 >= g:
        raise DomainError(f"two-mode system is unstable for chi^2 >= gamma_a gamma_b (chi={chi})")
    pref = 2 * chi * g / ((gamma_a + gamma_b) * (g - chi ** 2))
    s = math.sqrt(g)
    flow = pref * np.array([
        [chi, 0, 0, -s],
        [0, chi, -s, 0],
        [0, -s, chi, 0],
        [-s, 0, 0, chi],
    ], dtype=complex)
    pi = 4 * g * chi ** 2 / ((gamma_a + gamma_b) * (g - chi ** 2))
    return ClosedForms(Pi=pi, Phi=pi, flow=flow)


def law_of_cooling(theta0: float, nbar: float, gamma: float, t):
    """Exact solution of ``dtheta/dt = gamma ((nbar + 1/2) - theta)``."""
    _positive("gamma", gamma)
    q = nbar + 0.5
    return q + (theta0 - q) * np.exp(-gamma * np.asarray(t, dtype=float))


_BUILDERS = {"opo": build_opo, "squeezed_bath": build_squeezed_bath, "two_mode": build_two_mode}
_CLOSED = {"opo": opo_closed_forms, "squeezed_bath": squeezed_bath_closed_forms, "two_mode": two_mode_closed_forms}


def build(spec: ScenarioSpec) -> LyapunovSystem:
    return _BUILDERS[spec.kind](**spec.params)


def stationary_system(spec: ScenarioSpec) -> LyapunovSystem:
    """The scenario's system in a frame where the bath is constant (co-rotating for the squeezed bath)."""
    sys = build(spec)
    if spec.kind == "squeezed_bath":
        return rotating_frame_system(sys, spec.params["omega_p"])
    return sys


def closed_forms(spec: ScenarioSpec) -> ClosedForms:
    return _CLOSED[spec.kind](**spec.params)
