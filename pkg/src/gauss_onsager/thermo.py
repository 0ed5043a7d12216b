"""
Phase-space entropy, entropy flux and entropy production for Gaussian dynamics.

All functions take ``(gamma, q, theta)`` as plain arrays (a
:class:`~gauss_onsager.model.DampingMatrix` works too) and assume the bath
covariance ``q`` commutes with the diagonal damping matrix ``gamma``.
Entropies are in nats and rates in nats per unit time.

The flow matrix ``Gamma^{1/2} Theta Q^{-1} Gamma^{1/2} - Gamma`` and the
production matrix ``Gamma (Q - Theta)(Theta^{-1} - Q^{-1})`` are general
complex matrices; only their half-traces (flux and production) are real.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import ConsistencyError, DimensionError, DomainError, ValidationError
from .linalg import inverse, inverse_hermitian, log_det, max_abs, pseudo_inverse
from .model import LyapunovSystem, bona_fide_check, psd_tolerance

SECOND_LAW_TOL = 1e-9
# relative size of the imaginary part of a trace that should be real
_TRACE_IMAG_RTOL = 1e-8


def _arrays(gamma, q, theta):
    g = np.asarray(gamma, dtype=float)
    q = np.asarray(q, dtype=complex)
    theta = np.asarray(theta, dtype=complex)
    if not (g.shape == q.shape == theta.shape) or g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise DimensionError(f"shape mismatch: Gamma {g.shape}, Q {q.shape}, Theta {theta.shape}")
    if max_abs(g - np.diag(np.diag(g))) > 0:
        raise ValidationError("Gamma must be diagonal")
    if np.any(np.diag(g) < 0):
        raise DomainError("Gamma must have non-negative entries")
    return g, q, theta


def _real_trace(m: NDArray, name: str) -> float:
    tr = np.trace(m)
    if abs(tr.imag) > _TRACE_IMAG_RTOL * max(1.0, abs(tr.real)):
        raise ConsistencyError(f"trace of {name} has a large imaginary part {tr.imag:.3e}")
    return float(tr.real)


def renyi2_entropy(theta: ArrayLike) -> float:
    """Wigner / Renyi-2 entropy ``ln det(2 Theta) / 2``."""
    return 0.5 * log_det(2 * np.asarray(theta, dtype=complex))


def entropy_rate(gamma, q, theta) -> float:
    """``dS/dt = tr(Gamma Q Theta^{-1} - Gamma) / 2``."""
    g, q, theta = _arrays(gamma, q, theta)
    theta_inv = inverse_hermitian(theta, "Theta")
    return 0.5 * _real_trace(g @ q @ theta_inv - g, "Gamma Q Theta^-1")


def entropy_flux(gamma, q, theta) -> float:
    """Entropy flux from system to bath, ``tr(Gamma Theta Q^{-1} - Gamma) / 2``."""
    g, q, theta = _arrays(gamma, q, theta)
    q_inv = inverse_hermitian(q, "Q")
    return 0.5 * _real_trace(g @ theta @ q_inv - g, "Gamma Theta Q^-1")


def production_matrix(gamma, q, theta) -> NDArray[np.complex128]:
    """``Gamma (Q - Theta)(Theta^{-1} - Q^{-1})``."""
    g, q, theta = _arrays(gamma, q, theta)
    return g @ (q - theta) @ (inverse_hermitian(theta, "Theta") - inverse_hermitian(q, "Q"))


def entropy_production(gamma, q, theta, eps: Optional[float] = None) -> float:
    """
    Entropy production rate ``tr(Gamma (Q - Theta)(Theta^{-1} - Q^{-1})) / 2``.

    Raises :class:`ConsistencyError` if the result is below ``-eps``, which
    can only happen for unphysical inputs.
    """
    eps = psd_tolerance() if eps is None else eps
    pi = 0.5 * _real_trace(production_matrix(gamma, q, theta), "production matrix")
    if pi < -eps:
        raise ConsistencyError(f"negative entropy production {pi:.3e}; inputs are not a valid state/bath pair")
    return pi


def flow_matrix(gamma, q, theta) -> NDArray[np.complex128]:
    """``Gamma^{1/2} Theta Q^{-1} Gamma^{1/2} - Gamma``; its half-trace is the entropy flux."""
    g, q, theta = _arrays(gamma, q, theta)
    root = np.diag(np.sqrt(np.diag(g)))
    return root @ theta @ inverse_hermitian(q, "Q") @ root - g


def _onsager_matrix(upsilon: NDArray, g: NDArray) -> NDArray[np.complex128]:
    # Upsilon Gamma^+ Upsilon (Gamma + Upsilon)^+ Gamma.  Upsilon vanishes outside the
    # damped subspace, so the pseudo-inverse of Gamma + Upsilon is the inverse of its
    # damped block padded with zeros.
    damped = np.diag(g) > 0
    if not damped.any():
        return np.zeros_like(upsilon, dtype=complex)
    if max_abs(upsilon[~damped, :]) + max_abs(upsilon[:, ~damped]) > 0:
        raise ValidationError("flow matrix has support outside the damped subspace of Gamma")
    block = (g + upsilon)[np.ix_(damped, damped)]
    sum_inv = np.zeros_like(upsilon, dtype=complex)
    sum_inv[np.ix_(damped, damped)] = inverse(block, "Gamma + Upsilon")
    return upsilon @ pseudo_inverse(g) @ upsilon @ sum_inv @ g


def onsager_production_matrix(upsilon: ArrayLike, gamma) -> NDArray[np.complex128]:
    """Production matrix rebuilt from the flow alone, ``Upsilon Gamma^{-1} Upsilon (Gamma + Upsilon)^{-1} Gamma``."""
    upsilon = np.asarray(upsilon, dtype=complex)
    g = np.asarray(gamma, dtype=float)
    if upsilon.shape != g.shape:
        raise DimensionError(f"Upsilon {upsilon.shape} and Gamma {g.shape} differ in shape")
    return _onsager_matrix(upsilon, g)


def production_from_flow(upsilon: ArrayLike, gamma) -> float:
    """
    Entropy production as a function of the flow matrix only.

    ``Gamma^{-1}`` is the Moore-Penrose inverse when some rates vanish.
    A singular ``Gamma + Upsilon`` (the divergence boundary, a flow per mode
    of ``-gamma``) raises :class:`~gauss_onsager.errors.SingularMatrixError`.
    """
    return 0.5 * _real_trace(onsager_production_matrix(upsilon, gamma), "Onsager production matrix")


def linear_response_production(upsilon: ArrayLike, gamma) -> float:
    """Quadratic near-equilibrium form ``tr(Gamma^{-1} Upsilon^2) / 2``."""
    upsilon = np.asarray(upsilon, dtype=complex)
    g = np.asarray(gamma, dtype=float)
    if upsilon.shape != g.shape:
        raise DimensionError(f"Upsilon {upsilon.shape} and Gamma {g.shape} differ in shape")
    return 0.5 * _real_trace(pseudo_inverse(g) @ upsilon @ upsilon, "Gamma^-1 Upsilon^2")


def scalar_onsager(phi: float, gamma: float, modes: int = 1) -> float:
    """
    ``phi^2 / (phi + gamma)`` for one mode; for ``modes`` identical modes
    ``phi`` is the total flux and the result is ``L (phi/L)^2 / (gamma + phi/L)``.
    """
    if gamma <= 0:
        raise DomainError(f"gamma must be positive, got {gamma}")
    per_mode = phi / modes
    if per_mode <= -gamma:
        raise DomainError(f"flow per mode {per_mode} is on the unphysical branch (<= -gamma)")
    return modes * per_mode ** 2 / (gamma + per_mode)


def asymmetry_residual(upsilon: ArrayLike, gamma) -> float:
    """
    Max-norm of ``Xi[Upsilon]^{-1} - Xi[-Upsilon]^{-1} - 2 Upsilon^{-1}``.

    Expected to vanish; any singular factor raises
    :class:`~gauss_onsager.errors.SingularMatrixError`.
    """
    upsilon = np.asarray(upsilon, dtype=complex)
    g = np.asarray(gamma, dtype=float)
    if upsilon.shape != g.shape:
        raise DimensionError(f"Upsilon {upsilon.shape} and Gamma {g.shape} differ in shape")
    inverse(g, "Gamma")
    xi_plus = _onsager_matrix(upsilon, g)
    xi_minus = _onsager_matrix(-upsilon, g)
    diff = inverse(xi_plus, "Xi[Upsilon]") - inverse(xi_minus, "Xi[-Upsilon]")
    return max_abs(diff - 2 * inverse(upsilon, "Upsilon"))


@dataclass(frozen=True)
class ThermoSample:
    t: float
    S: float
    dS_dt: float
    Phi: float
    Pi: float
    residual_second_law: float
    residual_onsager: float
    bona_fide_margin: float

    def as_row(self) -> tuple[float, ...]:
        return (self.t, self.S, self.dS_dt, self.Phi, self.Pi,
                self.residual_second_law, self.residual_onsager, self.bona_fide_margin)


def thermo_sample(sys: LyapunovSystem, theta: ArrayLike, t: float = 0.0,
                  eps: Optional[float] = None) -> ThermoSample:
    """
    Entropy, its rate, flux and production of ``theta`` at time ``t``.

    ``residual_second_law`` is ``|Pi - dS/dt - Phi|`` and must stay below
    1e-9.  ``residual_onsager`` is the max-norm gap between the production
    matrix and its reconstruction from the flow matrix; it vanishes exactly
    when ``Gamma`` is proportional to the identity and is reported, not
    enforced, otherwise (the traces always agree).
    """
    eps = psd_tolerance() if eps is None else eps
    theta = np.asarray(theta, dtype=complex)
    g = sys.damping.matrix
    q = sys.env(t)
    S = renyi2_entropy(theta)
    ds = entropy_rate(g, q, theta)
    phi = entropy_flux(g, q, theta)
    pi = entropy_production(g, q, theta, eps)
    res_2nd = abs(pi - ds - phi)
    if res_2nd > SECOND_LAW_TOL:
        raise ConsistencyError(f"second-law split violated at t = {t}: residual {res_2nd:.3e}")
    xi = production_matrix(g, q, theta)
    res_ons = max_abs(xi - onsager_production_matrix(flow_matrix(g, q, theta), g))
    margin = bona_fide_check(theta, eps).margin
    return ThermoSample(float(t), S, ds, phi, pi, res_2nd, res_ons, margin)
