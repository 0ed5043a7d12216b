"""Time evolution, steady states and stability of Lyapunov systems."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import DimensionError, DomainError, InstabilityError, IntegrationError, NumericalError, UnsupportedError
from .linalg import max_abs
from .model import EnvCovMatrix, LyapunovSystem, bona_fide_check, psd_tolerance

STEADY_RESIDUAL_RTOL = 1e-10
# abscissas this close to zero (relative to the drift scale) count as marginal, i.e. not stable
MARGINAL_RTOL = 1e-12


@dataclass(frozen=True)
class StabilityReport:
    spectral_abscissa: float
    eigenvalues: tuple[complex, ...]
    marginal_tol: float = 0.0

    @property
    def stable(self) -> bool:
        return self.spectral_abscissa < -self.marginal_tol

    def __str__(self):
        verdict = "stable" if self.stable else "unstable"
        return f"{verdict} (spectral abscissa {self.spectral_abscissa:.6g})"


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Covariance matrices on a time grid, with the bona-fide margin of each state."""

    times: NDArray[np.float64]
    states: NDArray[np.complex128]
    margins: NDArray[np.float64]
    system: LyapunovSystem

    def __len__(self):
        return len(self.times)

    @property
    def final(self) -> NDArray[np.complex128]:
        return self.states[-1]


def _herm(a):
    return 0.5 * (a + a.conj().T)


def lyapunov_rhs(sys: LyapunovSystem, theta: ArrayLike, t: float = 0.0) -> NDArray[np.complex128]:
    """``W Theta + Theta W^dagger + F(t)``, hermitized."""
    theta = np.asarray(theta, dtype=complex)
    if theta.shape != sys.drift.shape:
        raise DimensionError(f"Theta has shape {theta.shape}, system is {sys.drift.shape}")
    W = sys.drift
    return _herm(W @ theta + theta @ W.conj().T + sys.diffusion(t))


def stability(sys: LyapunovSystem) -> StabilityReport:
    eig = np.linalg.eigvals(sys.drift)
    tol = MARGINAL_RTOL * max(1.0, max_abs(sys.drift))
    return StabilityReport(float(np.max(eig.real)), tuple(complex(e) for e in eig), tol)


def default_step(sys: LyapunovSystem) -> float:
    """
    ``0.1`` over the fastest rate in the drift (damping, coupling or detuning).

    A modulated bath needs a finer grid: ``0.03`` over the fastest of those
    rates and the modulation frequency, which keeps the phase error of the
    driven orbit below 1e-8 over a relaxation horizon.
    """
    fastest = max(max_abs(sys.drift), max(sys.damping.rates), 1e-12)
    if sys.env.is_constant:
        return 0.1 / fastest
    return 0.03 / max(fastest, abs(sys.env.frequency))


def default_horizon(sys: LyapunovSystem) -> float:
    """``20 / |spectral abscissa|``; requires a stable system."""
    report = stability(sys)
    if not report.stable:
        raise InstabilityError(f"no relaxation horizon for an {report}", report)
    return 20.0 / abs(report.spectral_abscissa)


def integrate(sys: LyapunovSystem, theta0: ArrayLike, t_end: float, dt: float,
              t0: float = 0.0, eps: Optional[float] = None) -> Trajectory:
    """
    Classical fourth-order Runge-Kutta integration of the Lyapunov equation.

    The interval is split into ``ceil(t_end / dt)`` equal steps, so the step
    actually used never exceeds ``dt``.  Every state is hermitized and checked
    for the bona-fide condition; a violation beyond ``eps`` aborts with an
    :class:`IntegrationError` that carries the offending time.
    """
    if dt <= 0:
        raise DomainError(f"dt must be positive, got {dt}")
    if t_end <= 0:
        raise DomainError(f"t_end must be positive, got {t_end}")
    eps = psd_tolerance() if eps is None else eps
    theta = _herm(np.asarray(theta0, dtype=complex))
    if theta.shape != sys.drift.shape:
        raise DimensionError(f"Theta0 has shape {theta.shape}, system is {sys.drift.shape}")
    check = bona_fide_check(theta, eps)
    if not check.ok:
        raise IntegrationError(f"initial state is not bona fide (margin {check.margin:.3e})", t0, check.margin)

    n = max(1, math.ceil(t_end / dt - 1e-9))
    h = t_end / n
    times = t0 + h * np.arange(n + 1)
    states = np.empty((n + 1,) + theta.shape, dtype=complex)
    margins = np.empty(n + 1)
    states[0], margins[0] = theta, check.margin

    f = lambda t, x: lyapunov_rhs(sys, x, t)  # noqa: E731
    for k in range(n):
        t = times[k]
        k1 = f(t, theta)
        k2 = f(t + h / 2, theta + (h / 2) * k1)
        k3 = f(t + h / 2, theta + (h / 2) * k2)
        k4 = f(t + h, theta + h * k3)
        theta = _herm(theta + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4))
        if not np.all(np.isfinite(theta)):
            raise IntegrationError(f"state diverged at t = {times[k + 1]:.6g}", float(times[k + 1]))
        check = bona_fide_check(theta, eps)
        if not check.ok:
            raise IntegrationError(
                f"bona-fide condition violated at t = {times[k + 1]:.6g} (margin {check.margin:.3e})",
                float(times[k + 1]), check.margin)
        states[k + 1], margins[k + 1] = theta, check.margin
    return Trajectory(times, states, margins, sys)


def solve_lyapunov(W: ArrayLike, F: ArrayLike) -> NDArray[np.complex128]:
    """
    Solve ``W X + X W^dagger = -F`` by vectorization.

    With row-major flattening, ``vec(W X) = (W kron I) vec(X)`` and
    ``vec(X W^dagger) = (I kron conj(W)) vec(X)``.
    """
    W = np.asarray(W, dtype=complex)
    F = np.asarray(F, dtype=complex)
    n = W.shape[0]
    eye = np.eye(n)
    op = np.kron(W, eye) + np.kron(eye, W.conj())
    try:
        x = np.linalg.solve(op, -F.reshape(-1))
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"Lyapunov operator is singular: {exc}") from exc
    return x.reshape(n, n)


def steady_state(sys: LyapunovSystem) -> NDArray[np.complex128]:
    """Unique stationary covariance matrix of a stable, time-independent system."""
    if not sys.env.is_constant:
        raise UnsupportedError("steady_state needs a constant bath; move to the rotating frame first")
    report = stability(sys)
    if not report.stable:
        raise InstabilityError(f"system has no steady state: {report}", report)
    F = sys.diffusion()
    theta = _herm(solve_lyapunov(sys.drift, F))
    W = sys.drift
    residual = max_abs(W @ theta + theta @ W.conj().T + F)
    if residual > STEADY_RESIDUAL_RTOL * max(max_abs(F), 1e-300):
        raise NumericalError(f"steady-state residual {residual:.3e} exceeds tolerance")
    return theta


def _frame_phases(dim: int, omega_p: float, t: float) -> NDArray[np.complex128]:
    return np.tile([np.exp(1j * omega_p * t), np.exp(-1j * omega_p * t)], dim // 2)


def rotating_frame(theta: ArrayLike, omega_p: float, t: float) -> NDArray[np.complex128]:
    """``P Theta P^dagger`` with ``P = diag(e^{i omega_p t}, e^{-i omega_p t})`` on every mode."""
    theta = np.asarray(theta, dtype=complex)
    if theta.ndim != 2 or theta.shape[0] != theta.shape[1] or theta.shape[0] % 2:
        raise DimensionError(f"expected a 2L x 2L matrix, got shape {theta.shape}")
    p = _frame_phases(theta.shape[0], omega_p, t)
    return p[:, None] * theta * p.conj()[None, :]


def rotating_frame_system(sys: LyapunovSystem, omega_p: float) -> LyapunovSystem:
    """
    The Lyapunov system obeyed by ``P Theta P^dagger``.

    The drift picks up ``dP/dt P^dagger = diag(i omega_p, -i omega_p)`` and
    the bath is viewed at ``t = 0`` of the co-rotating frame.  The result is
    time independent whenever ``Q(t)`` rotates at exactly ``omega_p`` and the
    drift only couples annihilation operators among themselves.
    """
    dim = sys.dim
    generator = np.diag(np.tile([1j * omega_p, -1j * omega_p], dim // 2))
    env = sys.env
    rotated_q = rotating_frame(env(0.0), omega_p, 0.0)
    probe_t = (0.37, 1.91)
    for t in probe_t:
        if max_abs(rotating_frame(sys.drift, omega_p, t) - sys.drift) > 1e-12 * max(1.0, max_abs(sys.drift)):
            raise UnsupportedError("drift mixes a and a^dagger; it is not invariant under the frame rotation")
        if max_abs(rotating_frame(env(t), omega_p, t) - rotated_q) > 1e-10:
            raise UnsupportedError(f"bath does not rotate at omega_p = {omega_p}; rotating frame is not stationary")
    new_env = EnvCovMatrix.fixed(rotated_q, env.commutes_with_damping)
    return LyapunovSystem(sys.drift + generator, sys.damping, new_env, sys.label + "@rotating")
