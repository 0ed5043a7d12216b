"""
Gaussian states, environments and Lyapunov systems.

Covariance matrices use the interleaved operator ordering
``R = (a_1, a_1^dagger, ..., a_L, a_L^dagger)`` with
``Theta_ij = <{R_i, R_j^dagger}> / 2``.  In this ordering the symplectic form
is ``diag(-i, +i)`` per mode and the vacuum is ``identity / 2``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import DimensionError, DomainError, ValidationError
from .linalg import max_abs, min_eigenvalue, require_hermitian

DEFAULT_PSD_TOL = 1e-9
TOL_ENV_VAR = "GAUSS_ONSAGER_TOL"


def psd_tolerance() -> float:
    """PSD tolerance, overridable through the ``GAUSS_ONSAGER_TOL`` environment variable."""
    raw = os.environ.get(TOL_ENV_VAR)
    if raw is None or raw.strip() == "":
        return DEFAULT_PSD_TOL
    try:
        value = float(raw)
    except ValueError:
        raise DomainError(f"{TOL_ENV_VAR} must be a number, got {raw!r}") from None
    if value < 0:
        raise DomainError(f"{TOL_ENV_VAR} must be non-negative, got {value}")
    return value


def _resolve_tol(eps: Optional[float]) -> float:
    return psd_tolerance() if eps is None else eps


class Check(NamedTuple):
    ok: bool
    margin: float


def symplectic_form(modes: int) -> NDArray[np.complex128]:
    """``diag(-i, +i)`` repeated once per mode."""
    if int(modes) != modes or modes < 1:
        raise DomainError(f"number of modes must be a positive integer, got {modes}")
    return np.diag(np.tile([-1j, 1j], int(modes)))


def _modes_of(matrix: NDArray) -> int:
    n = matrix.shape[0]
    if matrix.ndim != 2 or matrix.shape[1] != n or n % 2 or n == 0:
        raise DimensionError(f"expected a 2L x 2L matrix, got shape {matrix.shape}")
    return n // 2


def bona_fide_check(theta: ArrayLike, eps: Optional[float] = None) -> Check:
    """
    Uncertainty-principle test ``Theta - (i/2) Omega >= 0``.

    Returns the verdict together with the smallest eigenvalue of
    ``Theta - (i/2) Omega`` as the margin.
    """
    theta = np.asarray(theta, dtype=complex)
    omega = symplectic_form(_modes_of(theta))
    margin = min_eigenvalue(theta - 0.5j * omega)
    return Check(margin >= -_resolve_tol(eps), margin)


@dataclass(frozen=True, eq=False)
class GaussianMap:
    """Gaussian channel ``Theta -> X Theta X^dagger + Y``."""

    X: NDArray[np.complex128]
    Y: NDArray[np.complex128]

    def __post_init__(self):
        X = np.asarray(self.X, dtype=complex)
        Y = np.asarray(self.Y, dtype=complex)
        if X.shape != Y.shape:
            raise DimensionError(f"X and Y shapes differ: {X.shape} vs {Y.shape}")
        _modes_of(X)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "Y", Y)

    def apply(self, theta: ArrayLike) -> NDArray[np.complex128]:
        return self.X @ np.asarray(theta) @ self.X.conj().T + self.Y


def cptp_check(gmap: GaussianMap, eps: Optional[float] = None) -> Check:
    """Complete-positivity test ``(i/2)(X Omega X^dagger - Omega) + Y >= 0``."""
    Y = require_hermitian(gmap.Y, "Y")
    omega = symplectic_form(_modes_of(gmap.X))
    X = gmap.X
    margin = min_eigenvalue(0.5j * (X @ omega @ X.conj().T - omega) + Y)
    return Check(margin >= -_resolve_tol(eps), margin)


@dataclass(frozen=True, eq=False)
class DampingMatrix:
    """``diag(g_1, g_1, ..., g_L, g_L)`` built from per-mode rates."""

    rates: tuple[float, ...]

    def __post_init__(self):
        rates = tuple(float(g) for g in np.atleast_1d(self.rates))
        if not rates:
            raise DomainError("at least one damping rate is required")
        if any(g < 0 or not np.isfinite(g) for g in rates):
            raise DomainError(f"damping rates must be finite and non-negative, got {rates}")
        object.__setattr__(self, "rates", rates)

    @classmethod
    def uniform(cls, gamma: float, modes: int = 1) -> "DampingMatrix":
        return cls((gamma,) * modes)

    @property
    def modes(self) -> int:
        return len(self.rates)

    @property
    def diagonal(self) -> NDArray[np.float64]:
        return np.repeat(np.asarray(self.rates), 2)

    @property
    def matrix(self) -> NDArray[np.float64]:
        return np.diag(self.diagonal)

    @property
    def full_rank(self) -> bool:
        return all(g > 0 for g in self.rates)

    def __array__(self, dtype=None, copy=None):
        m = self.matrix
        return m if dtype is None else m.astype(dtype)


QFunction = Callable[[float], NDArray[np.complex128]]


@dataclass(frozen=True, eq=False)
class EnvCovMatrix:
    """
    Bath covariance matrix ``Q``, either constant or a function of time.

    Time-dependent baths must be given as pure (stateless) callables;
    ``frequency`` is the angular frequency of their modulation and only
    informs step-size defaults.
    """

    constant: Optional[NDArray[np.complex128]] = None
    func: Optional[QFunction] = None
    commutes_with_damping: bool = True
    frequency: float = 0.0

    def __post_init__(self):
        if (self.constant is None) == (self.func is None):
            raise ValidationError("provide exactly one of a constant Q or a Q(t) callable")
        if self.constant is not None:
            q = require_hermitian(self.constant, "Q")
            _modes_of(q)
            object.__setattr__(self, "constant", q)

    @classmethod
    def fixed(cls, q: ArrayLike, commutes_with_damping: bool = True) -> "EnvCovMatrix":
        return cls(constant=np.asarray(q, dtype=complex), commutes_with_damping=commutes_with_damping)

    @property
    def is_constant(self) -> bool:
        return self.constant is not None

    def __call__(self, t: float = 0.0) -> NDArray[np.complex128]:
        if self.constant is not None:
            return self.constant
        return np.asarray(self.func(t), dtype=complex)

    def validate(self, times: ArrayLike = (0.0,), eps: Optional[float] = None) -> Check:
        """Bona-fide check of ``Q(t)`` on the sampled times; the margin is the worst one seen."""
        checks = [bona_fide_check(self(t), eps) for t in np.atleast_1d(times)]
        worst = min(checks, key=lambda c: c.margin)
        return Check(all(c.ok for c in checks), worst.margin)


def diffusion_from_env(damping: DampingMatrix | ArrayLike, env: EnvCovMatrix | ArrayLike, t: float = 0.0):
    """``F = (Gamma Q + Q Gamma) / 2``, which equals ``Gamma Q`` for a commuting bath."""
    gamma = np.asarray(damping, dtype=float)
    if isinstance(env, EnvCovMatrix):
        q = env(t)
        commutes = env.commutes_with_damping
    else:
        q = np.asarray(env, dtype=complex)
        commutes = False
    if gamma.shape != q.shape:
        raise DimensionError(f"Gamma {gamma.shape} and Q {q.shape} differ in shape")
    if commutes:
        return gamma @ q
    return 0.5 * (gamma @ q + q @ gamma)


@dataclass(frozen=True, eq=False)
class LyapunovSystem:
    """
    ``dTheta/dt = W Theta + Theta W^dagger + F(t)`` with ``F`` generated by the bath.

    ``drift`` is the full ``W``, i.e. the Hamiltonian part minus ``Gamma / 2``.
    """

    drift: NDArray[np.complex128]
    damping: DampingMatrix
    env: EnvCovMatrix
    label: str = field(default="")

    def __post_init__(self):
        W = np.asarray(self.drift, dtype=complex)
        L = _modes_of(W)
        if self.damping.modes != L:
            raise DimensionError(f"drift describes {L} modes but damping has {self.damping.modes}")
        q0 = self.env(0.0)
        if q0.shape != W.shape:
            raise DimensionError(f"Q has shape {q0.shape}, drift has {W.shape}")
        if self.env.commutes_with_damping:
            g = self.damping.matrix
            if max_abs(g @ q0 - q0 @ g) > 1e-10:
                raise ValidationError("env is flagged as commuting with Gamma but [Q, Gamma] != 0")
        object.__setattr__(self, "drift", W)

    @classmethod
    def from_hamiltonian_part(cls, hamiltonian_part: ArrayLike, damping: DampingMatrix,
                              env: EnvCovMatrix, label: str = "") -> "LyapunovSystem":
        """Assemble ``W = A - Gamma/2`` from the Hamiltonian contribution ``A``."""
        a = np.asarray(hamiltonian_part, dtype=complex)
        return cls(a - 0.5 * damping.matrix, damping, env, label)

    @property
    def modes(self) -> int:
        return self.damping.modes

    @property
    def dim(self) -> int:
        return 2 * self.modes

    def diffusion(self, t: float = 0.0) -> NDArray[np.complex128]:
        return diffusion_from_env(self.damping, self.env, t)

    def infinitesimal_map(self, dt: float, t: float = 0.0) -> GaussianMap:
        """First-order channel ``X = 1 + W dt``, ``Y = F dt`` over a short step."""
        return GaussianMap(np.eye(self.dim) + self.drift * dt, self.diffusion(t) * dt)


def thermal_cm(nbar: float, modes: int = 1) -> NDArray[np.complex128]:
    """``(nbar + 1/2)`` times the identity on ``modes`` modes."""
    if nbar < 0:
        raise DomainError(f"thermal occupation must be non-negative, got {nbar}")
    if int(modes) != modes or modes < 1:
        raise DomainError(f"number of modes must be a positive integer, got {modes}")
    return (nbar + 0.5) * np.eye(2 * int(modes), dtype=complex)


def squeezed_thermal_cm(nbar: float, r: float, theta: float = 0.0,
                        omega_p: float = 0.0, t: float = 0.0) -> NDArray[np.complex128]:
    """
    Single-mode squeezed thermal state whose squeezing phase rotates at ``2 omega_p``.

    The diagonal is ``(nbar + 1/2) cosh 2r`` and the coherence is
    ``M exp(-2 i omega_p t)`` with ``M = exp(i theta) (nbar + 1/2) sinh 2r``.
    """
    if nbar < 0:
        raise DomainError(f"thermal occupation must be non-negative, got {nbar}")
    q = nbar + 0.5
    diag = q * np.cosh(2 * r)
    m = np.exp(1j * theta) * q * np.sinh(2 * r)
    off = m * np.exp(-2j * omega_p * t)
    return np.array([[diag, off], [np.conj(off), diag]], dtype=complex)
