"""
Dense complex-Hermitian kernels.

Every positivity test, log-determinant and (pseudo)inverse of a Hermitian
matrix goes through ``numpy.linalg.eigh`` on a hermitized copy, so floating
point drift in the anti-Hermitian part cannot leak into the spectra.
"""

from __future__ import annotations

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import DimensionError, DomainError, NumericalError, SingularMatrixError, ValidationError

HERMITICITY_TOL = 1e-10
CONDITION_LIMIT = 1e12

ComplexMatrix = NDArray[np.complex128]


def _square(a: ArrayLike) -> ComplexMatrix:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    return a


def _herm(a: ArrayLike) -> ComplexMatrix:
    a = _square(a)
    return 0.5 * (a + a.conj().T)


def hermitize(a: ArrayLike) -> ComplexMatrix:
    """Return the Hermitian part ``(A + A^dagger) / 2`` of an even-dimensional square matrix."""
    a = _square(a)
    if a.shape[0] % 2:
        raise DimensionError(f"expected an even dimension 2L, got {a.shape[0]}")
    return 0.5 * (a + a.conj().T)


def is_hermitian(a: ArrayLike, tol: float = HERMITICITY_TOL) -> bool:
    a = _square(a)
    return bool(np.max(np.abs(a - a.conj().T), initial=0.0) <= tol)


def require_hermitian(a: ArrayLike, name: str = "matrix", tol: float = HERMITICITY_TOL) -> ComplexMatrix:
    a = _square(a)
    dev = float(np.max(np.abs(a - a.conj().T), initial=0.0))
    if dev > tol:
        raise ValidationError(f"{name} is not Hermitian (max deviation {dev:.3e} > {tol:.1e})")
    return 0.5 * (a + a.conj().T)


def _eigvalsh(a: ArrayLike) -> NDArray[np.float64]:
    try:
        return np.linalg.eigvalsh(_herm(a))
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigenvalue solver did not converge: {exc}") from exc


def _eigh(a: ArrayLike) -> tuple[NDArray[np.float64], ComplexMatrix]:
    try:
        return np.linalg.eigh(_herm(a))
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigenvalue solver did not converge: {exc}") from exc


def min_eigenvalue(a: ArrayLike) -> float:
    """Smallest eigenvalue of a Hermitian matrix."""
    return float(_eigvalsh(a)[0])


def pseudo_inverse(a: ArrayLike, tol: float = 1e-12) -> ComplexMatrix:
    """
    Moore-Penrose inverse of a Hermitian matrix.

    Eigenvalues whose magnitude is below ``tol`` times the largest magnitude
    are treated as exact zeros.
    """
    if tol < 0:
        raise DomainError("tol must be non-negative")
    w, v = _eigh(a)
    scale = np.max(np.abs(w), initial=0.0)
    keep = np.abs(w) > tol * scale
    inv_w = np.zeros_like(w)
    inv_w[keep] = 1.0 / w[keep]
    return (v * inv_w) @ v.conj().T


def log_det(a: ArrayLike) -> float:
    """Natural log of the determinant of a Hermitian positive-definite matrix."""
    w = _eigvalsh(a)
    if w[0] <= 0:
        raise DomainError(f"matrix is not positive definite (min eigenvalue {w[0]:.3e})")
    return float(np.sum(np.log(w)))


def inverse_hermitian(a: ArrayLike, name: str = "matrix") -> ComplexMatrix:
    """Inverse of a Hermitian matrix via eigendecomposition, refusing ill-conditioned input."""
    w, v = _eigh(a)
    mags = np.abs(w)
    if mags.min() == 0 or mags.max() / mags.min() > CONDITION_LIMIT:
        cond = np.inf if mags.min() == 0 else mags.max() / mags.min()
        raise SingularMatrixError(f"{name} is singular (condition number {cond:.3e})")
    return (v / w) @ v.conj().T


def inverse(a: ArrayLike, name: str = "matrix") -> ComplexMatrix:
    """Inverse of a general square matrix with a condition-number guard."""
    a = _square(a)
    s = np.linalg.svd(a, compute_uv=False)
    if s[-1] == 0 or s[0] / s[-1] > CONDITION_LIMIT:
        cond = np.inf if s[-1] == 0 else s[0] / s[-1]
        raise SingularMatrixError(f"{name} is singular (condition number {cond:.3e})")
    return np.linalg.inv(a)


def max_abs(a: ArrayLike) -> float:
    return float(np.max(np.abs(np.asarray(a)), initial=0.0))
