"""
Random physically valid inputs for property checks.

States are produced as ``S diag(nu) S^dagger`` where ``S = expm(-i Z h)`` is
the Bogoliubov transformation generated by a random quadratic Hamiltonian
``h`` (``Z = diag(1, -1, ...)``).  Such ``S`` preserves the symplectic form,
so every sample satisfies the bona-fide condition by construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from scipy.linalg import expm

from .model import DampingMatrix, squeezed_thermal_cm


@dataclass(frozen=True, eq=False)
class Instance:
    damping: DampingMatrix
    q: NDArray[np.complex128]
    theta: NDArray[np.complex128]

    @property
    def gamma(self) -> NDArray[np.float64]:
        return self.damping.matrix


def _swap(modes: int) -> NDArray[np.float64]:
    # exchanges a_i <-> a_i^dagger
    return np.kron(np.eye(modes), np.array([[0.0, 1.0], [1.0, 0.0]]))


def random_quadratic_generator(rng: np.random.Generator, modes: int, scale: float = 0.4):
    """Hermitian ``h`` with the particle-hole symmetry ``h = X conj(h) X`` of a bosonic Hamiltonian."""
    n = 2 * modes
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    a = 0.5 * (a + a.conj().T)
    x = _swap(modes)
    return 0.5 * scale * (a + x @ a.conj() @ x)


def random_bogoliubov(rng: np.random.Generator, modes: int, scale: float = 0.4):
    z = np.diag(np.tile([1.0, -1.0], modes))
    return expm(-1j * z @ random_quadratic_generator(rng, modes, scale))


def random_gaussian_cm(rng: np.random.Generator, modes: int, max_nbar: float = 2.0,
                       scale: float = 0.4) -> NDArray[np.complex128]:
    nu = np.repeat(rng.uniform(0.0, max_nbar, size=modes) + 0.5, 2)
    s = random_bogoliubov(rng, modes, scale)
    theta = (s * nu) @ s.conj().T
    return 0.5 * (theta + theta.conj().T)


def random_product_cm(rng: np.random.Generator, modes: int, max_nbar: float = 2.0,
                      max_r: float = 0.6) -> NDArray[np.complex128]:
    """Uncorrelated single-mode squeezed thermal states; commutes with any per-mode damping."""
    q = np.zeros((2 * modes, 2 * modes), dtype=complex)
    for k in range(modes):
        q[2 * k:2 * k + 2, 2 * k:2 * k + 2] = squeezed_thermal_cm(
            rng.uniform(0.0, max_nbar), rng.uniform(0.0, max_r), rng.uniform(0, 2 * np.pi))
    return q


def random_instance(rng: np.random.Generator, modes: int | None = None, max_modes: int = 2) -> Instance:
    """A random (damping, bath, state) triple with full-rank damping and ``[Q, Gamma] = 0``."""
    if modes is None:
        modes = int(rng.integers(1, max_modes + 1))
    if rng.random() < 0.5:
        rates = (rng.uniform(0.2, 2.0),) * modes
    else:
        rates = tuple(rng.uniform(0.2, 2.0, size=modes))
    damping = DampingMatrix(rates)
    return Instance(damping, random_product_cm(rng, modes), random_gaussian_cm(rng, modes))
