"""Constructors for the families of spin states used throughout the package.

Pure states are returned as 1-D complex arrays, mixed states as 2-D
density matrices; the spin is implied by the dimension ``2j+1``.
"""
from __future__ import annotations

import numpy as np

from .errors import DomainError
from .spin import (
    _binomial_roots,
    _require_physical,
    angular_momentum_ops,
    as_spin,
    unitary_from_generator,
)

__all__ = [
    "dicke",
    "projector",
    "maximally_mixed",
    "qubit_bloch",
    "thermal",
    "noon",
    "squeeze_one_axis_state",
    "squeeze_two_axis_state",
    "random_pure",
    "random_mixed",
    "make_rng",
    "purity",
    "check_state_vector",
    "check_density_matrix",
]

PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


def dicke(j, mu) -> np.ndarray:
    """Dicke state ``|j, mu>``."""
    j = _require_physical(as_spin(j))
    vec = np.zeros(j.dim, dtype=complex)
    vec[j.index(mu)] = 1.0
    return vec


def projector(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def maximally_mixed(j) -> np.ndarray:
    j = _require_physical(as_spin(j))
    return np.eye(j.dim, dtype=complex) / j.dim


def qubit_bloch(r) -> np.ndarray:
    """Qubit density matrix ``(1 + r.sigma)/2``.

    The Pauli matrices are written in the basis ``(|1/2,-1/2>, |1/2,1/2>)``,
    so ``r = (0, 0, 1)`` puts all weight on ``|1/2,-1/2>``.
    """
    r = np.asarray(r, dtype=float)
    if r.shape != (3,):
        raise DomainError("Bloch vector must have three components")
    if np.linalg.norm(r) > 1 + 1e-12:
        raise DomainError(f"|r| = {np.linalg.norm(r)} exceeds 1")
    return 0.5 * (np.eye(2, dtype=complex) + sum(ri * s for ri, s in zip(r, PAULI)))


def thermal(j, beta: float) -> np.ndarray:
    """Gibbs state with weights ``exp(-beta mu) / Z``, diagonal in the Dicke basis."""
    j = _require_physical(as_spin(j))
    beta = float(beta)
    if not np.isfinite(beta):
        raise DomainError("beta must be finite")
    expo = -beta * j.mus
    expo -= expo.max()
    w = np.exp(expo)
    return np.diag(w / w.sum()).astype(complex)


def noon(j) -> np.ndarray:
    """``(|j,-j> + |j,j>) / sqrt(2)``."""
    j = _require_physical(as_spin(j))
    vec = np.zeros(j.dim, dtype=complex)
    vec[0] = vec[-1] = 1 / np.sqrt(2)
    return vec


def squeeze_one_axis_state(j, eta: float) -> np.ndarray:
    """One-axis twisted state ``exp(-i eta J3^2) |theta=pi/2, phi=0>``."""
    j = _require_physical(as_spin(j))
    return 2.0 ** (-j.j) * _binomial_roots(j.twice_j) * np.exp(-1j * eta * j.mus**2)


def two_axis_generator(j) -> np.ndarray:
    """Real antisymmetric ``-(J+^2 - J-^2)/2``; multiply by eta before exponentiating."""
    _, _, _, jp, jm = angular_momentum_ops(j)
    return -0.5 * (jp @ jp - jm @ jm)


def squeeze_two_axis_state(j, eta: float) -> np.ndarray:
    """Two-axis countertwisted state ``exp(-eta (J+^2 - J-^2)/2) |j,-j>``."""
    j = _require_physical(as_spin(j))
    u = unitary_from_generator(eta * two_axis_generator(j))
    return u[:, 0].copy()


def make_rng(seed) -> np.random.Generator:
    """Generator for an integer seed or a sequence of integers, e.g. ``(seed, index)``."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(np.random.SeedSequence(seed))


def random_pure(j, seed) -> np.ndarray:
    """Haar-random pure state: normalized complex Gaussian vector."""
    j = _require_physical(as_spin(j))
    rng = make_rng(seed)
    v = rng.standard_normal(j.dim) + 1j * rng.standard_normal(j.dim)
    return v / np.linalg.norm(v)


def random_mixed(j, seed) -> np.ndarray:
    """Hilbert-Schmidt random state ``G G^dag / tr(G G^dag)`` from a square Ginibre matrix."""
    j = _require_physical(as_spin(j))
    rng = make_rng(seed)
    g = rng.standard_normal((j.dim, j.dim)) + 1j * rng.standard_normal((j.dim, j.dim))
    rho = g @ g.conj().T
    rho = (rho + rho.conj().T) / 2
    return rho / np.trace(rho).real


def purity(rho) -> float:
    rho = np.asarray(rho)
    if rho.ndim == 1:
        return float(np.vdot(rho, rho).real ** 2)
    # tr(rho^2) = sum |rho_ij|^2 for Hermitian rho
    return float(np.sum(np.abs(rho) ** 2))


def check_state_vector(psi, atol: float = 1e-12) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    if psi.ndim != 1 or psi.size < 2:
        raise DomainError("a state vector must be 1-D with dimension >= 2")
    norm = np.linalg.norm(psi)
    if abs(norm - 1) > atol:
        raise DomainError(f"state vector norm {norm!r} differs from 1")
    return psi


def check_density_matrix(rho, atol: float = 1e-12, psd_tol: float = 1e-10) -> np.ndarray:
    """Validate Hermiticity, unit trace and positivity; returns the array."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1] or rho.shape[0] < 2:
        raise DomainError(f"density matrix must be square with dim >= 2, got {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > atol:
        raise DomainError("density matrix is not Hermitian")
    tr = np.trace(rho)
    if abs(tr - 1) > atol:
        raise DomainError(f"density matrix trace {tr} differs from 1")
    lo = np.linalg.eigvalsh(rho).min()
    if lo < -psd_tol:
        raise DomainError(f"density matrix has negative eigenvalue {lo:.3e}")
    return rho


def as_density_matrix(state) -> np.ndarray:
    """Promote a state vector to its projector; pass matrices through."""
    state = np.asarray(state, dtype=complex)
    if state.ndim == 1:
        return projector(state)
    return state
