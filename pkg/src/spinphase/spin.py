"""Angular-momentum algebra, Dicke basis and SU(2) coherent states.

Basis vectors are ordered by increasing magnetic number, so index ``k``
holds ``mu = -j + k`` and ``|j,-j>`` is the first basis vector.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import NamedTuple, Union

import numpy as np

from .errors import DomainError, NumericalError

__all__ = [
    "SpinJ",
    "BlochPoint",
    "as_spin",
    "spin_of",
    "half_integer",
    "angular_momentum_ops",
    "coherent_state",
    "coherent_amplitudes",
    "coherent_derivatives",
    "displacement",
    "unitary_from_generator",
    "great_circle_angle",
]


@dataclass(frozen=True, order=True)
class SpinJ:
    """Spin quantum number stored exactly as ``twice_j = 2j``."""

    twice_j: int

    def __post_init__(self):
        if not isinstance(self.twice_j, (int, np.integer)) or self.twice_j < 0:
            raise DomainError(f"twice_j must be a nonnegative integer, got {self.twice_j!r}")
        object.__setattr__(self, "twice_j", int(self.twice_j))

    @property
    def dim(self) -> int:
        return self.twice_j + 1

    @property
    def j(self) -> float:
        return self.twice_j / 2

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.twice_j, 2)

    @property
    def mus(self) -> np.ndarray:
        """Magnetic numbers ``-j, ..., j`` in basis order."""
        return np.arange(self.dim) - self.j

    def index(self, mu) -> int:
        """Basis index of ``|j, mu>``; raises DomainError if ``mu`` is not a valid label."""
        m = half_integer(mu)
        k = m + self.fraction
        if k.denominator != 1 or not 0 <= k <= self.twice_j:
            raise DomainError(f"mu={m} is not a magnetic number of j={self}")
        return int(k)

    @classmethod
    def parse(cls, text) -> "SpinJ":
        return as_spin(text)

    def __str__(self):
        return str(self.fraction)


SpinLike = Union[SpinJ, int, str, Fraction, float]


def half_integer(value) -> Fraction:
    """Convert ``value`` to an exact half-integer Fraction.

    Accepts ints, Fractions, strings such as ``"3/2"`` or ``"1.5"`` and
    floats that are exact multiples of one half.
    """
    try:
        if isinstance(value, float):
            if not np.isfinite(value):
                raise ValueError
            frac = Fraction(value)
        else:
            frac = Fraction(str(value).strip()) if isinstance(value, str) else Fraction(value)
    except (ValueError, TypeError, ZeroDivisionError):
        raise DomainError(f"cannot interpret {value!r} as a half-integer") from None
    if (2 * frac).denominator != 1:
        raise DomainError(f"{value!r} is not a half-integer")
    return frac


def as_spin(value: SpinLike) -> SpinJ:
    """Coerce ``value`` (the spin ``j`` itself, not ``2j``) to a SpinJ."""
    if isinstance(value, SpinJ):
        return value
    frac = half_integer(value)
    if frac < 0:
        raise DomainError(f"spin must be nonnegative, got {frac}")
    return SpinJ(int(2 * frac))


def spin_of(array) -> SpinJ:
    """Spin label implied by the leading dimension of a vector or matrix."""
    d = np.shape(array)[0]
    if d < 2:
        raise DomainError("state dimension must be at least 2")
    return SpinJ(d - 1)


def _require_physical(j: SpinJ) -> SpinJ:
    if j.dim < 2:
        raise DomainError("j = 0 is not supported; need 2j+1 >= 2")
    return j


class BlochPoint(NamedTuple):
    """Point on the unit sphere in polar/azimuthal coordinates (radians)."""

    theta: float
    phi: float

    def canonical(self) -> "BlochPoint":
        """Fold the coordinates into theta in [0, pi], phi in [0, 2 pi)."""
        theta = float(self.theta) % (2 * np.pi)
        phi = float(self.phi)
        if theta > np.pi:
            theta = 2 * np.pi - theta
            phi += np.pi
        phi %= 2 * np.pi
        if phi >= 2 * np.pi:  # rounding of tiny negative inputs
            phi = 0.0
        return BlochPoint(theta, phi)

    def cartesian(self) -> np.ndarray:
        st = np.sin(self.theta)
        return np.array([st * np.cos(self.phi), st * np.sin(self.phi), np.cos(self.theta)])


def great_circle_angle(a: BlochPoint, b: BlochPoint) -> float:
    c = float(np.clip(np.dot(BlochPoint(*a).cartesian(), BlochPoint(*b).cartesian()), -1.0, 1.0))
    return float(np.arccos(c))


@lru_cache(maxsize=None)
def _ops(twice_j: int):
    j = SpinJ(twice_j)
    mus = j.mus
    jv = j.j
    # J+ |mu> = sqrt((j-mu)(j+mu+1)) |mu+1>: subdiagonal in increasing-mu order
    ladder = np.sqrt((jv - mus[:-1]) * (jv + mus[:-1] + 1))
    jp = np.diag(ladder, k=-1).astype(complex)
    jm = jp.conj().T.copy()
    j3 = np.diag(mus).astype(complex)
    j1 = (jp + jm) / 2
    j2 = (jp - jm) / 2j
    out = (j1, j2, j3, jp, jm)
    for m in out:
        m.setflags(write=False)
    return out


def angular_momentum_ops(j: SpinLike):
    """Return ``(J1, J2, J3, J+, J-)`` as read-only complex arrays."""
    j = _require_physical(as_spin(j))
    return _ops(j.twice_j)


@lru_cache(maxsize=None)
def _binomial_roots(twice_j: int) -> np.ndarray:
    # sqrt(C(2j, j - mu)) with C computed exactly in integers; k = j + mu
    roots = np.array([np.sqrt(float(comb(twice_j, twice_j - k))) for k in range(twice_j + 1)])
    roots.setflags(write=False)
    return roots


def coherent_amplitudes(j: SpinLike, theta, phi) -> np.ndarray:
    """Coherent-state amplitudes for arrays of angles.

    Parameters
    ----------
    j : spin
    theta, phi : array_like
        Broadcastable arrays of polar and azimuthal angles.

    Returns
    -------
    ndarray of shape ``broadcast(theta, phi).shape + (2j+1,)``
    """
    j = as_spin(j)
    theta, phi = np.broadcast_arrays(np.asarray(theta, float), np.asarray(phi, float))
    k = np.arange(j.dim)
    m = j.twice_j - k
    c = np.cos(theta / 2)[..., None]
    s = np.sin(theta / 2)[..., None]
    return _binomial_roots(j.twice_j) * c**m * s**k * np.exp(1j * k * phi[..., None])


def coherent_state(j: SpinLike, omega) -> np.ndarray:
    """Spin coherent state ``|theta, phi>`` expanded in the Dicke basis."""
    j = _require_physical(as_spin(j))
    theta, phi = omega
    return coherent_amplitudes(j, float(theta), float(phi))


def coherent_derivatives(j: SpinLike, theta, phi):
    """Angular derivatives of the coherent amplitudes.

    Returns ``(d_theta, d_phi_over_sin)`` where the second array is
    ``(1/sin theta) d/dphi`` of the amplitudes. The latter is undefined at
    the poles and raises DomainError there.
    """
    j = as_spin(j)
    theta, phi = np.broadcast_arrays(np.asarray(theta, float), np.asarray(phi, float))
    sin_t = np.sin(theta)
    if np.any(np.abs(sin_t) < 1e-12):
        raise DomainError("the azimuthal gradient component is undefined at the poles")
    k = np.arange(j.dim)
    m = j.twice_j - k
    c = np.cos(theta / 2)[..., None]
    s = np.sin(theta / 2)[..., None]
    phase = np.exp(1j * k * phi[..., None]) * _binomial_roots(j.twice_j)
    # d/dtheta c^m s^k with zero-exponent terms dropped explicitly
    down = np.where(m > 0, -0.5 * m * c ** np.maximum(m - 1, 0) * s ** (k + 1), 0.0)
    up = np.where(k > 0, 0.5 * k * c ** (m + 1) * s ** np.maximum(k - 1, 0), 0.0)
    d_theta = phase * (down + up)
    d_phi = 1j * k * phase * c**m * s**k / sin_t[..., None]
    return d_theta, d_phi


def unitary_from_generator(generator: np.ndarray) -> np.ndarray:
    """``exp(G)`` for anti-Hermitian ``G`` via the eigenbasis of ``iG``."""
    g = np.asarray(generator, dtype=complex)
    h = 1j * g
    h = (h + h.conj().T) / 2
    try:
        vals, vecs = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(
            f"eigendecomposition failed (dim={g.shape[0]}, norm={np.linalg.norm(g):.3e}, "
            f"anti-Hermitian defect={np.linalg.norm(g + g.conj().T):.3e})"
        ) from exc
    if not np.all(np.isfinite(vals)):
        raise NumericalError("non-finite eigenvalues in generator exponentiation")
    return (vecs * np.exp(-1j * vals)) @ vecs.conj().T


def displacement(j: SpinLike, omega) -> np.ndarray:
    """SU(2) displacement taking ``|j,-j>`` to the coherent state at ``omega``.

    ``D = exp(theta/2 (e^{i phi} J+ - e^{-i phi} J-))``; with this sign
    choice ``D |j,-j> = |theta, phi>`` exactly, in the amplitude
    convention of :func:`coherent_state`.
    """
    j = _require_physical(as_spin(j))
    theta, phi = float(omega[0]), float(omega[1])
    _, _, _, jp, jm = angular_momentum_ops(j)
    gen = 0.5 * theta * (np.exp(1j * phi) * jp - np.exp(-1j * phi) * jm)
    return unitary_from_generator(gen)
