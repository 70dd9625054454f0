"""Analytic Wehrl entropy, Fisher information and complexity for special families."""
from __future__ import annotations

from fractions import Fraction
from math import comb, log
from typing import NamedTuple

import numpy as np

from .errors import DomainError
from .spin import as_spin

__all__ = [
    "ClosedForm",
    "complexity_from",
    "qubit_complexity_closed",
    "qubit_purity",
    "dicke_wehrl_closed",
    "thermal_closed",
    "thermal_complexity_explicit",
    "noon_husimi_closed",
    "damped_qubit_purity",
]


class ClosedForm(NamedTuple):
    wehrl: float
    fisher: float
    complexity: float
    purity: float


def complexity_from(wehrl: float, fisher: float, j) -> float:
    """``exp(S_W - 2j/(2j+1)) * I / (2j)``."""
    j = as_spin(j)
    tj = j.twice_j
    return float(np.exp(wehrl - tj / (tj + 1)) * fisher / tj)


def _series(r: float, coeff) -> float:
    x = r * r
    total, term, k = 0.0, x, 1
    while True:
        inc = term * coeff(k)
        total += inc
        if abs(inc) < 1e-18 * max(abs(total), 1e-300):
            return total
        term *= x
        k += 1


def qubit_purity(r: float) -> float:
    return (1 + r * r) / 2


def qubit_complexity_closed(r: float) -> ClosedForm:
    """Closed forms for the qubit state with Bloch radius ``r``.

    For ``r <= 1/2`` the power series in ``r^2`` is summed to avoid the
    ``0/0`` structure of the closed form at the completely mixed point:
    ``S_W = ln 2 - sum r^2k / (2k (4k^2 - 1))`` and
    ``I = sum 2 r^2k / (4k^2 - 1)``.
    """
    r = float(r)
    if not 0.0 <= r <= 1.0:
        raise DomainError(f"Bloch radius must lie in [0, 1], got {r}")
    if r <= 0.5:
        wehrl = log(2) - _series(r, lambda k: 1 / (2 * k * (4 * k * k - 1)))
        fisher = _series(r, lambda k: 2 / (4 * k * k - 1))
    else:
        # grouped so that r = 1 evaluates without inf - inf
        wehrl = (
            0.5 + log(2) - 0.5 * np.log1p(r) - (1 + r * r) / (4 * r) * np.log1p(r)
            + float(np.where(r < 1, (1 - r) ** 2 / (4 * r) * np.log(max(1 - r, 1e-300)), 0.0))
        )
        fisher = 1.0 - float(np.where(r < 1, (1 - r * r) / (2 * r) * (np.log1p(r) - np.log(max(1 - r, 1e-300))), 0.0))
    wehrl = float(wehrl)
    return ClosedForm(wehrl, fisher, complexity_from(wehrl, fisher, "1/2"), qubit_purity(r))


def _harmonic(n: int) -> Fraction:
    return sum((Fraction(1, k) for k in range(1, n + 1)), Fraction(0))


def dicke_wehrl_closed(j, mu) -> float:
    """Wehrl entropy of ``|j, mu>`` via the digamma formula at integer arguments.

    With ``psi(n) = H_{n-1} - gamma`` the Euler constant cancels, leaving
    ``-ln C(2j, j-mu) - (j-mu) H_{j-mu} - (j+mu) H_{j+mu} + 2j H_{2j+1}``
    which is evaluated in exact rational arithmetic.
    """
    j = as_spin(j)
    k = j.index(mu)  # j + mu
    m = j.twice_j - k  # j - mu
    rational = -m * _harmonic(m) - k * _harmonic(k) + j.twice_j * _harmonic(j.twice_j + 1)
    return float(rational) - log(comb(j.twice_j, m))


def thermal_closed(j, beta: float) -> ClosedForm:
    """Closed forms for the Gibbs state ``exp(-beta J3)/Z``.

    The quantities depend only on ``|beta|`` (the two signs are related by
    a rotation), so negative ``beta`` is folded.
    """
    j = as_spin(j)
    tj = j.twice_j
    d = tj + 1
    b = abs(float(beta))
    if not np.isfinite(b):
        raise DomainError("beta must be finite")
    if b == 0.0:
        return ClosedForm(log(d), 0.0, 0.0, 1.0 / d)
    # ln((1 - e^{-d b}) / (1 - e^{-b})) and 2j b e^{-d b}/(1 - e^{-d b}) = 2j b / (e^{d b} - 1)
    wehrl = (
        np.log(-np.expm1(-d * b)) - np.log(-np.expm1(-b))
        - tj * b / np.expm1(d * b) + tj / d
    )
    if tj == 1:
        # 1 - b / sinh(b)
        fisher = (b * b / 6 - 7 * b**4 / 360) if b < 1e-3 else 1.0 - b / np.sinh(b)
    else:
        ratio = np.exp(-b) * np.expm1(-(tj - 1) * b) / np.expm1(-d * b)
        fisher = tj - tj * d / (tj - 1) * ratio
    pur = float(np.tanh(b / 2) / np.tanh(d * b / 2))
    wehrl, fisher = float(wehrl), float(fisher)
    return ClosedForm(wehrl, fisher, complexity_from(wehrl, fisher, j), pur)


def thermal_complexity_explicit(j, beta: float) -> float:
    """Single-expression thermal complexity for ``j > 1/2`` and ``beta > 0``.

    Kept as an independent cross-check of :func:`thermal_closed`.
    """
    j = as_spin(j)
    tj = j.twice_j
    if tj < 2 or beta <= 0:
        raise DomainError("explicit thermal complexity needs j > 1/2 and beta > 0")
    d = tj + 1
    b = float(beta)
    eb = np.exp(b)
    edb = np.exp(d * b)
    pref = np.exp(-tj * b * edb / (edb - 1))
    num = (tj - 1) * (edb - 1) - d * eb * (np.exp((tj - 1) * b) - 1)
    return float(pref * num / ((tj - 1) * (eb - 1)))


def noon_husimi_closed(j, omega) -> float:
    j = as_spin(j)
    tj = j.twice_j
    theta, phi = float(omega[0]), float(omega[1])
    c = np.cos(theta / 2)
    s = np.sin(theta / 2)
    return float(0.5 * (c ** (2 * tj) + s ** (2 * tj) + 2 * c**tj * s**tj * np.cos(tj * phi)))


def damped_qubit_purity(p: float, theta: float) -> float:
    """Purity of an amplitude-damped qubit coherent state."""
    return 0.25 * (4 - 3 * p + 3 * p * p + 4 * p * (1 - p) * np.cos(theta) - p * (1 - p) * np.cos(2 * theta))
