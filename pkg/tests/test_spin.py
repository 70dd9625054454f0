from fractions import Fraction
from math import comb

import numpy as np
import pytest
from hypothesis import given, strategies as st

from spinphase.errors import DomainError
from spinphase.spin import (
    BlochPoint,
    SpinJ,
    angular_momentum_ops,
    as_spin,
    coherent_state,
    displacement,
    great_circle_angle,
)
from spinphase.states import dicke

from conftest import SPINS, random_omega


@pytest.mark.parametrize("text, twice", [("1/2", 1), ("1", 2), ("3/2", 3), ("9/2", 9), ("2.5", 5), (3, 6)])
def test_parse_spin(text, twice):
    j = as_spin(text)
    assert j.twice_j == twice
    assert j.dim == twice + 1


@pytest.mark.parametrize("bad", ["1/3", "-1/2", "abc", 0.3, "nan"])
def test_parse_spin_rejects(bad):
    with pytest.raises(DomainError):
        as_spin(bad)


def test_j3_qubit_ordering():
    _, _, j3, _, _ = angular_momentum_ops("1/2")
    assert np.allclose(j3, np.diag([-0.5, 0.5]))


@pytest.mark.parametrize("j", SPINS + ["7/2", "9/2"])
def test_algebra_identities(j):
    j1, j2, j3, jp, jm = angular_momentum_ops(j)
    jv = as_spin(j).j
    for m in (j1, j2, j3):
        assert np.max(np.abs(m - m.conj().T)) < 1e-14
    assert np.array_equal(jp.conj().T, jm)
    assert np.max(np.abs(j1 @ j2 - j2 @ j1 - 1j * j3)) < 1e-13
    assert np.max(np.abs(j2 @ j3 - j3 @ j2 - 1j * j1)) < 1e-13
    casimir = j1 @ j1 + j2 @ j2 + j3 @ j3
    assert np.max(np.abs(casimir - jv * (jv + 1) * np.eye(int(2 * jv + 1)))) < 1e-12


@pytest.mark.parametrize("j", SPINS)
def test_ladder_amplitudes(j):
    spin = as_spin(j)
    _, _, _, jp, jm = angular_momentum_ops(j)
    for mu in spin.mus[:-1]:
        out = jp @ dicke(j, Fraction(int(2 * mu), 2))
        k = spin.index(Fraction(int(2 * mu), 2))
        assert out[k + 1] == pytest.approx(np.sqrt((spin.j - mu) * (spin.j + mu + 1)), abs=0)
        assert np.count_nonzero(out) == 1


def test_coherent_north_pole_is_lowest_weight():
    for j in SPINS:
        psi = coherent_state(j, (0.0, 1.7))
        expected = np.zeros(as_spin(j).dim)
        expected[0] = 1
        assert np.allclose(psi, expected, atol=0)


def test_coherent_equator_spin_one():
    psi = coherent_state("1", (np.pi / 2, 0.0))
    assert np.allclose(psi, [0.5, 1 / np.sqrt(2), 0.5], atol=1e-15)


def test_coherent_normalized():
    assert abs(np.linalg.norm(coherent_state("2", (np.pi / 3, 1.1))) - 1) < 1e-12


@pytest.mark.parametrize("twice_j", range(1, 9))
def test_coherent_overlap_brute_force(twice_j, rng):
    # |<O1|O2>|^2 = cos(gamma/2)^(4j), amplitudes summed term by term
    j = SpinJ(twice_j)
    for _ in range(5):
        o1, o2 = random_omega(rng), random_omega(rng)
        a, b = coherent_state(j, o1), coherent_state(j, o2)
        overlap = sum(np.conj(x) * y for x, y in zip(a, b))
        gamma = great_circle_angle(o1, o2)
        assert abs(overlap) ** 2 == pytest.approx(np.cos(gamma / 2) ** (2 * twice_j), abs=1e-13)


def test_binomials_are_exact_integers():
    j = SpinJ(9)
    psi = coherent_state(j, (np.pi / 2, 0.0))
    assert np.allclose(np.abs(psi) ** 2 * 2**9, [comb(9, 9 - k) for k in range(10)], rtol=1e-14)


def test_displacement_identity():
    assert np.allclose(displacement("2", (0.0, 0.0)), np.eye(5), atol=1e-15)


@pytest.mark.parametrize("j", SPINS)
def test_displacement_creates_coherent_state(j, rng):
    for _ in range(5):
        omega = random_omega(rng)
        d = displacement(j, omega)
        assert np.max(np.abs(d.conj().T @ d - np.eye(d.shape[0]))) < 1e-12
        moved = d @ dicke(j, -as_spin(j).fraction)
        assert abs(np.vdot(coherent_state(j, omega), moved)) == pytest.approx(1, abs=1e-10)


def test_displacement_maps_coherent_states_to_coherent_states(rng):
    from spinphase.phasespace import husimi

    j = "3/2"
    for _ in range(5):
        psi = displacement(j, random_omega(rng)) @ coherent_state(j, random_omega(rng))
        # a coherent state has a Husimi peak of exactly 1 somewhere on the sphere
        rho = np.outer(psi, psi.conj())
        j1, j2, j3, _, _ = angular_momentum_ops(j)
        m = np.real([np.vdot(psi, op @ psi) for op in (j1, j2, j3)])
        m /= np.linalg.norm(m)
        # <J> = j (sin t cos p, -sin t sin p, -cos t) for the coherent state at (t, p)
        peak = (np.arccos(-m[2]), np.arctan2(-m[1], m[0]))
        assert husimi(rho, peak) == pytest.approx(1.0, abs=1e-9)


@given(st.floats(-20, 20), st.floats(-20, 20))
def test_bloch_point_canonical(theta, phi):
    p = BlochPoint(theta, phi).canonical()
    assert 0 <= p.theta <= np.pi
    assert 0 <= p.phi < 2 * np.pi
    assert np.allclose(p.cartesian(), BlochPoint(theta, phi).cartesian(), atol=1e-9)
