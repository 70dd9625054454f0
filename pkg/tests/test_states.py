import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spinphase.errors import DomainError
from spinphase.spin import angular_momentum_ops, as_spin, coherent_state
from spinphase.states import (
    check_density_matrix,
    check_state_vector,
    dicke,
    maximally_mixed,
    noon,
    projector,
    purity,
    qubit_bloch,
    random_mixed,
    random_pure,
    squeeze_one_axis_state,
    squeeze_two_axis_state,
    thermal,
)

from conftest import SPINS, two_axis_closed


def closed_purity(j, beta):
    d = as_spin(j).dim
    eb, edb = np.exp(beta), np.exp(d * beta)
    return (eb - 1) * (edb + 1) / ((eb + 1) * (edb - 1))


def test_dicke():
    assert np.array_equal(dicke("1/2", "-1/2"), [1, 0])
    assert np.array_equal(dicke("2", 0), [0, 0, 1, 0, 0])
    with pytest.raises(DomainError):
        dicke("1", "3/2")
    with pytest.raises(DomainError):
        dicke("1", "1/2")


def test_qubit_bloch():
    assert np.allclose(qubit_bloch([0, 0, 1]), np.diag([1, 0]))
    assert np.allclose(qubit_bloch([0, 0, 0]), np.eye(2) / 2)
    assert purity(qubit_bloch([1, 0, 0])) == pytest.approx(1, abs=1e-12)
    with pytest.raises(DomainError):
        qubit_bloch([1, 0.1, 0])


@pytest.mark.parametrize("j", SPINS)
def test_thermal(j):
    d = as_spin(j).dim
    assert np.allclose(thermal(j, 0), np.eye(d) / d, atol=1e-15)
    ground = np.zeros((d, d))
    ground[0, 0] = 1
    assert np.max(np.abs(thermal(j, 700 / as_spin(j).j) - ground)) < 1e-12
    # far beyond exp overflow
    assert np.all(np.isfinite(thermal(j, 5000)))
    for beta in (0.3, 1.0, 2.5, -1.5):
        assert purity(thermal(j, beta)) == pytest.approx(closed_purity(j, beta), abs=1e-12)
        _, _, j3, _, _ = angular_momentum_ops(j)
        rho = thermal(j, beta)
        assert np.array_equal(rho @ j3, j3 @ rho)


def test_noon():
    assert np.allclose(noon("1"), [1 / np.sqrt(2), 0, 1 / np.sqrt(2)])
    for k in range(1, 10):
        assert np.linalg.norm(noon(f"{k}/2")) == pytest.approx(1, abs=1e-15)
    # qubit NOON is an equatorial coherent state
    assert abs(np.vdot(coherent_state("1/2", (np.pi / 2, 0)), noon("1/2"))) == pytest.approx(1, abs=1e-15)


@pytest.mark.parametrize("j", SPINS)
def test_one_axis_squeezing(j, rng):
    assert np.allclose(squeeze_one_axis_state(j, 0.0), coherent_state(j, (np.pi / 2, 0.0)), atol=1e-15)
    _, _, j3, _, _ = angular_momentum_ops(j)
    for eta in rng.uniform(-3, 3, size=5):
        u = np.diag(np.exp(-1j * eta * np.diag(j3).real ** 2))
        assert np.max(np.abs(squeeze_one_axis_state(j, eta) - u @ coherent_state(j, (np.pi / 2, 0)))) < 1e-13


@pytest.mark.parametrize("j", ["1", "3/2", "2", "5/2"])
def test_two_axis_closed_forms(j):
    for eta in np.linspace(0, 2, 20):
        psi = squeeze_two_axis_state(j, eta)
        ref = two_axis_closed(j, eta)
        phase = np.vdot(psi, ref)
        phase /= abs(phase)
        assert np.max(np.abs(psi * phase - ref)) < 1e-10


def test_two_axis_identity():
    assert np.allclose(squeeze_two_axis_state("2", 0.0), dicke("2", -2), atol=1e-15)


@pytest.mark.parametrize("j", SPINS)
def test_random_states_valid_and_deterministic(j):
    for seed in range(20):
        psi = random_pure(j, seed)
        check_state_vector(psi)
        rho = random_mixed(j, seed)
        check_density_matrix(rho)
        assert np.array_equal(rho, random_mixed(j, seed))
        assert np.array_equal(psi, random_pure(j, seed))
    assert not np.array_equal(random_mixed(j, (1, 0)), random_mixed(j, (1, 1)))


def test_hilbert_schmidt_mean_purity():
    # HS measure on qubits is uniform in the Bloch ball: purity (1 + r^2)/2,
    # E[r^2] = 3/5. Oracle: independent rejection sampling of the ball.
    oracle_rng = np.random.default_rng(99)
    pts = oracle_rng.uniform(-1, 1, size=(200_000, 3))
    pts = pts[np.sum(pts**2, axis=1) <= 1]
    oracle = np.mean((1 + np.sum(pts**2, axis=1)) / 2)
    assert oracle == pytest.approx(0.8, abs=0.005)
    mean = np.mean([purity(random_mixed("1/2", (5, i))) for i in range(10_000)])
    assert mean == pytest.approx(oracle, abs=0.01)


def test_purity_basics():
    for j in SPINS:
        d = as_spin(j).dim
        assert purity(maximally_mixed(j)) == pytest.approx(1 / d, abs=1e-15)
        assert purity(projector(random_pure(j, 3))) == pytest.approx(1, abs=1e-12)
    assert purity(thermal("1", 1.0)) == pytest.approx(closed_purity("1", 1.0), abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(
    st.integers(1, 8),
    st.sampled_from(["coherent", "thermal", "squeeze1", "squeeze2", "mixed"]),
    st.floats(-4, 4),
    st.integers(0, 2**32),
)
def test_factory_outputs_are_states(twice_j, kind, x, seed):
    j = f"{twice_j}/2"
    if kind == "coherent":
        state = projector(coherent_state(j, (abs(x) % np.pi, x)))
    elif kind == "thermal":
        state = thermal(j, 10 * x)
    elif kind == "squeeze1":
        state = projector(squeeze_one_axis_state(j, x))
    elif kind == "squeeze2":
        state = projector(squeeze_two_axis_state(j, x))
    else:
        state = random_mixed(j, seed)
    check_density_matrix(state)
