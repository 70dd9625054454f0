from math import comb

import mpmath
import numpy as np
import pytest

from spinphase.closed_forms import thermal_closed
from spinphase.errors import DomainError
from spinphase.phasespace import (
    batch_integrals,
    build_grid,
    default_grid,
    fisher_information,
    husimi,
    husimi_gradient,
    husimi_on_grid,
    phase_space_integrals,
    pole_graded_grid,
    rotate_minimum_to_pole,
    state_factor,
    wehrl_entropy,
)
from spinphase.spin import as_spin, coherent_state, displacement
from spinphase.states import dicke, maximally_mixed, projector, random_mixed, random_pure, thermal

from conftest import SMALL_SPINS, SPINS, diagonal_state_integrals, random_omega


def fd_gradient(rho, omega, h=1e-5):
    t, p = omega
    dq_t = (husimi(rho, (t + h, p)) - husimi(rho, (t - h, p))) / (2 * h)
    dq_p = (husimi(rho, (t, p + h)) - husimi(rho, (t, p - h))) / (2 * h)
    return dq_t, dq_p / np.sin(t)


@pytest.mark.parametrize("j", SPINS)
def test_grid_normalization(j):
    grid = default_grid(j)
    d = as_spin(j).dim
    assert grid.weights.sum() == pytest.approx(d, abs=1e-13)
    assert np.sum(grid.weights / d) == pytest.approx(1, abs=1e-13)


def test_grid_minimum_sizes():
    with pytest.raises(DomainError):
        build_grid("1", 1, 64)
    with pytest.raises(DomainError):
        build_grid("1", 16, 5)
    build_grid("1", 2, 6)


@pytest.mark.parametrize("j", SPINS)
def test_husimi_normalization(j, rng):
    grid = default_grid(j)
    for seed in range(5):
        for state in (random_mixed(j, seed), random_pure(j, seed)):
            assert np.sum(grid.weights * husimi_on_grid(state, grid)) == pytest.approx(1, abs=1e-10)


@pytest.mark.parametrize("j", ["1/2", "1", "3/2", "2"])
def test_grid_polynomial_exactness(j, rng):
    spin = as_spin(j)
    grid = default_grid(j)
    u = np.cos(grid.theta)
    for k in range(0, 2 * spin.twice_j + 1):
        exact = spin.dim / (k + 1) if k % 2 == 0 else 0.0
        assert np.sum(grid.weights * u**k) == pytest.approx(exact, abs=1e-12)
    # int Q^2 for a coherent state = (2j+1)/(4j+1), any orientation
    q = husimi_on_grid(coherent_state(j, random_omega(rng)), grid)
    assert np.sum(grid.weights * q**2) == pytest.approx(spin.dim / (2 * spin.twice_j + 1), abs=1e-12)


def test_husimi_point_values(rng):
    for j in SPINS:
        omega = random_omega(rng)
        psi = coherent_state(j, omega)
        assert husimi(projector(psi), omega) == pytest.approx(1, abs=1e-12)
        assert husimi(maximally_mixed(j), random_omega(rng)) == pytest.approx(1 / as_spin(j).dim, abs=1e-15)


@pytest.mark.parametrize("j", SPINS)
def test_husimi_dicke_formula(j, rng):
    spin = as_spin(j)
    for k, mu in enumerate(spin.mus):
        m = spin.twice_j - k
        for _ in range(3):
            t, p = random_omega(rng)
            expected = comb(spin.twice_j, m) * np.cos(t / 2) ** (2 * m) * np.sin(t / 2) ** (2 * k)
            assert husimi(dicke(j, f"{int(2 * mu)}/2"), (t, p)) == pytest.approx(expected, abs=1e-12)


def test_gradient_vanishes_at_coherent_peak(rng):
    for j in SPINS:
        omega = random_omega(rng)
        sample = husimi_gradient(coherent_state(j, omega), omega)
        assert sample.q == pytest.approx(1, abs=1e-12)
        assert abs(sample.dq_dtheta) < 1e-10 and abs(sample.dq_dphi_over_sin) < 1e-10


def test_gradient_of_mixed_state_is_zero(rng):
    for j in SPINS:
        s = husimi_gradient(maximally_mixed(j), random_omega(rng))
        assert abs(s.dq_dtheta) < 1e-15 and abs(s.dq_dphi_over_sin) < 1e-15


@pytest.mark.parametrize("j", SPINS)
def test_gradient_matches_finite_differences(j, rng):
    for seed in range(10):
        rho = random_mixed(j, seed) if seed % 2 else projector(random_pure(j, seed))
        t, p = random_omega(rng)
        t = float(np.clip(t, 0.2, np.pi - 0.2))
        s = husimi_gradient(rho, (t, p))
        fd_t, fd_p = fd_gradient(rho, (t, p))
        scale = max(np.hypot(fd_t, fd_p), 1e-3)
        assert abs(s.dq_dtheta - fd_t) / scale < 1e-6
        assert abs(s.dq_dphi_over_sin - fd_p) / scale < 1e-6


def test_gradient_at_pole_rejected():
    with pytest.raises(DomainError):
        husimi_gradient(maximally_mixed("1"), (0.0, 0.3))
    with pytest.raises(DomainError):
        husimi_gradient(maximally_mixed("1"), (np.pi, 0.3))


@pytest.mark.parametrize("j", SPINS)
def test_extremal_wehrl(j, rng):
    tj = as_spin(j).twice_j
    for _ in range(3):
        assert wehrl_entropy(coherent_state(j, random_omega(rng))) == pytest.approx(tj / (tj + 1), abs=1e-9)
    assert wehrl_entropy(maximally_mixed(j)) == pytest.approx(np.log(tj + 1), abs=1e-12)
    assert fisher_information(maximally_mixed(j)) == pytest.approx(0, abs=1e-12)


def dicke_wehrl_by_mpmath(twice_j, k):
    # 1-D integral over u = cos(theta), azimuth integrated out
    m = twice_j - k
    c = comb(twice_j, m)

    def integrand(u):
        q = c * ((1 + u) / 2) ** m * ((1 - u) / 2) ** k
        return -q * mpmath.log(q) if q > 0 else mpmath.mpf(0)

    with mpmath.workdps(30):
        return float(mpmath.quad(integrand, [-1, 0, 1]) * (twice_j + 1) / 2)


def test_dicke_wehrl_spin_one():
    oracle = dicke_wehrl_by_mpmath(2, 1)
    assert oracle == pytest.approx(5 / 3 - np.log(2), abs=1e-14)
    assert oracle == pytest.approx(0.973519, abs=5e-7)
    assert wehrl_entropy(dicke("1", 0)) == pytest.approx(oracle, abs=1e-8)


@pytest.mark.parametrize("j", ["1/2", "1", "3/2", "2", "5/2", "3"])
def test_pure_state_fisher_is_2j(j):
    tj = as_spin(j).twice_j
    grid = default_grid(j)
    for seed in range(50):
        f = fisher_information(random_pure(j, (11, seed)), grid)
        assert f == pytest.approx(tj, rel=1e-6)


@pytest.mark.parametrize("beta", [0.5, 1.0, 2.0])
def test_thermal_fisher_closed_form(beta):
    assert fisher_information(thermal("1", beta)) == pytest.approx(thermal_closed("1", beta).fisher, abs=1e-8)


def sqrt_form_fisher(rho, grid, h=1e-5):
    """4 |grad sqrt(Q)|^2 integrated, with the gradient from central differences."""
    lfac = state_factor(rho)
    j = as_spin(f"{lfac.shape[0] - 1}/2")
    from spinphase.spin import coherent_amplitudes

    def sqrt_q(t, p):
        a = coherent_amplitudes(j, t, p)
        return np.sqrt(np.sum(np.abs(a.conj() @ lfac) ** 2, axis=-1))

    t, p = grid.theta, grid.phi
    d_t = (sqrt_q(t + h, p) - sqrt_q(t - h, p)) / (2 * h)
    d_p = (sqrt_q(t, p + h) - sqrt_q(t, p - h)) / (2 * h) / np.sin(t)
    return np.sum(grid.weights * 4 * (d_t**2 + d_p**2))


@pytest.mark.parametrize("j", ["1/2", "1", "3/2", "2"])
def test_fisher_two_forms_agree(j):
    grid = build_grid(j, 64, 128)
    for seed in range(5):
        rho = random_mixed(j, seed)
        assert fisher_information(rho, grid) == pytest.approx(sqrt_form_fisher(rho, grid), rel=1e-8)


@pytest.mark.parametrize("j", SMALL_SPINS)
def test_rotation_invariance(j, rng):
    for seed in range(5):
        rho = random_mixed(j, seed)
        d = displacement(j, random_omega(rng))
        moved = d @ rho @ d.conj().T
        a, b = phase_space_integrals(rho), phase_space_integrals(moved)
        assert a.wehrl == pytest.approx(b.wehrl, abs=1e-8)
        assert a.fisher == pytest.approx(b.fisher, abs=1e-8)


@pytest.mark.parametrize("j", SPINS)
def test_bounds(j):
    tj = as_spin(j).twice_j
    for seed in range(10):
        for state in (random_mixed(j, seed), random_pure(j, seed), thermal(j, seed / 3)):
            ints = phase_space_integrals(state)
            assert tj / (tj + 1) - 1e-8 <= ints.wehrl <= np.log(tj + 1) + 1e-8
            assert -1e-8 <= ints.fisher <= tj + 1e-6


@pytest.mark.parametrize("j", SPINS)
def test_convergence_certificate(j, rng):
    grid = default_grid(j)
    for state in (coherent_state(j, random_omega(rng)), random_mixed(j, 1), thermal(j, 1.0)):
        assert abs(wehrl_entropy(state, grid) - wehrl_entropy(state, grid.refined())) < 1e-9


@pytest.mark.parametrize("j", ["1", "3/2", "2"])
def test_convergence_with_husimi_zeros(j):
    # zeros of Q make the entropy integrand non-smooth; convergence is algebraic
    grid = default_grid(j)
    for state in (dicke(j, 0 if as_spin(j).twice_j % 2 == 0 else "1/2"), random_pure(j, 3)):
        assert abs(wehrl_entropy(state, grid) - wehrl_entropy(state, grid.refined())) < 1e-8


def test_batch_matches_single_bitwise():
    j = "3/2"
    grid = default_grid(j)
    states = [random_mixed(j, s) for s in range(4)]
    w, f, _ = batch_integrals(np.stack([state_factor(s) for s in states]), grid)
    for k, s in enumerate(states):
        ints = phase_space_integrals(s, grid)
        assert w[k] == ints.wehrl and f[k] == ints.fisher


def test_dimension_mismatch():
    with pytest.raises(DomainError):
        wehrl_entropy(maximally_mixed("1"), default_grid("3/2"))


def test_no_clamping_for_pure_states():
    ints = phase_space_integrals(dicke("2", 0))
    assert ints.clamp_count == 0
    assert ints.fisher == pytest.approx(4, rel=1e-9)


@pytest.mark.parametrize("j", SPINS)
def test_pole_graded_grid_normalization(j, rng):
    grid = pole_graded_grid(j)
    d = as_spin(j).dim
    assert grid.weights.sum() == pytest.approx(d, abs=1e-12)
    q = husimi_on_grid(random_mixed(j, rng), grid)
    assert np.sum(grid.weights * q) == pytest.approx(1, abs=1e-12)


@pytest.mark.parametrize("j", ["1/2", "1", "2"])
def test_rotation_moves_minimum_to_pole(j, rng):
    rho = random_mixed(j, rng)
    grid = default_grid(j)
    rotated = rotate_minimum_to_pole(rho, grid)
    assert husimi(rotated, (0.0, 0.0)) <= husimi_on_grid(rho, grid).min() + 1e-15
    before, after = phase_space_integrals(rho), phase_space_integrals(rotated)
    assert after.wehrl == pytest.approx(before.wehrl, abs=1e-11)
    assert after.fisher == pytest.approx(before.fisher, abs=1e-9)


@pytest.mark.parametrize("lam", [1e-3, 1e-5, 1e-6, 1e-8, 1e-11, 0.0])
def test_graded_grid_resolves_nearly_pure_qubit(lam, rng):
    wehrl, fisher = diagonal_state_integrals(1, [1 - lam, lam])
    u = np.linalg.qr(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))[0]
    rho = u @ np.diag([1 - lam, lam]) @ u.conj().T
    rotated = rotate_minimum_to_pole(rho, default_grid("1/2"))
    ints = phase_space_integrals(rotated, pole_graded_grid("1/2"))
    assert ints.wehrl == pytest.approx(float(wehrl), abs=1e-12)
    assert ints.fisher == pytest.approx(float(fisher), abs=1e-12)
