import numpy as np
import pytest

SPINS = ["1/2", "1", "3/2", "2", "5/2", "3"]

# criterion number -> one-line verdict, filled by test_acceptance.py
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
SMALL_SPINS = ["1/2", "1", "3/2", "2"]


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_omega(rng):
    return float(np.arccos(rng.uniform(-1, 1))), float(rng.uniform(0, 2 * np.pi))


def diagonal_state_integrals(twice_j, probs, dps=30):
    """(Wehrl, Fisher) of a J3-diagonal state by adaptive 1-D quadrature.

    ``probs[k]`` is the weight of the basis state with mu = -j + k. The
    azimuth is integrated out analytically, leaving integrals over
    u = cos(theta) with measure (2j+1)/2 du.
    """
    import mpmath
    from math import comb

    with mpmath.workdps(dps):
        probs = [mpmath.mpf(p) for p in probs]

        def q_and_slope(u):
            c2, s2 = (1 + u) / 2, (1 - u) / 2
            q = dq = mpmath.mpf(0)
            for k, p in enumerate(probs):
                m = twice_j - k
                b = comb(twice_j, k)
                q += p * b * c2**m * s2**k
                if m:
                    dq += p * b * m * c2 ** (m - 1) * s2**k / 2
                if k:
                    dq -= p * b * k * c2**m * s2 ** (k - 1) / 2
            return q, dq

        def entropy_density(u):
            q, _ = q_and_slope(u)
            return -q * mpmath.log(q) if q > 0 else mpmath.mpf(0)

        def fisher_density(u):
            q, dq = q_and_slope(u)
            return (1 - u**2) * dq**2 / q if q > 0 else mpmath.mpf(0)

        nodes = [-1, 0, 1]
        scale = mpmath.mpf(twice_j + 1) / 2
        w = scale * mpmath.quad(entropy_density, nodes)
        f = scale * mpmath.quad(fisher_density, nodes)
    return float(w), float(f)


def two_axis_closed(j, eta):
    """Known expansions of the two-axis squeezed state grown from |j,-j>.

    Only the Dicke levels reachable from |j,-j> by J+^2 appear; the
    comparison must allow a global phase.
    """
    s3, s7 = np.sqrt(3), np.sqrt(7)
    if j == "1":
        return np.array([np.cos(eta), 0, -np.sin(eta)])
    if j == "3/2":
        return np.array([np.cos(s3 * eta), 0, -np.sin(s3 * eta), 0])
    if j == "2":
        c, s = np.cos(2 * s3 * eta), np.sin(2 * s3 * eta)
        return np.array([(1 + c) / 2, 0, -s / np.sqrt(2), 0, (1 - c) / 2])
    if j == "5/2":
        c, s = np.cos(2 * s7 * eta), np.sin(2 * s7 * eta)
        return np.array([(9 + 5 * c) / 14, 0, -np.sqrt(5) * s / np.sqrt(14), 0, np.sqrt(45) * (1 - c) / 14, 0])
    raise ValueError(j)
