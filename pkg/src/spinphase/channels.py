"""Kraus-operator channels and their complexity-generating / -breaking power.

For a channel ``E`` and coherent inputs ``|Omega>``::

    C+(E) = max(sup_Omega C(E(|Omega><Omega|)) - 1, 0)
    C-(E) = max(1 - inf_Omega C(E(|Omega><Omega|)), 0)

Both extrema are found by scanning a grid of inputs with a cheap
quadrature, then refining the best candidates with Nelder-Mead in
``(theta, phi)`` on the full quadrature grid.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from .complexity import OptimizationConfig, PhaseSpaceReport, complexity
from .errors import DomainError
from .phasespace import SphereGrid, batch_integrals, build_grid, default_grid
from .spin import BlochPoint, SpinJ, _require_physical, as_spin, coherent_amplitudes, unitary_from_generator
from .states import as_density_matrix, two_axis_generator

__all__ = [
    "QuantumChannel",
    "ChannelComplexityReport",
    "unitary_channel",
    "identity_channel",
    "gate_x",
    "gate_z",
    "gate_fourier",
    "gate_phase",
    "squeeze_unitary_one_axis",
    "squeeze_unitary_two_axis",
    "amplitude_damping",
    "apply",
    "output_complexity",
    "channel_complexity",
    "c_plus",
    "c_minus",
    "squeeze_power_scan",
    "SqueezeScan",
]


@dataclass(frozen=True, eq=False)
class QuantumChannel:
    j: SpinJ
    kraus: tuple
    label: str = ""

    def __post_init__(self):
        if not self.kraus:
            raise DomainError("a channel needs at least one Kraus operator")
        ks = []
        for k in self.kraus:
            k = np.array(k, dtype=complex)
            if k.shape != (self.j.dim, self.j.dim):
                raise DomainError(f"Kraus operator shape {k.shape} does not match dim {self.j.dim}")
            k.setflags(write=False)
            ks.append(k)
        object.__setattr__(self, "kraus", tuple(ks))
        defect = np.max(np.abs(self.completeness() - np.eye(self.j.dim)))
        if defect > 1e-10:
            raise DomainError(f"Kraus operators are not trace preserving (defect {defect:.2e})")

    def completeness(self) -> np.ndarray:
        return sum(k.conj().T @ k for k in self.kraus)

    @property
    def is_unitary(self) -> bool:
        return len(self.kraus) == 1

    @property
    def stacked(self) -> np.ndarray:
        return np.stack(self.kraus)

    def __call__(self, rho):
        return apply(self, rho)


def unitary_channel(u, label: str = "U") -> QuantumChannel:
    u = np.asarray(u, dtype=complex)
    return QuantumChannel(SpinJ(u.shape[0] - 1), (u,), label)


def identity_channel(j) -> QuantumChannel:
    j = _require_physical(as_spin(j))
    return unitary_channel(np.eye(j.dim), "I")


def apply(channel: QuantumChannel, rho) -> np.ndarray:
    """``sum_n K_n rho K_n^dag``; vectors are promoted to projectors."""
    rho = as_density_matrix(rho)
    if rho.shape != (channel.j.dim, channel.j.dim):
        raise DomainError(f"state shape {rho.shape} does not match channel dimension {channel.j.dim}")
    out = sum(k @ rho @ k.conj().T for k in channel.kraus)
    return (out + out.conj().T) / 2


def _root_of_unity(j: SpinJ) -> complex:
    return np.exp(2j * np.pi / j.dim)


def gate_x(j) -> QuantumChannel:
    """Cyclic shift ``|mu> -> |mu+1>``, ``|j> -> |-j>``."""
    j = _require_physical(as_spin(j))
    return unitary_channel(np.roll(np.eye(j.dim), 1, axis=0), "X")


def gate_z(j) -> QuantumChannel:
    j = _require_physical(as_spin(j))
    k = np.arange(j.dim)
    return unitary_channel(np.diag(np.exp(2j * np.pi * k / j.dim)), "Z")


def gate_fourier(j) -> QuantumChannel:
    j = _require_physical(as_spin(j))
    k = np.arange(j.dim)
    # reduce the exponent mod d before exponentiating to keep phases exact
    f = np.exp(2j * np.pi * (np.outer(k, k) % j.dim) / j.dim) / np.sqrt(j.dim)
    return unitary_channel(f, "F")


def gate_phase(j) -> QuantumChannel:
    """Diagonal gate with entries ``(-e^{i pi/d})^{(j+mu)^2}``."""
    j = _require_physical(as_spin(j))
    k = np.arange(j.dim)
    n = k * k
    # (-e^{i pi/d})^n = e^{i pi n (d+1)/d}; reduce n(d+1) mod 2d
    return unitary_channel(np.diag(np.exp(1j * np.pi * ((n * (j.dim + 1)) % (2 * j.dim)) / j.dim)), "P")


def squeeze_unitary_one_axis(j, eta: float) -> QuantumChannel:
    j = _require_physical(as_spin(j))
    return unitary_channel(np.diag(np.exp(-1j * eta * j.mus**2)), f"S1({eta:g})")


def squeeze_unitary_two_axis(j, eta: float) -> QuantumChannel:
    j = _require_physical(as_spin(j))
    return unitary_channel(unitary_from_generator(eta * two_axis_generator(j)), f"S2({eta:g})")


def amplitude_damping(j, p: float) -> QuantumChannel:
    """Damping that moves weight from every ``|j,mu>`` to ``|j,-j>`` with probability ``p``."""
    j = _require_physical(as_spin(j))
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"damping probability must lie in [0, 1], got {p}")
    d = j.dim
    k0 = np.diag([1.0] + [np.sqrt(1 - p)] * (d - 1)).astype(complex)
    kraus = [k0]
    for n in range(1, d):
        kn = np.zeros((d, d), complex)
        kn[0, n] = np.sqrt(p)
        kraus.append(kn)
    return QuantumChannel(j, tuple(kraus), f"AD({p:g})")


def _output_factors(channel: QuantumChannel, inputs: np.ndarray) -> np.ndarray:
    """Factors ``(batch, dim, n_kraus)`` with ``E(|v><v|) = L L^dag`` for each input row."""
    return np.einsum("kab,mb->mak", channel.stacked, inputs)


def _complexities(channel, thetas, phis, grid: SphereGrid) -> np.ndarray:
    inputs = coherent_amplitudes(channel.j, thetas, phis).reshape(-1, channel.j.dim)
    factors = _output_factors(channel, inputs)
    tj = channel.j.twice_j
    if channel.is_unitary:
        w, _, _ = batch_integrals(factors, grid, fisher=False)
        return np.exp(w - tj / (tj + 1))
    w, f, _ = batch_integrals(factors, grid)
    return np.exp(w - tj / (tj + 1)) * f / tj


def output_complexity(channel: QuantumChannel, omega, grid: SphereGrid | None = None) -> PhaseSpaceReport:
    """Full report for ``E(|Omega><Omega|)``."""
    grid = grid or default_grid(channel.j)
    a = coherent_amplitudes(channel.j, float(omega[0]), float(omega[1]))
    return complexity(apply(channel, np.outer(a, a.conj())), grid)


@dataclass(frozen=True)
class ChannelComplexityReport:
    label: str
    j: SpinJ
    c_plus: float | None = None
    c_minus: float | None = None
    sup_complexity: float | None = None
    inf_complexity: float | None = None
    argmax_omega: BlochPoint | None = None
    argmin_omega: BlochPoint | None = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def converged(self) -> bool:
        return all(self.diagnostics.get("refine_converged", {}).values()) if self.diagnostics else True

    def as_dict(self) -> dict:
        out = {
            "label": self.label,
            "j": str(self.j),
            "c_plus": self.c_plus,
            "c_minus": self.c_minus,
            "sup_complexity": self.sup_complexity,
            "inf_complexity": self.inf_complexity,
            "argmax_omega": list(self.argmax_omega) if self.argmax_omega else None,
            "argmin_omega": list(self.argmin_omega) if self.argmin_omega else None,
            "diagnostics": self.diagnostics,
        }
        return out


def _input_grid(config: OptimizationConfig):
    theta = np.linspace(0.0, np.pi, config.coarse_n_theta)
    phi = 2 * np.pi * np.arange(config.coarse_n_phi) / config.coarse_n_phi
    t, p = np.meshgrid(theta, phi, indexing="ij")
    return t.ravel(), p.ravel()


def _scan_grid(j: SpinJ, config: OptimizationConfig) -> SphereGrid:
    n = config.scan_n_theta
    return build_grid(j, n, max(2 * n, 2 * j.twice_j + 2))


def _candidates(values, thetas, phis, k, sign):
    """Indices of the ``k`` best distinct inputs (sign=+1 for maxima)."""
    order = np.argsort(-sign * values, kind="stable")
    picked, seen = [], []
    for i in order:
        pt = BlochPoint(thetas[i], phis[i]).cartesian()
        if any(np.dot(pt, q) > np.cos(1e-6) for q in seen):
            continue
        picked.append(int(i))
        seen.append(pt)
        if len(picked) == k:
            break
    return picked


def _refine(channel, start, grid, scan, config, sign):
    """Two-stage Nelder-Mead over (theta, phi): cheap quadrature, then full."""
    def make(g):
        def f(x):
            return -sign * float(_complexities(channel, np.array([x[0]]), np.array([x[1]]), g)[0])
        return f

    xtol = max(np.sqrt(config.refine_tol), 1e-7)
    x = np.asarray(start, float)
    nfev, ok = 0, True
    for g, step in ((scan, 0.05), (grid, 2e-3)):
        simplex = np.array([x, x + [step, 0.0], x + [0.0, step]])
        res = minimize(
            make(g), x, method="Nelder-Mead",
            options={"xatol": xtol, "fatol": config.refine_tol, "maxiter": config.refine_max_iter,
                     "initial_simplex": simplex},
        )
        x, nfev, ok = res.x, nfev + res.nfev, ok and bool(res.success)
    value = float(_complexities(channel, np.array([x[0]]), np.array([x[1]]), grid)[0])
    return value, BlochPoint(*x).canonical(), nfev, ok


# nine probe inputs for the unitary shortcut: both poles, two points on each
# of three latitude rings, and a third equatorial point
_VERIFY_POINTS = (
    [(0.0, 0.0), (np.pi, 0.0)]
    + [(t, p) for t in (np.pi / 4, np.pi / 2, 3 * np.pi / 4) for p in (0.3, 0.3 + 2 * np.pi / 3)]
    + [(np.pi / 2, 0.3 + 4 * np.pi / 3)]
)


def channel_complexity(
    channel: QuantumChannel,
    config: OptimizationConfig | None = None,
    grid: SphereGrid | None = None,
    which: tuple = ("plus", "minus"),
) -> ChannelComplexityReport:
    """Compute the requested subset of ``C+`` and ``C-``."""
    config = config or OptimizationConfig()
    j = channel.j
    grid = grid or default_grid(j)
    scan = _scan_grid(j, config)
    diag = {
        "coarse_grid": [config.coarse_n_theta, config.coarse_n_phi],
        "scan_quadrature": scan.meta(),
        "quadrature": grid.meta(),
        "refine_converged": {},
        "refine_nfev": {},
    }
    out = {}
    need_scan = "plus" in which or ("minus" in which and not channel.is_unitary)
    if need_scan:
        thetas, phis = _input_grid(config)
        values = _complexities(channel, thetas, phis, scan)

    if "plus" in which:
        best = (-np.inf, None)
        for rank, i in enumerate(_candidates(values, thetas, phis, config.top_k, +1)):
            v, pt, nf, ok = _refine(channel, (thetas[i], phis[i]), grid, scan, config, +1)
            diag["refine_converged"][f"max{rank}"] = ok
            diag["refine_nfev"][f"max{rank}"] = nf
            if v > best[0]:
                best = (v, pt)
        out["sup_complexity"], out["argmax_omega"] = best
        out["c_plus"] = max(best[0] - 1.0, 0.0)

    if "minus" in which:
        if channel.is_unitary:
            pts = np.array(_VERIFY_POINTS)
            vals = _complexities(channel, pts[:, 0], pts[:, 1], grid)
            diag["unitary_verification"] = vals.tolist()
            k = int(np.argmin(vals))
            out["inf_complexity"] = float(vals[k])
            out["argmin_omega"] = BlochPoint(*pts[k]).canonical()
            if np.all(vals >= 1.0 - 1e-7):
                out["c_minus"] = 0.0
                diag["c_minus_shortcut"] = True
            else:
                diag["c_minus_shortcut"] = False
                thetas, phis = _input_grid(config)
                values = _complexities(channel, thetas, phis, scan)
        if "c_minus" not in out:
            best = (np.inf, None)
            for rank, i in enumerate(_candidates(values, thetas, phis, config.top_k, -1)):
                v, pt, nf, ok = _refine(channel, (thetas[i], phis[i]), grid, scan, config, -1)
                diag["refine_converged"][f"min{rank}"] = ok
                diag["refine_nfev"][f"min{rank}"] = nf
                if v < best[0]:
                    best = (v, pt)
            out["inf_complexity"], out["argmin_omega"] = best
            out["c_minus"] = min(max(1.0 - best[0], 0.0), 1.0)
    return ChannelComplexityReport(channel.label, j, diagnostics=diag, **out)


def c_plus(channel, config=None, grid=None) -> ChannelComplexityReport:
    return channel_complexity(channel, config, grid, which=("plus",))


def c_minus(channel, config=None, grid=None) -> ChannelComplexityReport:
    return channel_complexity(channel, config, grid, which=("minus",))


@dataclass(frozen=True)
class SqueezeScan:
    axis: int
    j: SpinJ
    etas: np.ndarray = field(repr=False)
    c_plus_scan: np.ndarray = field(repr=False)
    best_eta: float = 0.0
    max_c_plus: float = 0.0
    report: ChannelComplexityReport | None = None

    def as_dict(self) -> dict:
        return {
            "axis": self.axis,
            "j": str(self.j),
            "etas": self.etas.tolist(),
            "c_plus_scan": self.c_plus_scan.tolist(),
            "best_eta": self.best_eta,
            "max_c_plus": self.max_c_plus,
            "report": self.report.as_dict() if self.report else None,
        }


def _squeezer(axis: int):
    if axis == 1:
        return squeeze_unitary_one_axis
    if axis == 2:
        return squeeze_unitary_two_axis
    raise DomainError("squeezing axis must be 1 or 2")


def _squeeze_inputs(axis: int, config: OptimizationConfig):
    """Coherent inputs for the eta scan, reduced by the twisting symmetry.

    ``exp(-i eta J3^2)`` commutes with rotations about the z axis, so the
    output complexity does not depend on phi. The two-axis generator only
    commutes with the rotation by pi, so phi in ``[0, pi)`` suffices.
    """
    if axis == 1:
        thetas = np.linspace(0.0, np.pi, config.coarse_n_theta)
        return thetas, np.zeros_like(thetas)
    thetas, phis = _input_grid(config)
    keep = phis < np.pi
    return thetas[keep], phis[keep]


def default_eta_grid(axis: int) -> np.ndarray:
    """Coarse squeezing-strength grid scanned before the 1-D refinement."""
    if axis == 1:
        return np.linspace(0.0, np.pi, 64, endpoint=False)
    if axis == 2:
        return np.linspace(0.0, 2 * np.pi, 128, endpoint=False)
    raise DomainError(f"squeezing axis must be 1 or 2, got {axis}")


def squeeze_power_scan(
    j, axis: int, eta_grid=None, config: OptimizationConfig | None = None, grid: SphereGrid | None = None
) -> SqueezeScan:
    """``max_eta C+(S_axis(eta))``.

    The default eta window is ``[0, pi)`` for one-axis twisting, which is
    periodic there up to a global phase, and ``[0, 2 pi)`` for two-axis
    twisting, whose evolution is only quasi-periodic. Every eta on the grid gets a coarse ``C+`` (input scan with the cheap
    quadrature); a bounded 1-D search then refines eta between the
    neighbours of the best grid point, maximizing over inputs at each
    trial eta, and the final ``C+`` is recomputed in full at the optimum.
    """
    j = _require_physical(as_spin(j))
    config = config or OptimizationConfig()
    grid = grid or default_grid(j)
    make = _squeezer(axis)
    if eta_grid is None:
        etas = default_eta_grid(axis)
    else:
        etas = np.asarray(eta_grid, float)
    if etas.size == 0:
        raise DomainError("eta grid must not be empty")
    scan = _scan_grid(j, config)
    thetas, phis = _squeeze_inputs(axis, config)
    coarse = np.array([_complexities(make(j, e), thetas, phis, scan).max() for e in etas]) - 1.0
    k = int(np.argmax(coarse))
    lo = etas[max(k - 1, 0)]
    hi = etas[min(k + 1, etas.size - 1)]

    warm = {"x": None}

    def neg_sup(eta):
        ch = make(j, eta)
        if warm["x"] is None:
            vals = _complexities(ch, thetas, phis, scan)
            i = int(np.argmax(vals))
            warm["x"] = (thetas[i], phis[i])
        v, pt, _, _ = _refine(ch, warm["x"], grid, scan, config, +1)
        warm["x"] = (pt.theta, pt.phi)
        return -v

    if hi > lo:
        res = minimize_scalar(neg_sup, bounds=(lo, hi), method="bounded", options={"xatol": 1e-5})
        best_eta = float(res.x)
    else:
        best_eta = float(etas[k])
    report = c_plus(make(j, best_eta), config, grid)
    return SqueezeScan(axis, j, etas, coarse, best_eta, float(report.c_plus), report)
