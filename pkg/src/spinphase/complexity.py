"""Phase-space complexity of a state, max-Wehrl search and random-state sweeps."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, asdict

import numpy as np
from scipy.optimize import minimize

from .closed_forms import complexity_from
from .phasespace import (
    Q_FLOOR,
    SphereGrid,
    batch_integrals,
    build_grid,
    default_grid,
    phase_space_integrals,
    pole_graded_grid,
    rotate_minimum_to_pole,
    state_factor,
)
from .spin import SpinJ, as_spin, spin_of
from .states import make_rng, purity, random_mixed, random_pure
from . import reference

__all__ = [
    "PhaseSpaceReport",
    "OptimizationConfig",
    "MaxWehrlResult",
    "SweepResult",
    "complexity",
    "max_wehrl_search",
    "conjecture_sweep",
    "resolve_threads",
]


@dataclass(frozen=True)
class PhaseSpaceReport:
    j: SpinJ
    wehrl: float
    fisher: float
    complexity: float
    purity: float
    n_theta: int
    n_phi: int
    convergence_delta: float | None = None
    clamp_count: int = 0

    def as_dict(self) -> dict:
        out = asdict(self)
        out["j"] = str(self.j)
        return out


@dataclass(frozen=True)
class OptimizationConfig:
    """Settings shared by the pure-state search and the channel optimizers.

    ``coarse_n_theta x coarse_n_phi`` is the grid of trial inputs, while
    ``scan_n_theta`` sets the (cheaper) quadrature used while ranking them;
    refinements and final values always use the full quadrature grid.
    """

    coarse_n_theta: int = 48
    coarse_n_phi: int = 48
    refine_tol: float = 1e-9
    refine_max_iter: int = 4000
    restarts: int = 40
    seed: int = 0
    scan_n_theta: int = 40
    top_k: int = 5

    def __post_init__(self):
        if self.coarse_n_theta < 16 or self.coarse_n_phi < 16:
            raise ValueError("coarse grids must have at least 16 points per axis")
        if not self.refine_tol > 0:
            raise ValueError("refine_tol must be positive")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")

    def as_dict(self) -> dict:
        return asdict(self)


def resolve_threads(threads: int | None = None) -> int:
    if threads is None:
        threads = int(os.environ.get("SPINPHASE_THREADS", "1") or 1)
    return max(1, int(threads))


def complexity(state, grid: SphereGrid | None = None, certify: bool = False) -> PhaseSpaceReport:
    """Complexity ``exp(S_W - 2j/(2j+1)) I / (2j)`` of a vector or density matrix.

    With ``certify=True`` the Wehrl entropy is recomputed on a grid with
    both node counts doubled and the absolute change is reported as
    ``convergence_delta``.
    """
    arr = np.asarray(state, dtype=complex)
    j = spin_of(arr)
    if grid is None:
        grid = default_grid(j)
    ints = phase_space_integrals(arr, grid)
    delta = None
    if certify:
        delta = abs(phase_space_integrals(arr, grid.refined(), fisher=False).wehrl - ints.wehrl)
    return PhaseSpaceReport(
        j=j,
        wehrl=ints.wehrl,
        fisher=ints.fisher,
        complexity=complexity_from(ints.wehrl, ints.fisher, j),
        purity=purity(arr),
        n_theta=grid.n_theta,
        n_phi=grid.n_phi,
        convergence_delta=delta,
        clamp_count=ints.clamp_count,
    )


@dataclass(frozen=True)
class MaxWehrlResult:
    j: SpinJ
    best_wehrl: float
    best_complexity: float
    best_state: np.ndarray = field(repr=False)
    restarts_used: int = 0
    converged: bool = False
    restart_values: tuple = field(default=(), repr=False)
    best_fisher: float = float("nan")

    def as_dict(self) -> dict:
        return {
            "j": str(self.j),
            "best_wehrl": self.best_wehrl,
            "best_complexity": self.best_complexity,
            "best_fisher": self.best_fisher,
            "restarts_used": self.restarts_used,
            "converged": self.converged,
            "best_state_real": self.best_state.real.tolist(),
            "best_state_imag": self.best_state.imag.tolist(),
            "restart_values": list(self.restart_values),
        }


def _params_to_state(x: np.ndarray) -> np.ndarray:
    d = x.size // 2
    psi = x[:d] + 1j * x[d:]
    nrm = np.linalg.norm(psi)
    if nrm == 0:
        psi = np.zeros(d, complex)
        psi[0] = 1.0
        return psi
    return psi / nrm


def _pure_wehrl_objective(grid: SphereGrid):
    # hot loop of the search: a direct evaluation of the same sum that
    # phase_space_integrals computes, without the general-purpose plumbing
    amp_conj = grid.amp_conj
    weights = grid.weights

    def neg_wehrl(x):
        psi = _params_to_state(np.asarray(x))
        f = psi @ amp_conj
        q = np.minimum(f.real**2 + f.imag**2, 1.0)
        return float(weights @ (q * np.log(np.maximum(q, Q_FLOOR))))

    return neg_wehrl


def _nelder_mead(fun, x0, tol, max_iter, scale=None):
    # near a smooth extremum an x error of sqrt(tol) moves f by about tol
    opts = {"xatol": float(np.sqrt(tol)), "fatol": tol, "maxiter": max_iter, "maxfev": 2 * max_iter, "adaptive": x0.size > 4}
    if scale is not None:
        simplex = np.vstack([x0] + [x0 + scale * e for e in np.eye(x0.size)])
        opts["initial_simplex"] = simplex
    return minimize(fun, x0, method="Nelder-Mead", options=opts)


def max_wehrl_search(
    j, config: OptimizationConfig | None = None, grid: SphereGrid | None = None, threads: int | None = None
) -> MaxWehrlResult:
    """Maximize the Wehrl entropy over pure states with multi-start Nelder-Mead.

    Each restart optimizes the ``2(2j+1)`` real and imaginary parts of an
    unnormalized amplitude vector on a coarse quadrature grid; the two best
    restarts are then polished on the full grid. ``converged`` is set when
    the two best coarse optima agree within 1e-4.
    """
    j = as_spin(j)
    config = config or OptimizationConfig()
    grid = grid or default_grid(j)
    coarse = build_grid(j, config.scan_n_theta, max(2 * config.scan_n_theta, 2 * j.twice_j + 2))
    d = j.dim
    coarse_obj = _pure_wehrl_objective(coarse)
    fine_obj = _pure_wehrl_objective(grid)
    coarse_tol = max(config.refine_tol, 1e-8)

    def one_restart(r):
        x0 = make_rng((config.seed, r)).standard_normal(2 * d)
        res = _nelder_mead(coarse_obj, x0, coarse_tol, 20 * config.refine_max_iter)
        return -res.fun, res.x

    with ThreadPoolExecutor(resolve_threads(threads)) as pool:
        runs = list(pool.map(one_restart, range(config.restarts)))
    order = sorted(range(len(runs)), key=lambda i: (-runs[i][0], i))
    values = tuple(float(runs[i][0]) for i in order)
    converged = len(values) == 1 or (values[0] - values[1]) <= 1e-4

    best_w, best_x = -np.inf, None
    for i in order[:2]:
        x = runs[i][1]
        res = _nelder_mead(fine_obj, x, config.refine_tol, config.refine_max_iter, scale=1e-3 * np.linalg.norm(x))
        if -res.fun > best_w:
            best_w, best_x = -res.fun, res.x
    psi = _params_to_state(best_x)
    ints = phase_space_integrals(psi, grid)
    return MaxWehrlResult(
        j=j,
        best_wehrl=ints.wehrl,
        best_complexity=complexity_from(ints.wehrl, j.twice_j, j),
        best_state=psi,
        restarts_used=config.restarts,
        converged=bool(converged),
        restart_values=values,
        best_fisher=ints.fisher,
    )


@dataclass(frozen=True)
class SweepResult:
    j: SpinJ
    seed: int
    purity: np.ndarray = field(repr=False)
    complexity: np.ndarray = field(repr=False)
    wehrl: np.ndarray = field(repr=False)
    fisher: np.ndarray = field(repr=False)
    bin_edges: np.ndarray = field(repr=False)
    counts: np.ndarray = field(repr=False)
    pure_optimum: float | None = None
    violations: tuple = ()

    @property
    def sample_max(self) -> float:
        return float(self.complexity.max())

    @property
    def mode(self) -> float:
        """Center of the most populated histogram bin."""
        k = int(np.argmax(self.counts))
        return float(0.5 * (self.bin_edges[k] + self.bin_edges[k + 1]))

    def summary(self) -> dict:
        return {
            "j": str(self.j),
            "n_samples": int(self.complexity.size),
            "seed": self.seed,
            "sample_max": self.sample_max,
            "histogram_mode": self.mode,
            "bin_edges": self.bin_edges.tolist(),
            "counts": self.counts.tolist(),
            "pure_optimum": self.pure_optimum,
            "violations": list(self.violations),
        }


HIST_BIN_WIDTH = 0.025
# samples whose Q dips below this on the sweep grid are redone on the default grid
SWEEP_REFINE_Q = 1e-2


def sweep_grid(j) -> SphereGrid:
    """Cheap quadrature for random states whose Q stays away from zero."""
    j = as_spin(j)
    n = max(48, 8 * j.dim)
    return build_grid(j, n, 2 * n)


def conjecture_sweep(
    j,
    n_samples: int,
    seed: int = 0,
    grid: SphereGrid | None = None,
    pure: bool = False,
    tolerance: float = 1e-3,
    threads: int | None = None,
    batch: int = 256,
) -> SweepResult:
    """Complexity and purity of ``n_samples`` random states.

    Sample ``i`` is drawn from the stream seeded by ``(seed, i)``, so the
    output does not depend on batching or thread count. Samples whose
    complexity exceeds the best known pure-state value by more than
    ``tolerance`` are listed in ``violations`` rather than raised.

    Without an explicit ``grid`` each batch is integrated on the cheap
    ``sweep_grid`` and samples whose Q comes within ``SWEEP_REFINE_Q`` of
    zero on it (nearly pure ones, and every pure sample) are recomputed on
    the default grid. For ``j = 1/2`` Q has a single near-zero, so those
    samples are instead rotated to put it at the pole and integrated on
    :func:`pole_graded_grid`, which resolves it to rounding error.
    """
    j = as_spin(j)
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    fine = None
    if grid is None:
        grid, fine = sweep_grid(j), default_grid(j)
    graded = pole_graded_grid(j) if fine is not None and j.twice_j == 1 else None
    draw = random_pure if pure else random_mixed

    def chunk(start):
        idx = range(start, min(start + batch, n_samples))
        states = [draw(j, (seed, i)) for i in idx]
        if pure:
            factors = np.stack(states)[:, :, None]
        else:
            factors = np.stack(_pad(states))
        w, f, _, q_min = batch_integrals(factors, grid, return_min=True)
        redo = np.flatnonzero(q_min < SWEEP_REFINE_Q) if fine is not None else []
        if len(redo) and graded is not None:
            rotated = [rotate_minimum_to_pole(states[i], grid) for i in redo]
            w[redo], f[redo], _ = batch_integrals(np.stack(_pad(rotated)), graded)
        elif len(redo):
            w[redo], f[redo], _ = batch_integrals(factors[redo], fine)
        return np.array([purity(s) for s in states]), w, f

    with ThreadPoolExecutor(resolve_threads(threads)) as pool:
        parts = list(pool.map(chunk, range(0, n_samples, batch)))
    pur = np.concatenate([p[0] for p in parts])
    weh = np.concatenate([p[1] for p in parts])
    fis = np.concatenate([p[2] for p in parts])
    tj = j.twice_j
    comp = np.exp(weh - tj / (tj + 1)) * fis / tj
    top = max(float(comp.max()), 1.0)
    edges = np.arange(0.0, top + HIST_BIN_WIDTH, HIST_BIN_WIDTH)
    counts, edges = np.histogram(comp, bins=edges)
    optimum = reference.max_pure_complexity(j)
    viol = ()
    if optimum is not None:
        viol = tuple((int(i), float(comp[i])) for i in np.flatnonzero(comp > optimum + tolerance))
    return SweepResult(j, seed, pur, comp, weh, fis, edges, counts, optimum, viol)


def _pad(states):
    # full-rank factors of Ginibre states are square; pad rank-deficient ones with zeros
    facs = [state_factor(s) for s in states]
    d = facs[0].shape[0]
    out = []
    for f in facs:
        if f.shape[1] < d:
            f = np.hstack([f, np.zeros((d, d - f.shape[1]), complex)])
        out.append(f)
    return out
