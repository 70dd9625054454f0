"""Command-line front end.

Every run is driven by a resolved configuration dictionary (all defaults
filled in). The JSON envelope embeds that dictionary, and
``spinphase --config envelope.json`` executes it again, reproducing the
payload exactly. Exit status: 0 success, 2 usage error, 3 numerical
non-convergence (the report is still written).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timezone

import numpy as np

from . import __version__, reference
from .channels import (
    amplitude_damping,
    channel_complexity,
    default_eta_grid,
    gate_fourier,
    gate_phase,
    gate_x,
    gate_z,
    identity_channel,
    output_complexity,
    squeeze_power_scan,
    squeeze_unitary_one_axis,
    squeeze_unitary_two_axis,
)
from .closed_forms import (
    ClosedForm,
    complexity_from,
    dicke_wehrl_closed,
    qubit_complexity_closed,
    thermal_closed,
)
from .complexity import OptimizationConfig, complexity, conjecture_sweep, max_wehrl_search, resolve_threads
from .errors import DomainError
from .phasespace import SphereGrid, build_grid, default_grid
from .spin import SpinJ, as_spin, coherent_state, half_integer
from .states import (
    dicke,
    noon,
    qubit_bloch,
    random_mixed,
    random_pure,
    squeeze_one_axis_state,
    squeeze_two_axis_state,
    thermal,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NOT_CONVERGED = 3

# largest Wehrl change under grid doubling accepted as converged for a single state
CERTIFY_TOL = 1e-7

COMMANDS = ("state", "channel", "table", "sweep", "random", "maxwehrl")
FORMATS = ("json", "csv")
STATE_KINDS = ("coherent", "dicke", "qubit", "thermal", "noon", "squeeze1", "squeeze2", "random-pure", "random-mixed")
GATES = ("identity", "x", "z", "fourier", "phase", "squeeze1", "squeeze2", "damping")
TABLES = ("table1", "table2", "table3")
SWEEPS = ("squeeze1", "squeeze2", "damping-theta", "damping-p", "thermal-beta", "qubit-r")
TABLE_MAX_TWICE_J = {"table1": 9, "table2": 9, "table3": 5}
TABLE_MIN_TWICE_J = {"table1": 2, "table2": 1, "table3": 2}


class UsageError(Exception):
    """Invalid command-line input; reported with exit status 2."""


# ---------------------------------------------------------------- parsing


def _spin_arg(text: str) -> str:
    try:
        return str(as_spin(text))
    except (DomainError, ValueError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _half_integer_arg(text: str) -> str:
    try:
        return str(half_integer(text))
    except (DomainError, ValueError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", "-o", help="write the report here instead of stdout")
    common.add_argument("--format", choices=FORMATS, default="json")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=_positive_int, help="worker cap (default: $SPINPHASE_THREADS or 1)")
    common.add_argument("--n-theta", type=_positive_int, help="polar quadrature nodes")
    common.add_argument("--n-phi", type=_positive_int, help="azimuthal quadrature nodes")

    optim = argparse.ArgumentParser(add_help=False)
    defaults = OptimizationConfig()
    optim.add_argument("--restarts", type=_positive_int, default=defaults.restarts)
    optim.add_argument("--coarse-n-theta", type=int, default=defaults.coarse_n_theta)
    optim.add_argument("--coarse-n-phi", type=int, default=defaults.coarse_n_phi)
    optim.add_argument("--refine-tol", type=float, default=defaults.refine_tol)
    optim.add_argument("--refine-max-iter", type=_positive_int, default=defaults.refine_max_iter)
    optim.add_argument("--scan-n-theta", type=_positive_int, default=defaults.scan_n_theta)
    optim.add_argument("--top-k", type=_positive_int, default=defaults.top_k)

    parser = argparse.ArgumentParser(
        prog="spinphase", description="Phase-space complexity of spin-j states and channels."
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", dest="rerun", metavar="FILE", help="re-run the configuration embedded in a report")
    parser.add_argument("--rerun-output", metavar="PATH", help="output path when re-running with --config")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    p = sub.add_parser("state", parents=[common], help="complexity of one state")
    p.add_argument("--kind", choices=STATE_KINDS, required=True)
    p.add_argument("--j", type=_spin_arg)
    p.add_argument("--theta", type=float, default=0.0)
    p.add_argument("--phi", type=float, default=0.0)
    p.add_argument("--mu", type=_half_integer_arg, help="Dicke magnetic number")
    p.add_argument("--r", type=float, help="qubit Bloch-vector length")
    p.add_argument("--beta", type=float, help="inverse temperature")
    p.add_argument("--eta", type=float, help="squeezing strength")

    p = sub.add_parser("channel", parents=[common, optim], help="complexity-generating/breaking power of a channel")
    p.add_argument("--gate", choices=GATES, required=True)
    p.add_argument("--j", type=_spin_arg, required=True)
    p.add_argument("--eta", type=float, help="squeezing strength (squeeze gates)")
    p.add_argument("--p", type=float, help="damping probability")
    p.add_argument("--which", choices=("plus", "minus", "both"), default="both")

    p = sub.add_parser("table", parents=[common, optim], help="reproduce a reference table")
    p.add_argument("name", choices=TABLES)
    p.add_argument("--j", type=_spin_arg, action="append", help="spin to include (repeatable)")
    p.add_argument("--j-max", type=_spin_arg, help="include every spin up to this value")

    p = sub.add_parser("sweep", parents=[common, optim], help="plot-ready parameter sweep")
    p.add_argument("--kind", choices=SWEEPS, required=True)
    p.add_argument("--j", type=_spin_arg)
    p.add_argument("--n", type=_positive_int, help="number of parameter values")
    p.add_argument("--eta-max", type=float)
    p.add_argument("--beta-max", type=float)
    p.add_argument("--p", type=float, help="damping probability (damping-theta)")

    p = sub.add_parser("random", parents=[common], help="random-state sample statistics")
    p.add_argument("--j", type=_spin_arg, required=True)
    p.add_argument("--n", type=_positive_int, default=10_000)
    p.add_argument("--pure", action="store_true", help="Haar-random pure states instead of mixed ones")
    p.add_argument("--tolerance", type=float, default=1e-3, help="allowed excess over the pure optimum")

    p = sub.add_parser("maxwehrl", parents=[common, optim], help="maximize the Wehrl entropy over pure states")
    p.add_argument("--j", type=_spin_arg, required=True)
    return parser


# ---------------------------------------------------------------- config


def _grid_config(args, j: SpinJ | None):
    if j is None:
        if args.n_theta is None and args.n_phi is None:
            return None
        return {"n_theta": args.n_theta, "n_phi": args.n_phi}
    try:
        return build_grid(j, args.n_theta, args.n_phi).meta()
    except DomainError as exc:
        raise UsageError(str(exc)) from None


def _optimizer_config(args) -> dict:
    try:
        cfg = OptimizationConfig(
            coarse_n_theta=args.coarse_n_theta,
            coarse_n_phi=args.coarse_n_phi,
            refine_tol=args.refine_tol,
            refine_max_iter=args.refine_max_iter,
            restarts=args.restarts,
            seed=args.seed,
            scan_n_theta=args.scan_n_theta,
            top_k=args.top_k,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return cfg.as_dict()


def _require(value, name: str, context: str):
    if value is None:
        raise UsageError(f"{context} requires --{name}")
    return value


def _table_spins(args) -> list[str]:
    lo, hi = TABLE_MIN_TWICE_J[args.name], TABLE_MAX_TWICE_J[args.name]
    if args.j and args.j_max:
        raise UsageError("give either --j or --j-max, not both")
    if args.j:
        spins = [as_spin(j) for j in args.j]
    else:
        top = as_spin(args.j_max).twice_j if args.j_max else hi
        spins = [SpinJ(t) for t in range(lo, top + 1)]
    for s in spins:
        if not lo <= s.twice_j <= hi:
            raise UsageError(f"{args.name} supports {SpinJ(lo)} <= j <= {SpinJ(hi)}, got j={s}")
    if not spins:
        raise UsageError(f"no spins selected for {args.name}")
    return [str(s) for s in spins]


def resolve_config(args) -> dict:
    """Turn parsed arguments into a complete, JSON-ready configuration."""
    cfg = {"command": args.command, "format": args.format, "seed": args.seed,
           "threads": resolve_threads(args.threads)}
    if args.command == "state":
        kind = args.kind
        if kind == "qubit":
            if args.j not in (None, "1/2"):
                raise UsageError("qubit states need j = 1/2")
            j = "1/2"
        else:
            j = _require(args.j, "j", f"state --kind {kind}")
        params = {}
        if kind == "coherent":
            params = {"theta": args.theta, "phi": args.phi}
        elif kind == "dicke":
            params = {"mu": _require(args.mu, "mu", "dicke states")}
        elif kind == "qubit":
            params = {"r": _require(args.r, "r", "qubit states"), "theta": args.theta, "phi": args.phi}
        elif kind == "thermal":
            params = {"beta": _require(args.beta, "beta", "thermal states")}
        elif kind in ("squeeze1", "squeeze2"):
            params = {"eta": _require(args.eta, "eta", "squeezed states")}
        cfg.update(kind=kind, j=j, params=params, grid=_grid_config(args, as_spin(j)))
    elif args.command == "channel":
        params = {}
        if args.gate in ("squeeze1", "squeeze2"):
            params["eta"] = _require(args.eta, "eta", f"gate {args.gate}")
        if args.gate == "damping":
            params["p"] = _require(args.p, "p", "the damping channel")
        cfg.update(gate=args.gate, j=args.j, params=params, which=args.which,
                   grid=_grid_config(args, as_spin(args.j)), optimizer=_optimizer_config(args))
    elif args.command == "table":
        spins = _table_spins(args)
        cfg.update(name=args.name, spins=spins, grid=_grid_config(args, None))
        if args.name != "table2":
            cfg["optimizer"] = _optimizer_config(args)
    elif args.command == "sweep":
        kind = args.kind
        if kind == "qubit-r":
            if args.j not in (None, "1/2"):
                raise UsageError("the qubit-r sweep needs j = 1/2")
            j = "1/2"
        else:
            j = _require(args.j, "j", f"sweep --kind {kind}")
        params = {}
        if kind == "qubit-r":
            params = {"n": args.n or 101}
        elif kind == "thermal-beta":
            params = {"n": args.n or 51, "beta_max": 5.0 if args.beta_max is None else args.beta_max}
        elif kind in ("squeeze1", "squeeze2"):
            axis = int(kind[-1])
            eta_max = float(default_eta_grid(axis)[-1] + np.diff(default_eta_grid(axis)[:2])[0])
            params = {"n": args.n or 101, "eta_max": eta_max if args.eta_max is None else args.eta_max}
        elif kind == "damping-theta":
            params = {"n": args.n or 61, "p": 0.3 if args.p is None else args.p}
        elif kind == "damping-p":
            params = {"n": args.n or 21}
        cfg.update(kind=kind, j=j, params=params, grid=_grid_config(args, as_spin(j)))
        if kind == "damping-p":
            cfg["optimizer"] = _optimizer_config(args)
    elif args.command == "random":
        cfg.update(j=args.j, n=args.n, pure=args.pure, tolerance=args.tolerance, grid=_grid_config(args, None))
    elif args.command == "maxwehrl":
        cfg.update(j=args.j, grid=_grid_config(args, as_spin(args.j)), optimizer=_optimizer_config(args))
    return cfg


def validate_config(cfg: dict) -> dict:
    """Check a configuration loaded from a file before running it."""
    if not isinstance(cfg, dict):
        raise UsageError("configuration must be a JSON object")
    if "config" in cfg and "payload" in cfg:
        cfg = cfg["config"]
    if cfg.get("command") not in COMMANDS:
        raise UsageError(f"unknown command {cfg.get('command')!r}")
    if cfg.get("format") not in FORMATS:
        raise UsageError(f"unknown format {cfg.get('format')!r}")
    return cfg


# ---------------------------------------------------------------- runners


def _grid(cfg: dict, j: SpinJ) -> SphereGrid:
    g = cfg.get("grid")
    if not g:
        return default_grid(j)
    return build_grid(j, g.get("n_theta"), g.get("n_phi"))


def _optimizer(cfg: dict) -> OptimizationConfig:
    return OptimizationConfig(**cfg["optimizer"])


def _deviation(value, ref):
    return None if ref is None or value is None else value - ref


def _closed_fields(rep, closed: ClosedForm | None) -> tuple[dict | None, dict | None]:
    if closed is None:
        return None, None
    cf = closed._asdict()
    disc = {k: getattr(rep, k) - v for k, v in cf.items()}
    return cf, disc


def _build_state(kind: str, j: SpinJ, params: dict, seed: int):
    """State plus its closed-form values (or None)."""
    tj = j.twice_j
    pure_coherent = ClosedForm(tj / (tj + 1), float(tj), 1.0, 1.0)
    if kind == "coherent":
        return coherent_state(j, (params["theta"], params["phi"])), pure_coherent
    if kind == "dicke":
        mu = params["mu"]
        w = dicke_wehrl_closed(j, mu)
        return dicke(j, mu), ClosedForm(w, float(tj), complexity_from(w, tj, j), 1.0)
    if kind == "qubit":
        r, t, p = params["r"], params["theta"], params["phi"]
        vec = r * np.array([np.sin(t) * np.cos(p), np.sin(t) * np.sin(p), np.cos(t)])
        return qubit_bloch(vec), qubit_complexity_closed(abs(r))
    if kind == "thermal":
        return thermal(j, params["beta"]), thermal_closed(j, params["beta"])
    if kind == "noon":
        return noon(j), None
    if kind == "squeeze1":
        return squeeze_one_axis_state(j, params["eta"]), None
    if kind == "squeeze2":
        return squeeze_two_axis_state(j, params["eta"]), None
    if kind == "random-pure":
        return random_pure(j, seed), None
    if kind == "random-mixed":
        return random_mixed(j, seed), None
    raise UsageError(f"unknown state kind {kind!r}")


def run_state(cfg: dict):
    j = as_spin(cfg["j"])
    grid = _grid(cfg, j)
    state, closed = _build_state(cfg["kind"], j, cfg["params"], cfg["seed"])
    rep = complexity(state, grid, certify=True)
    cf, disc = _closed_fields(rep, closed)
    ref = None
    if cfg["kind"] == "noon" and j.twice_j in reference.NOON:
        w, c = reference.NOON[j.twice_j]
        ref = {"wehrl": w, "complexity": c,
               "deviation": {"wehrl": rep.wehrl - w, "complexity": rep.complexity - c}}
    row = {"kind": cfg["kind"], "j": str(j), "wehrl": rep.wehrl, "fisher": rep.fisher,
           "complexity": rep.complexity, "purity": rep.purity}
    if disc:
        row.update({f"closed_{k}": v for k, v in cf.items()})
        row.update({f"discrepancy_{k}": v for k, v in disc.items()})
    payload = {"report": rep.as_dict(), "closed_form": cf, "discrepancy": disc, "reference": ref, "rows": [row]}
    ok = rep.convergence_delta <= CERTIFY_TOL
    diag = {"convergence_delta": rep.convergence_delta, "certify_tolerance": CERTIFY_TOL,
            "clamp_count": rep.clamp_count}
    return payload, diag, ok


def _make_channel(gate: str, j: SpinJ, params: dict):
    makers = {"identity": identity_channel, "x": gate_x, "z": gate_z, "fourier": gate_fourier, "phase": gate_phase}
    if gate in makers:
        return makers[gate](j)
    if gate == "squeeze1":
        return squeeze_unitary_one_axis(j, params["eta"])
    if gate == "squeeze2":
        return squeeze_unitary_two_axis(j, params["eta"])
    if gate == "damping":
        return amplitude_damping(j, params["p"])
    raise UsageError(f"unknown gate {gate!r}")


_GATE_COLUMN = {"x": "X", "z": "Z", "fourier": "F", "phase": "P"}


def run_channel(cfg: dict):
    j = as_spin(cfg["j"])
    channel = _make_channel(cfg["gate"], j, cfg["params"])
    which = ("plus", "minus") if cfg["which"] == "both" else (cfg["which"],)
    rep = channel_complexity(channel, _optimizer(cfg), _grid(cfg, j), which)
    ref = None
    col = _GATE_COLUMN.get(cfg["gate"])
    if col and j.twice_j in reference.GATE_POWER:
        value = reference.GATE_POWER[j.twice_j][col]
        ref = {"c_plus": value, "deviation": _deviation(rep.c_plus, value)}
    row = {"gate": channel.label, "j": str(j), "c_plus": rep.c_plus, "c_minus": rep.c_minus,
           "sup_complexity": rep.sup_complexity, "inf_complexity": rep.inf_complexity}
    payload = {"report": rep.as_dict(), "reference": ref, "rows": [row]}
    return payload, {"converged": rep.converged}, rep.converged


def _map(fn, items, threads: int):
    with ThreadPoolExecutor(threads) as pool:
        return list(pool.map(fn, items))


def _table1(cfg: dict):
    opt = _optimizer(cfg)
    rows, ok = [], True
    for js in cfg["spins"]:
        j = as_spin(js)
        res = max_wehrl_search(j, opt, _grid(cfg, j), cfg["threads"])
        ref = reference.MAX_WEHRL.get(j.twice_j, (None, None))
        rows.append({
            "j": js, "wehrl": res.best_wehrl, "complexity": res.best_complexity,
            "published_wehrl": ref[0], "published_complexity": ref[1],
            "deviation_wehrl": _deviation(res.best_wehrl, ref[0]),
            "deviation_complexity": _deviation(res.best_complexity, ref[1]),
            "converged": res.converged, "restarts": res.restarts_used,
            "restart_spread": res.restart_values[0] - res.restart_values[1] if len(res.restart_values) > 1 else 0.0,
        })
        ok &= res.converged
    return rows, ok


def _table2(cfg: dict):
    def one(js):
        j = as_spin(js)
        rep = complexity(noon(j), _grid(cfg, j), certify=True)
        w, c = reference.NOON.get(j.twice_j, (None, None))
        return {
            "j": js, "wehrl": rep.wehrl, "complexity": rep.complexity, "published_wehrl": w, "published_complexity": c,
            "deviation_wehrl": _deviation(rep.wehrl, w), "deviation_complexity": _deviation(rep.complexity, c),
            "convergence_delta": rep.convergence_delta,
        }

    rows = _map(one, cfg["spins"], cfg["threads"])
    return rows, all(r["convergence_delta"] <= CERTIFY_TOL for r in rows)


def _table3(cfg: dict):
    opt = _optimizer(cfg)
    rows, ok = [], True
    for js in cfg["spins"]:
        j = as_spin(js)
        grid = _grid(cfg, j)
        published = reference.GATE_POWER.get(j.twice_j, {})
        row = {"j": js}
        for gate, col in _GATE_COLUMN.items():
            rep = channel_complexity(_make_channel(gate, j, {}), opt, grid)
            row[col] = rep.c_plus
            row[f"c_minus_{col}"] = rep.c_minus
            ok &= rep.converged
        for axis in (1, 2):
            scan = squeeze_power_scan(j, axis, config=opt, grid=grid)
            row[f"S{axis}"] = scan.max_c_plus
            row[f"eta_S{axis}"] = scan.best_eta
            ok &= scan.report.converged
        for col in reference.GATE_COLUMNS:
            row[f"published_{col}"] = published.get(col)
            row[f"deviation_{col}"] = _deviation(row[col], published.get(col))
        rows.append(row)
    return rows, ok


def run_table(cfg: dict):
    runner = {"table1": _table1, "table2": _table2, "table3": _table3}[cfg["name"]]
    rows, ok = runner(cfg)
    return {"table": cfg["name"], "rows": rows}, {"converged": bool(ok)}, ok


def run_sweep(cfg: dict):
    kind, params = cfg["kind"], cfg["params"]
    j = as_spin(cfg["j"])
    grid = _grid(cfg, j)
    n = params["n"]
    ok = True
    if kind == "damping-p":
        opt = _optimizer(cfg)
        values = np.linspace(0.0, 1.0, n)

        def one(p):
            rep = channel_complexity(amplitude_damping(j, p), opt, grid)
            return {"parameter": p, "c_plus": rep.c_plus, "c_minus": rep.c_minus,
                    "sup_complexity": rep.sup_complexity, "inf_complexity": rep.inf_complexity,
                    "converged": rep.converged}

        rows = _map(one, values, cfg["threads"])
        ok = all(r["converged"] for r in rows)
        return {"sweep": kind, "parameter": "p", "rows": rows}, {"converged": ok}, ok

    if kind == "qubit-r":
        name, values = "r", np.linspace(0.0, 1.0, n)

        def state(r):
            return qubit_bloch([0.0, 0.0, r])
    elif kind == "thermal-beta":
        name, values = "beta", np.linspace(0.0, params["beta_max"], n)

        def state(beta):
            return thermal(j, beta)
    elif kind in ("squeeze1", "squeeze2"):
        name, values = "eta", np.linspace(0.0, params["eta_max"], n)
        make = squeeze_one_axis_state if kind == "squeeze1" else squeeze_two_axis_state

        def state(eta):
            return make(j, eta)
    elif kind == "damping-theta":
        name, values = "theta", np.linspace(0.0, np.pi, n)
        channel = amplitude_damping(j, params["p"])
    else:
        raise UsageError(f"unknown sweep kind {kind!r}")

    def one(x):
        if kind == "damping-theta":
            rep = output_complexity(channel, (x, 0.0), grid)
        else:
            rep = complexity(state(x), grid)
        row = {"parameter": x, "wehrl": rep.wehrl, "fisher": rep.fisher,
               "complexity": rep.complexity, "purity": rep.purity}
        closed = None
        if kind == "qubit-r":
            closed = qubit_complexity_closed(x).complexity
        elif kind == "thermal-beta":
            closed = thermal_closed(j, x).complexity
        if closed is not None:
            row["closed_complexity"] = closed
            row["discrepancy"] = rep.complexity - closed
        return row

    rows = _map(one, values, cfg["threads"])
    return {"sweep": kind, "parameter": name, "rows": rows}, {"grid": grid.meta()}, ok


def run_random(cfg: dict):
    j = as_spin(cfg["j"])
    grid = None
    if cfg.get("grid"):
        grid = _grid(cfg, j)
    res = conjecture_sweep(j, cfg["n"], cfg["seed"], grid, cfg["pure"], cfg["tolerance"], cfg["threads"])
    rows = [
        {"index": i, "purity": p, "complexity": c, "wehrl": w, "fisher": f}
        for i, (p, c, w, f) in enumerate(zip(res.purity, res.complexity, res.wehrl, res.fisher))
    ]
    payload = {"summary": res.summary(), "rows": rows}
    if j.twice_j == 1:
        r = np.sqrt(np.clip(2 * res.purity - 1, 0, 1))
        curve = np.array([qubit_complexity_closed(x).complexity for x in r])
        for row, c in zip(rows, curve):
            row["closed_complexity"] = float(c)
        payload["closed_form_max_discrepancy"] = float(np.max(np.abs(res.complexity - curve)))
    diag = {"violations": len(res.violations), "pure_optimum": res.pure_optimum}
    return payload, diag, True


def run_maxwehrl(cfg: dict):
    j = as_spin(cfg["j"])
    res = max_wehrl_search(j, _optimizer(cfg), _grid(cfg, j), cfg["threads"])
    ref = reference.MAX_WEHRL.get(j.twice_j, (None, None))
    row = {"j": str(j), "wehrl": res.best_wehrl, "complexity": res.best_complexity,
           "fisher": res.best_fisher, "converged": res.converged,
           "published_wehrl": ref[0], "published_complexity": ref[1],
           "deviation_wehrl": _deviation(res.best_wehrl, ref[0]),
           "deviation_complexity": _deviation(res.best_complexity, ref[1])}
    return {"result": res.as_dict(), "rows": [row]}, {"converged": res.converged}, res.converged


RUNNERS = {
    "state": run_state,
    "channel": run_channel,
    "table": run_table,
    "sweep": run_sweep,
    "random": run_random,
    "maxwehrl": run_maxwehrl,
}


def execute(cfg: dict):
    """Run a resolved configuration; returns ``(payload, diagnostics, converged)``."""
    return RUNNERS[cfg["command"]](cfg)


# ---------------------------------------------------------------- output


def _clean(obj):
    """JSON-ready copy: numpy scalars and arrays to Python, non-finite floats to None."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, SpinJ):
        return str(obj)
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        return value if math.isfinite(value) else None
    return obj


def timestamp() -> str:
    """UTC time of the run; ``SOURCE_DATE_EPOCH`` pins it for reproducible output."""
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    when = datetime.fromtimestamp(int(epoch), timezone.utc) if epoch else datetime.now(timezone.utc)
    return when.replace(microsecond=0).isoformat()


def make_envelope(cfg: dict, payload: dict, diagnostics: dict, converged: bool) -> dict:
    return _clean({
        "tool": "spinphase",
        "version": __version__,
        "timestamp": timestamp(),
        "status": "ok" if converged else "not_converged",
        "config": cfg,
        "payload": payload,
        "diagnostics": diagnostics,
    })


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return "%.17g" % value
    return str(value)


def render_csv(rows: list[dict]) -> str:
    """Header plus one line per row; floats with 17 significant digits."""
    columns = []
    for row in rows:
        columns.extend(k for k in row if k not in columns)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_csv_cell(row.get(c)) for c in columns])
    return buf.getvalue()


def render(envelope: dict, fmt: str) -> str:
    if fmt == "csv":
        return render_csv(envelope["payload"]["rows"])
    return json.dumps(envelope, indent=2, allow_nan=False) + "\n"


def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.rerun:
            if args.command:
                raise UsageError("--config cannot be combined with a command")
            try:
                with open(args.rerun, encoding="utf-8") as fh:
                    cfg = validate_config(json.load(fh))
            except (OSError, json.JSONDecodeError) as exc:
                raise UsageError(f"cannot read {args.rerun}: {exc}") from None
            output = args.rerun_output
            try:
                payload, diagnostics, converged = execute(cfg)
            except (KeyError, TypeError) as exc:
                raise UsageError(f"incomplete or malformed configuration: {exc!r}") from None
        elif args.command:
            cfg = resolve_config(args)
            output = args.output
            payload, diagnostics, converged = execute(cfg)
        else:
            parser.print_usage(sys.stderr)
            raise UsageError("a command or --config is required")
    except (UsageError, DomainError, ValueError) as exc:
        print(f"spinphase: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _emit(render(make_envelope(cfg, payload, diagnostics, converged), cfg["format"]), output)
    if not converged:
        print("spinphase: warning: numerical convergence criteria not met", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
