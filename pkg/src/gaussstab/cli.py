"""Command-line front end: checks, figure data, maximization, evolution, reconstruction, scans.

Exit codes: 0 success, 1 negative finding (not stabilizable, not solvable,
diverged, empty region), 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from typing import Any, Iterable, Optional, Sequence

import numpy as np

from . import __version__
from .lindblad_engine import (
    DivergenceError,
    EvolutionConfig,
    LindbladSpec,
    QuadraticHamiltonian,
    evolve_trajectory,
)
from .measures import UnphysicalState, linear_entropy, log_negativity
from .models import InfeasiblePoint, model_spec, reference_hamiltonian
from .stabilizability import DEFAULT_TOL, is_stabilizable, reconstruct_hamiltonian
from .symplectic_core import (
    CovarianceMatrix,
    InvalidArgument,
    ReductionFailure,
    StandardForm,
    build_matrix,
    check_physical,
    random_physical_state,
    symplectic_eigenvalues,
    to_standard_form,
)
from .sweeps import (
    FIGURES,
    MANIFOLDS,
    EmptyRegion,
    check_params,
    figure_dataset,
    get_manifold,
    grid_scan,
    maximize,
    resolve_axes,
)

SCHEMA = 1
TOL_ENV = "GAUSS_STAB_TOL"
EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE = 0, 1, 2


class UsageError(ValueError):
    pass


# ------------------------------------------------------------------ input


def load_json(text: str) -> Any:
    """Inline JSON, '-' for stdin, or a path to a JSON file."""
    stripped = text.lstrip()
    try:
        if stripped.startswith(("{", "[")):
            return json.loads(text)
        if text == "-":
            return json.load(sys.stdin)
        with open(text, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise UsageError(f"invalid JSON in {text[:40]!r}: {exc}") from None
    except OSError as exc:
        raise UsageError(f"cannot read {text!r}: {exc.strerror}") from None


def _check_schema(obj: Any) -> None:
    if isinstance(obj, dict) and obj.get("schema", SCHEMA) != SCHEMA:
        raise UsageError(f"unsupported schema {obj['schema']!r}, expected {SCHEMA}")


def _matrix(rows: Any, what: str) -> np.ndarray:
    try:
        m = np.array(rows, dtype=float)
    except (TypeError, ValueError):
        raise UsageError(f"{what} matrix must be numeric") from None
    if m.shape != (4, 4):
        raise UsageError(f"{what} matrix must be 4x4, got shape {m.shape}")
    return m


def parse_state(obj: Any) -> CovarianceMatrix:
    """{a, b, c_plus, c_minus}, {"matrix": 4x4} or a bare 4x4 list."""
    _check_schema(obj)
    if isinstance(obj, list):
        return CovarianceMatrix(_matrix(obj, "state"))
    if not isinstance(obj, dict):
        raise UsageError("state must be a JSON object or a 4x4 array")
    if "matrix" in obj:
        return CovarianceMatrix(_matrix(obj["matrix"], "state"))
    keys = ("a", "b", "c_plus", "c_minus")
    missing = [k for k in keys if k not in obj]
    if missing:
        raise UsageError(f"state is missing {', '.join(missing)}")
    try:
        sf = StandardForm(*(float(obj[k]) for k in keys))
    except (TypeError, ValueError) as exc:
        raise UsageError(f"bad standard form: {exc}") from None
    return CovarianceMatrix(build_matrix(sf))


def parse_dissipator(obj: Any) -> LindbladSpec:
    """{"model": tag, "params": {...}} or {"vectors": [[[re, im] x 4], ...]}."""
    _check_schema(obj)
    if not isinstance(obj, dict):
        raise UsageError("dissipator must be a JSON object")
    if "vectors" in obj:
        try:
            arr = np.array(obj["vectors"], dtype=float)
        except (TypeError, ValueError):
            raise UsageError("dissipator vectors must be numeric [re, im] pairs") from None
        if arr.size == 0:
            return LindbladSpec(np.zeros((0, 4)))
        if arr.ndim != 3 or arr.shape[1:] != (4, 2):
            raise UsageError(f"dissipator vectors must have shape (k, 4, 2), got {arr.shape}")
        return LindbladSpec(arr[..., 0] + 1j * arr[..., 1])
    if obj.get("model") == "none":
        return LindbladSpec(np.zeros((0, 4)))
    if "model" not in obj:
        raise UsageError("dissipator needs 'model' or 'vectors'")
    params = obj.get("params", {})
    if not isinstance(params, dict):
        raise UsageError("dissipator params must be an object")
    try:
        return model_spec(obj["model"], params)
    except TypeError as exc:
        raise UsageError(f"bad dissipator params: {exc}") from None


def parse_hamiltonian(obj: Any) -> QuadraticHamiltonian:
    """{"model": "sq"|"cas"|"zero", "omega": w} or {"matrix": 4x4}."""
    _check_schema(obj)
    if isinstance(obj, list):
        return QuadraticHamiltonian(_matrix(obj, "Hamiltonian"))
    if not isinstance(obj, dict):
        raise UsageError("Hamiltonian must be a JSON object or a 4x4 array")
    if "matrix" in obj:
        return QuadraticHamiltonian(_matrix(obj["matrix"], "Hamiltonian"))
    model = obj.get("model")
    if model == "zero":
        return QuadraticHamiltonian.zero()
    if model is None:
        raise UsageError("Hamiltonian needs 'model' or 'matrix'")
    return reference_hamiltonian(model, float(obj.get("omega", 1.0)))


def parse_params(items: Optional[Sequence[str]]) -> dict:
    out = {}
    for item in items or ():
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise UsageError(f"parameter must look like name=value, got {item!r}")
        try:
            out[key] = float(value)
        except ValueError:
            raise UsageError(f"parameter {key} is not a number: {value!r}") from None
    return out


def parse_range(item: str, default_count: Optional[int] = None) -> tuple[str, float, float, Optional[int]]:
    """name=lo:hi or name=lo:hi:count."""
    key, sep, rest = item.partition("=")
    parts = rest.split(":")
    if not sep or not key or len(parts) not in (2, 3):
        raise UsageError(f"range must look like name=lo:hi[:count], got {item!r}")
    try:
        lo, hi = float(parts[0]), float(parts[1])
        count = int(parts[2]) if len(parts) == 3 else default_count
    except ValueError:
        raise UsageError(f"range {item!r} has non-numeric bounds or count") from None
    if not (math.isfinite(lo) and math.isfinite(hi)) or hi <= lo:
        raise UsageError(f"range {item!r} needs finite lo < hi")
    if count is not None and count < 2:
        raise UsageError(f"range {item!r} needs at least 2 points")
    return key, lo, hi, count


def resolve_tolerance(cli_value: Optional[float]) -> float:
    if cli_value is not None:
        tol = cli_value
    elif os.environ.get(TOL_ENV):
        try:
            tol = float(os.environ[TOL_ENV])
        except ValueError:
            raise UsageError(f"{TOL_ENV} is not a number: {os.environ[TOL_ENV]!r}") from None
    else:
        tol = DEFAULT_TOL
    if not tol > 0:
        raise UsageError("tolerance must be positive")
    return tol


# ----------------------------------------------------------------- output


def fmt(x: Any) -> str:
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def write_csv(header: Sequence[str], rows: Iterable[Sequence[Any]], metadata: dict) -> str:
    buf = io.StringIO()
    for key, value in metadata.items():
        buf.write(f"# {key}={fmt(value)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(x) for x in row])
    return buf.getvalue()


def _jsonable(x: Any) -> Any:
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (float, np.floating)):
        return float(x) if math.isfinite(x) else None
    if isinstance(x, np.integer):
        return int(x)
    return x


def write_json(obj: dict) -> str:
    return json.dumps(_jsonable({"schema": SCHEMA, **obj}), indent=2) + "\n"


def emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# --------------------------------------------------------------- commands


def _measures(v: CovarianceMatrix) -> tuple[float, float]:
    try:
        return log_negativity(v), linear_entropy(v)
    except (UnphysicalState, ArithmeticError):
        return math.nan, math.nan


def cmd_check(args) -> int:
    tol = resolve_tolerance(args.tol)
    v = parse_state(load_json(args.state))
    d = parse_dissipator(load_json(args.dissipator))
    phys = check_physical(v)
    stab = is_stabilizable(v, d, tol)
    e_n, s_l = _measures(v) if phys.physical else (math.nan, math.nan)
    spectrum = symplectic_eigenvalues(v) if phys.physical else None
    report = {
        "physical": phys.physical,
        "h1": phys.h1,
        "h2": phys.h2,
        "positive_definite": phys.positive_definite,
        "residuals": {f"k{k}": stab.residuals[k - 1] for k in (1, 2, 3, 4)},
        "relative_residuals": {f"k{k}": stab.relative(k) for k in (1, 2, 3, 4)},
        "stabilizable": stab.stabilizable,
        "tolerance": tol,
        "log_negativity": e_n,
        "linear_entropy": s_l,
        "symplectic_eigenvalues": [spectrum.nu_minus, spectrum.nu_plus] if spectrum else None,
    }
    emit(write_json(report), args.out)
    return EXIT_OK if phys.physical and stab.stabilizable else EXIT_NEGATIVE


def cmd_figure(args) -> int:
    points = 400 if args.points is None else args.points
    ds = figure_dataset(args.figure_id, points)
    meta = {**ds.metadata, "points_per_curve": points, "version": __version__}
    emit(write_csv([ds.spec.sweep, "curve", ds.spec.quantity], ds.rows, meta), args.out)
    return EXIT_OK


def cmd_maximize(args) -> int:
    mf = get_manifold(args.model)
    params = parse_params(args.param)
    check_params(mf, params)
    overrides = {}
    for item in args.box or ():
        name, lo, hi, _ = parse_range(item)
        overrides[name] = (lo, hi)
    try:
        result = maximize(mf, params, args.points, overrides)
    except EmptyRegion as exc:
        print(f"gaussstab: {exc}", file=sys.stderr)
        return EXIT_NEGATIVE
    emit(write_json(result.as_dict()), args.out)
    return EXIT_OK


def _trajectory_row(t: float, v: np.ndarray) -> list[float]:
    try:
        cov = CovarianceMatrix(v)
        sf = to_standard_form(cov)
    except (InvalidArgument, ReductionFailure, ArithmeticError):
        return [t] + [math.nan] * 6
    return [t, *sf.as_tuple(), *_measures(cov)]


def cmd_evolve(args) -> int:
    v0 = parse_state(load_json(args.state))
    h = parse_hamiltonian(load_json(args.hamiltonian))
    d = parse_dissipator(load_json(args.dissipator))
    cfg = EvolutionConfig(args.step, args.horizon)
    if args.every < 1:
        raise UsageError("--every must be at least 1")
    rows = []
    status = EXIT_OK
    try:
        for t, v in evolve_trajectory(v0, h, d, cfg, every=args.every):
            rows.append(_trajectory_row(t, v))
    except DivergenceError as exc:
        print(f"gaussstab: {exc}; {len(rows)} rows written", file=sys.stderr)
        status = EXIT_NEGATIVE
    meta = {"step": cfg.horizon / cfg.n_steps, "horizon": cfg.horizon, "method": cfg.method,
            "version": __version__}
    emit(write_csv(["t", "a", "b", "c_plus", "c_minus", "E_N", "S_L"], rows, meta), args.out)
    return status


def cmd_reconstruct(args) -> int:
    tol = resolve_tolerance(args.tol)
    v = parse_state(load_json(args.state))
    d = parse_dissipator(load_json(args.dissipator))
    res = reconstruct_hamiltonian(v, d, tol)
    emit(write_json({"matrix": res.g.g, "residual": res.residual, "solvable": res.solvable,
                     "tolerance": tol}), args.out)
    return EXIT_OK if res.solvable else EXIT_NEGATIVE


def _scan_random(args, tol: float) -> int:
    rng = np.random.default_rng(args.seed)
    rows, worst = [], 0.0
    for i in range(args.random):
        v = random_physical_state(rng)
        k = int(rng.integers(1, args.channels + 1))
        d = LindbladSpec(rng.normal(size=(k, 4)) + 1j * rng.normal(size=(k, 4)))
        rep = is_stabilizable(v, d, tol)
        worst = max(worst, abs(rep.residuals[0]), abs(rep.residuals[2]))
        rows.append([i, k, *rep.residuals])
    meta = {"mode": "random", "seed": args.seed, "samples": args.random, "version": __version__}
    emit(write_csv(["index", "channels", "k1", "k2", "k3", "k4"], rows, meta), args.out)
    return EXIT_OK if worst <= tol else EXIT_NEGATIVE


def cmd_scan(args) -> int:
    tol = resolve_tolerance(args.tol)
    if args.random is not None:
        if args.model is not None or args.grid or args.param:
            raise UsageError("--random sweeps random dissipators and takes no --model, --grid or --param")
        if args.random < 1 or args.channels < 1:
            raise UsageError("--random and --channels must be positive")
        return _scan_random(args, tol)
    if args.model is None:
        raise UsageError("scan needs --model or --random")
    mf = get_manifold(args.model)
    params = parse_params(args.param)
    check_params(mf, params)
    default_count = args.points if args.points is not None else 50
    overrides, counts = {}, {}
    for item in args.grid or ():
        name, lo, hi, count = parse_range(item, default_count)
        overrides[name], counts[name] = (lo, hi), count
    axes = resolve_axes(mf, params, overrides)
    quantities = [q.strip() for q in args.quantities.split(",") if q.strip()]
    bad = set(quantities) - {"E_N", "S_L", "residuals"}
    if bad:
        raise UsageError(f"unknown quantities {', '.join(sorted(bad))}")
    spec = mf.spec(params)
    header = [ax.name for ax in axes] + ["feasible"]
    header += [q for q in ("E_N", "S_L") if q in quantities]
    if "residuals" in quantities:
        header += ["g1_rel", "g2_rel"]
    rows = []
    for row in grid_scan(mf, params, axes, [counts.get(ax.name, default_count) for ax in axes]):
        sol = row.solution
        out = [row.coords[ax.name] for ax in axes] + [sol is not None]
        if "E_N" in quantities:
            out.append(sol.log_negativity if sol else math.nan)
        if "S_L" in quantities:
            out.append(sol.linear_entropy if sol else math.nan)
        if "residuals" in quantities:
            if sol:
                rep = is_stabilizable(sol.matrix, spec, tol)
                out += [rep.relative(2), rep.relative(4)]
            else:
                out += [math.nan, math.nan]
        rows.append(out)
    meta = {"model": mf.name, **{f"param.{k}": v for k, v in params.items()}, "tolerance": tol,
            "version": __version__}
    emit(write_csv(header, rows, meta), args.out)
    return EXIT_OK


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gaussstab",
        description="Stabilizable entanglement of two-mode Gaussian states under engineered dissipation.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, tol=False):
        p.add_argument("--out", help="write output here instead of stdout")
        if tol:
            p.add_argument("--tol", type=float, help=f"relative tolerance (default ${TOL_ENV} or {DEFAULT_TOL:g})")

    p = sub.add_parser("check", help="physicality, stabilizability residuals and measures of one state")
    p.add_argument("--state", required=True, help="JSON: {a,b,c_plus,c_minus} or {matrix}")
    p.add_argument("--dissipator", required=True, help="JSON: {model, params} or {vectors}")
    common(p, tol=True)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("figure", help="regenerate figure data as long-format CSV")
    p.add_argument("figure_id", choices=sorted(FIGURES))
    p.add_argument("--points", type=int, help="points per curve (default 400)")
    common(p)
    p.set_defaults(func=cmd_figure)

    p = sub.add_parser("maximize", help="maximize log-negativity over a stabilizable manifold")
    p.add_argument("--model", required=True, choices=sorted(MANIFOLDS))
    p.add_argument("--param", action="append", metavar="NAME=VALUE")
    p.add_argument("--box", action="append", metavar="AXIS=LO:HI", help="override the search box of one axis")
    p.add_argument("--points", type=int, help="coarse grid points per axis")
    common(p)
    p.set_defaults(func=cmd_maximize)

    p = sub.add_parser("evolve", help="integrate the covariance dynamics and emit the trajectory")
    p.add_argument("--state", required=True)
    p.add_argument("--hamiltonian", required=True, help='JSON: {"model": "sq"|"cas"|"zero", "omega"} or {matrix}')
    p.add_argument("--dissipator", required=True)
    p.add_argument("--horizon", type=float, required=True)
    p.add_argument("--step", type=float, required=True)
    p.add_argument("--every", type=int, default=1, help="emit every n-th step")
    common(p)
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("reconstruct", help="find a Hamiltonian that makes the state stationary")
    p.add_argument("--state", required=True)
    p.add_argument("--dissipator", required=True)
    common(p, tol=True)
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("scan", help="grid scan of a manifold, or a random sweep of the odd conditions")
    p.add_argument("--model", choices=sorted(MANIFOLDS))
    p.add_argument("--param", action="append", metavar="NAME=VALUE")
    p.add_argument("--grid", action="append", metavar="AXIS=LO:HI[:N]")
    p.add_argument("--points", type=int, help="default count per axis (50)")
    p.add_argument("--quantities", default="E_N,S_L,residuals")
    p.add_argument("--random", type=int, metavar="N", help="sample N random (state, dissipator) pairs")
    p.add_argument("--channels", type=int, default=4, help="max channels per random dissipator")
    p.add_argument("--seed", type=int, default=0)
    common(p, tol=True)
    p.set_defaults(func=cmd_scan)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, InvalidArgument) as exc:
        print(f"gaussstab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InfeasiblePoint, UnphysicalState, ArithmeticError) as exc:
        print(f"gaussstab: {exc}", file=sys.stderr)
        return EXIT_NEGATIVE


if __name__ == "__main__":
    sys.exit(main())
