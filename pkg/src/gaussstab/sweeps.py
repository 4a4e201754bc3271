"""Manifold registry, grid scans, bounded maximization and figure datasets.

Everything the command line emits is computed here, so every dataset can be
reproduced from the library alone.  Measures along the benchmark manifolds
come from the closed forms where they exist; those stay accurate far out in
r and a, where the explicit matrices lose precision to cancellation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import models as m
from .lindblad_engine import LindbladSpec
from .symplectic_core import InvalidArgument, StandardForm

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
BOUNDARY_FRACTION = 1e-6


@dataclass(frozen=True)
class Axis:
    name: str
    lo: float
    hi: float

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)) or self.hi <= self.lo:
            raise InvalidArgument(f"axis {self.name}: need finite lo < hi, got [{self.lo}, {self.hi}]")

    def grid(self, n: int) -> np.ndarray:
        if n < 2:
            raise InvalidArgument(f"axis {self.name}: grid needs at least 2 points")
        return np.linspace(self.lo, self.hi, n)


def _closed(sf: StandardForm, e_n: float, s_l: float) -> m.StabilizableSolution:
    # physical by construction on these families
    return m.StabilizableSolution(sf, e_n, s_l, True, e_n > 0)


# ------------------------------------------------------------------ manifolds


def _pole(gamma: float) -> float:
    if gamma >= 1.0:
        return math.inf
    return 0.5 * math.acosh((1.0 + gamma) / (1.0 - gamma))


def _sym_axes(p):
    return [Axis("r", 0.0, min(10.0, _pole(p.get("gamma", 1.0)) * (1.0 - 1e-9)))]


def _sym_eval(x, p):
    chi, gamma = p.get("chi", 1.0), p.get("gamma", 1.0)
    if gamma == 1.0:
        nu = 0.5 * chi * math.cosh(2 * x["r"])
        return _closed(m._squeezed(nu, nu, x["r"]), *m.damping_symmetric_closed_form(x["r"], chi))
    return m.damping_symmetric_manifold(x["r"], chi, gamma)


def _sym_spec(p):
    return m.model_spec("local_damping", {"chi": p.get("chi", 1.0), "gamma": p.get("gamma", 1.0)})


def _eq_axes(p):
    chi = p.get("chi", 1.0)
    return [Axis("a", max(0.5, 0.5 * chi) * (1 + 1e-9), 1e4)]


def _eq_eval(x, p):
    chi = p.get("chi", 1.0)
    c_plus, c_minus = m.equal_occupation_correlations(x["a"], chi)
    return _closed(StandardForm(x["a"], x["a"], c_plus, c_minus), *m.equal_occupation_closed_form(x["a"], chi))


def _eq_spec(p):
    return m.model_spec("local_damping", {"chi": p.get("chi", 1.0), "branch": 1})


def _damping_params(p) -> m.LocalDampingParams:
    if "x0" in p or "gamma2" in p:
        return m.LocalDampingParams(p.get("gamma1", 1.0), p.get("gamma2", 1.0), p.get("x0", 1.0))
    return m.LocalDampingParams.from_chi(p.get("chi", 1.0), p.get("gamma", 1.0), p.get("gamma1", 1.0),
                                         int(p.get("branch", 1)))


def _gen_axes(p):
    return [Axis("a", 0.5, 20.0), Axis("b", 0.5, 20.0)]


def _gen_eval(x, p):
    sols = m.damping_general_solution(x["a"], x["b"], _damping_params(p))
    if not sols:
        raise m.InfeasiblePoint(f"no stabilizable correlations at a={x['a']}, b={x['b']}")
    return max(sols, key=lambda s: s.log_negativity)


def _gen_spec(p):
    return m.local_damping_spec(_damping_params(p))


def _sq_axes(p):
    return [Axis("r", 0.0, 10.0)]


def _sq_eval(x, p):
    alpha, eta = p.get("alpha", 0.0), p.get("eta", 0.0)
    r = x["r"]
    nu = m.squeezed_occupation(r, alpha, eta)
    return _closed(m._squeezed(nu, nu, r), *m.squeezed_closed_form(r, alpha, eta))


def _sq_spec(p):
    return m.squeezed_dissipator_spec(m.SqueezedDissipatorParams(p.get("alpha", 0.0), p.get("eta", 0.0)))


def _cas_curve(fn):
    def evaluate(x, p):
        a = x["a"]
        c_plus = fn(a)
        gap = m.c_plus_max_gap(a) if fn is m.c_plus_max else None
        sf = StandardForm(a, a, c_plus, m.cascaded_c_minus(a, c_plus))
        return _closed(sf, *m.cascaded_closed_form(a, c_plus, gap))

    return evaluate


def _cas_axes_1d(p):
    return [Axis("a", 0.5, 1e4)]


def _cas_axes_2d(p):
    return [Axis("a", 0.5, 1e4), Axis("u", 0.0, 1.0)]


def _cas_eval_2d(x, p):
    """c+ = c+_min + u (c+_max - c+_min); u = 0 is excluded by feasibility."""
    a, u = x["a"], x["u"]
    lo, hi = m.c_plus_min(a), m.c_plus_max(a)
    c_plus = lo + u * (hi - lo)
    if not m.cascaded_feasible(a, c_plus):
        raise m.InfeasiblePoint(f"c+ on the open lower edge at a={a}")
    sf = StandardForm(a, a, c_plus, m.cascaded_c_minus(a, c_plus))
    return _closed(sf, *m.cascaded_closed_form(a, c_plus))


def _cas_spec(p):
    return m.cascaded_spec(m.CascadedParams(p.get("kappa", 1.0)))


@dataclass(frozen=True)
class Manifold:
    name: str
    description: str
    axes: Callable[[dict], list[Axis]]
    evaluate: Callable[[dict, dict], m.StabilizableSolution]
    spec: Callable[[dict], LindbladSpec]
    params: tuple[str, ...]


MANIFOLDS: dict[str, Manifold] = {
    mf.name: mf
    for mf in (
        Manifold("damping_symmetric", "local damping, c+ = -c- family in r", _sym_axes, _sym_eval,
                 _sym_spec, ("chi", "gamma")),
        Manifold("damping_equal", "local damping, a = b branch in a", _eq_axes, _eq_eval, _eq_spec, ("chi",)),
        Manifold("damping_general", "local damping, general (a, b) solution", _gen_axes, _gen_eval,
                 _gen_spec, ("chi", "gamma", "gamma1", "gamma2", "x0", "branch")),
        Manifold("squeezed", "two-mode squeezing dissipator in r", _sq_axes, _sq_eval, _sq_spec,
                 ("alpha", "eta")),
        Manifold("cascaded_max", "cascaded oscillators, c+ = c+_max(a)", _cas_axes_1d, _cas_curve(m.c_plus_max),
                 _cas_spec, ("kappa",)),
        Manifold("cascaded_mid", "cascaded oscillators, c+ = c+_mid(a)", _cas_axes_1d, _cas_curve(m.c_plus_mid),
                 _cas_spec, ("kappa",)),
        Manifold("cascaded", "cascaded oscillators over the full (a, c+) region", _cas_axes_2d, _cas_eval_2d,
                 _cas_spec, ("kappa",)),
    )
}


def get_manifold(name: str) -> Manifold:
    try:
        return MANIFOLDS[name]
    except KeyError:
        raise InvalidArgument(f"unknown manifold {name!r}; choose from {', '.join(MANIFOLDS)}") from None


def check_params(mf: Manifold, params: dict) -> None:
    extra = set(params) - set(mf.params)
    if extra:
        raise InvalidArgument(f"manifold {mf.name} takes no parameter(s) {', '.join(sorted(extra))}")


def resolve_axes(mf: Manifold, params: dict, overrides: Optional[dict] = None) -> list[Axis]:
    axes = mf.axes(params)
    overrides = overrides or {}
    unknown = set(overrides) - {ax.name for ax in axes}
    if unknown:
        raise InvalidArgument(f"manifold {mf.name} has no axis {', '.join(sorted(unknown))}")
    return [Axis(ax.name, *overrides[ax.name]) if ax.name in overrides else ax for ax in axes]


def try_evaluate(mf: Manifold, coords: dict, params: dict) -> Optional[m.StabilizableSolution]:
    """Solution at coords, or None when the point is infeasible or unphysical."""
    try:
        sol = mf.evaluate(coords, params)
    except (m.InfeasiblePoint, ArithmeticError):
        return None
    if not sol.physical or not math.isfinite(sol.log_negativity):
        return None
    return sol


# ------------------------------------------------------------------- grid scan


@dataclass(frozen=True)
class ScanRow:
    coords: dict
    solution: Optional[m.StabilizableSolution]


def grid_scan(mf: Manifold, params: dict, axes: Sequence[Axis], counts: Sequence[int]) -> list[ScanRow]:
    grids = [ax.grid(n) for ax, n in zip(axes, counts)]
    rows = []
    for point in np.array(np.meshgrid(*grids, indexing="ij")).reshape(len(axes), -1).T:
        coords = {ax.name: float(v) for ax, v in zip(axes, point)}
        rows.append(ScanRow(coords, try_evaluate(mf, coords, params)))
    return rows


# ---------------------------------------------------------------- maximization


def golden_section_max(f: Callable[[float], float], lo: float, hi: float,
                       tol: float = 1e-10, max_iter: int = 200) -> tuple[float, float]:
    """Maximize a unimodal f on [lo, hi]; the endpoints are candidates too."""
    if hi < lo:
        raise InvalidArgument("golden-section bracket needs lo <= hi")
    # ties go to the upper end, where the asymptotic suprema sit
    best = max(((hi, f(hi)), (lo, f(lo))), key=lambda t: t[1])
    a, b = lo, hi
    c, d = b - GOLDEN * (b - a), a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if b - a <= tol * max(1.0, abs(a) + abs(b)):
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
    inner = (c, fc) if fc >= fd else (d, fd)
    return inner if inner[1] > best[1] else best


@dataclass(frozen=True)
class MaximizeResult:
    manifold: str
    params: dict
    coords: dict
    solution: m.StabilizableSolution
    boundary_hit: bool
    boundary_axes: tuple[str, ...]
    axes: tuple[Axis, ...] = field(repr=False)
    evaluations: int = 0

    def as_dict(self) -> dict:
        return {
            "manifold": self.manifold,
            "params": self.params,
            "point": self.coords,
            "box": {ax.name: [ax.lo, ax.hi] for ax in self.axes},
            "solution": self.solution.as_dict(),
            "log_negativity": self.solution.log_negativity,
            "linear_entropy": self.solution.linear_entropy,
            "boundary_hit": self.boundary_hit,
            "boundary_axes": list(self.boundary_axes),
            "evaluations": self.evaluations,
        }


class EmptyRegion(ValueError):
    """No feasible point on the search grid."""


def maximize(mf: Manifold, params: dict, points: Optional[int] = None,
             overrides: Optional[dict] = None, sweeps: int = 3) -> MaximizeResult:
    """Coarse grid over the box, then golden-section refinement per axis.

    Each refinement brackets one grid cell either side of the incumbent
    along one axis, holding the other coordinates fixed.
    """
    axes = resolve_axes(mf, params, overrides)
    if points is None:
        points = 201 if len(axes) == 1 else 41
    count = [0]

    def objective(coords: dict) -> float:
        count[0] += 1
        sol = try_evaluate(mf, coords, params)
        return -math.inf if sol is None else sol.log_negativity

    rows = grid_scan(mf, params, axes, [points] * len(axes))
    count[0] += len(rows)
    feasible = [r for r in rows if r.solution is not None]
    if not feasible:
        raise EmptyRegion(f"no feasible point of {mf.name} in the search box")
    # on a numerically flat plateau keep the last grid point, nearest the asymptote
    best = max(reversed(feasible), key=lambda r: r.solution.log_negativity)
    coords, value = dict(best.coords), best.solution.log_negativity
    steps = {ax.name: (ax.hi - ax.lo) / (points - 1) for ax in axes}
    for _ in range(sweeps):
        for ax in axes:
            lo = max(ax.lo, coords[ax.name] - steps[ax.name])
            hi = min(ax.hi, coords[ax.name] + steps[ax.name])

            def along(t, name=ax.name):
                return objective({**coords, name: t})

            t, ft = golden_section_max(along, lo, hi)
            if ft >= value:
                coords[ax.name], value = t, ft
    sol = try_evaluate(mf, coords, params)
    hit = tuple(
        ax.name for ax in axes
        if min(coords[ax.name] - ax.lo, ax.hi - coords[ax.name]) <= BOUNDARY_FRACTION * (ax.hi - ax.lo)
    )
    return MaximizeResult(mf.name, dict(params), coords, sol, bool(hit), hit, tuple(axes), count[0])


# -------------------------------------------------------------------- figures


@dataclass(frozen=True)
class FigureSpec:
    figure_id: str
    model: str
    sweep: str
    quantity: str
    curves: tuple[tuple[str, dict], ...]
    domain: Callable[[dict, int], np.ndarray]
    closed_form: Callable[[float, dict], tuple[float, float]]
    pipeline: Callable[[float, dict], m.StabilizableSolution]

    def value(self, x: float, curve: dict) -> float:
        e_n, s_l = self.closed_form(x, curve)
        return e_n if self.quantity == "E_N" else s_l


def _r_domain(hi):
    return lambda curve, n: np.linspace(0.0, hi, n)


def _eq_domain(curve, n):
    # the a = b branch exists for a > chi / 2
    return np.linspace(0.5 * curve["chi"], 50.0, n + 1)[1:]


def _fig1_top(fid, quantity):
    return FigureSpec(
        fid, "damping_symmetric", "r", quantity,
        tuple((f"chi={c}", {"chi": c}) for c in (1.0, 1.2, 1.6, 1.9)),
        _r_domain(3.0),
        lambda r, c: m.damping_symmetric_closed_form(r, c["chi"]),
        lambda r, c: m.damping_symmetric_manifold(r, c["chi"], 1.0),
    )


def _fig1_bottom(fid, quantity):
    return FigureSpec(
        fid, "damping_equal", "a", quantity,
        tuple((f"chi={c}", {"chi": float(c)}) for c in (1, 2, 4, 8)),
        _eq_domain,
        lambda a, c: m.equal_occupation_closed_form(a, c["chi"]),
        lambda a, c: m.damping_equal_occupation_manifold(a, c["chi"]),
    )


def _fig2(fid, quantity):
    return FigureSpec(
        fid, "squeezed", "r", quantity,
        tuple((f"alpha={al}", {"alpha": float(al)}) for al in (0, 1, 2)),
        _r_domain(3.0),
        lambda r, c: m.squeezed_closed_form(r, c["alpha"]),
        lambda r, c: m.squeezed_manifold(r, m.SqueezedDissipatorParams(c["alpha"], 0.0)),
    )


_CAS_CURVES = {"c_plus_max": m.c_plus_max, "c_plus_mid": m.c_plus_mid}


def _cas_closed(a: float, curve: str) -> tuple[float, float]:
    fn = _CAS_CURVES[curve]
    return m.cascaded_closed_form(a, fn(a), m.c_plus_max_gap(a) if fn is m.c_plus_max else None)


def _fig3(fid, quantity):
    return FigureSpec(
        fid, "cascaded", "a", quantity,
        tuple((name, {"curve": name}) for name in _CAS_CURVES),
        lambda curve, n: np.linspace(0.5, 100.0, n),
        lambda a, c: _cas_closed(a, c["curve"]),
        lambda a, c: m.cascaded_manifold(a, _CAS_CURVES[c["curve"]](a)),
    )


FIGURES: dict[str, FigureSpec] = {
    "1a": _fig1_top("1a", "E_N"),
    "1b": _fig1_top("1b", "S_L"),
    "1c": _fig1_bottom("1c", "E_N"),
    "1d": _fig1_bottom("1d", "S_L"),
    "2a": _fig2("2a", "E_N"),
    "2b": _fig2("2b", "S_L"),
    "3a": _fig3("3a", "E_N"),
    "3b": _fig3("3b", "S_L"),
}


@dataclass(frozen=True)
class FigureDataset:
    spec: FigureSpec
    rows: list[tuple[float, str, float]]

    @property
    def metadata(self) -> dict:
        return {
            "figure": self.spec.figure_id,
            "model": self.spec.model,
            "quantity": self.spec.quantity,
            "curves": ";".join(label for label, _ in self.spec.curves),
        }


def figure_dataset(figure_id: str, points: int = 400) -> FigureDataset:
    try:
        spec = FIGURES[figure_id]
    except KeyError:
        raise InvalidArgument(f"unknown figure {figure_id!r}; choose from {', '.join(FIGURES)}") from None
    if points < 2:
        raise InvalidArgument("a figure needs at least 2 points per curve")
    rows = []
    for label, curve in spec.curves:
        for x in spec.domain(curve, points):
            rows.append((float(x), label, spec.value(float(x), curve)))
    return FigureDataset(spec, rows)
