import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gaussstab import models as m
from gaussstab.measures import linear_entropy, log_negativity
from gaussstab.stabilizability import is_stabilizable
from gaussstab.sweeps import (
    FIGURES,
    MANIFOLDS,
    Axis,
    EmptyRegion,
    figure_dataset,
    get_manifold,
    golden_section_max,
    grid_scan,
    maximize,
    resolve_axes,
    try_evaluate,
)
from gaussstab.symplectic_core import InvalidArgument


@given(st.floats(-5, 5), st.floats(0.1, 3))
def test_golden_section_finds_parabola_peak(x0, w):
    x, fx = golden_section_max(lambda t: -((t - x0) / w) ** 2, -10, 10)
    assert x == pytest.approx(x0, abs=1e-4)
    assert fx == pytest.approx(0.0, abs=1e-8)


def test_golden_section_monotone_goes_to_edges():
    assert golden_section_max(math.exp, 0.0, 2.0)[0] == 2.0
    assert golden_section_max(lambda t: -t, 0.0, 2.0)[0] == 0.0


def test_golden_section_plateau_prefers_upper_end():
    assert golden_section_max(lambda t: 1.0, 0.0, 5.0)[0] == 5.0


def test_golden_section_bad_bracket():
    with pytest.raises(InvalidArgument):
        golden_section_max(math.sin, 1.0, 0.0)


def test_axis_validation():
    with pytest.raises(InvalidArgument):
        Axis("r", 1.0, 1.0)
    with pytest.raises(InvalidArgument):
        Axis("r", 0.0, math.inf)
    with pytest.raises(InvalidArgument):
        Axis("r", 0.0, 1.0).grid(1)


def test_unknown_manifold_and_axis():
    with pytest.raises(InvalidArgument):
        get_manifold("nope")
    with pytest.raises(InvalidArgument):
        resolve_axes(get_manifold("squeezed"), {}, {"zz": (0.0, 1.0)})


@pytest.mark.parametrize("name", sorted(MANIFOLDS))
def test_every_manifold_point_is_stabilizable(name):
    mf = MANIFOLDS[name]
    params = {}
    axes = resolve_axes(mf, params)
    rows = grid_scan(mf, params, axes, [7] * len(axes))
    spec = mf.spec(params)
    good = [r for r in rows if r.solution is not None]
    assert good
    for row in good:
        if max(abs(x) for x in row.solution.standard_form.as_tuple()) > 1e3:
            continue  # explicit matrices lose precision that far out
        assert is_stabilizable(row.solution.matrix, spec, 1e-8).stabilizable


def test_try_evaluate_rejects_infeasible():
    mf = get_manifold("damping_symmetric")
    assert try_evaluate(mf, {"r": 5.0}, {"gamma": 0.5}) is None


def test_maximize_symmetric_damping_reaches_ln2():
    res = maximize(get_manifold("damping_symmetric"), {"chi": 1.0, "gamma": 1.0})
    assert res.solution.log_negativity == pytest.approx(math.log(2), abs=1e-3)
    assert res.boundary_hit and res.boundary_axes == ("r",)
    assert res.solution.linear_entropy > 0.99


def test_maximize_interior_peak_has_no_boundary_hit():
    # E_N of the symmetric family at gamma < 1 vanishes near the pole, so the peak is interior
    mf = get_manifold("damping_symmetric")
    res = maximize(mf, {"chi": 1.0, "gamma": 0.5}, overrides={"r": (0.0, 0.6)})
    grid = np.linspace(0.0, 0.6, 6001)
    values = [try_evaluate(mf, {"r": r}, {"chi": 1.0, "gamma": 0.5}) for r in grid]
    best = max(v.log_negativity for v in values if v is not None)
    assert res.solution.log_negativity >= best - 1e-9


def test_maximize_empty_region():
    mf = get_manifold("damping_equal")
    with pytest.raises(EmptyRegion):
        maximize(mf, {"chi": 4.0}, overrides={"a": (0.5, 1.0)}, points=5)


def test_maximize_result_dict():
    res = maximize(get_manifold("squeezed"), {"alpha": 1.0}, points=21)
    d = res.as_dict()
    assert d["manifold"] == "squeezed" and d["point"]["r"] == res.coords["r"]
    assert d["box"]["r"] == [0.0, 10.0]


@pytest.mark.parametrize("fid", sorted(FIGURES))
def test_figure_datasets(fid):
    data = figure_dataset(fid, points=400)
    spec = data.spec
    assert len(data.rows) == 400 * len(spec.curves)
    for label, curve in spec.curves:
        xs = [x for x, lab, _ in data.rows if lab == label]
        assert len(xs) == 400 and np.all(np.diff(xs) > 0)
    assert all(math.isfinite(v) for _, _, v in data.rows)
    curves = dict(spec.curves)
    for x, label, v in data.rows[::7]:
        sol = spec.pipeline(x, curves[label])
        measure = log_negativity if spec.quantity == "E_N" else linear_entropy
        assert v == pytest.approx(measure(sol.covariance), abs=1e-9)


def _curve(data, label):
    return np.array([v for _, lab, v in data.rows if lab == label])


def test_figure_values_are_monotone_in_sweep():
    for fid in ("1a", "1b", "1c", "3a", "3b"):
        data = figure_dataset(fid, points=200)
        for label, _ in data.spec.curves:
            assert np.all(np.diff(_curve(data, label)) >= -1e-12)
    assert np.all(np.diff(_curve(figure_dataset("1d", points=200), "chi=1.0")) >= -1e-12)


@pytest.mark.parametrize("chi", [2.0, 4.0, 8.0])
def test_equal_branch_mixedness_dips_near_threshold(chi):
    # p(a) starts at chi^2 with slope proportional to 1.5 chi - chi^3, negative for chi^2 > 1.5
    a0 = 0.5 * chi
    s0 = m.equal_occupation_closed_form(a0 * (1 + 1e-9), chi)[1]
    assert s0 == pytest.approx(1 - chi**-2, abs=1e-6)
    assert m.equal_occupation_closed_form(a0 + 1e-3, chi)[1] < s0
    assert m.equal_occupation_closed_form(50.0, chi)[1] > s0


def test_unknown_figure():
    with pytest.raises(InvalidArgument):
        figure_dataset("9z")
    with pytest.raises(InvalidArgument):
        figure_dataset("1a", points=1)


def test_figure_metadata():
    md = figure_dataset("3a", points=3).metadata
    assert md == {"figure": "3a", "model": "cascaded", "quantity": "E_N", "curves": "c_plus_max;c_plus_mid"}


def test_cascaded_plane_scan_bounded_by_max_curve():
    mf = get_manifold("cascaded")
    axes = resolve_axes(mf, {}, {"a": (0.5, 20.0)})
    rows = grid_scan(mf, {}, axes, [15, 15])
    for row in rows:
        if row.solution is not None:
            a = row.coords["a"]
            assert row.solution.log_negativity <= m.cascaded_closed_form(a, m.c_plus_max(a))[0] + 1e-9
