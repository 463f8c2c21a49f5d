import math
import warnings

import numpy as np
import pytest

from bjjlab.model import JunctionParams
from bjjlab.sweep import (
    SweepError,
    SweepSpec,
    blockade_deviation,
    detect_plateaus,
    detect_resonances,
    dip_width,
    evaluate_point,
    figure_recipe,
    find_extrema,
    make_grid,
    parabolic_vertex,
    run_sweep,
)

FIG4 = JunctionParams.from_junction_energy(10, 10.0, 1000.0)


def delta_sweep(base, lo, hi, per_unit, quantities=("var_nr", "half_mean_nr")):
    ec = base.charging_ec
    xs = make_grid(lo, hi, int(round((hi - lo) * per_unit)) + 1)
    return run_sweep(SweepSpec("delta", tuple(v * ec for v in xs), base, quantities, x_scale=ec))


def test_make_grid():
    assert make_grid(0, 1, 3) == (0.0, 0.5, 1.0)
    np.testing.assert_allclose(make_grid(1e-2, 1e2, 5, "log"), [1e-2, 1e-1, 1, 10, 100])
    for bad in [(0, 1, 1), (0, 1, 3, "log"), (1, 2, 3, "cubic")]:
        with pytest.raises(ValueError):
            make_grid(*bad)


def test_spec_validation():
    base = JunctionParams(4)
    with pytest.raises(ValueError):
        SweepSpec("ec", (), base, ("var_cos",))
    with pytest.raises(ValueError):
        SweepSpec("ec", (1.0, 0.5, 2.0), base, ("var_cos",))
    with pytest.raises(ValueError):
        SweepSpec("ec", (1.0,), base, ())
    with pytest.raises(ValueError):
        SweepSpec("ec", (1.0,), base, ("nope",))
    with pytest.raises(ValueError):
        SweepSpec("n", (2.0, 3000.0), base, ("var_cos",))
    with pytest.raises(ValueError):
        SweepSpec("beta", (-1.0, 1.0), base, ("var_cos",))


def test_single_point_binomial():
    r = run_sweep(SweepSpec("ec", (0.0,), JunctionParams(20), ("var_cos",)))
    assert r.columns == ("ec", "x", "var_cos")
    assert abs(r.column("var_cos")[0]) < 1e-12


def test_deterministic_under_threads():
    base = JunctionParams(30, 1.0, 0.0)
    spec = SweepSpec("ec", make_grid(1e-3, 10, 25, "log"), base, ("var_cos", "inv_s_squared", "energy"))
    a = run_sweep(spec, workers=1)
    b = run_sweep(spec, workers=4)
    np.testing.assert_array_equal(a.data, b.data)
    assert a.metadata == b.metadata


def test_axes():
    base = JunctionParams(6, 1.0, 0.5)
    r = run_sweep(SweepSpec("n", (2.0, 4.0, 6.0), base, ("inv_s_squared",)))
    assert r.data.shape == (3, 3)
    r = run_sweep(SweepSpec("beta", (0.0, 1.0, 100.0), base, ("var_cos",)))
    assert r.column("var_cos")[0] == pytest.approx(0.5, abs=1e-12)
    assert np.all(np.diff(r.column("var_cos")) < 0)


def test_failure_names_point():
    # the Gaussian ansatz needs delta = 0
    spec = SweepSpec("delta", (0.0, 1.0), JunctionParams(10), ("gaussian_var_cos",))
    with pytest.raises(SweepError) as info:
        run_sweep(spec)
    assert info.value.index == 1 and info.value.value == 1.0


def test_evaluate_point_quantities():
    p = JunctionParams.from_junction_energy(10, 10.0, 1000.0, -3000.0)
    out = evaluate_point(p, math.inf, ("mean_nr", "half_mean_nr", "var_nr"))
    assert out["half_mean_nr"] == pytest.approx(0.5 * out["mean_nr"])
    assert out["half_mean_nr"] == pytest.approx(3.0, abs=0.01)


def test_parabolic_vertex():
    x = np.array([0.0, 0.3, 1.0])
    y = -(x - 0.42) ** 2
    assert parabolic_vertex(x, y, 1) == pytest.approx(0.42, abs=1e-14)


def test_find_extrema_filters_ripple():
    x = np.linspace(0, 10, 1001)
    y = np.exp(-((x - 4.0) ** 2)) + 1e-9 * np.sin(300 * x)
    peaks = find_extrema(x, y, "max")
    assert len(peaks) == 1 and peaks[0] == pytest.approx(4.0, abs=1e-4)
    assert find_extrema(x, np.zeros_like(x)) == []


def test_fig4_resonances_and_plateaus():
    r = delta_sweep(FIG4, -6, 6, 100)
    peaks = np.array(detect_resonances(r)) / 1000.0
    np.testing.assert_allclose(peaks, np.arange(-4.5, 5.0, 1.0), atol=0.01)
    values = sorted(p.value for p in detect_plateaus(r, "half_mean_nr"))
    np.testing.assert_allclose(values, np.arange(-5, 6), atol=0.05)
    assert blockade_deviation(r) < 0.01


def test_single_window_one_detection():
    r = delta_sweep(FIG4, -0.9, -0.1, 200)  # around delta/E_C = -1/2
    assert len(detect_resonances(r)) == 1


def test_flat_sweeps():
    base = JunctionParams.from_junction_energy(10, 10.0, 0.0)
    r = run_sweep(SweepSpec("delta", make_grid(-400, 400, 401), base, ("var_nr", "mean_nr")))
    assert detect_resonances(r) == []
    plats = detect_plateaus(r)
    assert len(plats) == 2
    assert sorted(round(p.value) for p in plats) == [-5, 5]
    const = run_sweep(SweepSpec("delta", make_grid(0.1, 1, 50), JunctionParams(4, 0.0, 0.0), ("mean_nr",)))
    plats = detect_plateaus(const)
    assert len(plats) == 1 and plats[0].n_points == 50


def test_coarse_grid_warns():
    with pytest.warns(RuntimeWarning):
        detect_resonances(delta_sweep(FIG4, -6, 6, 1))  # samples only the plateau centres


def test_dip_width_gaussian():
    x = np.linspace(-5, 5, 2001)
    y = 1 - 0.8 * np.exp(-(x**2) / 2)
    # half depth at exp(-x^2/2) = 1/2 -> FWHM = 2 sqrt(2 ln 2)
    assert dip_width(x, y, 0.3) == pytest.approx(2 * math.sqrt(2 * math.log(2)), abs=1e-4)


def test_figure_recipe_shapes():
    res = figure_recipe("fig4", grid=10)
    assert sorted(r.spec.name for r in res) == sorted(
        f"{p}_ec{e}" for p in "ab" for e in ("1000", "100", "10"))
    res = figure_recipe("fig1", grid=12)
    assert len([r for r in res if r.spec.panel == "a"]) == 5
    assert len([r for r in res if r.spec.panel == "b"]) == 5
    for r in res:
        if r.spec.panel == "a":
            assert np.all(np.diff(r.data[:, 2]) >= -1e-12)
    with pytest.raises(ValueError):
        figure_recipe("fig9")
    with pytest.raises(ValueError):
        figure_recipe("fig1", temps=(1.0,))


def test_select_keeps_metadata_consistent():
    r = delta_sweep(FIG4, -1, 1, 5)
    s = r.select(("var_nr",), "a_x", "a")
    assert s.columns == ("delta", "x", "var_nr")
    assert s.metadata["name"] == "a_x" and s.metadata["quantities"] == "var_nr"
