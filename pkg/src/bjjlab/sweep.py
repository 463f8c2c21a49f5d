"""One-dimensional parameter sweeps, resonance/plateau detectors, figure recipes."""
from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.signal import peak_prominences

from . import __version__
from .approx import classical_boltzmann, gaussian_ansatz, two_level_ground
from .eigensolve import diagonalize
from .model import JunctionParams, build_hamiltonian, single_atom_resonances
from .observables import coherence_stats, moments, number_stats
from .thermal import spectrum_diagnostics, thermal_coherence, thermal_ensemble, thermal_number

AXES = ("ec", "delta", "beta", "n")
QUANTITIES = (
    "energy",
    "var_cos",
    "mean_cos",
    "var_cos_per_state",
    "inv_s_squared",
    "mean_nr",
    "half_mean_nr",
    "var_nr",
    "mean_spacing",
    "classical_var_cos",
    "gaussian_var_cos",
    "gaussian_inv_s_squared",
    "perturbation_var_cos",
)
DEFAULT_MAX_N = 2000
DEFAULT_LOG_POINTS = 400
DEFAULT_POINTS_PER_SPACING = 64


class SweepError(RuntimeError):
    """A grid point failed; carries the offending index and axis value."""

    def __init__(self, index, axis, value, cause):
        super().__init__(f"sweep point {index} ({axis}={value!r}) failed: {cause}")
        self.index = index
        self.axis = axis
        self.value = value
        self.cause = cause


def make_grid(start: float, stop: float, count: int, spacing: str = "linear") -> tuple[float, ...]:
    if count < 2:
        raise ValueError(f"grid needs count >= 2, got {count}")
    if spacing == "linear":
        values = np.linspace(start, stop, count)
    elif spacing == "log":
        if start <= 0 or stop <= 0:
            raise ValueError("log grid needs positive endpoints")
        values = np.geomspace(start, stop, count)
    else:
        raise ValueError(f"unknown grid spacing {spacing!r}")
    return tuple(float(v) for v in values)


@dataclass(frozen=True)
class SweepSpec:
    """A 1-D scan: ``axis`` takes each of ``values`` on top of ``base``.

    ``x = value / x_scale`` is the plotted abscissa (for example delta / E_C).
    """

    axis: str
    values: tuple[float, ...]
    base: JunctionParams
    quantities: tuple[str, ...]
    beta: float = math.inf
    x_scale: float = 1.0
    x_label: str = ""
    name: str = "sweep"
    panel: str = ""
    max_n: int = DEFAULT_MAX_N

    def __post_init__(self):
        if self.axis not in AXES:
            raise ValueError(f"unknown axis {self.axis!r}; choose from {AXES}")
        values = tuple(float(v) for v in self.values)
        if not values:
            raise ValueError("sweep needs at least one value")
        diffs = np.diff(values)
        if values and not (np.all(diffs > 0) or np.all(diffs < 0)):
            raise ValueError("sweep values must be strictly monotone")
        object.__setattr__(self, "values", values)
        quantities = tuple(self.quantities)
        if not quantities:
            raise ValueError("sweep needs at least one quantity")
        unknown = [q for q in quantities if q not in QUANTITIES]
        if unknown:
            raise ValueError(f"unknown quantities {unknown}; choose from {QUANTITIES}")
        if len(set(quantities)) != len(quantities):
            raise ValueError("duplicate quantities")
        object.__setattr__(self, "quantities", quantities)
        if not self.x_scale or not math.isfinite(self.x_scale):
            raise ValueError("x_scale must be finite and nonzero")
        if self.axis == "beta":
            if any(v < 0 for v in values):
                raise ValueError("beta values must be >= 0")
        elif self.beta < 0 or math.isnan(self.beta):
            raise ValueError(f"beta must be >= 0, got {self.beta}")
        if self.axis == "n":
            if any(v != int(v) or v < 1 for v in values):
                raise ValueError("N values must be positive integers")
            if max(values) > self.max_n:
                raise ValueError(f"N={max(values):g} exceeds the cap {self.max_n}")
        elif self.base.n_total > self.max_n:
            raise ValueError(f"N={self.base.n_total} exceeds the cap {self.max_n}")

    def point(self, value: float) -> tuple[JunctionParams, float]:
        if self.axis == "ec":
            return self.base.replace(charging_ec=value), self.beta
        if self.axis == "delta":
            return self.base.replace(asymmetry_delta=value), self.beta
        if self.axis == "n":
            return self.base.replace(n_total=int(value)), self.beta
        return self.base, value


@dataclass
class SweepResult:
    spec: SweepSpec
    columns: tuple[str, ...]
    data: np.ndarray  # shape (rows, columns); first two columns are the axis value and x
    metadata: dict = field(default_factory=dict)

    @property
    def rows(self) -> list[dict]:
        return [dict(zip(self.columns, map(float, row))) for row in self.data]

    def column(self, name: str) -> np.ndarray:
        return self.data[:, self.columns.index(name)].copy()

    @property
    def axis_values(self) -> np.ndarray:
        return self.data[:, 0].copy()

    @property
    def x(self) -> np.ndarray:
        return self.data[:, 1].copy()

    def select(self, quantities, name: str | None = None, panel: str | None = None) -> "SweepResult":
        """Sub-result carrying only some quantity columns."""
        quantities = tuple(quantities)
        idx = [0, 1] + [self.columns.index(q) for q in quantities]
        spec = replace(
            self.spec,
            quantities=quantities,
            name=self.spec.name if name is None else name,
            panel=self.spec.panel if panel is None else panel,
        )
        meta = dict(self.metadata)
        meta["name"] = spec.name
        meta["panel"] = spec.panel
        meta["quantities"] = ",".join(quantities)
        return SweepResult(spec, tuple(self.columns[i] for i in idx), self.data[:, idx].copy(), meta)


def _per_state_var_cos(spectrum, n_total, beta):
    """Thermal var_cos with each eigenstate normalised by its own K_S."""
    ens = thermal_ensemble(spectrum, beta)
    m = moments(spectrum.eigenvectors, n_total)
    cos1 = m[:, 0] / np.sqrt(2.0 * m[:, 2])
    cos2 = 0.5 + m[:, 1] / (2.0 * m[:, 2])
    w = ens.weights
    mc = math.fsum(w * cos1)
    return math.fsum(w * cos2) - mc * mc


def evaluate_point(params: JunctionParams, beta: float, quantities) -> dict:
    """All requested quantities at one parameter point.

    Coherence and number quantities are thermal averages at ``beta``
    (``inf`` = ground state); approximation columns follow their own rules.
    """
    quantities = tuple(quantities)
    out = {}
    exact = {"energy", "var_cos", "mean_cos", "var_cos_per_state", "inv_s_squared",
             "mean_nr", "half_mean_nr", "var_nr", "mean_spacing"}
    spectrum = None
    if exact.intersection(quantities):
        spectrum = diagonalize(build_hamiltonian(params))
    coh = num = None
    for q in quantities:
        if q == "energy":
            out[q] = float(spectrum.eigenvalues[0])
        elif q in ("var_cos", "mean_cos"):
            if coh is None:
                coh = thermal_coherence(params, spectrum, beta)
            out[q] = getattr(coh, q)
        elif q == "var_cos_per_state":
            out[q] = _per_state_var_cos(spectrum, params.n_total, beta)
        elif q in ("inv_s_squared", "mean_nr", "half_mean_nr", "var_nr"):
            if num is None:
                num = thermal_number(params, spectrum, beta)
            out[q] = 0.5 * num.mean_nr if q == "half_mean_nr" else getattr(num, q)
        elif q == "mean_spacing":
            out[q] = spectrum_diagnostics(spectrum).mean_spacing
        elif q == "classical_var_cos":
            out[q] = classical_boltzmann(params, beta).var_cos
        elif q in ("gaussian_var_cos", "gaussian_inv_s_squared"):
            ans = gaussian_ansatz(params)
            if q == "gaussian_var_cos":
                out[q] = coherence_stats(ans.state, params.n_total).var_cos
            else:
                out[q] = number_stats(ans.state, params.n_total).inv_s_squared
        elif q == "perturbation_var_cos":
            tl = two_level_ground(params)
            out[q] = coherence_stats(tl.state, params.n_total).var_cos
    return out


def sweep_metadata(spec: SweepSpec) -> dict:
    b = spec.base
    return {
        "tool": "bjjlab",
        "version": __version__,
        "name": spec.name,
        "panel": spec.panel,
        "axis": spec.axis,
        "x_label": spec.x_label,
        "x_scale": repr(spec.x_scale),
        "n_total": str(b.n_total),
        "tunneling_j": repr(b.tunneling_j),
        "junction_ej": repr(b.junction_energy()),
        "charging_ec": repr(b.charging_ec),
        "asymmetry_delta": repr(b.asymmetry_delta),
        "beta": repr(spec.beta),
        "quantities": ",".join(spec.quantities),
        "coherence_normalization": "ensemble K_S",
        "ground_multiplet_weighting": "equal split at beta=inf",
    }


def run_sweep(spec: SweepSpec, workers: int = 1) -> SweepResult:
    """Evaluate every grid point; rows follow grid order whatever ``workers`` is."""

    def task(item):
        i, value = item
        try:
            params, beta = spec.point(value)
            return evaluate_point(params, beta, spec.quantities)
        except Exception as exc:
            raise SweepError(i, spec.axis, value, exc) from exc

    items = list(enumerate(spec.values))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(task, items))
    else:
        results = [task(item) for item in items]
    data = np.empty((len(items), 2 + len(spec.quantities)))
    for i, (value, res) in enumerate(zip(spec.values, results)):
        data[i, 0] = value
        data[i, 1] = value / spec.x_scale
        data[i, 2:] = [res[q] for q in spec.quantities]
    columns = (spec.axis, "x") + spec.quantities
    return SweepResult(spec, columns, data, sweep_metadata(spec))


# -- detectors ---------------------------------------------------------------


def parabolic_vertex(x, y, i: int) -> float:
    """Abscissa of the parabola through points i-1, i, i+1 (uneven spacing allowed)."""
    x0, x1, x2 = x[i - 1], x[i], x[i + 1]
    y0, y1, y2 = y[i - 1], y[i], y[i + 1]
    num = (x1 - x0) ** 2 * (y1 - y2) - (x1 - x2) ** 2 * (y1 - y0)
    den = (x1 - x0) * (y1 - y2) - (x1 - x2) * (y1 - y0)
    if den == 0:
        return float(x1)
    xv = x1 - 0.5 * num / den
    return float(min(max(xv, x0), x2))


def find_extrema(x, y, kind: str = "max", min_prominence: float = 1e-3) -> list[float]:
    """Strict local extrema refined by a 3-point parabola.

    Extrema with prominence below ``min_prominence`` times the data range are
    dropped so rounding ripples on flat stretches do not count.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    s = y if kind == "max" else -y
    if s.size < 3:
        return []
    i = np.arange(1, s.size - 1)
    cand = i[(s[i] > s[i - 1]) & (s[i] > s[i + 1])]
    if cand.size == 0:
        return []
    span = float(np.ptp(s))
    prom = peak_prominences(s, cand)[0]
    cand = cand[prom >= min_prominence * span]
    return [parabolic_vertex(x, s, int(j)) for j in cand]


def _predicted_in_range(result: SweepResult) -> list[float]:
    lo, hi = sorted((result.axis_values[0], result.axis_values[-1]))
    return [d for d in single_atom_resonances(result.spec.base) if lo <= d <= hi]


def detect_resonances(result: SweepResult, quantity: str = "var_nr", min_prominence: float = 1e-3) -> list[float]:
    """Single-atom resonance positions (delta values) found in a delta sweep.

    ``var_nr`` resonances are maxima, ``var_cos`` resonances are minima
    (resonant suppression). With E_C = 0 there are no single-atom
    resonances and the result is empty.
    """
    if result.spec.axis != "delta":
        raise ValueError("resonance detection needs a delta sweep")
    if quantity not in ("var_nr", "var_cos"):
        raise ValueError("resonances are detected on var_nr or var_cos")
    if result.spec.base.charging_ec == 0:
        return []
    kind = "max" if quantity == "var_nr" else "min"
    found = sorted(find_extrema(result.axis_values, result.column(quantity), kind, min_prominence))
    expected = _predicted_in_range(result)
    if len(found) < len(expected):
        warnings.warn(
            f"found {len(found)} resonances but {len(expected)} are predicted in the scanned "
            "range; the grid may be too coarse",
            RuntimeWarning,
            stacklevel=2,
        )
    return found


@dataclass(frozen=True)
class Plateau:
    start: float
    stop: float
    value: float
    max_deviation: float
    n_points: int


def detect_plateaus(result: SweepResult, quantity: str = "mean_nr", tol: float = 0.05,
                    min_points: int | None = None) -> list[Plateau]:
    """Maximal runs where <N_r>/2 stays within ``tol`` of the run median.

    Runs are grown greedily from the left. Runs shorter than ``min_points``
    (default: 3 points or 3 % of the grid, whichever is larger) are dropped as
    step transitions.
    """
    if result.spec.axis != "delta":
        raise ValueError("plateau detection needs a delta sweep")
    if quantity == "mean_nr":
        y = 0.5 * result.column("mean_nr")
    elif quantity == "half_mean_nr":
        y = result.column("half_mean_nr")
    else:
        raise ValueError("plateaus are detected on mean_nr or half_mean_nr")
    x = result.axis_values
    n = y.size
    if min_points is None:
        min_points = max(3, math.ceil(0.03 * n))
    plateaus = []
    i = 0
    while i < n:
        j = i + 1
        while j < n:
            window = y[i : j + 1]
            if np.max(np.abs(window - np.median(window))) > tol:
                break
            j += 1
        window = y[i:j]
        if window.size >= min_points:
            med = float(np.median(window))
            plateaus.append(Plateau(float(x[i]), float(x[j - 1]), med,
                                    float(np.max(np.abs(window - med))), int(window.size)))
        i = j
    return plateaus


def blockade_deviation(result: SweepResult, half_width: float = 0.25) -> float:
    """Worst distance of <N_r>/2 from the integer plateau value.

    For each momentum n whose plateau centre delta = -n E_C lies in the scan,
    looks at |delta/E_C + n| <= half_width. Larger means a less sharp blockade.
    """
    ec = result.spec.base.charging_ec
    if ec <= 0:
        raise ValueError("blockade plateaus need E_C > 0")
    n_total = result.spec.base.n_total
    x = result.axis_values / ec
    if "half_mean_nr" in result.columns:
        y = result.column("half_mean_nr")
    else:
        y = 0.5 * result.column("mean_nr")
    worst = 0.0
    for two_n in range(-n_total, n_total + 1, 2):
        mom = two_n / 2
        mask = np.abs(x + mom) <= half_width
        if mask.any():
            worst = max(worst, float(np.max(np.abs(y[mask] - mom))))
    return worst


def dip_width(x, y, x_min: float) -> float:
    """Full width at half depth of the dip whose minimum is nearest ``x_min``.

    The baseline is the lower of the two maxima bracketing the dip; the
    crossings are linearly interpolated.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    m = int(np.argmin(np.abs(x - x_min)))
    # walk downhill to the true grid minimum
    while 0 < m < y.size - 1 and (y[m - 1] < y[m] or y[m + 1] < y[m]):
        m = m - 1 if y[m - 1] < y[m + 1] else m + 1
    left = m
    while left > 0 and y[left - 1] >= y[left]:
        left -= 1
    right = m
    while right < y.size - 1 and y[right + 1] >= y[right]:
        right += 1
    base = min(y[left], y[right])
    half = 0.5 * (base + y[m])

    def crossing(i_from, step):
        i = i_from
        while y[i + step] < half:
            i += step
        j = i + step
        t = (half - y[i]) / (y[j] - y[i])
        return x[i] + t * (x[j] - x[i])

    if y[left] < half or y[right] < half or base <= y[m]:
        return float("nan")
    return float(crossing(m, 1) - crossing(m, -1))


# -- figure recipes ----------------------------------------------------------

FIG5_DEFAULT_TEMPS = (0.01, 0.1, 1.0)
FIGURES = ("fig1", "fig2", "fig3", "fig4", "fig5")


def _curve_label(v: float) -> str:
    return f"{v:g}".replace("-", "m").replace("+", "")


def _fig1(grid=None, **_):
    count = grid or DEFAULT_LOG_POINTS
    out = []
    for n in (2, 4, 50, 100):
        base = JunctionParams(n, 1.0)
        ej = base.junction_energy()
        xa = make_grid(1e-4, 1e4, count, "log")
        out.append(run_sweep(SweepSpec("ec", tuple(v * ej for v in xa), base, ("var_cos",),
                                       x_scale=ej, x_label="E_C/E_J", name=f"a_N{n}", panel="a")))
        xb = make_grid(1e-2, 1e6, count, "log")
        scale = ej / n**2
        out.append(run_sweep(SweepSpec("ec", tuple(v * scale for v in xb), base, ("inv_s_squared",),
                                       x_scale=scale, x_label="N^2 E_C/E_J", name=f"b_N{n}", panel="b")))
    base = JunctionParams(100, 1.0)
    ej = base.junction_energy()
    xa = make_grid(1e-4, 1e4, count, "log")
    out.append(run_sweep(SweepSpec("ec", tuple(v * ej for v in xa), base, ("gaussian_var_cos",),
                                   x_scale=ej, x_label="E_C/E_J", name="a_gaussian", panel="a")))
    xb = make_grid(1e-2, 1e6, count, "log")
    scale = ej / 100**2
    out.append(run_sweep(SweepSpec("ec", tuple(v * scale for v in xb), base, ("gaussian_inv_s_squared",),
                                   x_scale=scale, x_label="N^2 E_C/E_J", name="b_gaussian", panel="b")))
    return out


FIG2_EC_OVER_EJ = (0.0, 1e-3, 1e-2)


def _fig2(grid=None, **_):
    count = grid or 401
    base = JunctionParams.from_junction_energy(100, 100.0)
    ej = base.junction_energy()
    xs = make_grid(0.0, 3.0, count)
    out = []
    for r in FIG2_EC_OVER_EJ:
        p = base.replace(charging_ec=r * ej)
        res = run_sweep(SweepSpec("delta", tuple(v * ej for v in xs), p, ("var_cos", "inv_s_squared"),
                                  x_scale=ej, x_label="delta/E_J", name=f"ec{_curve_label(r * ej)}"))
        label = _curve_label(r * ej)
        out.append(res.select(("var_cos",), f"a_ec{label}", "a"))
        out.append(res.select(("inv_s_squared",), f"b_ec{label}", "b"))
    return out


def _fig3(grid=None, **_):
    per_unit = grid or DEFAULT_POINTS_PER_SPACING
    base = JunctionParams.from_junction_energy(100, 100.0)
    out = []
    for ec in (100.0, 800.0):
        p = base.replace(charging_ec=ec)
        xs = make_grid(-3.0, 3.0, 6 * per_unit + 1)
        res = run_sweep(SweepSpec("delta", tuple(v * ec for v in xs), p, ("var_cos", "perturbation_var_cos"),
                                  x_scale=ec, x_label="delta/E_C", name=f"ec{ec:g}", panel="a"))
        out.append(res.select(("var_cos",), f"ec{ec:g}", "a"))
        out.append(res.select(("perturbation_var_cos",), f"ec{ec:g}_perturbation", "a"))
    return out


def _fig4(grid=None, **_):
    per_unit = grid or 200
    base = JunctionParams.from_junction_energy(10, 10.0)
    out = []
    for ec in (1000.0, 100.0, 10.0):
        p = base.replace(charging_ec=ec)
        xs = make_grid(-6.0, 6.0, 12 * per_unit + 1)
        res = run_sweep(SweepSpec("delta", tuple(v * ec for v in xs), p, ("var_nr", "half_mean_nr"),
                                  x_scale=ec, x_label="delta/E_C", name=f"ec{ec:g}"))
        out.append(res.select(("var_nr",), f"a_ec{ec:g}", "a"))
        out.append(res.select(("half_mean_nr",), f"b_ec{ec:g}", "b"))
    return out


def _fig5(grid=None, temps=None, **_):
    count = grid or 200
    temps = tuple(temps) if temps else FIG5_DEFAULT_TEMPS
    out = []
    xs = make_grid(1e-5, 1e1, count, "log")
    for ej in (1.0, 0.5):
        base = JunctionParams.from_junction_energy(100, ej)
        values = tuple(v * ej for v in xs)
        for t in temps:
            res = run_sweep(SweepSpec("ec", values, base, ("var_cos", "var_cos_per_state", "classical_var_cos"),
                                      beta=1.0 / t, x_scale=ej, x_label="E_C/E_J",
                                      name=f"ej{ej:g}_T{t:g}", panel="a"))
            out.append(res.select(("var_cos",), f"ej{ej:g}_T{t:g}", "a"))
            out.append(res.select(("classical_var_cos",), f"ej{ej:g}_T{t:g}_classical", "a"))
            out.append(res.select(("var_cos_per_state",), f"ej{ej:g}_T{t:g}_perstate", "a"))
        out.append(run_sweep(SweepSpec("ec", values, base, ("mean_spacing",), x_scale=ej,
                                       x_label="E_C/E_J", name=f"ej{ej:g}_spacing", panel="spacing")))
    return out


_RECIPES = {"fig1": _fig1, "fig2": _fig2, "fig3": _fig3, "fig4": _fig4, "fig5": _fig5}


def figure_recipe(fig_id: str, grid: int | None = None, temps=None) -> list[SweepResult]:
    """Curves of one figure, each as a ``SweepResult`` named ``<panel>_<curve>``.

    ``grid`` overrides the resolution: total points per log axis (fig1, fig5),
    points on the delta axis (fig2), or points per unit of delta/E_C (fig3,
    fig4). ``temps`` lists k_B T values for fig5.
    """
    if fig_id not in _RECIPES:
        raise ValueError(f"unknown figure {fig_id!r}; choose from {FIGURES}")
    if grid is not None and grid < 2:
        raise ValueError("grid must be >= 2")
    if temps is not None and fig_id != "fig5":
        raise ValueError("temperatures only apply to fig5")
    if temps is not None and any(not t > 0 for t in temps):
        raise ValueError("temperatures must be positive")
    return _RECIPES[fig_id](grid=grid, temps=temps)
