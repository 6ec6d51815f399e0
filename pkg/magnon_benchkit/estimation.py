"""Parameter extraction by damped Gauss-Newton (Levenberg-Marquardt) least squares.

Three models share one solver:

* ``spectrum``  - |r(w)|^2 (or complex r) of a single bias setting
* ``field_map`` - |r|^2 over (B, w) with w_m(B) = gamma B + w_m0
* ``decay``     - log cavity energy, log E0 - 2 kappa t

Rates (g, kappa_*, gamma) are fitted in log space, frequency-like parameters
in a coordinate normalised by their bound interval. Parameter errors come
from the linearised covariance at the optimum and are approximate.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import dsp
from .physics import CoupledSystem, DomainError
from .regimes import cooperativity
from .spectra import FrequencyGrid, reflection

__all__ = [
    "MODELS",
    "MODEL_PARAMS",
    "RATE_PARAMS",
    "FlatSpectrumError",
    "FitProblem",
    "FitResult",
    "Derived",
    "spectrum_jacobian",
    "fit",
    "fit_field_map",
    "fit_lorentzian",
    "fit_decay",
    "init_guess",
    "default_bounds",
    "perturb",
    "mirrored",
    "select_branch",
    "derived_quantities",
    "crossing_field",
    "synthesize",
]

log = logging.getLogger("magnon_benchkit.estimation")

MODELS = ("spectrum", "field_map", "decay")
TARGETS = ("power", "complex")
MODEL_PARAMS: dict[str, tuple[str, ...]] = {
    "spectrum": ("omega_a", "omega_m", "kappa_a", "kappa_a1", "kappa_m", "g"),
    "field_map": ("omega_a", "kappa_a", "kappa_a1", "kappa_m", "g", "gamma", "omega_m0"),
    "decay": ("kappa", "log_energy0"),
}
RATE_PARAMS = frozenset({"g", "kappa_a", "kappa_a1", "kappa_m", "gamma", "kappa"})

MAX_ITERATIONS = 500
XTOL = 1e-10
FTOL = 1e-12
GTOL = 1e-4
RESIDUAL_RTOL = 1e-9
LAMBDA0 = 1e-3
LAMBDA_UP = 3.0
LAMBDA_DOWN = 2.0
LAMBDA_MAX = 1e16


class FlatSpectrumError(DomainError):
    """The data carry no feature an initial guess could be read from."""


@dataclass(frozen=True, eq=False)
class FitProblem:
    """A least-squares problem.

    ``x`` holds angular frequencies (spectrum, field_map) or times (decay);
    ``b`` the bias field per point for field maps. ``free`` maps each fitted
    parameter to its (lo, hi) bounds, ``fixed`` supplies the rest.
    """

    model: str
    x: np.ndarray
    y: np.ndarray
    free: Mapping[str, tuple[float, float]]
    fixed: Mapping[str, float] = field(default_factory=dict)
    b: np.ndarray | None = None
    weights: np.ndarray | None = None
    target: str = "power"

    def __post_init__(self) -> None:
        if self.model not in MODELS:
            raise ValueError(f"model must be one of {MODELS}")
        if self.target not in TARGETS:
            raise ValueError(f"target must be one of {TARGETS}")
        if self.target == "complex" and self.model == "decay":
            raise ValueError("decay fits use the power target")
        x = np.asarray(self.x, dtype=float).ravel()
        y = np.asarray(self.y, dtype=complex if self.target == "complex" else float).ravel()
        if x.size == 0:
            raise ValueError("data must be nonempty")
        if y.shape != x.shape:
            raise ValueError("x and y must have the same length")
        if not self.free:
            raise ValueError("free parameters must be nonempty")
        names = MODEL_PARAMS[self.model]
        free = {}
        for name, bounds in self.free.items():
            if name not in names:
                raise ValueError(f"unknown parameter {name!r} for model {self.model}")
            lo, hi = (float(v) for v in bounds)
            if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
                raise ValueError(f"bounds for {name} must be finite and ordered")
            if name in RATE_PARAMS and lo <= 0:
                raise ValueError(f"lower bound for rate {name} must be > 0")
            free[name] = (lo, hi)
        fixed = {k: float(v) for k, v in self.fixed.items()}
        for name in fixed:
            if name not in names:
                raise ValueError(f"unknown parameter {name!r} for model {self.model}")
            if name in free:
                raise ValueError(f"parameter {name} is both free and fixed")
        missing = [n for n in names if n not in free and n not in fixed]
        if missing:
            raise ValueError(f"parameters neither free nor fixed: {', '.join(missing)}")
        if self.model == "field_map":
            if self.b is None:
                raise ValueError("field_map problems need bias fields")
            b = np.asarray(self.b, dtype=float).ravel()
            if b.shape != x.shape:
                raise ValueError("b must match the data length")
            if np.unique(b).size < 3:
                raise ValueError("field_map fits need >= 3 bias-field rows")
            object.__setattr__(self, "b", b)
        if self.model == "decay" and np.any(y <= 0):
            raise ValueError("decay data must be > 0")
        if self.weights is not None:
            w = np.asarray(self.weights, dtype=float).ravel()
            if w.shape != x.shape or np.any(w < 0) or not np.all(np.isfinite(w)):
                raise ValueError("weights must be finite, >= 0 and match the data")
            object.__setattr__(self, "weights", w)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "free", free)
        object.__setattr__(self, "fixed", fixed)

    @property
    def free_names(self) -> tuple[str, ...]:
        return tuple(n for n in MODEL_PARAMS[self.model] if n in self.free)


@dataclass(frozen=True, eq=False)
class FitResult:
    model: str
    params: dict[str, float]
    stderr: dict[str, float]
    residual_norm: float
    iterations: int
    converged: bool
    singular: bool = False
    message: str = ""
    history: tuple[float, ...] = ()
    covariance: np.ndarray | None = None
    dof: int = 0
    data_norm: float = 0.0

    def __post_init__(self) -> None:
        if not self.residual_norm >= 0:
            raise ValueError("residual_norm must be >= 0")


class Derived(NamedTuple):
    C: float
    F_P: float
    splitting: float
    rabi_period: float


# --- model and analytic Jacobian -------------------------------------------------


def spectrum_jacobian(omega, omega_a, omega_m, kappa_a, kappa_a1, kappa_m, g):
    """Reflection and its derivatives with respect to the six spectrum parameters."""
    omega = np.asarray(omega, dtype=float)
    e = 1j * (omega_m - omega) + kappa_m
    d = 1j * (omega_a - omega) + kappa_a + g * g / e
    r = -1.0 + 2.0 * kappa_a1 / d
    dr_dd = -2.0 * kappa_a1 / (d * d)
    dd_de = -(g * g) / (e * e)
    jac = {
        "omega_a": dr_dd * 1j,
        "omega_m": dr_dd * dd_de * 1j,
        "kappa_a": dr_dd,
        "kappa_a1": 2.0 / d,
        "kappa_m": dr_dd * dd_de,
        "g": dr_dd * 2.0 * g / e,
    }
    return r, jac


def _model(problem: FitProblem, params: Mapping[str, float], want_jac: bool):
    x = problem.x
    if problem.model == "decay":
        value = params["log_energy0"] - 2.0 * params["kappa"] * x
        jac = {"log_energy0": np.ones_like(x), "kappa": -2.0 * x} if want_jac else {}
        return value, jac
    if problem.model == "spectrum":
        omega_m = params["omega_m"]
    else:
        omega_m = params["gamma"] * problem.b + params["omega_m0"]
    r, jac = spectrum_jacobian(
        x,
        params["omega_a"],
        omega_m,
        params["kappa_a"],
        params["kappa_a1"],
        params["kappa_m"],
        params["g"],
    )
    if problem.model == "field_map" and want_jac:
        dr_dwm = jac.pop("omega_m")
        jac["gamma"] = dr_dwm * problem.b
        jac["omega_m0"] = dr_dwm
    return r, jac


def _to_target(problem: FitProblem, value):
    if problem.model == "decay":
        return value
    if problem.target == "complex":
        return np.concatenate([value.real, value.imag])
    return np.abs(value) ** 2


def _target_jac(problem: FitProblem, value, dvalue):
    if problem.model == "decay":
        return dvalue
    if problem.target == "complex":
        return np.concatenate([dvalue.real, dvalue.imag])
    return 2.0 * np.real(np.conj(value) * dvalue)


def _observed(problem: FitProblem) -> np.ndarray:
    if problem.model == "decay":
        return np.log(problem.y)
    if problem.target == "complex":
        return np.concatenate([problem.y.real, problem.y.imag])
    return problem.y


def _weights(problem: FitProblem) -> np.ndarray:
    w = np.ones(problem.x.size) if problem.weights is None else problem.weights
    if problem.target == "complex" and problem.model != "decay":
        w = np.concatenate([w, w])
    return w


# --- internal coordinates ----------------------------------------------------------


class _Coordinates:
    """Maps natural parameters to the solver's internal vector and back."""

    def __init__(self, problem: FitProblem) -> None:
        self.names = problem.free_names
        self.is_log = np.array([n in RATE_PARAMS for n in self.names])
        lo = np.array([problem.free[n][0] for n in self.names], dtype=float)
        hi = np.array([problem.free[n][1] for n in self.names], dtype=float)
        self.lo_nat = lo
        self.hi_nat = hi
        self.span = np.where(self.is_log, 1.0, hi - lo)
        self.lo = np.where(self.is_log, np.log(lo), 0.0)
        self.hi = np.where(self.is_log, np.log(hi), 1.0)

    def to_internal(self, values: np.ndarray) -> np.ndarray:
        out = np.empty_like(values)
        out[self.is_log] = np.log(values[self.is_log])
        lin = ~self.is_log
        out[lin] = (values[lin] - self.lo_nat[lin]) / self.span[lin]
        return out

    def to_natural(self, theta: np.ndarray) -> np.ndarray:
        out = np.empty_like(theta)
        out[self.is_log] = np.exp(theta[self.is_log])
        lin = ~self.is_log
        out[lin] = self.lo_nat[lin] + theta[lin] * self.span[lin]
        return np.clip(out, self.lo_nat, self.hi_nat)

    def derivative(self, values: np.ndarray) -> np.ndarray:
        """d(natural)/d(internal) per parameter."""
        return np.where(self.is_log, values, self.span)

    def clip(self, theta: np.ndarray) -> np.ndarray:
        return np.clip(theta, self.lo, self.hi)


class _Evaluator:
    def __init__(self, problem: FitProblem, coords: _Coordinates) -> None:
        self.problem = problem
        self.coords = coords
        self.observed = _observed(problem)
        self.sqrt_w = np.sqrt(_weights(problem))

    def params(self, theta: np.ndarray) -> dict[str, float]:
        values = self.coords.to_natural(theta)
        params = dict(self.problem.fixed)
        params.update({n: float(v) for n, v in zip(self.coords.names, values, strict=True)})
        return params

    def residual(self, theta: np.ndarray, want_jac: bool = False):
        params = self.params(theta)
        value, jac = _model(self.problem, params, want_jac)
        res = self.sqrt_w * (_to_target(self.problem, value) - self.observed)
        if not want_jac:
            return res, None
        chain = self.coords.derivative(self.coords.to_natural(theta))
        cols = [
            self.sqrt_w * _target_jac(self.problem, value, jac[name]) * chain[i]
            for i, name in enumerate(self.coords.names)
        ]
        return res, np.column_stack(cols)


# --- solver ----------------------------------------------------------------------


def _damped_step(jac: np.ndarray, res: np.ndarray, lam: float) -> tuple[np.ndarray, bool]:
    """Marquardt step with damping lam * diag(J^T J), solved in Jacobi-scaled form."""
    a = jac.T @ jac
    grad = jac.T @ res
    diag = np.diag(a).copy()
    floor = 1e-30 * max(float(np.max(diag)), 1e-300)
    diag = np.maximum(diag, floor)
    scale = 1.0 / np.sqrt(diag)
    a_scaled = a * np.outer(scale, scale)
    rhs = -grad * scale
    damped = a_scaled + lam * np.eye(a.shape[0])
    try:
        y = np.linalg.solve(damped, rhs)
        if not np.all(np.isfinite(y)):
            raise np.linalg.LinAlgError("non-finite step")
        return y * scale, False
    except np.linalg.LinAlgError:
        y, *_ = np.linalg.lstsq(damped, rhs, rcond=None)
        return y * scale, True


def _gradient_ok(jac, res, theta, coords: _Coordinates, observed_norm: float) -> bool:
    """Projected-gradient test; a residual at evaluation round-off passes outright."""
    rnorm = float(np.linalg.norm(res))
    # residual at arithmetic noise level
    if rnorm <= RESIDUAL_RTOL * max(observed_norm, 1e-300):
        return True
    grad = jac.T @ res
    colnorm = np.linalg.norm(jac, axis=0)
    at_lo = theta <= coords.lo
    at_hi = theta >= coords.hi
    # components pushing against an active bound do not count
    active = (at_lo & (grad > 0)) | (at_hi & (grad < 0))
    with np.errstate(divide="ignore", invalid="ignore"):
        cosine = np.where(colnorm > 0, np.abs(grad) / (colnorm * rnorm), 0.0)
    cosine = np.where(active, 0.0, cosine)
    return bool(np.max(cosine, initial=0.0) <= GTOL)


def fit(
    problem: FitProblem, init: Mapping[str, float], max_iter: int = MAX_ITERATIONS
) -> FitResult:
    """Minimise the weighted squared residual starting from ``init``."""
    coords = _Coordinates(problem)
    start = []
    for name, lo, hi in zip(coords.names, coords.lo_nat, coords.hi_nat, strict=True):
        if name not in init:
            raise ValueError(f"init lacks free parameter {name}")
        value = float(init[name])
        if not (lo <= value <= hi):
            raise ValueError(f"init {name}={value:g} outside bounds [{lo:g}, {hi:g}]")
        start.append(value)
    evaluator = _Evaluator(problem, coords)
    observed_norm = float(np.linalg.norm(evaluator.sqrt_w * evaluator.observed))

    theta = coords.clip(coords.to_internal(np.array(start, dtype=float)))
    res, jac = evaluator.residual(theta, want_jac=True)
    cost = float(res @ res)
    history = [cost]
    lam = LAMBDA0
    singular = False
    converged = False
    message = "iteration cap reached"
    iterations = 0

    for iterations in range(1, max_iter + 1):
        step, fallback = _damped_step(jac, res, lam)
        if fallback and not singular:
            log.warning("singular normal equations; using least-squares fallback")
        singular = singular or fallback
        trial = coords.clip(theta + step)
        taken = trial - theta
        if np.linalg.norm(taken) <= XTOL * (np.linalg.norm(theta) + XTOL):
            converged = _gradient_ok(jac, res, theta, coords, observed_norm)
            message = "relative step below tolerance"
            break
        trial_res, _ = evaluator.residual(trial)
        trial_cost = float(trial_res @ trial_res)
        if math.isfinite(trial_cost) and trial_cost < cost:
            decrease = cost - trial_cost
            theta = trial
            res, jac = evaluator.residual(theta, want_jac=True)
            previous, cost = cost, trial_cost
            history.append(cost)
            lam /= LAMBDA_DOWN
            log.debug("iter %d: cost %.6g accepted (lambda %.3g)", iterations, cost, lam)
            if decrease <= FTOL * previous:
                converged = _gradient_ok(jac, res, theta, coords, observed_norm)
                message = "relative cost decrease below tolerance"
                break
        else:
            lam *= LAMBDA_UP
            log.debug("iter %d: step rejected (lambda %.3g)", iterations, lam)
            if lam > LAMBDA_MAX:
                converged = _gradient_ok(jac, res, theta, coords, observed_norm)
                message = "damping limit reached"
                break

    if not converged:
        log.warning("fit did not converge after %d iterations: %s", iterations, message)

    n_res = res.size
    n_par = len(coords.names)
    dof = max(n_res - n_par, 0)
    sigma2 = cost / dof if dof > 0 else 0.0
    values = coords.to_natural(theta)
    chain = coords.derivative(values)
    try:
        cov_int = np.linalg.pinv(jac.T @ jac) * sigma2
    except np.linalg.LinAlgError:
        cov_int = np.full((n_par, n_par), np.nan)
    cov = cov_int * np.outer(chain, chain)
    if np.linalg.matrix_rank(jac) < n_par:
        if not singular:
            log.warning("Jacobian is rank deficient at the optimum; errors are unreliable")
        singular = True
    stderr = {
        n: float(math.sqrt(max(cov[i, i], 0.0))) if np.isfinite(cov[i, i]) else math.nan
        for i, n in enumerate(coords.names)
    }
    return FitResult(
        model=problem.model,
        params=evaluator.params(theta),
        stderr=stderr,
        residual_norm=math.sqrt(cost),
        iterations=iterations,
        converged=converged,
        singular=singular,
        message=message,
        history=tuple(history),
        covariance=cov,
        dof=dof,
        data_norm=observed_norm,
    )


# --- initial guesses and helpers ---------------------------------------------------


def _dip_widths(x, y, idx: int, level: float, toward: int) -> tuple[float, float]:
    """(outer, inner) half-widths of a dip; ``toward`` points at the partner dip."""
    outer = dsp.crossing(x, y, idx, level, -toward)
    inner = dsp.crossing(x, y, idx, level, toward)
    return abs(outer - x[idx]), abs(inner - x[idx])


def init_guess(omega, power) -> dict[str, float]:
    """Spectrum-model starting values read off |r|^2 data.

    One dip gives a bare-cavity guess with g = 0. Two dips give either a
    strongly coupled pair (g from half the separation) or, when the inner
    flanks are much steeper than the outer ones, a transparency window.
    """
    x = np.asarray(omega, dtype=float)
    y = np.asarray(power, dtype=float)
    if x.size == 0 or x.shape != y.shape:
        raise DomainError("spectrum data must be nonempty with matching columns")
    order = np.argsort(x)
    x, y = x[order], y[order]
    span = float(np.ptp(y))
    if span < 1e-3:
        raise FlatSpectrumError(f"spectrum is featureless (|r|^2 range {span:.3g})")
    baseline = float(np.percentile(y, 95))
    dips = dsp.find_dips(x, y, prominence=0.1 * span)
    if dips.size == 0:
        dips = np.array([int(np.argmin(y))])

    if dips.size >= 2:
        deepest = np.sort(dips[np.argsort(y[dips])[:2]])
        i1, i2 = int(deepest[0]), int(deepest[1])
        floor = float(min(y[i1], y[i2]))
        level = 0.5 * (floor + baseline)
        out1, in1 = _dip_widths(x, y, i1, level, +1)
        out2, in2 = _dip_widths(x, y, i2, level, -1)
        between = i1 + int(np.argmax(y[i1 : i2 + 1]))
        half_gap = 0.5 * (x[i2] - x[i1])
        in1 = in1 if math.isfinite(in1) else x[between] - x[i1]
        in2 = in2 if math.isfinite(in2) else x[i2] - x[between]
        centre = 0.5 * (x[i1] + x[i2])
        if math.isfinite(out1) and math.isfinite(out2) and min(out1, out2) > 3.0 * max(in1, in2):
            # transparency window inside a broad cavity dip
            left = dsp.crossing(x, y, i1, level, -1)
            right = dsp.crossing(x, y, i2, level, +1)
            kappa_a = 0.5 * (right - left)
            height = float(y[between])
            root = math.sqrt(max(min(height, 0.999999), 0.0))
            c_est = root / (1.0 - root)
            w_level = 0.5 * (height + floor)
            w_left, w_right = dsp.half_widths(x, y, between, w_level)
            if not (math.isfinite(w_left) and math.isfinite(w_right)):
                w_left, w_right = x[i1], x[i2]
            kappa_m = (w_right - w_left) / (2.0 * (1.0 + c_est))
            g = math.sqrt(c_est * kappa_a * kappa_m)
            guess = {
                "omega_a": float(x[between]),
                "omega_m": float(x[between]),
                "kappa_a": kappa_a,
                "kappa_a1": 0.5 * kappa_a * (1.0 - math.sqrt(max(floor, 0.0))),
                "kappa_m": kappa_m,
                "g": g,
            }
            log.debug("init_guess: transparency window, C ~ %.3g", c_est)
            return guess
        width = np.nanmean([out1, out2, in1, in2])
        depth = math.sqrt(max(floor, 0.0))
        log.debug("init_guess: resolved splitting %.4g rad/s", 2.0 * half_gap)
        return {
            "omega_a": centre,
            "omega_m": centre,
            "kappa_a": float(width),
            "kappa_a1": float(width) * (1.0 - depth),
            "kappa_m": float(width),
            "g": float(half_gap),
        }

    idx = int(dips[int(np.argmin(y[dips]))])
    floor = float(y[idx])
    level = 0.5 * (floor + baseline)
    left, right = dsp.half_widths(x, y, idx, level)
    if math.isfinite(left) and math.isfinite(right):
        kappa_a = 0.5 * (right - left)
    else:
        kappa_a = abs((right if math.isfinite(right) else left) - x[idx])
    if not (math.isfinite(kappa_a) and kappa_a > 0):
        kappa_a = float(x[-1] - x[0]) / 10.0
    return {
        "omega_a": float(x[idx]),
        "omega_m": float(x[idx]),
        "kappa_a": kappa_a,
        "kappa_a1": 0.5 * kappa_a * (1.0 - math.sqrt(max(floor, 0.0))),
        "kappa_m": kappa_a,
        "g": 0.0,
    }


def default_bounds(
    model: str, init: Mapping[str, float], x, names=None
) -> dict[str, tuple[float, float]]:
    """Generous bounds around ``init``: rates within x1e-3..x1e3, frequencies on the data range."""
    x = np.asarray(x, dtype=float)
    lo_x, hi_x = float(np.min(x)), float(np.max(x))
    width = hi_x - lo_x
    bounds: dict[str, tuple[float, float]] = {}
    for name in names or MODEL_PARAMS[model]:
        value = float(init[name])
        if name == "gamma":
            bounds[name] = (0.5 * value, 2.0 * value)
        elif name in RATE_PARAMS:
            base = value if value > 0 else max(width, 1.0) * 1e-3
            bounds[name] = (base * 1e-3, base * 1e3)
        elif name == "log_energy0":
            bounds[name] = (value - 50.0, value + 50.0)
        elif name == "omega_m0":
            reach = max(width, abs(value), 1.0)
            bounds[name] = (value - 2.0 * reach, value + 2.0 * reach)
        else:
            bounds[name] = (min(lo_x, value) - width, max(hi_x, value) + width)
    return bounds


def perturb(
    init: Mapping[str, float],
    rng: np.random.Generator,
    fraction: float = 0.3,
    freq_scale: float | None = None,
) -> dict[str, float]:
    """Random multiplicative perturbation of rates; frequencies move by
    ``fraction * freq_scale`` (default: the largest rate)."""
    out = dict(init)
    rates = [v for k, v in init.items() if k in RATE_PARAMS and k != "gamma"]
    scale = freq_scale if freq_scale is not None else max(rates, default=0.0)
    for name, value in init.items():
        u = float(rng.uniform(-fraction, fraction))
        if name in RATE_PARAMS:
            out[name] = value * (1.0 + u)
        elif name in ("omega_a", "omega_m", "omega_m0"):
            out[name] = value + u * scale
    return out


def mirrored(params: Mapping[str, float]) -> dict[str, float]:
    """The same start on the other coupling branch, kappa_a1 -> kappa_a - kappa_a1."""
    out = dict(params)
    out["kappa_a1"] = max(params["kappa_a"] - params["kappa_a1"], 1e-3 * params["kappa_a1"])
    return out


def select_branch(results: Sequence[FitResult], rtol: float = 1e-6) -> FitResult:
    """Pick among spectrum fits that explain |r|^2 equally well.

    |r|^2 is unchanged when a zero of r moves to its mirror image across the
    real frequency axis, and every such move into the upper half plane raises
    kappa_a1. Of the fits whose residual ties the best one, a converged fit
    with the smallest kappa_a1 is returned.
    """
    if not results:
        raise ValueError("no fit results to choose from")
    best = min(r.residual_norm for r in results)
    floor = RESIDUAL_RTOL * max(r.data_norm for r in results)
    tied = [r for r in results if r.residual_norm <= best * (1.0 + rtol) + floor]
    choice = min(tied, key=lambda r: (not r.converged, r.params["kappa_a1"]))
    if len(tied) > 1:
        log.info(
            "%d fits tie at residual %.6g; kept kappa_a1 = %.6g",
            len(tied),
            best,
            choice.params["kappa_a1"],
        )
    return choice


def fit_field_map(
    omega,
    b,
    power,
    init: Mapping[str, float],
    bounds: Mapping[str, tuple[float, float]] | None = None,
    fixed: Mapping[str, float] | None = None,
    weights=None,
) -> FitResult:
    """Joint fit of all bias rows sharing (g, kappas, w_a, gamma, w_m0)."""
    fixed = dict(fixed or {})
    names = [n for n in MODEL_PARAMS["field_map"] if n not in fixed]
    bounds = dict(bounds or default_bounds("field_map", init, omega, names))
    problem = FitProblem(
        model="field_map",
        x=omega,
        y=power,
        b=b,
        free={n: bounds[n] for n in names},
        fixed=fixed,
        weights=weights,
    )
    return fit(problem, init)


def fit_lorentzian(
    omega,
    power,
    init: Mapping[str, float] | None = None,
    bounds: Mapping[str, tuple[float, float]] | None = None,
    weights=None,
) -> FitResult:
    """Single-Lorentzian fit (the uncoupled spectrum model); kappa_a is the
    effective cavity decay rate."""
    start = dict(init or init_guess(omega, power))
    names = ["omega_a", "kappa_a", "kappa_a1"]
    bounds = dict(bounds or default_bounds("spectrum", start, omega, names=names))
    problem = FitProblem(
        model="spectrum",
        x=omega,
        y=power,
        free={n: bounds[n] for n in names},
        fixed={"omega_m": start["omega_a"], "kappa_m": start["kappa_a"], "g": 0.0},
        weights=weights,
    )
    return fit(problem, {n: start[n] for n in names})


def fit_decay(t, energy, init: Mapping[str, float] | None = None) -> FitResult:
    """Exponential energy decay; the result's ``kappa`` is the amplitude rate."""
    t = np.asarray(t, dtype=float)
    e = np.asarray(energy, dtype=float)
    if init is None:
        if t.size < 2 or np.any(e <= 0):
            raise DomainError("decay data need >= 2 positive samples")
        slope, intercept = np.polyfit(t, np.log(e), 1)
        if slope >= 0:
            raise DomainError("energy does not decay")
        init = {"kappa": -0.5 * float(slope), "log_energy0": float(intercept)}
    bounds = default_bounds("decay", init, t)
    problem = FitProblem(model="decay", x=t, y=e, free=bounds)
    return fit(problem, init)


def derived_quantities(result: FitResult | Mapping[str, float]) -> Derived:
    params = result.params if isinstance(result, FitResult) else result
    g = float(params["g"])
    C = cooperativity(g, float(params["kappa_a"]), float(params["kappa_m"]))
    period = math.pi / g if g > 0 else math.inf
    return Derived(C=C, F_P=1.0 + C, splitting=2.0 * g, rabi_period=period)


def crossing_field(result: FitResult | Mapping[str, float]) -> float:
    """Bias field at which the fitted magnon dispersion meets the cavity."""
    params = result.params if isinstance(result, FitResult) else result
    return (float(params["omega_a"]) - float(params["omega_m0"])) / float(params["gamma"])


def synthesize(
    system: CoupledSystem,
    grid: FrequencyGrid,
    noise: float = 0.0,
    seed: int | None = None,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """Model |r|^2 on ``grid`` plus additive Gaussian noise of std ``noise``."""
    power = np.abs(reflection(system, grid.omega)) ** 2
    if noise > 0:
        gen = rng if rng is not None else np.random.default_rng(seed)
        power = power + noise * gen.standard_normal(power.shape)
    elif noise < 0:
        raise DomainError("noise must be >= 0")
    return power
