"""Holt's linear method with a damped trend, bootstrap prediction bands,
and the interval-overlap comparison between two agents' forecasts.

Notation follows the usual forecasting texts: level ``l``, trend ``b``,
smoothing weights ``alpha`` and ``beta`` (the latter is often written
beta*), damping ``phi``. For observations ``y_1..y_N``::

    yhat_t = l_{t-1} + phi * b_{t-1}
    l_t    = alpha * y_t + (1 - alpha) * yhat_t
    b_t    = beta * (l_t - l_{t-1}) + (1 - beta) * phi * b_{t-1}
    yhat_{N+h|N} = l_N + (phi + phi**2 + ... + phi**h) * b_N
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from . import kernels
from .series import MeanSeries, ValidationError

DEFAULT_PHI_BOUNDS = (0.8, 0.98)
DEFAULT_HORIZON = 100
DEFAULT_LEVEL = 0.99
DEFAULT_PATHS = 5000

_GRID_SMOOTHING = np.linspace(0.0, 1.0, 21)
_GRID_PHI_POINTS = 10


def _as_array(y) -> np.ndarray:
    if isinstance(y, MeanSeries):
        return y.values
    arr = np.asarray(y, dtype=np.float64)
    if arr.ndim != 1:
        raise ValidationError("series must be one-dimensional")
    return arr


@dataclass(frozen=True)
class HoltDampedParams:
    alpha: float
    beta: float
    phi: float
    l0: float
    b0: float

    def __post_init__(self):
        for name in ("alpha", "beta", "phi", "l0", "b0"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValidationError(f"{name} must be finite")
            object.__setattr__(self, name, value)
        if not 0.0 <= self.alpha <= 1.0:
            raise ValidationError(f"alpha must lie in [0, 1], got {self.alpha}")
        if not 0.0 <= self.beta <= 1.0:
            raise ValidationError(f"beta must lie in [0, 1], got {self.beta}")
        if not 0.0 < self.phi < 1.0:
            raise ValidationError(f"phi must lie in (0, 1), got {self.phi}")


@dataclass(frozen=True, eq=False)
class FittedTrendModel:
    """Result of running the recursion over a training series.

    ``levels[t]``/``trends[t]`` are the states after observation ``t``;
    ``fitted[t]`` is the one-step forecast made before seeing it.
    ``sigma`` is the root mean squared residual.
    """

    params: HoltDampedParams
    observed: np.ndarray
    levels: np.ndarray
    trends: np.ndarray
    fitted: np.ndarray
    residuals: np.ndarray
    sse: float
    sigma: float

    @property
    def n_obs(self) -> int:
        return self.observed.shape[0]

    @property
    def final_level(self) -> float:
        return float(self.levels[-1])

    @property
    def final_trend(self) -> float:
        return float(self.trends[-1])


def smooth(params: HoltDampedParams, y) -> FittedTrendModel:
    y = _as_array(y)
    if y.size == 0:
        raise ValidationError("cannot smooth an empty series")
    levels, trends, fitted = kernels.holt_filter(
        y, params.alpha, params.beta, params.phi, params.l0, params.b0
    )
    residuals = y - fitted
    sse = float(np.dot(residuals, residuals))
    arrays = [np.array(a) for a in (y, levels, trends, fitted, residuals)]
    for a in arrays:
        a.setflags(write=False)
    return FittedTrendModel(
        params,
        *arrays,
        sse=sse,
        sigma=math.sqrt(sse / y.size),
    )


def _damped_sum(phi: float, h: np.ndarray) -> np.ndarray:
    # phi + phi**2 + ... + phi**h
    return phi * (1.0 - phi ** h) / (1.0 - phi)


def forecast_point(model: FittedTrendModel, H: int) -> np.ndarray:
    if int(H) != H or H < 1:
        raise ValidationError(f"horizon must be a positive integer, got {H!r}")
    h = np.arange(1, int(H) + 1, dtype=np.float64)
    return model.final_level + _damped_sum(model.params.phi, h) * model.final_trend


def initial_state(y: np.ndarray) -> tuple[float, float]:
    return float(y[0]), float(y[1] - y[0])


def fit(y, phi_bounds: tuple[float, float] = DEFAULT_PHI_BOUNDS) -> FittedTrendModel:
    """Least-squares fit of ``alpha``, ``beta`` and ``phi``.

    The initial state is fixed at ``l0 = y[0]``, ``b0 = y[1] - y[0]``.
    A coarse grid (alpha, beta in steps of 0.05; ten phi values spanning
    ``phi_bounds``) picks a start for a bounded Nelder-Mead refinement.
    The better of the two is returned. Constant input gives zero SSE at
    the first grid cell.
    """
    y = _as_array(y)
    if y.size < 4:
        raise ValidationError(f"need at least 4 observations to fit, got {y.size}")
    lo, hi = (float(v) for v in phi_bounds)
    if not 0.0 < lo <= hi < 1.0:
        raise ValidationError(f"phi bounds must satisfy 0 < lo <= hi < 1, got {phi_bounds}")
    l0, b0 = initial_state(y)
    phis = np.linspace(lo, hi, _GRID_PHI_POINTS)
    grid = kernels.holt_grid_sse(y, _GRID_SMOOTHING, _GRID_SMOOTHING, phis, l0, b0)
    i, j, k = np.unravel_index(int(np.argmin(grid)), grid.shape)
    best = np.array([_GRID_SMOOTHING[i], _GRID_SMOOTHING[j], phis[k]])
    best_sse = float(grid[i, j, k])

    if best_sse > 0.0:
        res = minimize(
            lambda x: kernels.holt_sse(y, x[0], x[1], x[2], l0, b0),
            best,
            method="Nelder-Mead",
            bounds=[(0.0, 1.0), (0.0, 1.0), (lo, hi)],
            options={"xatol": 1e-8, "fatol": 1e-12, "maxiter": 2000},
        )
        x = np.clip(res.x, [0.0, 0.0, lo], [1.0, 1.0, hi])
        refined = kernels.holt_sse(y, x[0], x[1], x[2], l0, b0)
        if refined < best_sse:
            best, best_sse = x, refined

    params = HoltDampedParams(best[0], best[1], best[2], l0, b0)
    return smooth(params, y)


@dataclass(frozen=True, eq=False)
class ForecastBand:
    horizon: int
    level: float
    point: np.ndarray
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        for name in ("point", "lower", "upper"):
            arr = np.array(getattr(self, name), dtype=np.float64)
            if arr.shape != (self.horizon,):
                raise ValidationError(f"{name} must have length {self.horizon}")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if not 0.0 < self.level < 1.0:
            raise ValidationError(f"level must lie in (0, 1), got {self.level}")
        if np.any(self.lower > self.point) or np.any(self.point > self.upper):
            raise ValidationError("band must satisfy lower <= point <= upper")

    @property
    def width(self) -> np.ndarray:
        return self.upper - self.lower

    def to_dict(self) -> dict:
        return {
            "horizon": int(self.horizon),
            "level": float(self.level),
            "point": self.point.tolist(),
            "lower": self.lower.tolist(),
            "upper": self.upper.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ForecastBand":
        return cls(int(data["horizon"]), float(data["level"]), data["point"], data["lower"], data["upper"])


def prediction_interval(
    model: FittedTrendModel,
    H: int = DEFAULT_HORIZON,
    level: float = DEFAULT_LEVEL,
    paths: int = DEFAULT_PATHS,
    noise_seed: int = 0,
) -> ForecastBand:
    """Residual-bootstrap prediction band around the point forecast.

    Each of ``paths`` trajectories runs the recursion ``H`` steps ahead,
    adding a residual drawn with replacement at every step. The band at
    step ``h`` spans the empirical ``(1 - level)/2`` and
    ``1 - (1 - level)/2`` quantiles, measured as offsets from the
    noise-free trajectory. Offsets are then made non-decreasing in ``h``
    with a running maximum.
    """
    point = forecast_point(model, H)
    if not 0.0 < level < 1.0:
        raise ValidationError(f"level must lie in (0, 1), got {level}")
    if int(paths) != paths or paths < 1:
        raise ValidationError(f"paths must be a positive integer, got {paths!r}")
    resid = model.residuals
    if resid.size < 2:
        raise ValidationError("need at least 2 residuals to bootstrap a prediction band")
    H, paths = int(H), int(paths)
    p = model.params
    rng = np.random.default_rng(int(noise_seed))
    shocks = resid[rng.integers(0, resid.size, size=(paths, H))]
    sims = kernels.simulate_paths(model.final_level, model.final_trend, p.alpha, p.beta, p.phi, shocks)
    center = kernels.simulate_paths(
        model.final_level, model.final_trend, p.alpha, p.beta, p.phi, np.zeros((1, H))
    )[0]
    tail = (1.0 - level) / 2.0
    q_lo, q_hi = np.quantile(sims, [tail, 1.0 - tail], axis=0)
    below = np.maximum.accumulate(np.maximum(center - q_lo, 0.0))
    above = np.maximum.accumulate(np.maximum(q_hi - center, 0.0))
    return ForecastBand(H, float(level), point, point - below, point + above)


class Verdict(str, enum.Enum):
    HIGHER = "SignificantlyHigher"
    LOWER = "SignificantlyLower"
    NO_DIFFERENCE = "NoSignificantDifference"


@dataclass(frozen=True)
class TrendComparison:
    """Outcome of comparing band ``a`` against band ``b``.

    The verdict only looks at the last forecast step; ``overlap_mask`` is
    kept so callers can insist on disjoint intervals at every step.
    """

    verdict: Verdict
    overlap_mask: tuple[bool, ...]
    final_step_disjoint: bool

    @property
    def all_steps_disjoint(self) -> bool:
        return not any(self.overlap_mask)

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "overlap_mask": list(self.overlap_mask),
            "final_step_disjoint": self.final_step_disjoint,
            "all_steps_disjoint": self.all_steps_disjoint,
        }


def compare_trends(a: ForecastBand, b: ForecastBand) -> TrendComparison:
    if a.horizon != b.horizon:
        raise ValidationError(f"horizons differ: {a.horizon} vs {b.horizon}")
    if a.level != b.level:
        raise ValidationError(f"levels differ: {a.level} vs {b.level}")
    overlap = ~((a.lower > b.upper) | (b.lower > a.upper))
    disjoint_end = not bool(overlap[-1])
    verdict = Verdict.NO_DIFFERENCE
    if disjoint_end:
        if a.point[-1] > b.point[-1]:
            verdict = Verdict.HIGHER
        elif a.point[-1] < b.point[-1]:
            verdict = Verdict.LOWER
    return TrendComparison(verdict, tuple(bool(v) for v in overlap), disjoint_end)


def forecast_series(
    y,
    H: int = DEFAULT_HORIZON,
    level: float = DEFAULT_LEVEL,
    paths: int = DEFAULT_PATHS,
    noise_seed: int = 0,
    phi_bounds: Sequence[float] = DEFAULT_PHI_BOUNDS,
) -> tuple[FittedTrendModel, ForecastBand]:
    """Fit then forecast; convenience wrapper used by the protocol and CLI."""
    model = fit(y, tuple(phi_bounds))
    return model, prediction_interval(model, H, level, paths, noise_seed)
