"""End-to-end evaluation over environments x algorithms x shifts.

Controlled shifts get both analyses: a difference-in-differences impact
report against the shift-free twin run, and a damped-trend forecast of
the treated series. Random shifts get the forecast only. Algorithms are
then compared pairwise within each (environment, shift): by cumulative
impact at the last episode, and by whether their prediction bands
separate at the end of the horizon.
"""
from __future__ import annotations

import itertools
import json
import os
import platform
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np
import scipy

from . import __version__
from .forecast import (
    DEFAULT_HORIZON,
    DEFAULT_LEVEL,
    DEFAULT_PATHS,
    DEFAULT_PHI_BOUNDS,
    ForecastBand,
    compare_trends,
    forecast_series,
)
from .harness import AgentSpec, EnvironmentSpec, RunConfig, ShiftSpec, build_grouped_experiment, run
from .harness.run import DEFAULT_SEEDS
from .impact import PERIOD_CONVENTION, ImpactReport, build_impact_report, compare_cumulative
from .kernels import BACKEND
from .plots import render_forecast_svg, render_impact_svg
from .series import MeanSeries, PerformanceMatrix, ValidationError, aggregate_mean, matrix_to_csv, rolling_mean

DEFAULT_WINDOW = 25
REPORT_SCHEMA_VERSION = 1


@dataclass(frozen=True)
class ProtocolConfig:
    environments: tuple[EnvironmentSpec, ...]
    algorithms: tuple[AgentSpec, ...]
    shifts: tuple[ShiftSpec, ...]
    impact_episodes: int
    seeds: tuple[int, ...] = DEFAULT_SEEDS
    forecast_horizon: int = DEFAULT_HORIZON
    interval_level: float = DEFAULT_LEVEL
    rolling_window: int = DEFAULT_WINDOW
    bootstrap_paths: int = DEFAULT_PATHS
    noise_seed: int = 0
    phi_bounds: tuple[float, float] = DEFAULT_PHI_BOUNDS

    def __post_init__(self):
        for name in ("environments", "algorithms", "shifts", "seeds"):
            value = tuple(getattr(self, name))
            if not value:
                raise ValidationError(f"protocol needs at least one entry in {name}")
            object.__setattr__(self, name, value)
        object.__setattr__(self, "phi_bounds", tuple(float(v) for v in self.phi_bounds))
        for name in ("environments", "algorithms", "shifts"):
            names = [item.name for item in getattr(self, name)]
            if len(set(names)) != len(names):
                raise ValidationError(f"{name} must have unique names, got {names}")
        if int(self.impact_episodes) != self.impact_episodes or self.impact_episodes < 1:
            raise ValidationError("impact_episodes must be a positive integer")
        if self.forecast_horizon < 1:
            raise ValidationError("forecast_horizon must be positive")
        if not 0.0 < self.interval_level < 1.0:
            raise ValidationError("interval_level must lie in (0, 1)")
        if self.rolling_window < 1:
            raise ValidationError("rolling_window must be positive")

    def parameters(self) -> dict:
        return {
            "seeds": list(self.seeds),
            "n_seeds": len(self.seeds),
            "impact_episodes": self.impact_episodes,
            "forecast_horizon": self.forecast_horizon,
            "interval_level": self.interval_level,
            "rolling_window": self.rolling_window,
            "bootstrap_paths": self.bootstrap_paths,
            "noise_seed": self.noise_seed,
            "phi_bounds": list(self.phi_bounds),
        }

    def to_dict(self) -> dict:
        return {
            "environments": [e.to_dict() for e in self.environments],
            "algorithms": [a.to_dict() for a in self.algorithms],
            "shifts": [s.to_dict() for s in self.shifts],
            **self.parameters(),
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "ProtocolConfig":
        data = dict(data)
        kwargs = {
            "environments": tuple(EnvironmentSpec.from_dict(e) for e in data.pop("environments")),
            "algorithms": tuple(AgentSpec.from_dict(a) for a in data.pop("algorithms")),
            "shifts": tuple(ShiftSpec.from_dict(s) for s in data.pop("shifts")),
            "impact_episodes": int(data.pop("impact_episodes")),
        }
        data.pop("n_seeds", None)
        for key in ("seeds", "phi_bounds"):
            if key in data:
                data[key] = tuple(data[key])
        return cls(**kwargs, **data)

    @classmethod
    def from_json(cls, path) -> "ProtocolConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


@dataclass(eq=False)
class CellResult:
    env: str
    algorithm: str
    shift: str
    status: str = "ok"
    reason: str | None = None
    branches: tuple[str, ...] = ()
    treatment: PerformanceMatrix | None = None
    control: PerformanceMatrix | None = None
    impact: ImpactReport | None = None
    history: MeanSeries | None = None
    forecast: ForecastBand | None = None

    @property
    def key(self) -> tuple[str, str, str]:
        return (self.env, self.algorithm, self.shift)

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    def to_dict(self) -> dict:
        d = {"env": self.env, "algorithm": self.algorithm, "shift": self.shift, "status": self.status}
        if not self.ok:
            d["reason"] = self.reason
            return d
        d["branches"] = list(self.branches)
        d["impact"] = self.impact.to_dict() if self.impact is not None else None
        d["history"] = self.history.values.tolist()
        d["forecast"] = self.forecast.to_dict()
        return d


@dataclass(eq=False)
class ProtocolReport:
    config: ProtocolConfig
    cells: list[CellResult]
    comparisons: list[dict] = field(default_factory=list)

    def cell(self, env: str, algorithm: str, shift: str) -> CellResult:
        for c in self.cells:
            if c.key == (env, algorithm, shift):
                return c
        raise KeyError((env, algorithm, shift))

    def to_dict(self) -> dict:
        return {
            "schema_version": REPORT_SCHEMA_VERSION,
            "parameters": {
                **self.config.parameters(),
                "period_convention": PERIOD_CONVENTION,
                "interval_method": "residual bootstrap, quantile offsets made non-decreasing over the horizon",
                "trend_rule": "verdict requires disjoint intervals at the final forecast step; overlap_mask gives every step",
                "observation_attack": "gradient-free sign perturbation of magnitude epsilon (FGSM analog), clipped to [0, 1]",
            },
            "versions": {
                "shifteval": __version__,
                "kernel_backend": BACKEND,
                "numpy": np.__version__,
                "scipy": scipy.__version__,
                "python": platform.python_version(),
            },
            "config": self.config.to_dict(),
            "cells": [c.to_dict() for c in self.cells],
            "comparisons": self.comparisons,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def _run_cell(config: ProtocolConfig, env: EnvironmentSpec, algo: AgentSpec, shift: ShiftSpec) -> CellResult:
    cell = CellResult(env.name, algo.name, shift.name)
    try:
        run_cfg = RunConfig(
            env=env,
            agents=(algo,),
            n_episodes=config.impact_episodes,
            seeds=config.seeds,
            shift=shift,
            label=f"{env.name}/{algo.name}/{shift.name}",
        )
        if shift.is_controlled:
            exp = build_grouped_experiment(run_cfg)
            cell.treatment, cell.control = exp.treatment, exp.control
            cell.impact = build_impact_report(exp, config.rolling_window)
            cell.branches = ("2a", "2b")
        else:
            cell.treatment = run(run_cfg)
            cell.branches = ("2b",)
        cell.history = rolling_mean(aggregate_mean(cell.treatment), config.rolling_window)
        _, cell.forecast = forecast_series(
            cell.history,
            config.forecast_horizon,
            config.interval_level,
            config.bootstrap_paths,
            config.noise_seed,
            config.phi_bounds,
        )
    except Exception as exc:  # one failing cell must not sink the protocol
        return CellResult(env.name, algo.name, shift.name, status="skipped", reason=f"{type(exc).__name__}: {exc}")
    return cell


def run_protocol(config: ProtocolConfig) -> ProtocolReport:
    envs = sorted(config.environments, key=lambda e: e.name)
    algos = sorted(config.algorithms, key=lambda a: a.name)
    shifts = sorted(config.shifts, key=lambda s: s.name)
    cells = [_run_cell(config, e, a, s) for e in envs for a in algos for s in shifts]
    report = ProtocolReport(config, cells)
    for env in envs:
        for shift in shifts:
            group = [c for c in cells if c.env == env.name and c.shift == shift.name and c.ok]
            for a, b in itertools.combinations(group, 2):
                entry = {"env": env.name, "shift": shift.name, "a": a.algorithm, "b": b.algorithm}
                if a.impact is not None and b.impact is not None:
                    entry["cumulative"] = {
                        "a_final": a.impact.final_cumulative,
                        "b_final": b.impact.final_cumulative,
                        "better": compare_cumulative(a.impact, b.impact).value,
                    }
                entry["trend"] = compare_trends(a.forecast, b.forecast).to_dict()
                report.comparisons.append(entry)
    return report


# --- export ----------------------------------------------------------------

class ReportExportError(OSError):
    pass


def _slug(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]+", "_", name).strip("_") or "unnamed"


def load_report_schema() -> dict:
    text = resources.files("shifteval").joinpath("schemas/report.schema.json").read_text()
    return json.loads(text)


def validate_report(data: dict) -> None:
    import jsonschema

    jsonschema.validate(data, load_report_schema())


def export_report(report: ProtocolReport, path, plots: bool = True) -> list[Path]:
    """Write the report tree and return the files written.

    Layout::

        <path>/report.json
        <path>/cells/<env>/<algorithm>/<shift>/treatment.csv
        <path>/cells/<env>/<algorithm>/<shift>/control.csv   (controlled shifts)
        <path>/cells/<env>/<algorithm>/<shift>/impact.svg    (controlled shifts)
        <path>/cells/<env>/<algorithm>/<shift>/forecast.svg  (other shifts)

    Skipped cells produce no files. ``plots=False`` omits the SVGs.
    """
    root = Path(path)
    data = report.to_dict()
    written: list[Path] = []

    def put(target: Path, text: str) -> None:
        try:
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_text(text)
        except OSError as exc:
            raise ReportExportError(f"cannot write {target}: {exc.strerror or exc}") from exc
        written.append(target)

    for cell, entry in zip(report.cells, data["cells"]):
        if not cell.ok:
            continue
        rel = Path("cells", _slug(cell.env), _slug(cell.algorithm), _slug(cell.shift))
        files = {"treatment_csv": str(rel / "treatment.csv")}
        put(root / rel / "treatment.csv", matrix_to_csv(cell.treatment))
        if cell.control is not None:
            files["control_csv"] = str(rel / "control.csv")
            put(root / rel / "control.csv", matrix_to_csv(cell.control))
        if plots:
            title = " / ".join(cell.key)
            if cell.impact is not None:
                files["svg"] = str(rel / "impact.svg")
                put(root / rel / "impact.svg", render_impact_svg(cell.impact, title))
            else:
                files["svg"] = str(rel / "forecast.svg")
                put(root / rel / "forecast.svg", render_forecast_svg(cell.history, [(cell.algorithm, cell.forecast)], title))
        entry["files"] = {k: v.replace(os.sep, "/") for k, v in files.items()}

    validate_report(data)
    put(root / "report.json", json.dumps(data, indent=2) + "\n")
    return written
