"""Per-seed episode-return series: storage, aggregation, smoothing, CSV I/O."""
from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np


class ValidationError(ValueError):
    """Raised when an input violates a documented precondition."""


def _frozen(values, ndim: int) -> np.ndarray:
    arr = np.array(values, dtype=np.float64)
    if arr.ndim != ndim:
        raise ValidationError(f"expected a {ndim}-d array, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class PerformanceMatrix:
    """Episode returns for ``M`` seeds over ``N`` episodes.

    Row ``i`` holds the returns obtained under ``seeds[i]``; column ``t``
    is episode ``t + 1`` (CSV files number episodes from 0).
    """

    seeds: tuple[int, ...]
    returns: np.ndarray
    label: str = ""

    def __post_init__(self):
        seeds = tuple(int(s) for s in self.seeds)
        try:
            returns = _frozen(self.returns, 2)
        except ValueError as exc:  # ragged input
            raise ValidationError(f"returns must be rectangular: {exc}") from None
        if len(seeds) == 0 or returns.shape[1] == 0:
            raise ValidationError("performance matrix needs at least one seed and one episode")
        if any(s < 0 for s in seeds):
            raise ValidationError("seeds must be non-negative integers")
        if len(set(seeds)) != len(seeds):
            raise ValidationError(f"duplicate seeds in {seeds}")
        if returns.shape[0] != len(seeds):
            raise ValidationError(
                f"{len(seeds)} seeds but {returns.shape[0]} rows of returns"
            )
        if not np.all(np.isfinite(returns)):
            raise ValidationError("returns must be finite")
        object.__setattr__(self, "seeds", seeds)
        object.__setattr__(self, "returns", returns)

    @property
    def n_seeds(self) -> int:
        return len(self.seeds)

    @property
    def n_episodes(self) -> int:
        return self.returns.shape[1]

    def __eq__(self, other):
        if not isinstance(other, PerformanceMatrix):
            return NotImplemented
        return (
            self.seeds == other.seeds
            and self.label == other.label
            and np.array_equal(self.returns, other.returns)
        )

    __hash__ = None  # type: ignore[assignment]


@dataclass(frozen=True, eq=False)
class MeanSeries:
    values: np.ndarray
    source: str = ""

    def __post_init__(self):
        values = _frozen(self.values, 1)
        if values.size == 0:
            raise ValidationError("series must be non-empty")
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return self.values.shape[0]

    def __eq__(self, other):
        if not isinstance(other, MeanSeries):
            return NotImplemented
        return self.source == other.source and np.array_equal(self.values, other.values)

    __hash__ = None  # type: ignore[assignment]


def aggregate_mean(matrix: PerformanceMatrix) -> MeanSeries:
    """Seed-averaged performance at each episode."""
    if not isinstance(matrix, PerformanceMatrix):
        raise ValidationError("aggregate_mean expects a PerformanceMatrix")
    return MeanSeries(matrix.returns.sum(axis=0) / matrix.n_seeds, source=matrix.label)


def rolling_mean(series: MeanSeries, window: int = 25) -> MeanSeries:
    """Trailing mean over ``window`` episodes.

    The first ``window - 1`` points average whatever history exists, so the
    output has the same length as the input.
    """
    if int(window) != window or window < 1:
        raise ValidationError(f"window must be a positive integer, got {window!r}")
    window = int(window)
    y = series.values
    if window == 1:
        return MeanSeries(y, source=series.source)
    out = np.array([y[max(0, t - window + 1) : t + 1].mean() for t in range(y.size)])
    # a rounded mean may land one ulp outside the data range
    return MeanSeries(np.clip(out, y.min(), y.max()), source=series.source)


@dataclass(frozen=True)
class EqualityReport:
    passed: bool
    tol: float
    T: int
    max_abs_diff: float
    per_seed: dict[int, float]
    # first offending (seed, episode index) with |diff| > tol, if any
    first_violation: tuple[int, int] | None = None


def check_pre_treatment_equality(
    treatment: PerformanceMatrix,
    control: PerformanceMatrix,
    T: int,
    tol: float = 0.0,
) -> EqualityReport:
    """Compare the two groups on episodes before ``T`` (1-based).

    With ``tol=0`` this is an exact, bitwise comparison.
    """
    if treatment.seeds != control.seeds:
        raise ValidationError(
            f"seed lists differ: {treatment.seeds} vs {control.seeds}"
        )
    n = treatment.n_episodes
    if control.n_episodes != n:
        raise ValidationError(
            f"episode counts differ: {n} vs {control.n_episodes}"
        )
    if not 1 <= T <= n:
        raise ValidationError(f"T must lie in [1, {n}], got {T}")
    if tol < 0:
        raise ValidationError("tol must be non-negative")
    diff = np.abs(treatment.returns[:, : T - 1] - control.returns[:, : T - 1])
    per_seed = {
        seed: float(row.max()) if row.size else 0.0
        for seed, row in zip(treatment.seeds, diff)
    }
    worst = max(per_seed.values())
    first = None
    bad = np.argwhere(diff > tol)
    if bad.size:
        i, t = bad[0]
        first = (treatment.seeds[int(i)], int(t))
    return EqualityReport(
        passed=first is None,
        tol=float(tol),
        T=int(T),
        max_abs_diff=worst,
        per_seed=per_seed,
        first_violation=first,
    )


# --- CSV -------------------------------------------------------------------

CSV_HEADER = ("seed", "episode", "return")


def matrix_to_csv(matrix: PerformanceMatrix) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for seed, row in zip(matrix.seeds, matrix.returns.tolist()):
        for t, value in enumerate(row):
            writer.writerow((seed, t, repr(value)))
    return buf.getvalue()


def matrix_from_csv(text: str, label: str = "") -> PerformanceMatrix:
    """Parse long-format ``seed,episode,return`` rows.

    Seeds keep their order of first appearance; episodes must run 0..N-1
    for every seed.
    """
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ValidationError("empty CSV") from None
    if tuple(h.strip() for h in header) != CSV_HEADER:
        raise ValidationError(f"expected header {','.join(CSV_HEADER)}, got {header}")
    rows: dict[int, dict[int, float]] = {}
    for lineno, rec in enumerate(reader, start=2):
        if not rec:
            continue
        if len(rec) != 3:
            raise ValidationError(f"line {lineno}: expected 3 fields, got {len(rec)}")
        try:
            seed, episode, value = int(rec[0]), int(rec[1]), float(rec[2])
        except ValueError as exc:
            raise ValidationError(f"line {lineno}: {exc}") from None
        episodes = rows.setdefault(seed, {})
        if episode in episodes:
            raise ValidationError(f"line {lineno}: duplicate episode {episode} for seed {seed}")
        episodes[episode] = value
    if not rows:
        raise ValidationError("CSV has no data rows")
    lengths = {len(e) for e in rows.values()}
    if len(lengths) != 1:
        raise ValidationError(f"ragged data: episode counts per seed {sorted(lengths)}")
    n = lengths.pop()
    data = []
    for seed, episodes in rows.items():
        if set(episodes) != set(range(n)):
            raise ValidationError(f"seed {seed}: episodes must be contiguous from 0")
        data.append([episodes[t] for t in range(n)])
    return PerformanceMatrix(tuple(rows), np.array(data), label=label)


def write_csv(matrix: PerformanceMatrix, path: str | os.PathLike) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(matrix_to_csv(matrix))


def read_csv(path: str | os.PathLike, label: str | None = None) -> PerformanceMatrix:
    with open(path, newline="") as fh:
        text = fh.read()
    return matrix_from_csv(text, label=os.fspath(path) if label is None else label)
