"""Difference-in-differences impact of a controlled shift.

Episodes are numbered from 1. With intervention episode ``T`` the
pre-period is episodes ``1..T-1`` and the post-period is ``T..N``; the
intervention episode itself counts as treated.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .series import (
    MeanSeries,
    PerformanceMatrix,
    ValidationError,
    aggregate_mean,
    rolling_mean,
)

PERIOD_CONVENTION = "pre: episodes 1..T-1, post: episodes T..N (episode T is post-treatment)"


@dataclass(frozen=True)
class GroupedExperiment:
    treatment: PerformanceMatrix
    control: PerformanceMatrix
    intervention_episode: int

    def __post_init__(self):
        if self.treatment.seeds != self.control.seeds:
            raise ValidationError("treatment and control must share the same seed list")
        if self.treatment.n_episodes != self.control.n_episodes:
            raise ValidationError("treatment and control must have the same number of episodes")
        T = self.intervention_episode
        if int(T) != T or not 1 <= T <= self.n_episodes:
            raise ValidationError(f"intervention episode must lie in [1, {self.n_episodes}], got {T}")
        object.__setattr__(self, "intervention_episode", int(T))

    @property
    def n_episodes(self) -> int:
        return self.treatment.n_episodes

    @property
    def T(self) -> int:
        return self.intervention_episode

    def swapped(self) -> "GroupedExperiment":
        return GroupedExperiment(self.control, self.treatment, self.T)


def _periods(exp: GroupedExperiment):
    split = exp.T - 1
    treated = aggregate_mean(exp.treatment).values
    control = aggregate_mean(exp.control).values
    if split == 0:
        raise ValidationError("pre-treatment period is empty (T = 1)")
    return treated[:split], treated[split:], control[:split], control[split:]


def did_full(exp: GroupedExperiment) -> float:
    """(post - pre change of treated) minus (post - pre change of control)."""
    t_pre, t_post, c_pre, c_post = _periods(exp)
    return float((t_post.mean() - t_pre.mean()) - (c_post.mean() - c_pre.mean()))


def did_post(exp: GroupedExperiment) -> float:
    """Post-period gap; equals :func:`did_full` when the pre-periods match."""
    _, t_post, _, c_post = _periods(exp)
    return float(t_post.mean() - c_post.mean())


def pointwise_impact(exp: GroupedExperiment) -> MeanSeries:
    diff = aggregate_mean(exp.treatment).values - aggregate_mean(exp.control).values
    return MeanSeries(diff, source="pointwise")


def cumulative_impact(pointwise: MeanSeries, T: int) -> MeanSeries:
    n = len(pointwise)
    if int(T) != T or not 1 <= T <= n:
        raise ValidationError(f"T must lie in [1, {n}], got {T}")
    out = np.zeros(n)
    out[T - 1 :] = np.cumsum(pointwise.values[T - 1 :])
    return MeanSeries(out, source="cumulative")


@dataclass(frozen=True, eq=False)
class ImpactReport:
    T: int
    window: int
    original_treated: MeanSeries
    original_counterfactual: MeanSeries
    pointwise: MeanSeries
    cumulative: MeanSeries
    did_full: float
    did_post: float
    pre_gap: float
    pre_gap_tol: float = 0.0

    @property
    def n_episodes(self) -> int:
        return len(self.pointwise)

    @property
    def fixed_seed_violation(self) -> bool:
        """True when treated and control differ before the intervention."""
        return self.pre_gap > self.pre_gap_tol

    @property
    def final_cumulative(self) -> float:
        return float(self.cumulative.values[-1])

    def to_dict(self) -> dict:
        return {
            "T": self.T,
            "window": self.window,
            "period_convention": PERIOD_CONVENTION,
            "did_full": self.did_full,
            "did_post": self.did_post,
            "pre_gap": self.pre_gap,
            "pre_gap_tol": self.pre_gap_tol,
            "fixed_seed_violation": self.fixed_seed_violation,
            "pointwise": self.pointwise.values.tolist(),
            "cumulative": self.cumulative.values.tolist(),
            "original_treated": self.original_treated.values.tolist(),
            "original_counterfactual": self.original_counterfactual.values.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ImpactReport":
        return cls(
            T=int(data["T"]),
            window=int(data["window"]),
            original_treated=MeanSeries(data["original_treated"], "treated"),
            original_counterfactual=MeanSeries(data["original_counterfactual"], "control"),
            pointwise=MeanSeries(data["pointwise"], "pointwise"),
            cumulative=MeanSeries(data["cumulative"], "cumulative"),
            did_full=float(data["did_full"]),
            did_post=float(data["did_post"]),
            pre_gap=float(data["pre_gap"]),
            pre_gap_tol=float(data.get("pre_gap_tol", 0.0)),
        )


def build_impact_report(
    exp: GroupedExperiment, window: int = 25, pre_gap_tol: float = 0.0
) -> ImpactReport:
    """Assemble the three-panel impact data.

    Only the "original" panels are smoothed; pointwise, cumulative and
    both DiD estimates use the raw seed means.
    """
    pointwise = pointwise_impact(exp)
    pre = pointwise.values[: exp.T - 1]
    return ImpactReport(
        T=exp.T,
        window=int(window),
        original_treated=rolling_mean(aggregate_mean(exp.treatment), window),
        original_counterfactual=rolling_mean(aggregate_mean(exp.control), window),
        pointwise=pointwise,
        cumulative=cumulative_impact(pointwise, exp.T),
        did_full=did_full(exp),
        did_post=did_post(exp),
        pre_gap=float(np.abs(pre).max()) if pre.size else 0.0,
        pre_gap_tol=float(pre_gap_tol),
    )


class Ordering(str, enum.Enum):
    A_BETTER = "a"
    B_BETTER = "b"
    TIE = "tie"


def compare_cumulative(a: ImpactReport, b: ImpactReport) -> Ordering:
    """Rank two agents by cumulative impact at the last episode."""
    if a.n_episodes != b.n_episodes or a.T != b.T:
        raise ValidationError(
            f"reports differ in shape: N={a.n_episodes}/T={a.T} vs N={b.n_episodes}/T={b.T}"
        )
    fa, fb = a.final_cumulative, b.final_cumulative
    if fa > fb:
        return Ordering.A_BETTER
    if fb > fa:
        return Ordering.B_BETTER
    return Ordering.TIE
