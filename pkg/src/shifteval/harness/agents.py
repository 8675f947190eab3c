"""Scripted stand-ins for pretrained policies.

Each policy is a pure function of its observation plus parameters fixed
at construction; nothing carries over between episodes.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np

from ..series import ValidationError
from .shifts import AGENT_KINDS
from .streams import stream


@dataclass(frozen=True)
class AgentSpec:
    """An algorithm to evaluate.

    ``params`` may override the scripted rule: ``threshold`` for
    ChainWorld threshold agents, ``convention_offset`` for TeamGrid
    convention agents. ``seed_offset`` decorrelates the random weights of
    untrained agents.
    """

    kind: str = "Competent"
    seed_offset: int = 0
    params: Mapping[str, Any] = field(default_factory=dict)
    name: str = ""

    def __post_init__(self):
        if self.kind not in AGENT_KINDS:
            raise ValidationError(f"unknown agent kind {self.kind!r}; expected one of {AGENT_KINDS}")
        object.__setattr__(self, "params", dict(self.params))
        if not self.name:
            object.__setattr__(self, "name", self.kind)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "seed_offset": self.seed_offset, "params": dict(self.params), "name": self.name}

    @classmethod
    def from_dict(cls, data: Mapping) -> "AgentSpec":
        return cls(**dict(data))


# --- ChainWorld policies: batched, one observation per row ------------------

CHAIN_THRESHOLDS = {"Competent": 0.5, "OutsidePretrained": 0.55, "Mediocre": 0.6}


class ThresholdPolicy:
    """Go right (action 1) when the cue feature exceeds ``threshold``."""

    def __init__(self, threshold: float, feature: int = 0):
        self.threshold = float(threshold)
        self.feature = feature

    def __call__(self, obs: np.ndarray) -> np.ndarray:
        return (obs[:, self.feature] > self.threshold).astype(np.int64)


class LinearPolicy:
    def __init__(self, weights: np.ndarray):
        self.weights = weights

    def __call__(self, obs: np.ndarray) -> np.ndarray:
        return ((obs - 0.5) @ self.weights > 0.0).astype(np.int64)


# --- TeamGrid policies: one observation vector per call ---------------------

TEAM_OFFSETS = {"Competent": 0, "Mediocre": 0, "OutsidePretrained": 1}


def decode_phase(obs: np.ndarray, team_size: int) -> int:
    return int(np.floor(obs[0] * team_size + 0.5)) % team_size


class ConventionPolicy:
    """Consume in the slots a rotating schedule assigns to this member.

    Members of one training group share a schedule ``offset``; mixing
    groups with different offsets puts the team over capacity. With
    ``even_phases_only`` the agent sits out odd phases (under-consumes).
    """

    def __init__(self, slot: int, team_size: int, capacity: int, offset: int = 0, even_phases_only: bool = False):
        self.slot = slot
        self.team_size = team_size
        self.capacity = capacity
        self.offset = offset
        self.even_phases_only = even_phases_only

    def __call__(self, obs: np.ndarray) -> int:
        phase = decode_phase(obs, self.team_size)
        on = (phase + self.slot + self.offset) % self.team_size < self.capacity
        if self.even_phases_only and phase % 2:
            on = False
        return int(on)


class TablePolicy:
    """Fixed random lookup from (phase, previous load) to a load level."""

    def __init__(self, table: np.ndarray, team_size: int):
        self.table = table
        self.team_size = team_size

    def __call__(self, obs: np.ndarray) -> int:
        phase = decode_phase(obs, self.team_size)
        n_load = self.table.shape[1]
        load = min(max(int(np.floor(obs[1] * (n_load - 1) + 0.5)), 0), n_load - 1)
        return int(self.table[phase, load])


def make_policy(spec: AgentSpec, env, slot: int, run_seed: int):
    """Instantiate ``spec`` for ``slot`` of ``env`` under run seed ``run_seed``.

    Untrained weights depend on the run seed: all agents in a run share
    that seed, as a freshly initialised network would.
    """
    if env.kind == "ChainWorld":
        if spec.kind == "Untrained":
            rng = stream(run_seed, "untrained", spec.seed_offset, slot)
            return LinearPolicy(rng.standard_normal(env.obs_dim))
        return ThresholdPolicy(spec.params.get("threshold", CHAIN_THRESHOLDS[spec.kind]))
    if env.kind == "TeamGrid":
        if spec.kind == "Untrained":
            rng = stream(run_seed, "untrained", spec.seed_offset, slot)
            table = rng.integers(0, 3, size=(env.team_size, 2 * env.team_size + 1))
            return TablePolicy(table, env.team_size)
        offset = int(spec.params.get("convention_offset", TEAM_OFFSETS[spec.kind]))
        return ConventionPolicy(slot, env.team_size, env.capacity, offset, even_phases_only=spec.kind == "Mediocre")
    raise ValidationError(f"unknown environment kind {env.kind!r}")
