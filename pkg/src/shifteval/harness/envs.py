"""Deterministic toy environments.

ChainWorld
    A single agent walks a ring of ``n_states`` states, one per step,
    starting from a seed-dependent state. Each state has a hidden correct
    action (left/right) and pays a state-specific reward when the agent
    picks it. Feature 0 of the observation is a cue ``0.5 +/- margin``
    pointing at the correct action; the rest are distractors. Because the
    walk ignores the actions, an observation perturbation can only flip
    the decisions whose margin it exceeds, so returns fall monotonically
    as the perturbation grows.

TeamGrid
    ``team_size`` agents share a feeder with room for ``capacity`` units
    of load per step. Each agent picks a load in {0, 1, 2}; a member
    earns its comfort weight when its load is positive, and the whole
    team pays ``penalty`` whenever total load exceeds capacity. A team
    trained together rotates who consumes so the feeder is never
    overloaded. Observations are ``[phase / team_size, previous load /
    (2 * team_size)]``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np

from ..series import ValidationError
from .shifts import perturb_observation
from .streams import stream

ENV_KINDS = ("ChainWorld", "TeamGrid")

CHAIN_DEFAULTS = {"n_states": 10, "obs_dim": 4}
TEAM_DEFAULTS = {"team_size": 5, "capacity": 2, "penalty": 3.0, "weights": None}


@dataclass(frozen=True)
class EnvironmentSpec:
    kind: str = "ChainWorld"
    episode_length: int = 20
    params: Mapping[str, Any] = field(default_factory=dict)
    name: str = ""

    def __post_init__(self):
        if self.kind not in ENV_KINDS:
            raise ValidationError(f"unknown environment kind {self.kind!r}; expected one of {ENV_KINDS}")
        if int(self.episode_length) != self.episode_length or self.episode_length < 1:
            raise ValidationError("episode_length must be a positive integer")
        defaults = CHAIN_DEFAULTS if self.kind == "ChainWorld" else TEAM_DEFAULTS
        unknown = set(self.params) - set(defaults)
        if unknown:
            raise ValidationError(f"unknown {self.kind} parameters: {sorted(unknown)}")
        object.__setattr__(self, "params", {**defaults, **self.params})
        if not self.name:
            object.__setattr__(self, "name", self.kind)
        # fail fast on bad parameters
        make_env(self, 0)

    @property
    def team_size(self) -> int:
        return 1 if self.kind == "ChainWorld" else int(self.params["team_size"])

    def to_dict(self) -> dict:
        return {"kind": self.kind, "episode_length": self.episode_length, "params": dict(self.params), "name": self.name}

    @classmethod
    def from_dict(cls, data: Mapping) -> "EnvironmentSpec":
        return cls(**dict(data))


class ChainWorld:
    kind = "ChainWorld"
    team_size = 1
    obs_low, obs_high = 0.0, 1.0

    def __init__(self, seed: int, episode_length: int, n_states: int, obs_dim: int):
        if n_states < 2 or obs_dim < 1:
            raise ValidationError("ChainWorld needs n_states >= 2 and obs_dim >= 1")
        self.episode_length = int(episode_length)
        self.n_states = int(n_states)
        self.obs_dim = int(obs_dim)
        rng = stream(seed, "chainworld-layout")
        self.labels = rng.integers(0, 2, size=self.n_states)
        self.margins = rng.uniform(0.05, 0.45, size=self.n_states)
        self.rewards = rng.uniform(0.5, 1.5, size=self.n_states)
        obs = rng.uniform(0.0, 1.0, size=(self.n_states, self.obs_dim))
        obs[:, 0] = np.where(self.labels == 1, 0.5 + self.margins, 0.5 - self.margins)
        obs.setflags(write=False)
        self.observations = obs
        start = int(rng.integers(0, self.n_states))
        self.states = (start + np.arange(self.episode_length)) % self.n_states

    @property
    def noise_shape(self) -> tuple[int, int, int]:
        return (self.episode_length, 1, self.obs_dim)

    def play(self, policies, epsilon: float = 0.0, signs: np.ndarray | None = None) -> float:
        obs = self.observations[self.states]
        if epsilon > 0:
            obs = perturb_observation(obs, epsilon, signs[:, 0, :], self.obs_low, self.obs_high)
        actions = policies[0](obs)
        correct = actions == self.labels[self.states]
        return float(np.sum(np.where(correct, self.rewards[self.states], 0.0)))


class TeamGrid:
    kind = "TeamGrid"
    obs_dim = 2
    obs_low, obs_high = 0.0, 1.0

    def __init__(self, seed: int, episode_length: int, team_size: int, capacity: int, penalty: float, weights=None):
        if team_size < 1 or not 1 <= capacity <= team_size:
            raise ValidationError("TeamGrid needs team_size >= 1 and 1 <= capacity <= team_size")
        if penalty < 0:
            raise ValidationError("penalty must be non-negative")
        self.episode_length = int(episode_length)
        self.team_size = int(team_size)
        self.capacity = int(capacity)
        self.penalty = float(penalty)
        rng = stream(seed, "teamgrid-layout")
        if weights is None:
            self.weights = rng.uniform(0.8, 1.2, size=self.team_size)
        else:
            self.weights = np.asarray(weights, dtype=np.float64)
            if self.weights.shape != (self.team_size,):
                raise ValidationError(f"weights must have one entry per agent ({self.team_size})")
        self.start_phase = int(rng.integers(0, self.team_size))

    @property
    def noise_shape(self) -> tuple[int, int, int]:
        return (self.episode_length, self.team_size, self.obs_dim)

    def play(self, policies, epsilon: float = 0.0, signs: np.ndarray | None = None) -> float:
        K = self.team_size
        total = 0.0
        last_load = 0
        for k in range(self.episode_length):
            phase = (self.start_phase + k) % K
            base = np.array([phase / K, last_load / (2 * K)])
            loads = []
            for i, policy in enumerate(policies):
                obs = base
                if epsilon > 0:
                    obs = perturb_observation(base, epsilon, signs[k, i], self.obs_low, self.obs_high)
                loads.append(policy(obs))
            load = sum(loads)
            comfort = sum(w for w, a in zip(self.weights.tolist(), loads) if a > 0)
            total += comfort - (self.penalty if load > self.capacity else 0.0)
            last_load = load
        return total


def make_env(spec: EnvironmentSpec, seed: int):
    p = spec.params
    if spec.kind == "ChainWorld":
        return ChainWorld(seed, spec.episode_length, p["n_states"], p["obs_dim"])
    return TeamGrid(seed, spec.episode_length, p["team_size"], p["capacity"], p["penalty"], p["weights"])
