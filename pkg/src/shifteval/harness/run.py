"""Run configurations and the episode loop."""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

import numpy as np

from ..impact import GroupedExperiment
from ..series import PerformanceMatrix, ValidationError
from .agents import AgentSpec, make_policy
from .envs import EnvironmentSpec, make_env
from .shifts import ShiftSpec, attacked_episodes, schedule_switches
from .streams import episode_stream

DEFAULT_SEEDS = tuple(range(10))


@dataclass(frozen=True)
class RunConfig:
    """One evaluation run.

    ``agents`` lists one spec per team slot; a single spec is replicated
    across the whole team.
    """

    env: EnvironmentSpec
    agents: tuple[AgentSpec, ...]
    n_episodes: int
    seeds: tuple[int, ...] = DEFAULT_SEEDS
    shift: ShiftSpec = field(default_factory=ShiftSpec)
    label: str = ""

    def __post_init__(self):
        agents = tuple(self.agents)
        seeds = tuple(int(s) for s in self.seeds)
        if not seeds:
            raise ValidationError("at least one seed is required")
        if len(set(seeds)) != len(seeds) or any(s < 0 for s in seeds):
            raise ValidationError(f"seeds must be unique non-negative integers, got {seeds}")
        if int(self.n_episodes) != self.n_episodes or self.n_episodes < 1:
            raise ValidationError("n_episodes must be a positive integer")
        K = self.env.team_size
        if len(agents) == 1:
            agents = agents * K
        if len(agents) != K:
            raise ValidationError(f"{self.env.kind} needs 1 or {K} agent specs, got {len(agents)}")
        if self.shift.switch is not None and self.shift.switch.n_replaced > K:
            raise ValidationError(f"cannot replace {self.shift.switch.n_replaced} of {K} agents")
        if self.shift.is_controlled:
            self.shift.intervention_episode(self.n_episodes)
        object.__setattr__(self, "agents", agents)
        object.__setattr__(self, "seeds", seeds)

    def to_dict(self) -> dict:
        return {
            "env": self.env.to_dict(),
            "agents": [a.to_dict() for a in self.agents],
            "n_episodes": self.n_episodes,
            "seeds": list(self.seeds),
            "shift": self.shift.to_dict(),
            "label": self.label,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "RunConfig":
        agents = data.get("agents", [{"kind": "Competent"}])
        return cls(
            env=EnvironmentSpec.from_dict(data["env"]),
            agents=tuple(AgentSpec.from_dict(a) for a in agents),
            n_episodes=int(data["n_episodes"]),
            seeds=tuple(data.get("seeds", DEFAULT_SEEDS)),
            shift=ShiftSpec.from_dict(data.get("shift", {})),
            label=data.get("label", ""),
        )

    @classmethod
    def from_json(cls, path) -> "RunConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def _switch_schedule(config: RunConfig, seed: int):
    shift = config.shift
    if shift.switch is None or shift.mode not in ("controlled", "agent_switch"):
        return (frozenset(),) * config.n_episodes
    at = shift.intervention_episode(config.n_episodes) if shift.is_controlled else None
    return schedule_switches(config.env.team_size, shift.switch, seed, config.n_episodes, at)


def _run_seed(config: RunConfig, seed: int) -> np.ndarray:
    env = make_env(config.env, seed)
    base = [make_policy(spec, env, slot, seed) for slot, spec in enumerate(config.agents)]
    replacements: dict[int, object] = {}
    shift = config.shift
    attacked = attacked_episodes(shift, seed, config.n_episodes)
    switched = _switch_schedule(config, seed)
    out = np.empty(config.n_episodes)
    for e in range(config.n_episodes):
        policies = list(base)
        for slot in switched[e]:
            if slot not in replacements:
                spec = AgentSpec(shift.switch.replacement_kind, seed_offset=1000 + slot)
                replacements[slot] = make_policy(spec, env, slot, seed)
            policies[slot] = replacements[slot]
        eps, signs = 0.0, None
        if attacked[e] and shift.epsilon > 0:
            eps = shift.epsilon
            signs = episode_stream(seed, e, "obs-noise").choice([-1.0, 1.0], size=env.noise_shape)
        out[e] = env.play(policies, eps, signs)
    return out


def run(config: RunConfig) -> PerformanceMatrix:
    """Episode returns for every seed; a pure function of ``config``."""
    rows = [_run_seed(config, seed) for seed in config.seeds]
    label = config.label or f"{config.env.name}/{config.agents[0].name}/{config.shift.name}"
    return PerformanceMatrix(config.seeds, np.vstack(rows), label=label)


def build_grouped_experiment(config: RunConfig) -> GroupedExperiment:
    """Run ``config`` and its shift-free twin on the same seeds."""
    if not config.shift.is_controlled:
        raise ValidationError(
            f"grouped experiments need a controlled shift, got mode {config.shift.mode!r}"
        )
    T = config.shift.intervention_episode(config.n_episodes)
    treatment = run(config)
    control_cfg = replace(config, shift=config.shift.stripped(), label=treatment.label + "/control")
    return GroupedExperiment(treatment, run(control_cfg), T)


def describe(config: RunConfig) -> dict:
    """The resolved per-seed shift schedule, for auditing a run."""
    shift = config.shift
    seeds = {}
    for seed in config.seeds:
        attacked = attacked_episodes(shift, seed, config.n_episodes)
        switched = _switch_schedule(config, seed)
        seeds[str(seed)] = {
            "attacked_episodes": [e for e, a in enumerate(attacked) if a],
            "switches": _intervals(switched),
        }
    out = {"config": config.to_dict(), "episode_numbering": "0-based", "seeds": seeds}
    if shift.is_controlled:
        out["intervention_episode"] = shift.intervention_episode(config.n_episodes)
    return out


def _intervals(schedule: Sequence[frozenset]) -> list[dict]:
    spans: list[dict] = []
    for e, slots in enumerate(schedule):
        if not slots:
            continue
        if spans and spans[-1]["slots"] == sorted(slots) and spans[-1]["end"] == e - 1:
            spans[-1]["end"] = e
        else:
            spans.append({"start": e, "end": e, "slots": sorted(slots)})
    return spans
