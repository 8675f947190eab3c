"""Seeded toy environments, scripted agents and shift injectors."""
from .agents import AgentSpec, make_policy
from .envs import ChainWorld, EnvironmentSpec, TeamGrid, make_env
from .run import RunConfig, build_grouped_experiment, describe, run
from .shifts import (
    AgentSwitch,
    ShiftSpec,
    attacked_episodes,
    perturb_observation,
    schedule_switches,
)

__all__ = [
    "AgentSpec",
    "AgentSwitch",
    "ChainWorld",
    "EnvironmentSpec",
    "RunConfig",
    "ShiftSpec",
    "TeamGrid",
    "attacked_episodes",
    "build_grouped_experiment",
    "describe",
    "make_env",
    "make_policy",
    "perturb_observation",
    "run",
    "schedule_switches",
]
