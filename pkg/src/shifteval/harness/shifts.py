"""Distribution-shift descriptions and the deterministic schedules they induce."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from ..series import ValidationError
from .streams import episode_stream

SHIFT_MODES = ("none", "controlled", "random", "agent_switch")
AGENT_KINDS = ("Competent", "Mediocre", "Untrained", "OutsidePretrained")


@dataclass(frozen=True)
class AgentSwitch:
    """Replace ``n_replaced`` team members with ``replacement_kind`` agents.

    Under a controlled shift, slots ``0..n_replaced-1`` switch at the
    intervention episode and stay switched. Otherwise a switch starts in
    an idle episode with probability ``switch_probability``, takes a
    random subset of slots, and lasts a whole number of episodes drawn
    uniformly from ``duration_range`` (inclusive).
    """

    n_replaced: int = 1
    replacement_kind: str = "OutsidePretrained"
    duration_range: tuple[int, int] = (5, 20)
    switch_probability: float = 0.1

    def __post_init__(self):
        lo, hi = (int(v) for v in self.duration_range)
        object.__setattr__(self, "duration_range", (lo, hi))
        if self.n_replaced < 1:
            raise ValidationError("n_replaced must be at least 1")
        if self.replacement_kind not in AGENT_KINDS:
            raise ValidationError(f"unknown replacement kind {self.replacement_kind!r}")
        if lo < 1 or lo > hi:
            raise ValidationError(f"duration range must satisfy 1 <= a <= b, got {(lo, hi)}")
        if not 0.0 <= self.switch_probability <= 1.0:
            raise ValidationError("switch_probability must lie in [0, 1]")


@dataclass(frozen=True)
class ShiftSpec:
    """One distribution shift.

    ``controlled``: from episode ``at`` (1-based; halfway when omitted)
    the observations are perturbed with magnitude ``epsilon`` and, if
    ``switch`` is given, team members are replaced.
    ``random``: each episode is attacked with probability ``probability``.
    ``agent_switch``: team members are switched in and out at random.
    """

    mode: str = "none"
    epsilon: float = 0.0
    at: int | None = None
    probability: float | None = None
    switch: AgentSwitch | None = None
    name: str = ""

    def __post_init__(self):
        if self.mode not in SHIFT_MODES:
            raise ValidationError(f"unknown shift mode {self.mode!r}; expected one of {SHIFT_MODES}")
        if not self.epsilon >= 0.0:
            raise ValidationError(f"epsilon must be non-negative, got {self.epsilon}")
        if self.at is not None and self.at < 1:
            raise ValidationError(f"intervention episode must be >= 1, got {self.at}")
        if self.mode == "random":
            if self.probability is None or not 0.0 <= self.probability <= 1.0:
                raise ValidationError("random shifts need an attack probability in [0, 1]")
        if self.mode == "agent_switch" and self.switch is None:
            raise ValidationError("agent_switch shifts need a switch description")
        if not self.name:
            object.__setattr__(self, "name", self.default_name())

    @property
    def is_controlled(self) -> bool:
        return self.mode == "controlled"

    def default_name(self) -> str:
        if self.mode == "none":
            return "none"
        parts = [self.mode]
        if self.mode == "controlled" and self.at is not None:
            parts.append(f"T{self.at}")
        if self.mode == "random":
            parts.append(f"p{self.probability:g}")
        if self.epsilon:
            parts.append(f"eps{self.epsilon:g}")
        if self.switch is not None:
            parts.append(f"{self.switch.n_replaced}x{self.switch.replacement_kind}")
        return "-".join(parts)

    def intervention_episode(self, n_episodes: int) -> int:
        T = self.at if self.at is not None else max(1, n_episodes // 2)
        if T > n_episodes:
            raise ValidationError(f"intervention episode {T} beyond the {n_episodes} episodes of the run")
        return T

    def stripped(self) -> "ShiftSpec":
        """The no-shift twin used as the control group."""
        return ShiftSpec(mode="none", name="none")

    def to_dict(self) -> dict:
        d = asdict(self)
        if self.switch is not None:
            d["switch"]["duration_range"] = list(self.switch.duration_range)
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "ShiftSpec":
        data = dict(data)
        sw = data.get("switch")
        if sw is not None:
            sw = dict(sw)
            if "duration_range" in sw:
                sw["duration_range"] = tuple(sw["duration_range"])
            data["switch"] = AgentSwitch(**sw)
        return cls(**data)


def perturb_observation(obs, epsilon: float, noise, low: float | None = 0.0, high: float | None = 1.0):
    """Shift every feature by ``epsilon`` in the direction ``sign(noise)``.

    A gradient-free stand-in for the fast gradient sign method: the sign
    pattern comes from a seeded stream instead of a loss gradient. The
    result is clipped to ``[low, high]``; pass ``None`` to skip a bound.
    """
    obs = np.asarray(obs, dtype=np.float64)
    if epsilon < 0:
        raise ValidationError("epsilon must be non-negative")
    if epsilon == 0:
        return obs.copy()
    out = obs + epsilon * np.sign(noise)
    if low is not None or high is not None:
        out = np.clip(out, low, high)
    return out


def schedule_switches(
    team_size: int,
    spec: AgentSwitch,
    seed: int,
    n_episodes: int,
    at: int | None = None,
) -> tuple[frozenset[int], ...]:
    """Which team slots hold replacement agents in each episode.

    ``at`` (1-based) selects the controlled schedule; without it the
    observational schedule is drawn from the seed's switch stream.
    """
    if spec.n_replaced > team_size:
        raise ValidationError(f"cannot replace {spec.n_replaced} of {team_size} agents")
    if at is not None:
        if not 1 <= at <= n_episodes:
            raise ValidationError(f"switch episode must lie in [1, {n_episodes}], got {at}")
        slots = frozenset(range(spec.n_replaced))
        return tuple(slots if e >= at - 1 else frozenset() for e in range(n_episodes))

    lo, hi = spec.duration_range
    out: list[frozenset[int]] = []
    active: frozenset[int] = frozenset()
    until = 0
    for e in range(n_episodes):
        if e >= until:
            active = frozenset()
            rng = episode_stream(seed, e, "switch")
            if rng.random() < spec.switch_probability:
                until = e + int(rng.integers(lo, hi + 1))
                active = frozenset(int(s) for s in rng.choice(team_size, spec.n_replaced, replace=False))
        out.append(active)
    return tuple(out)


def attacked_episodes(shift: ShiftSpec, seed: int, n_episodes: int) -> tuple[bool, ...]:
    if shift.mode == "controlled":
        T = shift.intervention_episode(n_episodes)
        return tuple(e >= T - 1 for e in range(n_episodes))
    if shift.mode == "random":
        p = shift.probability
        return tuple(episode_stream(seed, e, "attack").random() < p for e in range(n_episodes))
    return (False,) * n_episodes
