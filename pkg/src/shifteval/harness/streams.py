"""Keyed random streams.

Every stochastic choice draws from a generator keyed by the run seed, the
episode index and a purpose tag. Adding a shift therefore never moves the
draws any other part of the run sees, so runs with and without a shift
agree bitwise before the shift starts.
"""
from __future__ import annotations

import zlib

import numpy as np


def tag_code(tag: str) -> int:
    return zlib.crc32(tag.encode("utf-8"))


def stream(seed: int, tag: str, *keys: int) -> np.random.Generator:
    return np.random.default_rng([int(seed), tag_code(tag), *(int(k) for k in keys)])


def episode_stream(seed: int, episode: int, tag: str) -> np.random.Generator:
    return stream(seed, tag, episode)
