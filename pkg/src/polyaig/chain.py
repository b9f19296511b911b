"""Shared chain configuration and sample containers."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .pig import PigSamplerConfig


@dataclass(frozen=True)
class ChainConfig:
    iterations: int = 4000
    burn_in: int = 1000
    thin: int = 2
    seed: int = 0
    pig_config: PigSamplerConfig = field(default_factory=PigSamplerConfig)
    homogeneous: bool = False

    def __post_init__(self):
        if self.iterations < 1 or self.burn_in < 0 or self.thin < 1:
            raise ValueError("iterations >= 1, burn_in >= 0, thin >= 1 required")
        if self.burn_in >= self.iterations:
            raise ValueError("burn_in must be smaller than iterations")

    @property
    def retained(self):
        return (self.iterations - self.burn_in) // self.thin

    def echo(self):
        return {
            "iterations": self.iterations,
            "burn_in": self.burn_in,
            "thin": self.thin,
            "seed": self.seed,
            "trunc_terms": self.pig_config.trunc_terms,
            "tail_horizon": self.pig_config.tail_horizon,
            "homogeneous": self.homogeneous,
        }


@dataclass
class PosteriorSamples:
    """Retained draws (one row per kept sweep) plus run provenance."""

    draws: np.ndarray           # (S, K)
    names: list
    iters: np.ndarray           # sweep index of each retained row
    meta: dict

    def __post_init__(self):
        self.draws = np.atleast_2d(np.asarray(self.draws, dtype=float))
        if self.draws.shape[1] != len(self.names):
            raise ValueError("names must match draw columns")
        if np.any(self.draws <= 0):
            raise ValueError("posterior draws must be strictly positive")

    @property
    def size(self):
        return self.draws.shape[0]
