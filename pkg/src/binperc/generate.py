"""Seeded Rademacher instances.

Every row is drawn from its own Philox stream keyed on the 64-bit seed, with
the row index placed in the high word of the counter.  Rows are therefore
independent of one another and of the number of rows requested, so a row can
be regenerated (or generated in parallel) without touching the others.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import InvalidConfig
from .model import Instance, ModelKind

_SEED_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class GenConfig:
    model: ModelKind
    n: int
    alpha: float
    kappa: float
    seed: int = 0

    @property
    def m(self) -> int:
        # decimal-exact floor so that e.g. alpha=0.29, n=100 gives 29, not 28
        return math.floor(Fraction(repr(float(self.alpha))) * self.n)


def row_stream(seed: int, row: int) -> np.random.Generator:
    if not 0 <= seed <= _SEED_MASK:
        raise InvalidConfig("seed must be a 64-bit unsigned integer")
    bitgen = np.random.Philox(key=seed, counter=[0, 0, 0, row])
    return np.random.Generator(bitgen)


def rademacher_row(seed: int, row: int, n: int) -> np.ndarray:
    bits = row_stream(seed, row).integers(0, 2, size=n, dtype=np.int8)
    return (2 * bits - 1).astype(np.int8)


def sample_matrix(seed: int, m: int, n: int) -> np.ndarray:
    G = np.empty((m, n), dtype=np.int8)
    for r in range(m):
        G[r] = rademacher_row(seed, r, n)
    return G


def sample_instance(cfg: GenConfig, m: int | None = None) -> Instance:
    """Draw an instance with ``floor(alpha * n)`` rows (or an explicit ``m``)."""
    if cfg.n < 1:
        raise InvalidConfig("n must be >= 1")
    if not cfg.alpha > 0:
        raise InvalidConfig("alpha must be > 0")
    rows = cfg.m if m is None else m
    if rows < 1:
        raise InvalidConfig(f"floor(alpha * n) = {rows}; need at least one constraint")
    model = ModelKind.parse(cfg.model)
    return Instance(model, cfg.kappa, sample_matrix(cfg.seed, rows, cfg.n), seed=cfg.seed)


def random_spins(seed: int, n: int, stream: int = 0) -> np.ndarray:
    """Seeded +-1 vector; ``stream`` separates uses that share a seed."""
    bitgen = np.random.Philox(key=seed & _SEED_MASK, counter=[0, 0, 1, stream])
    bits = np.random.Generator(bitgen).integers(0, 2, size=n, dtype=np.int8)
    return (2 * bits - 1).astype(np.int8)
