"""Multiscale majority algorithm for the symmetric and asymmetric perceptron."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, InvalidConfig, RoundsExhausted
from .generate import random_spins
from .model import Instance, ModelKind, is_solution, sgn, spins
from .schedule import Schedule


@dataclass(frozen=True)
class Policy:
    """How round 0 fills block 0: ``all_plus``, ``seeded_random`` or ``given``."""

    kind: str = "all_plus"
    seed: int | None = None
    vector: np.ndarray | None = None

    @classmethod
    def all_plus(cls) -> "Policy":
        return cls("all_plus")

    @classmethod
    def seeded_random(cls, seed: int) -> "Policy":
        return cls("seeded_random", seed=seed)

    @classmethod
    def given(cls, v) -> "Policy":
        return cls("given", vector=spins(v))

    def block0(self, n0: int) -> np.ndarray:
        if self.kind == "all_plus":
            return np.ones(n0, dtype=np.int8)
        if self.kind == "seeded_random":
            return random_spins(self.seed or 0, n0)
        if self.kind == "given":
            if self.vector is None or self.vector.shape[0] != n0:
                got = None if self.vector is None else self.vector.shape[0]
                raise DimensionMismatch(f"round-0 vector must have length n0 = {n0}, got {got}")
            return self.vector.astype(np.int8, copy=True)
        raise InvalidConfig(f"unknown round-0 policy {self.kind!r}")


def check_compatible(instance: Instance, schedule: Schedule) -> None:
    if schedule.n != instance.n or schedule.m != instance.m:
        raise DimensionMismatch(
            f"schedule built for (m, n) = ({schedule.m}, {schedule.n}), "
            f"instance has ({instance.m}, {instance.n})"
        )
    if schedule.model is not instance.model:
        raise InvalidConfig("schedule and instance are for different models")


def select_rows(model: ModelKind, sums: np.ndarray, count: int) -> np.ndarray:
    """Rows consulted by a round, ties broken by ascending row index.

    SBP takes the ``count`` rows with the largest |S|; ABP the ``count`` rows with
    the smallest S, i.e. those closest to violating S >= kappa sqrt(n).
    """
    if count >= sums.shape[0]:
        return np.arange(sums.shape[0])
    key = -np.abs(sums) if model is ModelKind.SBP else sums
    return np.sort(np.argsort(key, kind="stable")[:count])


def _weighted_vote(G_rows: np.ndarray, prior: np.ndarray, scale_rows: int) -> np.ndarray:
    nb = G_rows.shape[1]
    s = sgn(prior)
    reach = np.floor(np.abs(prior) * math.sqrt(math.pi * scale_rows / 2.0)).astype(np.int64)
    reach = np.minimum(reach, nb)
    active = np.arange(nb)[None, :] < reach[:, None]
    # row r votes -sgn(S_r) G_rj on its first reach_r columns and -sgn(S_r) afterwards
    weights = np.where(active, G_rows, np.int8(1)).astype(np.int64)
    votes = -(s @ weights)
    return sgn(votes).astype(np.int8)


def round_block(instance: Instance, schedule: Schedule, k: int, prior_sums: np.ndarray) -> np.ndarray:
    """Assignment of block ``k`` given the row sums over blocks ``0..k-1``."""
    if not 1 <= k <= schedule.R:
        raise RoundsExhausted(f"round {k} outside 1..{schedule.R}")
    nb = schedule.n_i[k]
    if nb == 0:
        return np.zeros(0, dtype=np.int8)
    rows = select_rows(schedule.model, prior_sums, schedule.m_i[k])
    G_rows = instance.entries[rows, schedule.block(k)]
    if schedule.model is ModelKind.ABP:
        return sgn(G_rows.sum(axis=0, dtype=np.int64)).astype(np.int8)
    prior = prior_sums[rows]
    if k == 1 or k == schedule.R:
        return _weighted_vote(G_rows, prior, len(rows))
    votes = -(sgn(prior) @ G_rows.astype(np.int64))
    return sgn(votes).astype(np.int8)


def block_sums(instance: Instance, schedule: Schedule, k: int, values: np.ndarray) -> np.ndarray:
    return instance.entries[:, schedule.block(k)].astype(np.int64) @ values.astype(np.int64)


@dataclass
class SolverState:
    instance: Instance
    schedule: Schedule
    assigned: np.ndarray
    partial_sums: np.ndarray
    current_round: int = 0
    round_times: list[float] = field(default_factory=list)
    # row sums S(0:k) after each executed round k
    history: list[np.ndarray] = field(default_factory=list)

    @property
    def filled(self) -> int:
        return self.schedule.block_end(self.current_round)

    def prefix(self) -> np.ndarray:
        return self.assigned[: self.filled].copy()


def init_round0(instance: Instance, schedule: Schedule, policy: Policy | None = None) -> SolverState:
    check_compatible(instance, schedule)
    policy = policy or Policy.all_plus()
    t0 = time.perf_counter()
    x = np.zeros(instance.n, dtype=np.int8)
    x[schedule.block(0)] = policy.block0(schedule.n0)
    sums = block_sums(instance, schedule, 0, x[schedule.block(0)])
    return SolverState(instance, schedule, x, sums, 0, [time.perf_counter() - t0], [sums])


def step_round(state: SolverState) -> SolverState:
    """Fill the next block in place and return the same state."""
    sched = state.schedule
    if state.current_round >= sched.R:
        raise RoundsExhausted(f"all {sched.R} rounds already executed")
    t0 = time.perf_counter()
    k = state.current_round + 1
    values = round_block(state.instance, sched, k, state.partial_sums)
    state.assigned[sched.block(k)] = values
    state.partial_sums = state.partial_sums + block_sums(state.instance, sched, k, values)
    state.current_round = k
    state.round_times.append(time.perf_counter() - t0)
    state.history.append(state.partial_sums)
    return state


@dataclass(frozen=True)
class SolveOutcome:
    x: np.ndarray
    success: bool
    rounds_executed: int
    round_times: tuple[float, ...]
    total_time: float
    round_sums: tuple[np.ndarray, ...] = ()


def solve(instance: Instance, schedule: Schedule, policy: Policy | None = None) -> SolveOutcome:
    t0 = time.perf_counter()
    state = init_round0(instance, schedule, policy)
    while state.current_round < schedule.R:
        step_round(state)
    ok = is_solution(instance, state.assigned)
    return SolveOutcome(
        x=state.assigned,
        success=ok,
        rounds_executed=state.current_round,
        round_times=tuple(state.round_times),
        total_time=time.perf_counter() - t0,
        round_sums=tuple(state.history),
    )


def block_level(schedule: Schedule, length: int) -> int:
    """Index of the block containing (0-based) position ``length``."""
    for k in range(schedule.R + 1):
        if length < schedule.block_end(k):
            return k
    return schedule.R + 1


def complete(instance: Instance, schedule: Schedule, prefix) -> np.ndarray:
    """Run the algorithm from an arbitrary prefix of length >= n0.

    The remainder of the block holding the prefix end is taken from that round's
    output on the block-aligned part of the prefix; later rounds run as usual.
    """
    prefix = spins(prefix)
    ell = prefix.shape[0]
    if not schedule.n0 <= ell <= instance.n:
        raise DimensionMismatch(f"prefix length {ell} outside [{schedule.n0}, {instance.n}]")
    x = np.zeros(instance.n, dtype=np.int8)
    x[:ell] = prefix
    level = block_level(schedule, ell)
    start = schedule.col_offset_i[level] if level <= schedule.R else instance.n
    sums = instance.entries[:, :start].astype(np.int64) @ x[:start].astype(np.int64)
    for k in range(level, schedule.R + 1):
        if k == 0:
            continue
        values = round_block(instance, schedule, k, sums)
        blk = schedule.block(k)
        lo = max(ell, blk.start)
        x[lo : blk.stop] = values[lo - blk.start :]
        sums = sums + block_sums(instance, schedule, k, x[blk])
    return x
