"""Monte Carlo sweeps over (n, alpha, seed)."""

from __future__ import annotations

import csv
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidConfig, PerceptronError
from .generate import GenConfig, random_spins, sample_instance
from .model import ModelKind
from .schedule import build_schedule
from .solver import Policy, solve
from .stats import tail_rows

PROVENANCE = ["seed", "n", "alpha", "kappa", "model", "psi_variant"]
TRIAL_FIELDS = PROVENANCE + [
    "m",
    "m_adjusted",
    "R",
    "status",
    "success",
    "rounds",
    "solve_seconds",
    "equivariant",
]
TAIL_FIELDS = PROVENANCE + ["k", "eta", "empirical", "bound", "cap"]


@dataclass(frozen=True)
class ExperimentConfig:
    model: ModelKind
    kappa: float
    n_values: tuple[int, ...]
    alpha_values: tuple[float, ...]
    seed_count: int = 1
    base_seed: int = 0
    policy: str = "all_plus"
    psi_variant: str = "std_normal_tail"
    equivariance: bool = True
    kappa_prime: float | None = None
    d_override: float | None = None
    out: str | None = None
    tail_out: str | None = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.n_values or not self.alpha_values:
            raise InvalidConfig("n and alpha lists must be nonempty")
        if self.seed_count < 1:
            raise InvalidConfig("need at least one seed")


def trial_rows(m_raw: int, model: ModelKind, equivariance: bool) -> tuple[int, bool]:
    """Row count actually used; SBP equivariance runs need odd m."""
    if model is ModelKind.SBP and equivariance and m_raw % 2 == 0:
        return m_raw - 1, True
    return m_raw, False


def _policy(name: str, seed: int) -> Policy:
    if name == "all_plus":
        return Policy.all_plus()
    if name in ("random", "seeded_random"):
        return Policy.seeded_random(seed)
    raise InvalidConfig(f"unknown policy {name!r}")


def run_trial(cfg: ExperimentConfig, n: int, alpha: float, seed: int) -> tuple[dict, list[dict]]:
    base = {
        "seed": seed,
        "n": n,
        "alpha": alpha,
        "kappa": cfg.kappa,
        "model": cfg.model.value,
        "psi_variant": cfg.psi_variant,
    }
    gen = GenConfig(cfg.model, n, alpha, cfg.kappa, seed)
    m, adjusted = trial_rows(gen.m, cfg.model, cfg.equivariance)
    row = dict(base, m=m, m_adjusted=int(adjusted), R="", status="ok", success="", rounds="",
               solve_seconds="", equivariant="")
    try:
        if m < 1:
            raise InvalidConfig(f"floor(alpha * n) gives m = {m}")
        schedule = build_schedule(cfg.model, n, m, cfg.kappa, cfg.psi_variant)
        inst = sample_instance(gen, m=m)
    except PerceptronError as exc:
        row["status"] = exc.name
        return row, []
    t0 = time.perf_counter()
    out = solve(inst, schedule, _policy(cfg.policy, seed))
    row.update(R=schedule.R, success=int(out.success), rounds=out.rounds_executed,
               solve_seconds=f"{time.perf_counter() - t0:.6f}")
    if cfg.model is ModelKind.SBP and cfg.equivariance:
        v = random_spins(seed, schedule.n0, stream=1)
        a = solve(inst, schedule, Policy.given(v)).x
        b = solve(inst, schedule, Policy.given(-v)).x
        row["equivariant"] = int(np.array_equal(a, -b))
    tails = [dict(base, **r) for r in tail_rows(schedule, out.round_sums)]
    return row, tails


def _run_one(args):
    return run_trial(*args)


def worker_count() -> int:
    cap = os.environ.get("PERCEPTRON_THREADS")
    n = os.cpu_count() or 1
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            raise InvalidConfig("PERCEPTRON_THREADS must be an integer") from None
    return n


def run_experiment(cfg: ExperimentConfig, workers: int | None = None) -> tuple[list[dict], list[dict]]:
    jobs = [
        (cfg, n, alpha, cfg.base_seed + s)
        for n in cfg.n_values
        for alpha in cfg.alpha_values
        for s in range(cfg.seed_count)
    ]
    workers = workers or worker_count()
    if workers <= 1 or len(jobs) == 1:
        results = [_run_one(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_one, jobs))
    key = lambda r: (r["n"], r["alpha"], r["seed"])  # noqa: E731
    trials = sorted((r for r, _ in results), key=key)
    tails = sorted((t for _, ts in results for t in ts), key=lambda t: key(t) + (t["k"],))
    return trials, tails


def write_csv(path, rows, fields) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=fields, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({f: r.get(f, "") for f in fields})
