"""Empirical row-sum tails, the per-round tail bounds and the SBP capacity formula."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EmptyInput, InvalidConfig, OutOfRange
from .model import ModelKind
from .schedule import Schedule, psi


def empirical_tail(row_sums, eta: float, side: str = "abs_ge") -> float:
    """Fraction of |S| >= eta (``abs_ge``) or S <= eta (``le``)."""
    s = np.asarray(row_sums, dtype=np.float64).reshape(-1)
    if s.size == 0:
        raise EmptyInput("empirical_tail needs at least one row sum")
    if side == "abs_ge":
        return float(np.count_nonzero(np.abs(s) >= eta)) / s.size
    if side == "le":
        return float(np.count_nonzero(s <= eta)) / s.size
    raise InvalidConfig(f"unknown side {side!r}")


@dataclass(frozen=True)
class TailBoundParams:
    k: int
    mu_k1: float
    sigma_k1: float
    mu_k2: float
    sigma_k2: float
    cap: float


def tail_bound_params(schedule: Schedule, k: int) -> TailBoundParams:
    n_i, m_i = schedule.n_i, schedule.m_i
    if schedule.model is ModelKind.SBP:
        mu1 = -schedule.T_i[k - 1]
    else:
        # no round before round 0, so the k = 0 bound centres its first term at 0
        mu1 = schedule.T_i[k - 1] if k >= 1 else 0.0
    mu2 = sum(n_i[i] * math.sqrt(2.0 / (math.pi * m_i[i])) for i in range(1, k + 1))
    sigma1 = math.sqrt(n_i[k])
    sigma2 = math.sqrt(sum(n_i[: k + 1]))
    if not (sigma1 > 0 and sigma2 > 0):
        raise OutOfRange(f"round {k} has an empty block; the bound is undefined")
    return TailBoundParams(k, mu1, sigma1, mu2, sigma2, m_i[k + 1] / schedule.m)


def _bound(schedule: Schedule, p: TailBoundParams, z1: float, z2: float, variant: str | None) -> float:
    variant = variant or schedule.psi_variant
    n = schedule.n
    small = n ** (-0.1)
    return small + psi(z1, variant) + 1.5 * (1.0 + small) ** p.k * psi(z2, variant)


def sbp_tail_bound(schedule: Schedule, k: int, eta: float, variant: str | None = None) -> float:
    """Upper bound on the fraction of rows with |S(0:k)| >= eta after round k."""
    if schedule.model is not ModelKind.SBP:
        raise InvalidConfig("sbp_tail_bound needs an SBP schedule")
    if not 1 <= k <= schedule.R - 1:
        raise OutOfRange(f"k = {k} outside [1, R-1] = [1, {schedule.R - 1}]")
    if eta < schedule.T_i[k] * (1 - 1e-12):
        raise OutOfRange(f"eta = {eta} below T_k = {schedule.T_i[k]}")
    p = tail_bound_params(schedule, k)
    body = _bound(schedule, p, (eta + p.mu_k1) / p.sigma_k1, (eta + p.mu_k2) / p.sigma_k2, variant)
    return 2.0 * 3.0**k * body


def abp_tail_bound(schedule: Schedule, k: int, eta: float, variant: str | None = None) -> float:
    """Upper bound on the fraction of rows with S(0:k) <= eta after round k."""
    if schedule.model is not ModelKind.ABP:
        raise InvalidConfig("abp_tail_bound needs an ABP schedule")
    if not 0 <= k <= schedule.R - 1:
        raise OutOfRange(f"k = {k} outside [0, R-1] = [0, {schedule.R - 1}]")
    if eta > schedule.T_i[k] * (1 + 1e-12) + 1e-12:
        raise OutOfRange(f"eta = {eta} above T_k = {schedule.T_i[k]}")
    p = tail_bound_params(schedule, k)
    body = _bound(schedule, p, (-eta + p.mu_k1) / p.sigma_k1, (-eta + p.mu_k2) / p.sigma_k2, variant)
    return 3.0**k * body


def tail_bound(schedule: Schedule, k: int, eta: float, variant: str | None = None) -> float:
    if schedule.model is ModelKind.SBP:
        return sbp_tail_bound(schedule, k, eta, variant)
    return abp_tail_bound(schedule, k, eta, variant)


def bound_rounds(schedule: Schedule) -> range:
    """Rounds k at which the tail bound is stated."""
    return range(1, schedule.R) if schedule.model is ModelKind.SBP else range(0, schedule.R)


def tail_side(model: ModelKind) -> str:
    return "abs_ge" if model is ModelKind.SBP else "le"


def tail_rows(schedule: Schedule, sums_by_round, variant: str | None = None) -> list[dict]:
    """One (k, eta, empirical, bound, cap) record per bound round; ``sums_by_round[k]`` = S(0:k)."""
    side = tail_side(schedule.model)
    rows = []
    for k in bound_rounds(schedule):
        eta = schedule.T_i[k]
        p = tail_bound_params(schedule, k)
        rows.append(
            {
                "k": k,
                "eta": eta,
                "empirical": empirical_tail(sums_by_round[k], eta, side),
                "bound": tail_bound(schedule, k, eta, variant),
                "cap": p.cap,
            }
        )
    return rows


def capacity_sbp(kappa: float) -> float:
    """-ln 2 / ln P(|N| <= kappa) for a standard normal N."""
    if not kappa > 0:
        raise OutOfRange("capacity needs kappa > 0")
    p = math.erf(kappa / math.sqrt(2.0))
    if p >= 1.0:
        return math.inf
    return -math.log(2.0) / math.log(p)
