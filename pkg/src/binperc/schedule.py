"""Round parameters of the multiscale majority algorithm.

Column block ``i`` has ``n_i`` columns and round ``i`` consults ``m_i`` rows.
Block 0 is filled arbitrarily, block 1 by a weighted vote of every row, the
middle blocks by plain votes of the ``m_i`` most extreme rows and the last
block by another weighted vote.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import InfeasibleSchedule, InvalidConfig, InvalidMargins
from .model import ModelKind

PSI_VARIANTS = ("std_normal_tail", "literal")

_MAX_ROUNDS = 10_000


def psi(x: float, variant: str = "std_normal_tail") -> float:
    """Gaussian-type upper tail.

    ``std_normal_tail`` is P(N > x) for a standard normal N; ``literal`` integrates
    exp(-u^2)/sqrt(2 pi) from x to infinity, i.e. erfc(x) / (2 sqrt 2).
    """
    if variant == "std_normal_tail":
        return 0.5 * math.erfc(x / math.sqrt(2.0))
    if variant == "literal":
        return math.erfc(x) / (2.0 * math.sqrt(2.0))
    raise InvalidConfig(f"unknown psi variant {variant!r}")


def parse_psi_variant(name: str) -> str:
    aliases = {"std": "std_normal_tail", "std_normal_tail": "std_normal_tail", "literal": "literal"}
    try:
        return aliases[name]
    except KeyError:
        raise InvalidConfig(f"unknown psi variant {name!r}") from None


def _lambdas(mk: int) -> tuple[float, float]:
    if mk < 1:
        return 0.0, 0.0
    base = math.sqrt(2.0 / (math.pi * mk))
    shrink = mk ** (-1.0 / 8.0)
    return (1.0 - shrink) * base, (1.0 + shrink) * base


@dataclass(frozen=True)
class Schedule:
    model: ModelKind
    n: int
    m: int
    kappa: float
    psi_variant: str
    R: int
    eps0: float
    c_kappa: float
    alpha0: float
    m_i: tuple[int, ...]
    n_i: tuple[int, ...]
    T_i: tuple[float, ...]
    lambda_i: tuple[float, ...] = field(default=())
    lambda_bar_i: tuple[float, ...] = field(default=())
    col_offset_i: tuple[int, ...] = field(default=())
    custom: bool = False

    def __post_init__(self):
        if not self.lambda_i:
            lams = [(0.0, 0.0)] + [_lambdas(mk) for mk in self.m_i[1:]]
            object.__setattr__(self, "lambda_i", tuple(a for a, _ in lams))
            object.__setattr__(self, "lambda_bar_i", tuple(b for _, b in lams))
        if not self.col_offset_i:
            offs, acc = [], 0
            for nk in self.n_i:
                offs.append(acc)
                acc += nk
            object.__setattr__(self, "col_offset_i", tuple(offs))

    @property
    def n0(self) -> int:
        return self.n_i[0]

    @property
    def m0(self) -> int:
        return self.m_i[0]

    def block(self, k: int) -> slice:
        start = self.col_offset_i[k]
        return slice(start, start + self.n_i[k])

    def block_end(self, k: int) -> int:
        return self.col_offset_i[k] + self.n_i[k]

    def dump(self) -> str:
        lines = [
            f"model {self.model.value}",
            f"n {self.n}",
            f"m {self.m}",
            f"kappa {self.kappa!r}",
            f"psi_variant {self.psi_variant}",
            f"R {self.R}",
            f"eps0 {self.eps0!r}",
            f"c_kappa {self.c_kappa!r}",
            f"alpha0 {self.alpha0!r}",
        ]
        for k in range(self.R + 1):
            lines.append(f"m_{k} {self.m_i[k]}")
            lines.append(f"n_{k} {self.n_i[k]}")
            lines.append(f"col_offset_{k} {self.col_offset_i[k]}")
            if k < len(self.T_i):
                lines.append(f"T_{k} {self.T_i[k]!r}")
            lines.append(f"lambda_{k} {self.lambda_i[k]!r}")
            lines.append(f"lambda_bar_{k} {self.lambda_bar_i[k]!r}")
        return "\n".join(lines) + "\n"


def _constants(model: ModelKind, kappa: float) -> tuple[float, float, float]:
    if model is ModelKind.SBP:
        if not kappa > 0:
            raise InvalidConfig("SBP schedules need kappa > 0")
        c = 10.0 / kappa + 10.0 + kappa
        return kappa / 10.0, c, kappa**4 / (4.0 * c**6)
    c = 10.0 - min(kappa, 0.0)
    return abs(kappa) / 10.0, c, 1.0 / (100.0 * c**2)


def _threshold(model: ModelKind, kappa: float, eps0: float, i: int, n: int) -> float:
    if model is ModelKind.SBP:
        return (kappa - eps0) * (1.0 - 0.5**i) * math.sqrt(n)
    return (kappa + eps0 + 0.5**i) * math.sqrt(n)


def _row_budget(model: ModelKind, kappa: float, i: int, m: int, variant: str) -> int:
    arg = i * kappa / 4.0 + 5.0 / kappa + 5.0 if model is ModelKind.SBP else i + 5.0
    return 2 * math.floor(psi(arg, variant) * m / 2.0) + 1


def _middle_block(model: ModelKind, kappa: float, mi: int, n: int) -> int:
    if model is ModelKind.SBP:
        return 2 * math.floor((kappa / 4.0) * math.sqrt(math.pi * mi * n / 2.0))
    return math.floor(math.sqrt(2.0 * math.pi * mi * n))


def _last_block(model: ModelKind, kappa: float, mR: int, n: int) -> int:
    if model is ModelKind.SBP:
        return math.floor((n**0.002 * kappa / 2.0) * math.sqrt(math.pi * mR * n / 2.0))
    return math.floor(n**0.002 * math.sqrt(2.0 * math.pi * mR * n))


def build_schedule(
    model,
    n: int,
    m: int,
    kappa: float,
    psi_variant: str = "std_normal_tail",
    eps0: float | None = None,
) -> Schedule:
    model = ModelKind.parse(model)
    psi_variant = parse_psi_variant(psi_variant)
    if n < 1 or m < 1:
        raise InvalidConfig("need n >= 1 and m >= 1")
    default_eps0, c_kappa, alpha0 = _constants(model, kappa)
    eps0 = default_eps0 if eps0 is None else eps0

    if model is ModelKind.SBP:
        n1 = 2 * math.floor(c_kappa * math.sqrt(math.pi * m * n / 2.0) / 2.0) + 1
    else:
        n1 = math.floor(c_kappa * math.sqrt(math.pi * m * n / 2.0))

    # R is the first round whose row budget has dropped to at most n^-0.01 of m
    cutoff = n ** (-0.01)
    budgets = [m]
    R = None
    for i in range(2, _MAX_ROUNDS):
        mi = _row_budget(model, kappa, i, m, psi_variant)
        budgets.append(mi)
        if mi / m <= cutoff:
            R = i
            break
        if mi == 1:
            break
    if R is None:
        raise InfeasibleSchedule(
            f"no round brings m_i/m below n^-0.01 = {cutoff:.4g} (m = {m} is too small)"
        )

    blocks = [n1]
    for i in range(2, R):
        blocks.append(_middle_block(model, kappa, budgets[i - 1], n))
    blocks.append(_last_block(model, kappa, budgets[R - 1], n))
    n0 = n - sum(blocks)
    if n0 < 0:
        raise InfeasibleSchedule(
            f"blocks 1..R need {sum(blocks)} columns but n = {n} (n_1 = {n1})"
        )
    # m_1 = m, so m_0 is negative by construction; it is reported, never used
    m0 = m - sum(budgets)
    thresholds = tuple(_threshold(model, kappa, eps0, i, n) for i in range(R))
    return Schedule(
        model=model,
        n=n,
        m=m,
        kappa=float(kappa),
        psi_variant=psi_variant,
        R=R,
        eps0=eps0,
        c_kappa=c_kappa,
        alpha0=alpha0,
        m_i=(m0, *budgets),
        n_i=(n0, *blocks),
        T_i=thresholds,
    )


def custom_schedule(
    model,
    kappa: float,
    n_i,
    m_i,
    m: int,
    psi_variant: str = "std_normal_tail",
    eps0: float | None = None,
) -> Schedule:
    """Schedule with explicit block sizes ``n_0..n_R`` and row budgets ``m_1..m_R``.

    The closed-form block sizes need n in the thousands at the very least; small
    hand-built schedules drive the same rounds on instances that can be enumerated.
    """
    model = ModelKind.parse(model)
    psi_variant = parse_psi_variant(psi_variant)
    n_i = tuple(int(v) for v in n_i)
    budgets = tuple(int(v) for v in m_i)
    if len(n_i) != len(budgets) + 1 or len(budgets) < 1:
        raise InvalidConfig("need block sizes n_0..n_R and row budgets m_1..m_R")
    if any(v < 0 for v in n_i):
        raise InvalidConfig("block sizes must be non-negative")
    if any(not 1 <= v <= m for v in budgets):
        raise InvalidConfig("row budgets must lie in [1, m]")
    n = sum(n_i)
    default_eps0, c_kappa, alpha0 = _constants(model, kappa)
    eps0 = default_eps0 if eps0 is None else eps0
    R = len(budgets)
    return Schedule(
        model=model,
        n=n,
        m=m,
        kappa=float(kappa),
        psi_variant=psi_variant,
        R=R,
        eps0=eps0,
        c_kappa=c_kappa,
        alpha0=alpha0,
        m_i=(m - sum(budgets), *budgets),
        n_i=n_i,
        T_i=tuple(_threshold(model, kappa, eps0, i, n) for i in range(R)),
        custom=True,
    )


def linear_cluster_eps0(model, kappa: float, kappa_prime: float) -> float:
    model = ModelKind.parse(model)
    if model is ModelKind.SBP:
        if not 0 < kappa_prime < kappa:
            raise InvalidMargins("SBP needs 0 < kappa' < kappa")
        return (kappa - kappa_prime) / 2.0
    if not kappa_prime > kappa:
        raise InvalidMargins("ABP needs kappa' > kappa")
    return (kappa_prime - kappa) / 2.0


def _cluster_gap(model: ModelKind, kappa: float, eps0: float, c_kappa: float, d: float) -> float:
    slope = kappa / 2.0 if model is ModelKind.SBP else 2.0
    return eps0 / math.sqrt(5.0 * d) - c_kappa + slope * math.log(d)


def solve_linear_cluster_d(model, kappa: float, kappa_prime: float, rel_tol: float = 1e-9) -> float:
    """Largest d in (0, 1] with eps0 / sqrt(5 d) >= C_kappa - slope * log(d).

    slope is kappa/2 for SBP and 2 for ABP.  The gap LHS - RHS decreases up to
    d* = eps0^2 / (5 slope^2) and increases afterwards, so when the gap is
    negative at d = 1 the feasible set is an interval (0, d_max].
    """
    model = ModelKind.parse(model)
    eps0 = linear_cluster_eps0(model, kappa, kappa_prime)
    _, c_kappa, _ = _constants(model, kappa)

    def gap(d: float) -> float:
        return _cluster_gap(model, kappa, eps0, c_kappa, d)

    if gap(1.0) >= 0:
        return 1.0
    slope = kappa / 2.0 if model is ModelKind.SBP else 2.0
    hi = min(1.0, eps0**2 / (5.0 * slope**2)) if slope > 0 else 1.0
    lo = hi
    while gap(lo) < 0:
        lo /= 2.0
        if lo < 1e-300:
            raise InvalidMargins("no feasible d found")
    while hi - lo > rel_tol * lo:
        mid = 0.5 * (lo + hi)
        if gap(mid) >= 0:
            lo = mid
        else:
            hi = mid
    return lo
