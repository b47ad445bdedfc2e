"""Instances, spin vectors and the solution predicates for both perceptron models."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, InvalidConfig

# absorbs representation error of kappa * sqrt(n) only
_MARGIN_SLACK = 1e-12


class ModelKind(str, enum.Enum):
    SBP = "sbp"
    ABP = "abp"

    @classmethod
    def parse(cls, value: "str | ModelKind") -> "ModelKind":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise InvalidConfig(f"unknown model {value!r}") from None


def spins(values) -> np.ndarray:
    """Coerce a sequence (or a ``+-`` string) to an int8 array over {+1, -1}."""
    if isinstance(values, str):
        arr = np.frombuffer(values.encode("ascii"), dtype=np.uint8)
        if not np.all((arr == ord("+")) | (arr == ord("-"))):
            raise InvalidConfig("spin strings may only contain '+' and '-'")
        return np.where(arr == ord("+"), 1, -1).astype(np.int8)
    arr = np.asarray(values, dtype=np.int8).reshape(-1)
    if not np.all((arr == 1) | (arr == -1)):
        raise InvalidConfig("spin vectors take values in {+1, -1}")
    return arr


def spin_string(x) -> str:
    return "".join("+" if v > 0 else "-" for v in np.asarray(x).tolist())


@dataclass(frozen=True, eq=False)
class Instance:
    model: ModelKind
    kappa: float
    entries: np.ndarray
    seed: int = 0

    def __post_init__(self):
        model = ModelKind.parse(self.model)
        object.__setattr__(self, "model", model)
        G = np.asarray(self.entries)
        if G.ndim != 2 or G.shape[0] < 1 or G.shape[1] < 1:
            raise InvalidConfig("constraint matrix must be m x n with m, n >= 1")
        if not np.all((G == 1) | (G == -1)):
            raise InvalidConfig("constraint entries take values in {+1, -1}")
        if model is ModelKind.SBP and not self.kappa > 0:
            raise InvalidConfig("SBP requires kappa > 0")
        G = np.ascontiguousarray(G, dtype=np.int8)
        G.setflags(write=False)
        object.__setattr__(self, "entries", G)
        object.__setattr__(self, "kappa", float(self.kappa))

    @property
    def m(self) -> int:
        return self.entries.shape[0]

    @property
    def n(self) -> int:
        return self.entries.shape[1]

    @property
    def alpha(self) -> float:
        return self.m / self.n

    def __eq__(self, other):
        if not isinstance(other, Instance):
            return NotImplemented
        return (
            self.model is other.model
            and self.kappa == other.kappa
            and np.array_equal(self.entries, other.entries)
        )


@dataclass(frozen=True)
class MarginReport:
    row_sums: np.ndarray
    scaled: np.ndarray
    satisfied: np.ndarray
    all_satisfied: bool


def sgn(x):
    """Sign with the tie-break sgn(0) = +1; works on scalars and arrays."""
    if np.ndim(x) == 0:
        return 1 if x >= 0 else -1
    return np.where(np.asarray(x) >= 0, 1, -1).astype(np.int64)


def _check_len(instance: Instance, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x)
    if x.ndim != 1 or x.shape[0] != instance.n:
        raise DimensionMismatch(f"expected a vector of length {instance.n}, got shape {x.shape}")
    return x


def row_sums(instance: Instance, x) -> np.ndarray:
    x = _check_len(instance, x)
    return instance.entries.astype(np.int64) @ x.astype(np.int64)


def satisfied_rows(model: ModelKind, sums: np.ndarray, kappa: float, n: int) -> np.ndarray:
    bound = kappa * math.sqrt(n)
    slack = _MARGIN_SLACK * math.sqrt(n)
    if model is ModelKind.SBP:
        return np.abs(sums) <= bound + slack
    return sums >= bound - slack


def margin_report(instance: Instance, x, kappa: float | None = None) -> MarginReport:
    kappa = instance.kappa if kappa is None else kappa
    s = row_sums(instance, x)
    ok = satisfied_rows(instance.model, s, kappa, instance.n)
    return MarginReport(s, s / math.sqrt(instance.n), ok, bool(ok.all()))


def is_solution(instance: Instance, x) -> bool:
    return margin_report(instance, x).all_satisfied


def is_margin_solution(instance: Instance, x, kappa_prime: float) -> bool:
    """Whether ``x`` satisfies every constraint with margin ``kappa_prime`` instead of kappa."""
    if instance.model is ModelKind.SBP and not kappa_prime > 0:
        raise InvalidConfig("SBP margin solutions need kappa' > 0")
    return margin_report(instance, x, kappa_prime).all_satisfied


def hamming(a, b) -> int:
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise DimensionMismatch(f"length mismatch: {a.shape} vs {b.shape}")
    return int(np.count_nonzero(a != b))
