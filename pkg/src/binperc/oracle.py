"""Exhaustive solution enumeration and cluster census for small n.

Candidates are coded as integers: bit ``n-1-i`` set means ``x_i = -1``.  Sorting
the codes therefore lists vectors lexicographically with +1 before -1, and a
row sum is ``n - 2 * popcount(row_code ^ x_code)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .errors import DimensionMismatch, TooLarge
from .model import Instance, ModelKind, satisfied_rows, spin_string

DEFAULT_CAP = 22
EXACT_DIAMETER_LIMIT = 4096
ECCENTRICITY_STARTS = 64
_CHUNK = 1 << 18


def encode(vectors) -> np.ndarray:
    """Pack +-1 rows into int64 codes (coordinate 0 is the most significant bit)."""
    v = np.atleast_2d(np.asarray(vectors))
    n = v.shape[1]
    if n > 62:
        raise TooLarge("codes hold at most 62 coordinates")
    weights = np.left_shift(np.int64(1), np.arange(n - 1, -1, -1, dtype=np.int64))
    return (v < 0).astype(np.int64) @ weights


def decode(codes, n: int) -> np.ndarray:
    codes = np.asarray(codes, dtype=np.int64).reshape(-1)
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    bits = (codes[:, None] >> shifts[None, :]) & 1
    return (1 - 2 * bits).astype(np.int8)


def _popcount(a: np.ndarray) -> np.ndarray:
    return np.bitwise_count(a).astype(np.int64)


def solution_codes(instance: Instance, cap: int = DEFAULT_CAP, kappa: float | None = None) -> np.ndarray:
    """Sorted codes of every vector satisfying all rows at margin ``kappa`` (default: the instance's)."""
    n = instance.n
    if n > cap:
        raise TooLarge(f"n = {n} exceeds the enumeration cap {cap}")
    kappa = instance.kappa if kappa is None else kappa
    rows = encode(instance.entries)
    found = []
    total = 1 << n
    for lo in range(0, total, _CHUNK):
        cand = np.arange(lo, min(total, lo + _CHUNK), dtype=np.int64)
        keep = np.ones(cand.shape[0], dtype=bool)
        for g in rows:
            sums = n - 2 * _popcount(cand ^ g)
            keep &= satisfied_rows(instance.model, sums, kappa, n)
            if not keep.any():
                break
        found.append(cand[keep])
    return np.concatenate(found) if found else np.zeros(0, dtype=np.int64)


def enumerate_solutions(instance: Instance, cap: int = DEFAULT_CAP) -> list[np.ndarray]:
    """All solutions in lexicographic order, +1 before -1 in each coordinate."""
    codes = solution_codes(instance, cap)
    return list(decode(codes, instance.n))


@dataclass(frozen=True)
class Component:
    size: int
    diameter: int
    representative: np.ndarray
    approximate: bool = False

    def to_json(self) -> dict:
        return {
            "size": self.size,
            "diameter": self.diameter,
            "approximate": self.approximate,
            "representative": spin_string(self.representative),
        }


@dataclass
class ClusterCensus:
    n: int
    total_solutions: int
    components: list[Component]
    isolated_count: int
    labels: np.ndarray = field(repr=False)
    kappa_prime_tags: np.ndarray | None = field(default=None, repr=False)

    @property
    def isolated_fraction(self) -> float:
        return self.isolated_count / self.total_solutions if self.total_solutions else 0.0

    def to_json(self) -> dict:
        out = {
            "n": self.n,
            "total_solutions": self.total_solutions,
            "component_count": len(self.components),
            "isolated_count": self.isolated_count,
            "isolated_fraction": self.isolated_fraction,
            "components": [c.to_json() for c in self.components],
        }
        if self.kappa_prime_tags is not None:
            out["kappa_prime_count"] = int(self.kappa_prime_tags.sum())
        return out


def _as_codes(solutions, n: int | None) -> tuple[np.ndarray, int]:
    if isinstance(solutions, np.ndarray) and solutions.ndim == 1 and solutions.dtype == np.int64 and n is not None:
        return np.sort(solutions), n
    sols = list(solutions)
    if not sols:
        return np.zeros(0, dtype=np.int64), (n or 0)
    arr = np.asarray(sols)
    if n is not None and arr.shape[1] != n:
        raise DimensionMismatch("solution length differs from n")
    return np.sort(encode(arr)), arr.shape[1]


def adjacency_edges(codes: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Index pairs (i, j), i < j, of sorted codes at Hamming distance one."""
    src, dst = [], []
    for b in range(n):
        probe = codes ^ (np.int64(1) << b)
        pos = np.searchsorted(codes, probe)
        pos_c = np.minimum(pos, codes.shape[0] - 1)
        hit = (pos < codes.shape[0]) & (codes[pos_c] == probe)
        i = np.flatnonzero(hit)
        j = pos_c[hit]
        keep = i < j
        src.append(i[keep])
        dst.append(j[keep])
    return np.concatenate(src), np.concatenate(dst)


def _max_pairwise(codes: np.ndarray) -> int:
    best = 0
    for s in range(0, codes.shape[0], 512):
        block = codes[s : s + 512]
        best = max(best, int(_popcount(block[:, None] ^ codes[None, :]).max()))
    return best


def _eccentricity_estimate(codes: np.ndarray, seed: int) -> int:
    rng = np.random.default_rng(seed)
    starts = rng.choice(codes.shape[0], size=min(ECCENTRICITY_STARTS, codes.shape[0]), replace=False)
    return max(int(_popcount(codes ^ codes[s]).max()) for s in starts)


def cluster_census(instance: Instance, solutions, seed: int = 0) -> ClusterCensus:
    """Connected components of the solutions under single-coordinate flips.

    Diameters are maximum pairwise Hamming distances; components larger than
    ``EXACT_DIAMETER_LIMIT`` get a lower bound from 64 seeded starts and are
    flagged ``approximate``.
    """
    n = instance.n
    codes, _ = _as_codes(solutions, n)
    N = codes.shape[0]
    if N == 0:
        return ClusterCensus(n, 0, [], 0, np.zeros(0, dtype=np.int64))
    src, dst = adjacency_edges(codes, n)
    graph = coo_matrix((np.ones(src.shape[0], dtype=np.int8), (src, dst)), shape=(N, N))
    count, labels = connected_components(graph, directed=False)
    order = np.argsort(labels, kind="stable")
    bounds = np.searchsorted(labels[order], np.arange(count + 1))
    comps = []
    for c in range(count):
        members = codes[order[bounds[c] : bounds[c + 1]]]
        if members.shape[0] <= EXACT_DIAMETER_LIMIT:
            diam, approx = _max_pairwise(members), False
        else:
            diam, approx = _eccentricity_estimate(members, seed + c), True
        comps.append(Component(int(members.shape[0]), diam, decode(members[:1], n)[0], approx))
    isolated = sum(1 for c in comps if c.size == 1)
    return ClusterCensus(n, N, comps, isolated, labels)


def margin_tags(instance: Instance, solutions, kappa_prime: float) -> np.ndarray:
    codes, n = _as_codes(solutions, instance.n)
    tags = np.ones(codes.shape[0], dtype=bool)
    for g in encode(instance.entries):
        sums = n - 2 * _popcount(codes ^ g)
        tags &= satisfied_rows(instance.model, sums, kappa_prime, n)
    return tags


@dataclass(frozen=True)
class MarginCensus:
    flags: np.ndarray
    kappa_prime_count: int
    wide_count: int
    threshold: int

    @property
    def fraction(self) -> float:
        return self.wide_count / self.kappa_prime_count if self.kappa_prime_count else 0.0


def margin_census(
    instance: Instance, solutions, kappa_prime: float, threshold: int = 0, census: ClusterCensus | None = None
) -> MarginCensus:
    """Flag kappa'-solutions and count those whose component diameter is at least ``threshold``."""
    if instance.model is ModelKind.SBP and not kappa_prime > 0:
        # limit kappa' -> 0: only all-zero row sums qualify
        codes, n = _as_codes(solutions, instance.n)
        flags = np.ones(codes.shape[0], dtype=bool)
        for g in encode(instance.entries):
            flags &= (n - 2 * _popcount(codes ^ g)) == 0
    else:
        flags = margin_tags(instance, solutions, kappa_prime)
    census = census or cluster_census(instance, solutions)
    diam = np.array([c.diameter for c in census.components], dtype=np.int64)
    wide = int(np.count_nonzero(flags & (diam[census.labels] >= threshold))) if flags.size else 0
    census.kappa_prime_tags = flags
    return MarginCensus(flags, int(flags.sum()), wide, threshold)
