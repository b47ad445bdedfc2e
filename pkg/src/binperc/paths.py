"""Paths of single-coordinate flips between outputs of the majority algorithm.

A path is indexed by a tuple ``h = (h_a, h_1, ..., h_J)``.  The first coordinate
walks between two anchor vectors (``v`` and ``-v`` for the wide web, two
prefixes differing in one entry for the local paths).  Every later coordinate
walks, within one column chunk, from the algorithm's output on the current
vertex's prefix to its output on the right neighbour's prefix, flipping the
disagreeing entries in increasing index order.  Visiting the tuples in
lexicographic order moves exactly one coordinate per step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, InvalidInput, OutOfRange
from .model import Instance, hamming, is_margin_solution, is_solution, spins
from .schedule import Schedule, solve_linear_cluster_d
from .solver import block_level, check_compatible, round_block


def interpolate(v1, v2, k: int) -> np.ndarray:
    """``v1`` with its ``k`` lowest-index disagreements with ``v2`` switched to ``v2``."""
    a = np.asarray(v1)
    b = np.asarray(v2)
    if a.shape != b.shape:
        raise DimensionMismatch(f"length mismatch: {a.shape} vs {b.shape}")
    diff = np.flatnonzero(a != b)
    if not 0 <= k <= diff.size:
        raise OutOfRange(f"k = {k} outside [0, {diff.size}]")
    out = a.copy()
    out[diff[:k]] = b[diff[:k]]
    return out


def flip_prefix(v, k: int) -> np.ndarray:
    v = np.asarray(v)
    if not 0 <= k <= v.shape[0]:
        raise OutOfRange(f"k = {k} outside [0, {v.shape[0]}]")
    out = v.copy()
    out[:k] = -out[:k]
    return out


def prefix(v, k: int) -> np.ndarray:
    v = np.asarray(v)
    if not 0 <= k <= v.shape[0]:
        raise OutOfRange(f"k = {k} outside [0, {v.shape[0]}]")
    return v[:k].copy()


def level_of(v_len: int, schedule: Schedule) -> int:
    """Block index L with sum_{s<L} n_s <= v_len < sum_{s<=L} n_s."""
    if not schedule.n0 <= v_len < schedule.n:
        raise OutOfRange(f"length {v_len} outside [n0, n) = [{schedule.n0}, {schedule.n})")
    return block_level(schedule, v_len)


def augment_to_level(v, instance: Instance, schedule: Schedule, level: int) -> np.ndarray:
    v = spins(v)
    end = schedule.block_end(level)
    start = schedule.col_offset_i[level]
    if not start <= v.shape[0] <= end:
        raise OutOfRange(f"length {v.shape[0]} is not inside block {level}")
    if v.shape[0] == end:
        return v.copy()
    sums = instance.entries[:, :start].astype(np.int64) @ v[:start].astype(np.int64)
    out = np.empty(end, dtype=np.int8)
    out[: v.shape[0]] = v
    out[v.shape[0] :] = round_block(instance, schedule, level, sums)[v.shape[0] - start :]
    return out


def augment(v, instance: Instance, schedule: Schedule) -> np.ndarray:
    """``v`` followed by the algorithm's output on the rest of its block."""
    check_compatible(instance, schedule)
    v = spins(v)
    return augment_to_level(v, instance, schedule, level_of(v.shape[0], schedule))


@dataclass
class _Chunk:
    round: int
    lo: int
    hi: int
    block_start: int


@dataclass
class _Level:
    a: np.ndarray
    b: np.ndarray
    diff: np.ndarray
    h: int = 0

    @property
    def D(self) -> int:
        return int(self.diff.size)


class PathCursor:
    """Lazy lexicographic walk over the tuple-indexed path.

    Only the current vertex, the per-level segment pairs and O(m) row-sum vectors
    per level are held; the path itself is never materialised.
    """

    def __init__(self, instance: Instance, schedule: Schedule, anchor_left, anchor_right, kind: str = "path"):
        check_compatible(instance, schedule)
        self.instance = instance
        self.schedule = schedule
        self.kind = kind
        a = spins(anchor_left)
        b = spins(anchor_right)
        if a.shape != b.shape:
            raise DimensionMismatch("anchors must have the same length")
        p0 = a.shape[0]
        if not schedule.n0 <= p0 <= instance.n:
            raise OutOfRange(f"anchor length {p0} outside [n0, n]")
        self.anchor_len = p0
        self._G = instance.entries
        self._chunks: list[_Chunk] = []
        pos = p0
        level = block_level(schedule, pos)
        while pos < instance.n:
            end = schedule.block_end(level)
            self._chunks.append(_Chunk(level, pos, end, schedule.col_offset_i[level]))
            pos = end
            level += 1
        # empty trailing blocks still own a tuple coordinate (always 0)
        for k in range(level, schedule.R + 1):
            self._chunks.append(_Chunk(k, pos, pos, schedule.col_offset_i[k]))
        anchor = _Level(a.copy(), b.copy(), np.flatnonzero(a != b))
        G_anchor = self._G[:, :p0].astype(np.int64)
        base = G_anchor @ a.astype(np.int64)
        steps = G_anchor[:, anchor.diff] * (b[anchor.diff].astype(np.int64) - a[anchor.diff])
        self._anchor_sums = np.concatenate([base[:, None], base[:, None] + np.cumsum(steps, axis=1)], axis=1)
        self.levels: list[_Level] = [anchor]
        self.x = np.zeros(instance.n, dtype=np.int8)
        self.x[:p0] = a
        self._left_sums: list[np.ndarray] = [self._anchor_sums[:, 0]]
        self._right_sums: list[np.ndarray | None] = [self._anchor_right(0)]
        self._exhausted = False
        self._rebuild_from(1, None)

    # -- sums and segments -------------------------------------------------

    def _anchor_right(self, h: int) -> np.ndarray | None:
        lv = self.levels[0]
        return self._anchor_sums[:, h + 1] if h < lv.D else None

    def _chunk_sums(self, j: int, values: np.ndarray) -> np.ndarray:
        c = self._chunks[j - 1]
        return self._G[:, c.lo : c.hi].astype(np.int64) @ values.astype(np.int64)

    def _segment(self, j: int, sums_at_lo: np.ndarray, vector_prefix: np.ndarray | None) -> np.ndarray:
        c = self._chunks[j - 1]
        if c.hi == c.lo:
            return np.zeros(0, dtype=np.int8)
        if c.block_start == c.lo:
            sums = sums_at_lo
        else:
            sums = self._G[:, : c.block_start].astype(np.int64) @ vector_prefix[: c.block_start].astype(np.int64)
        return round_block(self.instance, self.schedule, c.round, sums)[c.lo - c.block_start :]

    def _right_anchor_vector(self) -> np.ndarray:
        lv = self.levels[0]
        v = self.x[: self.anchor_len].copy()
        if lv.h < lv.D:
            p = lv.diff[lv.h]
            v[p] = lv.b[p]
        return v

    def _rebuild_from(self, j0: int, hs):
        """Recompute levels ``j0..J`` below the current prefix, using ``hs`` or zeros."""
        del self.levels[j0:]
        del self._left_sums[j0:]
        del self._right_sums[j0:]
        for j in range(j0, len(self._chunks) + 1):
            c = self._chunks[j - 1]
            h = 0 if hs is None else hs[j - j0]
            left_prev = self._left_sums[j - 1]
            right_prev = self._right_sums[j - 1]
            need_vec = c.block_start != c.lo
            a = self._segment(j, left_prev, self.x if need_vec else None)
            if right_prev is None:
                b = a
            else:
                b = self._segment(j, right_prev, self._right_anchor_vector() if need_vec else None)
            lv = _Level(a, b, np.flatnonzero(a != b))
            if not 0 <= h <= lv.D or (right_prev is None and h != 0):
                raise OutOfRange(f"h at level {j} = {h} outside [0, {lv.D}]")
            lv.h = h
            seg = a.copy()
            seg[lv.diff[:h]] = b[lv.diff[:h]]
            self.x[c.lo : c.hi] = seg
            left = left_prev + self._chunk_sums(j, seg)
            self.levels.append(lv)
            self._left_sums.append(left)
            self._right_sums.append(self._level_right(j, left, right_prev))

    def _level_right(self, j: int, left: np.ndarray, right_prev: np.ndarray | None):
        lv = self.levels[j]
        if right_prev is None:
            return None
        if lv.h < lv.D:
            p = lv.diff[lv.h]
            c = self._chunks[j - 1]
            return left + 2 * self._G[:, c.lo + p].astype(np.int64) * int(lv.b[p])
        return right_prev + self._chunk_sums(j, lv.b)

    # -- public ------------------------------------------------------------

    @property
    def h(self) -> tuple[int, ...]:
        return tuple(lv.h for lv in self.levels)

    @property
    def D(self) -> tuple[int, ...]:
        return tuple(lv.D for lv in self.levels)

    @property
    def row_sums(self) -> np.ndarray:
        return self._left_sums[-1]

    def vertex(self) -> np.ndarray:
        return self.x.copy()

    def right_neighbor(self) -> np.ndarray | None:
        """T^{+1} of the current tuple, or None at the terminal tuple."""
        if self._right_sums[-1] is None:
            return None
        out = self.x.copy()
        J = len(self.levels) - 1
        j = J
        while j >= 0 and self.levels[j].h == self.levels[j].D:
            j -= 1
        if j < 0:
            return None
        lv = self.levels[j]
        p = int(lv.diff[lv.h])
        off = 0 if j == 0 else self._chunks[j - 1].lo
        out[off + p] = lv.b[p]
        for i in range(j + 1, J + 1):
            c = self._chunks[i - 1]
            out[c.lo : c.hi] = self.levels[i].b
        return out

    def seek(self, hs) -> "PathCursor":
        hs = tuple(int(v) for v in hs)
        if len(hs) != len(self._chunks) + 1:
            raise OutOfRange(f"tuple must have {len(self._chunks) + 1} entries")
        anchor = self.levels[0]
        if not 0 <= hs[0] <= anchor.D:
            raise OutOfRange(f"h_a = {hs[0]} outside [0, {anchor.D}]")
        if hs[0] == anchor.D and any(hs[1:]):
            raise OutOfRange("the terminal anchor value only admits zeros below it")
        anchor.h = hs[0]
        seg = anchor.a.copy()
        seg[anchor.diff[: hs[0]]] = anchor.b[anchor.diff[: hs[0]]]
        self.x[: self.anchor_len] = seg
        self._left_sums[0] = self._anchor_sums[:, hs[0]]
        self._right_sums[0] = self._anchor_right(hs[0])
        self._rebuild_from(1, hs[1:])
        self._exhausted = False
        return self

    def advance(self) -> bool:
        """Move to the lexicographic successor; False once the path has ended."""
        J = len(self.levels) - 1
        j = J
        while j >= 0 and self.levels[j].h >= self.levels[j].D:
            j -= 1
        if j < 0:
            self._exhausted = True
            return False
        lv = self.levels[j]
        p = int(lv.diff[lv.h])
        lv.h += 1
        if j == 0:
            self.x[p] = lv.b[p]
            self._left_sums[0] = self._anchor_sums[:, lv.h]
            self._right_sums[0] = self._anchor_right(lv.h)
        else:
            c = self._chunks[j - 1]
            self.x[c.lo + p] = lv.b[p]
            self._left_sums[j] = self._left_sums[j] + 2 * self._G[:, c.lo + p].astype(np.int64) * int(lv.b[p])
            self._right_sums[j] = self._level_right(j, self._left_sums[j], self._right_sums[j - 1])
        self._rebuild_from(j + 1, None)
        return True

    def _jump(self, j: int, h: int) -> None:
        """Set h_j (currently 0, j >= 1) and reset every deeper level to 0."""
        lv = self.levels[j]
        if not 0 <= h <= lv.D:
            raise OutOfRange(f"h at level {j} = {h} outside [0, {lv.D}]")
        if h == 0:
            return
        c = self._chunks[j - 1]
        idx = lv.diff[:h]
        self.x[c.lo + idx] = lv.b[idx]
        delta = self._G[:, c.lo + idx].astype(np.int64) @ (lv.b[idx].astype(np.int64) - lv.a[idx])
        lv.h = h
        self._left_sums[j] = self._left_sums[j] + delta
        self._right_sums[j] = self._level_right(j, self._left_sums[j], self._right_sums[j - 1])
        self._rebuild_from(j + 1, None)

    def __iter__(self):
        """Yield ``(h, vertex)`` from the current tuple to the end of the path."""
        while True:
            yield self.h, self.vertex()
            if not self.advance():
                return

    def first_tuple(self) -> tuple[int, ...]:
        return (0,) * (len(self._chunks) + 1)

    def last_tuple(self) -> tuple[int, ...]:
        return (self.levels[0].D,) + (0,) * len(self._chunks)

    def successor(self) -> tuple[int, ...] | None:
        """Lexicographic successor of the current tuple within the index ranges."""
        hs = list(self.h)
        Ds = self.D
        j = len(hs) - 1
        while j >= 0 and hs[j] >= Ds[j]:
            j -= 1
        if j < 0:
            return None
        hs[j] += 1
        for i in range(j + 1, len(hs)):
            hs[i] = 0
        return tuple(hs)


def _fresh(cursor: PathCursor) -> PathCursor:
    anchor = cursor.levels[0]
    return PathCursor(cursor.instance, cursor.schedule, anchor.a, anchor.b, cursor.kind)


def wide_web_path(instance: Instance, schedule: Schedule, v) -> PathCursor:
    """Path from A(v) to A(-v) for a block-0 vector ``v``."""
    v = spins(v)
    if v.shape[0] != schedule.n0:
        raise DimensionMismatch(f"v must have length n0 = {schedule.n0}")
    return PathCursor(instance, schedule, v, -v, kind="wide_web")


def _cluster_d_count(instance: Instance, kappa_prime: float, d_count: int | None) -> int:
    if d_count is not None:
        return int(d_count)
    d = solve_linear_cluster_d(instance.model, instance.kappa, kappa_prime)
    return math.ceil(d * instance.n)


def _require_margin(instance: Instance, X: np.ndarray, kappa_prime: float) -> None:
    if X.shape[0] != instance.n:
        raise DimensionMismatch("X must have length n")
    if not is_margin_solution(instance, X, kappa_prime):
        raise InvalidInput(f"X is not a {kappa_prime}-margin solution")


def local_path_first(
    instance: Instance, schedule: Schedule, X, ell: int, kappa_prime: float, d_count: int | None = None
) -> PathCursor:
    """Path from A(X[:ell]) to A(X[:ell+1])."""
    X = spins(X)
    _require_margin(instance, X, kappa_prime)
    dc = _cluster_d_count(instance, kappa_prime, d_count)
    n = instance.n
    if not (n - dc <= ell <= n - 1 and ell >= schedule.n0):
        raise OutOfRange(f"ell = {ell} outside [max(n - d, n0), n - 1] = [{max(n - dc, schedule.n0)}, {n - 1}]")
    L = level_of(ell, schedule)
    X1 = augment_to_level(X[:ell], instance, schedule, L)
    X2 = augment_to_level(X[: ell + 1], instance, schedule, L)
    return PathCursor(instance, schedule, X1, X2, kind="local_first")


def local_path_second(
    instance: Instance, schedule: Schedule, X, ell: int, d_count: int, kappa_prime: float | None = None
) -> PathCursor:
    """Path from A(F(X, ell)[:n-d]) to A(F(X, ell+1)[:n-d])."""
    X = spins(X)
    if kappa_prime is not None:
        _require_margin(instance, X, kappa_prime)
    n = instance.n
    if not 0 <= ell <= d_count - 1:
        raise OutOfRange(f"ell = {ell} outside [0, d - 1] = [0, {d_count - 1}]")
    cut = n - d_count
    if not schedule.n0 <= cut < n:
        raise OutOfRange(f"n - d = {cut} outside [n0, n)")
    X1 = flip_prefix(X, ell)[:cut]
    X2 = flip_prefix(X, ell + 1)[:cut]
    return PathCursor(instance, schedule, X1, X2, kind="local_second")


@dataclass
class PathReport:
    kind: str
    mode: str
    length: int
    adjacency_ok: bool
    successor_ok: bool
    first: np.ndarray
    last: np.ndarray
    solutions: int
    solution_fraction: float
    failures: list[tuple[int, ...]] = field(default_factory=list)
    adjacency_failures: list[tuple[int, ...]] = field(default_factory=list)

    @property
    def first_failure(self) -> tuple[int, ...] | None:
        return self.failures[0] if self.failures else None

    def to_json(self) -> dict:
        from .model import spin_string

        return {
            "kind": self.kind,
            "mode": self.mode,
            "length": self.length,
            "adjacency_ok": self.adjacency_ok,
            "successor_ok": self.successor_ok,
            "solutions": self.solutions,
            "solution_fraction": self.solution_fraction,
            "first": spin_string(self.first),
            "last": spin_string(self.last),
            "failures": [list(f) for f in self.failures[:100]],
            "adjacency_failures": [list(f) for f in self.adjacency_failures[:100]],
        }


def sample_tuple(cursor: PathCursor, rng: np.random.Generator) -> tuple[int, ...]:
    """Draw a non-terminal tuple, uniform at each level given the levels above.

    Leaves ``cursor`` positioned on the drawn tuple.
    """
    D0 = cursor.levels[0].D
    cursor.seek((int(rng.integers(0, D0)),) + (0,) * len(cursor._chunks))
    for j in range(1, len(cursor._chunks) + 1):
        cursor._jump(j, int(rng.integers(0, cursor.levels[j].D + 1)))
    return cursor.h


def verify_path(
    instance: Instance,
    cursor: PathCursor,
    sample="all",
    seed: int = 0,
    max_failures: int = 100,
    check_successor: bool = True,
) -> PathReport:
    """Check adjacency and solution membership along a path.

    ``sample="all"`` walks the whole path.  An integer ``k`` checks ``k`` random
    non-terminal tuples: the vertex, its right neighbour, and that the right
    neighbour equals the vertex of the lexicographic successor, rebuilt from scratch.
    """
    walker = _fresh(cursor)
    first = walker.seek(walker.first_tuple()).vertex()
    last = walker.seek(walker.last_tuple()).vertex()
    failures: list[tuple[int, ...]] = []
    adj_fail: list[tuple[int, ...]] = []
    solutions = 0
    count = 0
    succ_ok = True
    if sample == "all":
        walker.seek(walker.first_tuple())
        prev = None
        for hs, vec in walker:
            count += 1
            if is_solution(instance, vec):
                solutions += 1
            elif len(failures) < max_failures:
                failures.append(hs)
            if prev is not None and hamming(prev, vec) != 1 and len(adj_fail) < max_failures:
                adj_fail.append(hs)
            prev = vec
        mode = "all"
    else:
        k = int(sample)
        rng = np.random.Generator(np.random.Philox(key=seed))
        checker = _fresh(cursor)
        mode = f"random({k})"
        if cursor.levels[0].D == 0:
            k = 0
            count = 1
            solutions = int(is_solution(instance, first))
            if not solutions:
                failures.append(walker.first_tuple())
        for _ in range(k):
            hs = sample_tuple(walker, rng)
            vec = walker.vertex()
            right = walker.right_neighbor()
            succ = walker.successor()
            count += 1
            if is_solution(instance, vec):
                solutions += 1
            elif len(failures) < max_failures:
                failures.append(hs)
            if right is None or hamming(vec, right) != 1:
                if len(adj_fail) < max_failures:
                    adj_fail.append(hs)
            if check_successor and (right is None or not np.array_equal(right, checker.seek(succ).vertex())):
                succ_ok = False
    return PathReport(
        kind=cursor.kind,
        mode=mode,
        length=count,
        adjacency_ok=not adj_fail,
        successor_ok=succ_ok,
        first=first,
        last=last,
        solutions=solutions,
        solution_fraction=solutions / count if count else 0.0,
        failures=failures,
        adjacency_failures=adj_fail,
    )
