import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from binperc.errors import DimensionMismatch, InvalidInput, OutOfRange
from binperc.model import hamming, is_solution, spins
from binperc.paths import (
    augment,
    flip_prefix,
    interpolate,
    level_of,
    local_path_first,
    local_path_second,
    prefix,
    verify_path,
    wide_web_path,
)
from binperc.schedule import build_schedule
from binperc.solver import Policy, complete, solve

from conftest import tiny_instance, tiny_schedule
from pathref import literal_T, literal_tuples


def test_interpolate_examples():
    v1, v2 = spins("+++"), spins("-+-")
    assert interpolate(v1, v2, 1).tolist() == spins("-++").tolist()
    assert np.array_equal(interpolate(v1, v2, 0), v1)
    assert np.array_equal(interpolate(v1, v2, 2), v2)
    with pytest.raises(OutOfRange):
        interpolate(v1, v2, 3)
    with pytest.raises(DimensionMismatch):
        interpolate(v1, spins("++"), 0)


def test_flip_and_prefix():
    v = spins("+-+")
    assert np.array_equal(flip_prefix(v, 0), v)
    assert np.array_equal(flip_prefix(v, 3), -v)
    assert flip_prefix(v, 2).tolist() == spins("-++").tolist()
    assert prefix(v, 0).size == 0
    assert prefix(v, 2).tolist() == [1, -1]
    with pytest.raises(OutOfRange):
        prefix(v, 4)
    with pytest.raises(OutOfRange):
        flip_prefix(v, -1)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 30).flatmap(lambda n: st.tuples(
    st.lists(st.sampled_from([-1, 1]), min_size=n, max_size=n),
    st.lists(st.sampled_from([-1, 1]), min_size=n, max_size=n))), st.data())
def test_interpolate_properties(pair, data):
    a, b = (np.array(p, dtype=np.int8) for p in pair)
    d = hamming(a, b)
    k = data.draw(st.integers(0, d))
    w = interpolate(a, b, k)
    assert hamming(a, w) == k
    assert hamming(w, b) == d - k
    diff = np.flatnonzero(a != b)
    assert np.array_equal(w[diff[:k]], b[diff[:k]])


def test_level_of():
    s = tiny_schedule("sbp", 1.0)  # blocks (5, 4, 2, 2)
    assert level_of(5, s) == 1
    assert level_of(9, s) == 2
    assert level_of(12, s) == 3
    with pytest.raises(OutOfRange):
        level_of(4, s)
    with pytest.raises(OutOfRange):
        level_of(13, s)


def test_augment():
    inst = tiny_instance("sbp", 1.0, 2)
    s = tiny_schedule("sbp", 1.0)
    x = solve(inst, s).x
    assert np.array_equal(augment(x[:9], inst, s), x[:11])
    mid = augment(x[:6], inst, s)
    assert mid.shape == (9,) and np.array_equal(mid[:6], x[:6])
    assert np.array_equal(augment(x[:5], inst, s), x[:9])


VACUOUS = [("sbp", 4.0), ("abp", -4.0)]


@pytest.mark.parametrize("model,kappa", VACUOUS)
@pytest.mark.parametrize("seed", [0, 1, 2])
def test_cursor_matches_literal_construction(model, kappa, seed):
    inst = tiny_instance(model, kappa, seed, n=13, m=5)
    sched = tiny_schedule(model, kappa)
    v = np.random.default_rng(seed).choice(np.array([-1, 1], dtype=np.int8), size=sched.n0)
    expected = literal_tuples(inst, sched, v)
    cursor = wide_web_path(inst, sched, v)
    seen = []
    prev = None
    for hs, vec in cursor:
        seen.append(hs)
        ref, _, _ = literal_T(inst, sched, v, hs)
        assert np.array_equal(vec, ref)
        if prev is not None:
            assert hamming(prev, vec) == 1
        prev = vec
    assert seen == expected
    # every right neighbour equals the vertex of the next tuple
    for a, b in zip(expected, expected[1:]):
        _, right, _ = literal_T(inst, sched, v, a)
        nxt, _, _ = literal_T(inst, sched, v, b)
        assert np.array_equal(right, nxt)
    assert np.array_equal(vec, solve(inst, sched, Policy.given(-v)).x)


def test_exhaustive_report_on_tiny_instance():
    inst = tiny_instance("sbp", 4.0, 5)
    sched = tiny_schedule("sbp", 4.0)
    v = spins("+-+--")
    rep = verify_path(inst, wide_web_path(inst, sched, v))
    assert rep.adjacency_ok
    assert rep.solution_fraction == 1.0
    assert np.array_equal(rep.first, solve(inst, sched, Policy.given(v)).x)
    assert np.array_equal(rep.last, solve(inst, sched, Policy.given(-v)).x)
    # m odd and every prefix length odd: the far end is the exact negation
    assert np.array_equal(rep.last, -rep.first)
    json.dumps(rep.to_json())


def test_solution_fraction_is_exact_in_all_mode():
    inst = tiny_instance("sbp", 1.2, 11)
    sched = tiny_schedule("sbp", 1.2)
    cursor = wide_web_path(inst, sched, spins("++-+-"))
    rep = verify_path(inst, cursor)
    walk = [vec for _, vec in wide_web_path(inst, sched, spins("++-+-"))]
    assert rep.length == len(walk)
    assert rep.solutions == sum(is_solution(inst, w) for w in walk)


def test_random_mode_deterministic_and_consistent():
    inst = tiny_instance("sbp", 4.0, 7)
    sched = tiny_schedule("sbp", 4.0)
    v = spins("-++-+")
    a = verify_path(inst, wide_web_path(inst, sched, v), sample=50, seed=9)
    b = verify_path(inst, wide_web_path(inst, sched, v), sample=50, seed=9)
    assert a.to_json() == b.to_json()
    assert a.adjacency_ok and a.successor_ok


def test_single_vertex_path():
    inst = tiny_instance("sbp", 4.0, 7)
    sched = tiny_schedule("sbp", 4.0)
    x = solve(inst, sched).x
    # ell = n - 1 with X[:n-1] already completing to X: anchors coincide when X is an algorithm output
    cursor = local_path_first(inst, sched, x, inst.n - 1, 4.0, d_count=1)
    rep = verify_path(inst, cursor)
    assert rep.adjacency_ok
    assert rep.solution_fraction in (0.0, 1.0)


def test_desk_scale_wide_web_sampled():
    n, m = 20000, 9
    from binperc.generate import GenConfig, sample_instance
    from binperc.model import ModelKind

    inst = sample_instance(GenConfig(ModelKind.SBP, n, m / n, 1.0, 4), m=m)
    sched = build_schedule("sbp", n, m, 1.0)
    v = np.random.default_rng(4).choice(np.array([-1, 1], dtype=np.int8), size=sched.n0)
    rep = verify_path(inst, wide_web_path(inst, sched, v), sample=100, seed=1)
    assert rep.adjacency_ok and rep.successor_ok
    assert np.array_equal(rep.first, solve(inst, sched, Policy.given(v)).x)
    assert np.array_equal(rep.last, solve(inst, sched, Policy.given(-v)).x)


def _margin_solution(model, kappa, kappa_prime, sched, tries=4000):
    for seed in range(tries):
        inst = tiny_instance(model, kappa, seed)
        for bits in itertools.product((1, -1), repeat=inst.n):
            x = np.array(bits, dtype=np.int8)
            from binperc.model import is_margin_solution

            if is_margin_solution(inst, x, kappa_prime):
                return inst, x
    raise AssertionError("no margin solution found")


@pytest.mark.parametrize("model,kappa,kappa_prime", [("sbp", 4.0, 3.0), ("abp", -4.0, -3.0)])
def test_local_paths(model, kappa, kappa_prime):
    sched = tiny_schedule(model, kappa)
    inst, X = _margin_solution(model, kappa, kappa_prime, sched)
    n = inst.n
    for ell in range(sched.n0, n):
        cursor = local_path_first(inst, sched, X, ell, kappa_prime, d_count=n - sched.n0)
        walk = [vec for _, vec in cursor]
        assert all(hamming(p, q) == 1 for p, q in zip(walk, walk[1:]))
        assert np.array_equal(walk[0], complete(inst, sched, X[:ell]))
        assert np.array_equal(walk[-1], complete(inst, sched, X[: ell + 1]))
        anchor = cursor.levels[0]
        assert anchor.D <= 1
    # the flipped prefix fits inside the cut only when d <= n - d
    d = n // 2
    assert n - d >= sched.n0
    for ell in range(d):
        cursor = local_path_second(inst, sched, X, ell, d)
        walk = [vec for _, vec in cursor]
        assert all(hamming(p, q) == 1 for p, q in zip(walk, walk[1:]))
        assert np.array_equal(walk[0], complete(inst, sched, flip_prefix(X, ell)[: n - d]))
        assert np.array_equal(walk[-1], complete(inst, sched, flip_prefix(X, ell + 1)[: n - d]))
    far = complete(inst, sched, flip_prefix(X, d)[: n - d])
    assert hamming(far, X) >= d


def test_local_path_errors():
    sched = tiny_schedule("sbp", 4.0)
    inst, X = _margin_solution("sbp", 4.0, 3.0, sched)
    with pytest.raises(OutOfRange):
        local_path_first(inst, sched, X, 2, 3.0, d_count=13)
    with pytest.raises(OutOfRange):
        local_path_first(inst, sched, X, 13, 3.0, d_count=5)
    with pytest.raises(InvalidInput):
        local_path_first(inst, sched, X, 12, 0.01, d_count=5)
    with pytest.raises(OutOfRange):
        local_path_second(inst, sched, X, 5, 5)
