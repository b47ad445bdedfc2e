import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from binperc.errors import DimensionMismatch, RoundsExhausted
from binperc.generate import GenConfig, sample_instance
from binperc.model import ModelKind, is_solution, row_sums
from binperc.schedule import build_schedule, custom_schedule
from binperc.solver import (
    Policy,
    block_level,
    complete,
    init_round0,
    round_block,
    select_rows,
    solve,
    step_round,
)

from conftest import make_instance, tiny_instance, tiny_schedule


def test_round0_policies():
    inst = tiny_instance("sbp", 1.0, 0)
    sched = tiny_schedule("sbp", 1.0)
    st0 = init_round0(inst, sched)
    assert st0.prefix().tolist() == [1] * 5
    v = [-1, 1, 1, -1, 1]
    assert init_round0(inst, sched, Policy.given(v)).prefix().tolist() == v
    a = init_round0(inst, sched, Policy.seeded_random(4)).prefix()
    b = init_round0(inst, sched, Policy.seeded_random(4)).prefix()
    assert np.array_equal(a, b)
    with pytest.raises(DimensionMismatch):
        init_round0(inst, sched, Policy.given([1, -1]))


def test_sbp_round1_zero_opinion_row():
    inst = make_instance("sbp", 1.0, [[1, -1, 1, -1, 1, 1]])
    sched = custom_schedule("sbp", 1.0, (2, 3, 1), (1, 1), 1)
    out = round_block(inst, sched, 1, np.array([0]))
    assert out.tolist() == [-1, -1, -1]


def test_abp_single_row_copies_block():
    inst = make_instance("abp", 0.0, [[1, 1, 1, 1, -1, 1]])
    sched = custom_schedule("abp", 0.0, (3, 3), (1,), 1)
    out = round_block(inst, sched, 1, np.array([3]))
    assert out.tolist() == [1, -1, 1]
    assert int(inst.entries[0, 3:] @ out) == 3


def test_sbp_middle_round_pushes_toward_zero():
    g = [1, -1, -1, 1]
    rows = [[1] * 2 + g for _ in range(3)] + [[1] * 6]
    inst = make_instance("sbp", 1.0, rows)
    # round 2 is a middle round when R = 3
    sched = custom_schedule("sbp", 1.0, (1, 1, 4, 0), (4, 3, 1), 4)
    prior = np.array([2, 2, 2, 0])
    out = round_block(inst, sched, 2, prior)
    assert out.tolist() == [-v for v in g]
    moved = np.array(rows)[:3, 2:] @ out
    assert moved.tolist() == [-4, -4, -4]


def test_select_rows():
    sums = np.array([3, -5, 5, 0, -1])
    assert select_rows(ModelKind.SBP, sums, 2).tolist() == [1, 2]
    assert select_rows(ModelKind.SBP, sums, 3).tolist() == [0, 1, 2]
    assert select_rows(ModelKind.ABP, sums, 2).tolist() == [1, 4]
    assert select_rows(ModelKind.ABP, np.array([1, 1, 1]), 2).tolist() == [0, 1]


def test_step_round_exhausts():
    inst = tiny_instance("abp", 0.0, 2)
    sched = tiny_schedule("abp", 0.0)
    state = init_round0(inst, sched)
    for _ in range(sched.R):
        step_round(state)
    with pytest.raises(RoundsExhausted):
        step_round(state)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(["sbp", "abp"]), st.integers(0, 2**32), st.sampled_from([1.0, 1.5, 0.0]))
def test_partial_sums_match_recomputation(model, seed, kappa):
    if model == "sbp" and kappa == 0.0:
        kappa = 0.7
    inst = tiny_instance(model, kappa, seed)
    sched = tiny_schedule(model, kappa)
    state = init_round0(inst, sched, Policy.seeded_random(seed))
    while True:
        end = state.filled
        fresh = inst.entries[:, :end].astype(np.int64) @ state.assigned[:end].astype(np.int64)
        assert np.array_equal(fresh, state.partial_sums)
        if state.current_round == sched.R:
            break
        step_round(state)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32), st.integers(0, 2**32))
def test_sbp_equivariance_tiny(seed, vseed):
    # every prefix length in the tiny schedule is odd, so no consulted sum is 0
    inst = tiny_instance("sbp", 1.0, seed)
    sched = tiny_schedule("sbp", 1.0)
    v = np.random.default_rng(vseed).choice(np.array([-1, 1], dtype=np.int8), size=sched.n0)
    a = solve(inst, sched, Policy.given(v)).x
    b = solve(inst, sched, Policy.given(-v)).x
    assert np.array_equal(a, -b)


def test_success_flag_is_recheck():
    for seed in range(30):
        for model, kappa in (("sbp", 1.0), ("abp", 0.0)):
            inst = tiny_instance(model, kappa, seed)
            out = solve(inst, tiny_schedule(model, kappa))
            assert out.success == is_solution(inst, out.x)
            assert out.rounds_executed == 3
            assert len(out.round_sums) == 4
            assert np.array_equal(out.round_sums[-1], row_sums(inst, out.x))


def test_desk_scale_solves():
    n = 20000
    for model, kappa, m in (("sbp", 1.0, 9), ("abp", 0.0, 10)):
        sched = build_schedule(model, n, m, kappa)
        inst = sample_instance(GenConfig(ModelKind.parse(model), n, m / n, kappa, 1), m=m)
        out = solve(inst, sched)
        assert out.x.shape == (n,)
        assert out.success == is_solution(inst, out.x)


def test_complete_from_aligned_prefix_matches_solve():
    inst = tiny_instance("sbp", 1.0, 8)
    sched = tiny_schedule("sbp", 1.0)
    x = solve(inst, sched, Policy.given([1, -1, -1, 1, 1])).x
    for cut in (sched.n0, sched.block_end(1), sched.block_end(2), inst.n):
        assert np.array_equal(complete(inst, sched, x[:cut]), x)


def test_complete_mid_block_keeps_prefix():
    inst = tiny_instance("abp", 0.0, 3)
    sched = tiny_schedule("abp", 0.0)
    p = np.array([1, -1, 1, 1, -1, -1, -1], dtype=np.int8)
    out = complete(inst, sched, p)
    assert np.array_equal(out[:7], p)
    # the rest of block 1 comes from round 1 run on block 0 alone
    ref = complete(inst, sched, p[:5])
    assert np.array_equal(out[7:9], ref[7:9])


def test_block_level():
    sched = tiny_schedule("sbp", 1.0)
    assert block_level(sched, 0) == 0
    assert block_level(sched, 5) == 1
    assert block_level(sched, 8) == 1
    assert block_level(sched, 9) == 2
    assert block_level(sched, 12) == 3
