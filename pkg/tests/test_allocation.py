"""Largest-remainder resource-block allocation."""

import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ranric.ran import allocate_rbs


def test_equal_weights_split_evenly():
    assert allocate_rbs({1: 2.0, 2: 2.0}, 50, [1, 2]) == {1: 25, 2: 25}


def test_skewed_weights_largest_remainder():
    # raw shares 46.875 / 3.125 -> floors 46/3, one leftover RB goes to
    # the larger remainder (0.875)
    assert allocate_rbs({1: 15.0, 2: 1.0}, 50, [1, 2]) == {1: 47, 2: 3}


def test_three_way_tie_broken_by_ascending_rnti():
    # all remainders are 2/3: the two lowest rntis get the extra RBs
    assert allocate_rbs({1: 1.0, 2: 1.0, 3: 1.0}, 50, [1, 2, 3]) == {1: 17, 2: 17, 3: 16}


def test_single_active_ue_gets_everything():
    assert allocate_rbs({7: 3.0}, 50, [7]) == {7: 50}


def test_empty_active_set():
    assert allocate_rbs({1: 1.0}, 50, []) == {}


def test_zero_weights_fall_back_to_equal_split():
    assert allocate_rbs({1: 0.0, 2: 0.0}, 50, [1, 2]) == {1: 25, 2: 25}
    assert allocate_rbs({}, 50, [1, 2]) == {1: 25, 2: 25}


def test_unknown_rnti_in_weights_ignored():
    out = allocate_rbs({1: 1.0, 2: 1.0, 99: 100.0}, 50, [1, 2])
    assert out == {1: 25, 2: 25}


def test_inactive_ue_gets_nothing():
    out = allocate_rbs({1: 1.0, 2: 1.0, 3: 1.0}, 50, [1, 3])
    assert out == {1: 25, 3: 25}


def _check_invariants(weights, n_rbs, active, out):
    assert set(out) == set(active)
    assert sum(out.values()) == n_rbs
    total = sum(weights.get(r, 0.0) for r in active)
    if total > 0:
        for r in active:
            share = weights.get(r, 0.0) / total * n_rbs
            assert abs(out[r] - share) < 1.0, (weights, n_rbs, out)


@given(
    n_rbs=st.integers(1, 200),
    weights=st.dictionaries(
        st.integers(1, 40),
        st.floats(min_value=0.0, max_value=1e9, allow_nan=False),
        min_size=1,
        max_size=20,
    ),
)
def test_allocation_invariants_property(n_rbs, weights):
    active = sorted(weights)
    out = allocate_rbs(weights, n_rbs, active)
    _check_invariants(weights, n_rbs, active, out)


def test_scaling_weights_leaves_allocation_unchanged():
    rng = random.Random(0)
    for _ in range(200):
        n = rng.randint(1, 8)
        weights = {r: rng.uniform(0.1, 100.0) for r in range(1, n + 1)}
        scaled = {r: w * 1e6 for r, w in weights.items()}
        active = list(weights)
        assert allocate_rbs(weights, 50, active) == allocate_rbs(scaled, 50, active)


def test_deterministic_across_dict_orders():
    weights = {3: 1.0, 1: 1.0, 2: 1.0}
    a = allocate_rbs(weights, 50, [1, 2, 3])
    b = allocate_rbs(dict(sorted(weights.items())), 50, [3, 2, 1])
    assert a == b == {1: 17, 2: 17, 3: 16}


def test_invalid_n_rbs_rejected():
    with pytest.raises(ValueError):
        allocate_rbs({1: 1.0}, 0, [1])
