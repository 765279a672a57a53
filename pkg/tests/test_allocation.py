import random

import pytest
from hypothesis import assume, given, strategies as st

from divscale.allocation import (
    UNIFORM,
    AllScoresZero,
    InfeasibleBudget,
    adjust_replica_distribution,
    apportion,
    diversity_factor,
)
from divscale.model import ReplicaPlan
from oracles import brute_force_apportion


@pytest.mark.parametrize(
    "scores, total, expected",
    [
        ([0.7, 0.7, 0.7], 15, [5, 5, 5]),
        ([0.2, 0.4, 0.4], 15, [3, 6, 6]),
        ([0.9, 0.05, 0.05], 3, [1, 1, 1]),
        ([0.5, 0.3, 0.2], 10, [5, 3, 2]),
        ([1.0], 7, [7]),
        ([1.0, 0.0], 5, [4, 1]),
    ],
)
def test_known_apportionments(scores, total, expected):
    assert apportion(scores, total) == expected


def test_mapping_form_keeps_version_order():
    plan = adjust_replica_distribution({"faulty": 0.2, "inconsistent": 0.4, "leak": 0.4}, 15)
    assert plan == ReplicaPlan({"faulty": 3, "inconsistent": 6, "leak": 6})
    assert plan.versions == ("faulty", "inconsistent", "leak")


def test_budget_smaller_than_versions():
    with pytest.raises(InfeasibleBudget):
        apportion([0.5, 0.5, 0.5], 2)


def test_all_zero_scores():
    with pytest.raises(AllScoresZero):
        apportion([0.0, 0.0], 4)


@pytest.mark.parametrize("bad", [[-0.1, 1.0], [float("nan"), 1.0], [float("inf"), 1.0], []])
def test_bad_scores(bad):
    with pytest.raises(ValueError):
        apportion(bad, 5)


def test_diversity_factor_examples():
    assert diversity_factor([5, 5, 5]).value is UNIFORM
    assert diversity_factor([5, 5, 5]).is_uniform
    assert diversity_factor([3, 6, 6]).value == pytest.approx(0.70711, abs=5e-6)
    assert diversity_factor([1, 1, 10]).value == pytest.approx(0.23570, abs=5e-6)
    assert diversity_factor(ReplicaPlan({"a": 4, "b": 4})).is_uniform
    assert str(diversity_factor([2, 2])) == "uniform"


scores_st = st.lists(st.floats(min_value=0, max_value=1), min_size=1, max_size=8)


@st.composite
def instance(draw):
    scores = draw(scores_st)
    assume(sum(scores) > 0)
    total = draw(st.integers(min_value=len(scores), max_value=60))
    return scores, total


@given(instance())
def test_floor_and_budget(inst):
    scores, total = inst
    counts = apportion(scores, total)
    assert len(counts) == len(scores)
    assert min(counts) >= 1
    assert sum(counts) == total


@given(instance())
def test_higher_score_never_gets_fewer(inst):
    scores, total = inst
    counts = apportion(scores, total)
    for i in range(len(scores)):
        for j in range(len(scores)):
            if scores[i] > scores[j]:
                assert counts[i] >= counts[j]


@given(instance(), st.floats(min_value=0.01, max_value=100))
def test_invariant_under_score_rescaling(inst, k):
    scores, total = inst
    assume(sum(scores) * k > 0)
    assert apportion([k * s for s in scores], total) == apportion(scores, total)


@given(st.lists(st.integers(2, 30), min_size=2, max_size=6), st.data())
def test_df_falls_as_replicas_concentrate(counts, data):
    i, j = data.draw(st.permutations(range(len(counts))))[:2]
    if counts[i] > counts[j]:
        i, j = j, i
    wider = list(counts)
    wider[i] -= 1
    wider[j] += 1
    before, after = diversity_factor(counts), diversity_factor(wider)
    assert not after.is_uniform
    assert before.is_uniform or after.value < before.value


def test_random_grid_against_exact_oracle():
    rng = random.Random(7)
    for _ in range(2000):
        n = rng.randint(1, 4)
        grid = [rng.randint(0, 20) for _ in range(n)]
        if sum(grid) == 0:
            continue
        total = rng.randint(n, 12)
        assert apportion([g / 20 for g in grid], total) == list(brute_force_apportion(tuple(grid), total)), (grid, total)


def test_even_scores_split_evenly_where_possible():
    for n in range(1, 7):
        for total in range(n, 40):
            counts = apportion([0.5] * n, total)
            assert max(counts) - min(counts) <= 1
            assert counts == sorted(counts, reverse=True)
