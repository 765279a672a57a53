import pytest
from hypothesis import assume, given, strategies as st

from divscale.model import MetricWindow, ReliabilityWeights
from divscale.scoring import InvalidUtility, reliability_score, score_all

DEFAULTS = ReliabilityWeights(restart_weight=0.5, memory_weight=0.3, response_time_weight=0.2)


def window(v, restarts, rt, mem):
    return MetricWindow(v, 0, 120, restarts, rt, mem)


def test_all_ones_and_all_zeros():
    assert reliability_score(1, 1, 1, DEFAULTS) == 1.0
    assert reliability_score(0, 0, 0, DEFAULTS) == 0.0


def test_restart_penalty_only():
    # rt 0.2 * 1 + restart 0.5 * 0 + memory 0.3 * 1
    assert reliability_score(1.0, 0.0, 1.0, DEFAULTS) == pytest.approx(0.5, abs=1e-12)


@pytest.mark.parametrize("bad", [-0.01, 1.01, float("nan")])
def test_out_of_range_utility(bad):
    with pytest.raises(InvalidUtility):
        reliability_score(bad, 0.5, 0.5, DEFAULTS)


def test_identical_windows_score_one():
    scores = score_all([window(v, 3, 12.0, 4.0) for v in "abc"], DEFAULTS)
    assert scores == {"a": 1.0, "b": 1.0, "c": 1.0}


def test_uniquely_worst_everywhere_scores_zero():
    ws = [window("a", 9, 90.0, 9.0), window("b", 1, 10.0, 1.0), window("c", 2, 20.0, 2.0)]
    assert score_all(ws, DEFAULTS)["a"] == 0.0


def test_restart_only_difference():
    ws = [window("a", 6, 50.0, 1.0), window("b", 0, 50.0, 1.0), window("c", 0, 50.0, 1.0)]
    s = score_all(ws, DEFAULTS)
    assert [s[v] for v in "abc"] == pytest.approx([0.5, 1.0, 1.0], abs=1e-12)


def test_windows_must_share_an_interval():
    with pytest.raises(ValueError):
        score_all([window("a", 0, 0, 0), MetricWindow("b", 0, 60, 0, 0, 0)], DEFAULTS)


unit = st.floats(min_value=0, max_value=1)


@st.composite
def weights(draw):
    a = draw(st.floats(min_value=0.01, max_value=0.98))
    b = draw(st.floats(min_value=0.01, max_value=0.99 - a))
    return ReliabilityWeights(a, b, 1.0 - a - b)


@given(unit, unit, unit, weights())
def test_score_bounded(a, b, c, w):
    assert 0.0 <= reliability_score(a, b, c, w) <= 1.0


@given(unit, unit, unit, weights(), st.floats(min_value=1e-3, max_value=1), st.integers(0, 2))
def test_score_strictly_monotone_in_each_utility(a, b, c, w, bump, which):
    us = [a, b, c]
    assume(us[which] + bump <= 1.0)
    higher = list(us)
    higher[which] += bump
    assert reliability_score(*higher, w) > reliability_score(*us, w)


@given(
    st.lists(st.tuples(st.integers(0, 50), st.floats(0, 1e3), st.floats(0, 1e3)), min_size=1, max_size=6),
    st.floats(min_value=0.5, max_value=20),
)
def test_scores_invariant_under_positive_rescaling(raw, k):
    base = [window(f"v{i}", r, rt, m) for i, (r, rt, m) in enumerate(raw)]
    scaled = [window(f"v{i}", r, k * rt, k * m) for i, (r, rt, m) in enumerate(raw)]
    for col in (1, 2):
        vals = [x[col] for x in raw]
        assume(max(vals) == min(vals) or max(vals) - min(vals) > 1e-6 * max(1.0, max(vals)))
    a, b = score_all(base, DEFAULTS), score_all(scaled, DEFAULTS)
    assert list(b.values()) == pytest.approx(list(a.values()), abs=1e-6)
