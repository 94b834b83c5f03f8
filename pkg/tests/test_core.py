import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from scorefdr import (
    Observation,
    StepRecord,
    fdp_global,
    fdp_local,
    overshoot,
    refund_adjusted_cost,
)

finite_nonneg = st.floats(min_value=0.0, max_value=1e12, allow_nan=False)


def test_overshoot_examples():
    assert overshoot(0.025, 100.0) == pytest.approx(1.5, abs=1e-12)
    assert overshoot(0.05, 10.0) == 0.0
    # boundary: alpha * e = 1 exactly gives zero excess
    assert overshoot(0.1, 10.0) == 0.0


@pytest.mark.parametrize("alpha", [0.0, 1.0, -0.2, 1.5, math.nan])
def test_overshoot_rejects_bad_alpha(alpha):
    with pytest.raises(ValueError):
        overshoot(alpha, 2.0)


def test_overshoot_rejects_negative_evidence():
    with pytest.raises(ValueError):
        overshoot(0.05, -1.0)


def test_refund_examples():
    assert refund_adjusted_cost(0.05, 0.0) == 0.05
    assert refund_adjusted_cost(0.05, 0.1) == 0.0
    # step 1 of the strong-rejection worked trace: refund swamps the charge
    assert refund_adjusted_cost(0.0025, 1.5) == 0.0


@settings(deadline=None)
@given(cost=finite_nonneg, over=finite_nonneg)
def test_refund_never_exceeds_cost(cost, over):
    adjusted = refund_adjusted_cost(cost, over)
    assert 0.0 <= adjusted <= cost


def test_fdp_local_examples():
    assert fdp_local([], []) == 0.0
    assert fdp_local([0.025], [0]) == 0.025
    assert fdp_local([0.025, 0.0375], [0, 1]) == pytest.approx(0.04375, abs=1e-15)


def test_fdp_local_length_mismatch():
    with pytest.raises(ValueError, match="equal length"):
        fdp_local([0.1, 0.2], [0])


@settings(deadline=None)
@given(st.lists(st.floats(min_value=0.0, max_value=10.0), max_size=30))
def test_fdp_local_zero_rejections_is_plain_sum(costs):
    assert fdp_local(costs, [0] * len(costs)) == pytest.approx(sum(costs), rel=1e-12, abs=1e-12)


def test_fdp_global_examples():
    assert fdp_global([0.05], 0) == 0.05
    assert fdp_global([0.05, 0.05], 2) == pytest.approx(0.05, abs=1e-15)
    assert fdp_global([], 5) == 0.0


def test_fdp_global_nonincreasing_in_rejections():
    rng = np.random.default_rng(0)
    costs = rng.random(20)
    values = [fdp_global(costs, r) for r in range(10)]
    assert all(a >= b for a, b in zip(values, values[1:]))


def test_fdp_global_rejects_negative_count():
    with pytest.raises(ValueError):
        fdp_global([0.1], -1)


def test_indicator_bound_on_grid():
    # I(y >= 1) <= y - (y - 1)_+ over the whole grid, equality past 1
    y = np.arange(10001) / 1000.0
    indicator = (y >= 1.0).astype(float)
    bound = y - np.maximum(y - 1.0, 0.0)
    assert np.all(indicator <= bound)
    assert np.all(bound[y >= 1.0] == 1.0)


class TestObservation:
    def test_valid(self):
        obs = Observation(3, 2.5, kind="e", truth=True)
        assert obs.index == 3 and obs.evidence == 2.5 and obs.truth

    def test_p_kind_range(self):
        Observation(1, 1.0, kind="p")
        Observation(1, 0.0, kind="p")
        with pytest.raises(ValueError, match=r"\[0, 1\]"):
            Observation(1, 1.2, kind="p")

    @pytest.mark.parametrize("bad", [math.inf, math.nan, -0.5])
    def test_bad_evidence(self, bad):
        with pytest.raises(ValueError):
            Observation(1, bad, kind="e")

    def test_bad_index_and_kind(self):
        with pytest.raises(ValueError):
            Observation(0, 1.0)
        with pytest.raises(ValueError):
            Observation(1, 1.0, kind="q")


class TestStepRecord:
    def test_valid(self):
        rec = StepRecord(alpha=0.01, decision=True, overshoot=0.5, cost=0.0, rejections_before=2)
        assert rec.decision and rec.rejections_before == 2

    def test_invalid(self):
        with pytest.raises(ValueError):
            StepRecord(alpha=-0.1, decision=False, overshoot=0.0, cost=0.0, rejections_before=0)
        with pytest.raises(ValueError):
            StepRecord(alpha=0.1, decision=False, overshoot=-1.0, cost=0.0, rejections_before=0)
        with pytest.raises(ValueError):
            StepRecord(alpha=0.1, decision=False, overshoot=0.0, cost=0.0, rejections_before=-1)
