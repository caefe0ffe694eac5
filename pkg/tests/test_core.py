import pytest
from hypothesis import given, strategies as st

from merit_dynamics.core import (
    Group,
    GroupState,
    ModelParams,
    Regime,
    TransitionModel,
    classify_regime,
    leader_of,
)
from merit_dynamics.errors import InvalidParamsError


class TestModelParams:
    def test_valid_construction(self):
        p = ModelParams(alpha=0.3, p=0.9, q=0.4, epsilon=0.1, n_per_group=100)
        assert p.capacity == 60
        assert p.real_capacity == 60.0

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(alpha=0.0, p=0.9),
            dict(alpha=0.5, p=0.9),
            dict(alpha=0.6, p=0.9),
            dict(alpha=0.3, p=0.9, q=0.9),  # q == p
            dict(alpha=0.3, p=0.9, q=0.95),
            dict(alpha=0.3, p=1.1),
            dict(alpha=0.3, p=0.9, q=-0.1),
            dict(alpha=0.3, p=0.9, epsilon=-0.01),
            dict(alpha=0.3, p=0.9, epsilon=1.01),
            dict(alpha=0.3, p=0.9, q=0.5, epsilon=0.6),  # q + eps > 1
            dict(alpha=0.3, p=0.9, n_per_group=0),
        ],
    )
    def test_invalid_construction(self, kwargs):
        with pytest.raises(InvalidParamsError):
            ModelParams(**kwargs)

    def test_error_message_names_violation(self):
        with pytest.raises(InvalidParamsError, match="alpha"):
            ModelParams(alpha=0.7, p=0.9)

    def test_rounded_capacity(self):
        assert ModelParams(alpha=0.3, p=0.9, n_per_group=7).capacity == 4  # 4.2 -> 4
        assert ModelParams(alpha=0.27, p=0.9, n_per_group=5).capacity == 3  # 2.7 -> 3


class TestGroupState:
    def test_fractions(self):
        s = GroupState(0.1, 0.7)
        assert s.total == pytest.approx(0.8)
        assert s.delta == pytest.approx(-0.6)
        assert not s.count_backed

    def test_count_backed(self):
        s = GroupState.from_counts(20, 140, 200)
        assert s.count_backed
        assert s.x_a == 0.1 and s.x_b == 0.7
        assert s.swapped().h_a == 140

    def test_count_consistency_enforced(self):
        with pytest.raises(InvalidParamsError):
            GroupState(0.1, 0.7, h_a=21, h_b=140, n=200)
        with pytest.raises(InvalidParamsError):
            GroupState(0.1, 0.7, h_a=20, h_b=None, n=200)

    @pytest.mark.parametrize("x_a,x_b", [(-0.1, 0.5), (0.5, 1.2)])
    def test_fraction_bounds(self, x_a, x_b):
        with pytest.raises(InvalidParamsError):
            GroupState(x_a, x_b)

    def test_count_bounds(self):
        with pytest.raises(InvalidParamsError):
            GroupState.from_counts(201, 0, 200)


class TestRegime:
    PARAMS = ModelParams(alpha=0.30, p=0.9, q=0.4)

    def test_over_subscribed_example(self):
        assert classify_regime(GroupState(0.1, 0.7), self.PARAMS) is Regime.OVER_SUBSCRIBED

    def test_under_subscribed_example(self):
        assert classify_regime(GroupState(0.1, 0.4), self.PARAMS) is Regime.UNDER_SUBSCRIBED

    def test_boundary_is_over_subscribed(self):
        assert classify_regime(GroupState(0.3, 0.3), self.PARAMS) is Regime.OVER_SUBSCRIBED

    @given(
        x_a=st.floats(0, 1),
        x_b=st.floats(0, 1),
        alpha=st.floats(0.01, 0.49),
    )
    def test_total_function(self, x_a, x_b, alpha):
        params = ModelParams(alpha=alpha, p=0.9, q=0.4)
        regime = classify_regime(GroupState(x_a, x_b), params)
        assert regime in (Regime.OVER_SUBSCRIBED, Regime.UNDER_SUBSCRIBED)
        assert (regime is Regime.OVER_SUBSCRIBED) == (x_a + x_b >= 2 * alpha)


class TestLeader:
    def test_strict_inequality(self):
        assert leader_of(GroupState(0.3, 0.1)) is Group.A
        assert leader_of(GroupState(0.1, 0.3)) is Group.B
        assert leader_of(GroupState(0.2, 0.2)) is None

    def test_other(self):
        assert Group.A.other() is Group.B
        assert Group.B.other() is Group.A


def test_transition_model_parse():
    assert TransitionModel.parse("EA") is TransitionModel.EQUAL_ADVANTAGE
    assert TransitionModel.parse("aa") is TransitionModel.AFFINITY_ADVANTAGE
    with pytest.raises(InvalidParamsError):
        TransitionModel.parse("xx")
