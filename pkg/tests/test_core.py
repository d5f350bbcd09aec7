import numpy as np
import pytest

from hedgebench.core import (
    DimensionMismatch,
    EmptyTrace,
    InvalidLoss,
    NegativeWeight,
    NotNormalized,
    RoundRecord,
    Trace,
    as_losses,
    mix_loss,
    regret_of_trace,
    validate_simplex,
)


class TestValidateSimplex:
    def test_uniform_ok(self):
        w = validate_simplex([1 / 3, 1 / 3, 1 / 3])
        assert w.sum() == pytest.approx(1.0, abs=1e-12)

    def test_not_normalized(self):
        with pytest.raises(NotNormalized) as err:
            validate_simplex([0.5, 0.6])
        assert err.value.total == pytest.approx(1.1)

    def test_sign_violation_dominates(self):
        # sums to 1 exactly, but the negative entry must be reported first
        with pytest.raises(NegativeWeight) as err:
            validate_simplex([1.0 + 1e-13, -1e-13])
        assert err.value.index == 1

    def test_nan_rejected(self):
        with pytest.raises(NegativeWeight):
            validate_simplex([np.nan, 1.0])

    def test_tolerance_boundary(self):
        validate_simplex([0.5, 0.5 + 0.9e-12])
        with pytest.raises(NotNormalized):
            validate_simplex([0.5, 0.5 + 1.1e-12])


class TestLossValidation:
    def test_round_trip(self):
        arr = as_losses([0.0, 0.5, 1.0])
        assert arr.dtype == np.float64

    @pytest.mark.parametrize("bad", [[0.2, 1.3], [-0.1, 0.5], [0.1, np.inf], [0.3]])
    def test_rejects_out_of_range(self, bad):
        with pytest.raises((InvalidLoss, DimensionMismatch)):
            as_losses(bad)

    def test_dimension_check(self):
        with pytest.raises(DimensionMismatch):
            as_losses([0.1, 0.2, 0.3], expected_m=2)


class TestMixLoss:
    def test_point_mass(self):
        assert mix_loss([1.0, 0.0], [0.3, 0.9]) == pytest.approx(0.3)

    def test_symmetry(self):
        assert mix_loss([0.5, 0.5], [0.0, 1.0]) == pytest.approx(0.5)

    def test_dot_product(self):
        # 0.2*1 + 0.3*0 + 0.5*0.4 = 0.4
        assert mix_loss([0.2, 0.3, 0.5], [1.0, 0.0, 0.4]) == pytest.approx(0.4, abs=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            mix_loss([0.5, 0.5], [0.1, 0.2, 0.3])

    def test_within_hull_fuzz(self):
        rng = np.random.default_rng(7)
        for _ in range(500):
            m = int(rng.integers(2, 12))
            w = rng.dirichlet(np.ones(m))
            l = rng.random(m)
            v = mix_loss(w, l)
            assert l.min() <= v <= l.max()


class TestRegretOfTrace:
    @staticmethod
    def _records(mix, losses):
        return [
            RoundRecord(t=i + 1, mix_loss=m, losses=np.array(l, dtype=float))
            for i, (m, l) in enumerate(zip(mix, losses))
        ]

    def test_constant_losses(self):
        summary = regret_of_trace(self._records([0.5, 0.5], [[0, 1], [0, 1]]))
        assert summary.regret == pytest.approx(1.0)
        assert summary.pseudo_regret_vs[1] == pytest.approx(1.0)
        assert summary.pseudo_regret_vs[2] == pytest.approx(-1.0)

    def test_learner_matches_leader(self):
        summary = regret_of_trace(self._records([0.0, 0.0], [[0, 1], [0, 1]]))
        assert summary.regret == pytest.approx(0.0)

    def test_hand_sum(self):
        # mix total 0.75, hindsight leader total 0
        summary = regret_of_trace(self._records([0.5, 0.25], [[0, 1], [0, 1]]))
        assert summary.regret == pytest.approx(0.75)

    def test_regret_is_max_pseudo_regret(self):
        rng = np.random.default_rng(3)
        losses = rng.random((40, 5))
        mix = losses.mean(axis=1)
        summary = regret_of_trace(Trace(losses=losses, mix_loss=mix))
        assert summary.regret == pytest.approx(max(summary.pseudo_regret_vs.values()), abs=1e-12)
        assert summary.series.shape == (40,)
        assert summary.series[-1] == pytest.approx(summary.regret, abs=1e-12)

    def test_empty_trace(self):
        with pytest.raises(EmptyTrace):
            regret_of_trace([])

    def test_trace_records_roundtrip(self):
        rng = np.random.default_rng(11)
        losses = rng.random((10, 3))
        mix = losses @ np.array([0.2, 0.3, 0.5])
        trace = Trace(losses=losses, mix_loss=mix)
        from_records = regret_of_trace(list(trace.records()))
        from_trace = regret_of_trace(trace)
        assert from_records.regret == pytest.approx(from_trace.regret, abs=1e-12)
        np.testing.assert_allclose(from_records.series, from_trace.series, atol=1e-12)
