import math

import numpy as np
import pytest

from hedgebench.bounds import (
    BOUND_IDS,
    BoundParams,
    OutOfValidityDomain,
    UndeclaredBestExpert,
    ZeroGapDivision,
    bernstein_estimate,
    constant_hedge_exact_regret,
    theory_value,
)
from hedgebench.environments import InstanceSpec, RngStream, builtin_instance


class TestTheoryValues:
    def test_thm1_reference(self):
        value = theory_value("thm1", BoundParams(M=10, delta=0.1))
        assert value.value == pytest.approx(342.10340371976184, abs=1e-9)
        assert value.direction == "upper"

    def test_prop1_reference(self):
        value = theory_value("prop1", BoundParams(M=10, T=10_000))
        assert value.value == pytest.approx(math.sqrt(10_000 * math.log(10)), abs=1e-12)

    def test_prop2_reference(self):
        value = theory_value("prop2", BoundParams(M=16, delta=0.1, T=18))
        assert value.value == pytest.approx(0.10830424696249144, abs=1e-12)
        assert value.direction == "lower"

    def test_prop3_const_reference(self):
        value = theory_value("prop3-const", BoundParams(M=10, T=10_000, c0=math.sqrt(8)))
        assert value.value == pytest.approx(17.88305021907789, abs=1e-9)

    def test_prop3_dbl_reference(self):
        value = theory_value("prop3-dbl", BoundParams(M=10, T=10_000, c0=math.sqrt(8)))
        assert value.value == pytest.approx(8.941525109538945, abs=1e-9)

    def test_thm4_reference(self):
        value = theory_value("thm4", BoundParams(M=10, T=10_000, c0=2.0))
        assert value.value == pytest.approx(25.290452156419107, abs=1e-9)

    def test_thm5_reference(self):
        value = theory_value("thm5", BoundParams(M=10, T=100, delta=0.1, c0=2.0))
        assert value.value == pytest.approx(0.0002619606902939082, rel=1e-9)

    def test_thm2_assembles_derived_constants(self):
        p = BoundParams(M=10, delta=0.5, tau0=4, c0=2.0, c1=1.0)
        c2, c3, c4 = p.derived()
        assert (c2, c3, c4) == (
            pytest.approx(1.0 + math.sqrt(8) / 2),
            pytest.approx(math.sqrt(8) / 2),
            pytest.approx(4.0),
        )
        expected = math.sqrt(4 * math.log(10)) + (
            c2 * math.log(10) + c3 * math.log(2.0) + c4
        ) / 0.5
        assert theory_value("thm2", p).value == pytest.approx(expected, rel=1e-12)

    def test_cor1_pair(self):
        p = BoundParams(M=10, delta=0.25, c0=2.0, c1=1.0, eps=0.05)
        c2, c3, c4 = p.derived()
        ln_m = math.log(10)
        exp_expected = (5 + 2 * c2) * ln_m / 0.25 + 2 * c3 * math.log(4.0) / 0.25 + 2 * c4 / 0.25
        assert theory_value("cor1-exp", p).value == pytest.approx(exp_expected, rel=1e-12)
        prob_expected = (
            (math.sqrt(8) + 2 * c2) * ln_m / 0.25
            + math.sqrt(8 * ln_m * math.log(20.0)) / 0.25
            + 2 * c3 * math.log(4.0) / 0.25
            + 2 * c4 / 0.25
        )
        assert theory_value("cor1-prob", p).value == pytest.approx(prob_expected, rel=1e-12)

    def test_prop4_flags_default_constants(self):
        value = theory_value("prop4", BoundParams(M=10, T=1000, beta=1.0, B=1.0))
        assert value.value == pytest.approx(max(1.0, 4.0) * math.log(10) + 2 * math.log(10), rel=1e-12)
        assert "defaulted" in value.notes
        explicit = theory_value("prop4", BoundParams(M=10, T=1000, beta=1.0, B=1.0, C1=2.0, C2=3.0))
        assert explicit.notes == ""
        assert explicit.value == pytest.approx(16 * math.log(10) + 6 * math.log(10), rel=1e-12)

    def test_prop4_interpolates_rates(self):
        # beta=0 gives the sqrt(T) scale (with C3 = 4*C1^2), beta=1 the constant scale
        at_zero = theory_value("prop4", BoundParams(M=10, T=10_000, beta=0.0, B=1.0, C1=1.0, C2=1.0))
        assert at_zero.value == pytest.approx(4 * math.sqrt(10_000 * math.log(10)) + 2 * math.log(10), rel=1e-12)

    def test_unknown_id(self):
        with pytest.raises(ValueError, match="unknown bound id"):
            theory_value("thm9", BoundParams(M=10))

    def test_missing_parameter(self):
        with pytest.raises(ValueError, match="requires parameter"):
            theory_value("thm1", BoundParams(M=10))


class TestValidityDomains:
    def test_prop2_horizon_gate(self):
        with pytest.raises(OutOfValidityDomain, match=r"T >= ln\(M\)/\(16\*delta\^2\)"):
            theory_value("prop2", BoundParams(M=10, delta=0.1, T=5))

    def test_prop2_delta_gate(self):
        with pytest.raises(OutOfValidityDomain, match="delta"):
            theory_value("prop2", BoundParams(M=10, delta=0.3, T=10_000))

    def test_thm1_needs_three_experts(self):
        with pytest.raises(OutOfValidityDomain, match="M >= 3"):
            theory_value("thm1", BoundParams(M=2, delta=0.1))

    def test_thm5_needs_unit_rate(self):
        with pytest.raises(OutOfValidityDomain, match="c0 >= 1"):
            theory_value("thm5", BoundParams(M=10, T=1000, delta=0.1, c0=0.5))
        with pytest.raises(OutOfValidityDomain, match=r"T >= 1/\(4\*delta\^2\)"):
            theory_value("thm5", BoundParams(M=10, T=10, delta=0.1, c0=2.0))

    def test_every_bound_is_registered(self):
        assert set(BOUND_IDS) == {
            "prop1", "thm1", "prop2", "thm2", "cor1-exp", "cor1-prob",
            "prop3-const", "prop3-dbl", "thm4", "prop4", "thm5",
        }


class TestCrossBoundConsistency:
    def test_prop2_recovers_worst_case_scale(self):
        """At delta ~ sqrt(ln(M)/T) the lower bound matches the worst-case
        ceiling up to its constant, well within a factor of 256*16."""
        for m, T in ((16, 2000), (64, 10_000), (8, 5000)):
            delta = math.sqrt(math.log(m) / T)
            upper = theory_value("prop1", BoundParams(M=m, T=T)).value
            lower = theory_value("prop2", BoundParams(M=m, delta=delta, T=T)).value
            assert lower <= upper
            assert upper / lower <= 256 * 16

    def test_thm1_decreasing_in_gap(self):
        values = [theory_value("thm1", BoundParams(M=10, delta=d)).value for d in (0.05, 0.1, 0.2, 0.5)]
        assert all(a > b for a, b in zip(values, values[1:]))

    def test_prop1_increasing_in_horizon_and_experts(self):
        by_t = [theory_value("prop1", BoundParams(M=10, T=t)).value for t in (10, 100, 1000)]
        assert by_t == sorted(by_t)
        by_m = [theory_value("prop1", BoundParams(M=m, T=100)).value for m in (2, 10, 100)]
        assert by_m == sorted(by_m)


class TestExactRegretOracle:
    def test_four_round_reference(self):
        assert constant_hedge_exact_regret(4, 2, math.sqrt(8)) == pytest.approx(
            0.8506105807866082, abs=1e-12
        )

    def test_single_round_is_uniform_loss(self):
        for c0 in (0.5, 1.0, math.sqrt(8)):
            assert constant_hedge_exact_regret(1, 2, c0) == pytest.approx(0.5, abs=1e-15)

    def test_dominates_its_lower_bound(self):
        oracle = constant_hedge_exact_regret(10_000, 10, math.sqrt(8))
        floor = theory_value("prop3-const", BoundParams(M=10, T=10_000, c0=math.sqrt(8))).value
        assert oracle >= floor

    def test_rejects_degenerate_arguments(self):
        with pytest.raises(ValueError):
            constant_hedge_exact_regret(0, 2, 1.0)


class TestBernsteinEstimate:
    def test_t4_exact(self):
        spec = builtin_instance("t4:M=10,T=10000,c0=2")
        delta = spec.params[0]
        assert bernstein_estimate(spec, beta=1.0) == pytest.approx(delta, abs=1e-15)
        # deterministic instances ignore the sample budget
        assert bernstein_estimate(spec, beta=1.0, n_samples=10) == pytest.approx(delta, abs=1e-15)

    def test_prop3_exact(self):
        assert bernstein_estimate(builtin_instance("prop3"), beta=1.0) == pytest.approx(1.0, abs=1e-15)

    def test_fig_a_within_gap_envelope(self):
        # with best mean 0.3 and gap 0.1 the level-one constant is at most
        # 1 + 2*0.3/0.1 = 7, and at least 1
        estimate = bernstein_estimate(builtin_instance("fig-a"), beta=1.0, n_samples=100_000,
                                      rng=RngStream(99, 1))
        assert 1.0 <= estimate <= 7.0

    def test_zero_gap_instance_rejected(self):
        # the two leaders are tied, so streams where the second leader's
        # empirical mean difference comes out non-positive must be refused
        with pytest.raises(ZeroGapDivision):
            bernstein_estimate(builtin_instance("fig-b"), beta=1.0, n_samples=2000, rng=RngStream(2, 1))

    def test_beta_zero_ignores_gap(self):
        value = bernstein_estimate(builtin_instance("fig-b"), beta=0.0, n_samples=2000, rng=RngStream(1, 1))
        assert value > 0.0

    def test_undeclared_best_expert(self):
        spec = InstanceSpec(id="anon", kind="bernoulli-gap", M=3, params=(0.2, 0.5, 0.5))
        with pytest.raises(UndeclaredBestExpert):
            bernstein_estimate(spec, beta=1.0)

    def test_estimate_is_deterministic_given_stream(self):
        spec = builtin_instance("fig-a")
        a = bernstein_estimate(spec, beta=1.0, n_samples=5000, rng=RngStream(4, 2))
        b = bernstein_estimate(spec, beta=1.0, n_samples=5000, rng=RngStream(4, 2))
        assert a == b
