import math

import numpy as np
import pytest

from polypass import (SamplingConfig, applicable_hypotheses, check_hypothesis,
                      composite, hypothesis_suite, iterated_log, linear,
                      linear_minus_power, log_damped_critical, oscillating,
                      positive_truncation, power)

FAST = SamplingConfig(points_per_decade=60)


class TestDefectLowerBound:
    """H1: C |f|^(2N/(N+2m)) <= s f - 2F > 0 beyond s0."""

    def test_linear_violates_with_zero_defect(self):
        rep = check_hypothesis(linear(1.0), "H1", 5, 1, FAST)
        assert not rep.satisfied
        s, value = rep.witnesses[0]
        assert value == pytest.approx(0.0, abs=1e-12)

    def test_iterated_log_satisfies(self):
        rep = check_hypothesis(iterated_log(1.0, nu=2), "H1", 5, 1, FAST)
        assert rep.satisfied
        assert rep.constants["C"] > 0

    @pytest.mark.parametrize("alpha", [3.0 / 7.0, 0.5, 0.8])
    def test_linear_minus_power_in_range(self, alpha):
        # admissible range for (N, m) = (5, 1) starts at (N-2m)/(N+2m) = 3/7
        rep = check_hypothesis(linear_minus_power(2.0, alpha), "H1", 5, 1, FAST)
        assert rep.satisfied

    def test_linear_minus_power_below_range(self):
        rep = check_hypothesis(linear_minus_power(2.0, 0.2), "H1", 5, 1, FAST)
        assert not rep.satisfied

    def test_power_subcritical_satisfies(self):
        rep = check_hypothesis(power(3.0), "H1", 3, 1, FAST)
        assert rep.satisfied


class TestGrowthCaps:
    def test_H_requires_supercritical_dimension(self):
        with pytest.raises(ValueError):
            check_hypothesis(power(3.0), "H", 2, 1, FAST)

    def test_H_power(self):
        assert check_hypothesis(power(3.0), "H", 3, 1, FAST).satisfied
        assert not check_hypothesis(power(3.0), "H", 5, 1, FAST).satisfied

    def test_H2_log_damped_passes(self):
        rep = check_hypothesis(log_damped_critical(1.0, 5, 1), "H2", 5, 1, FAST)
        assert rep.satisfied

    def test_H2_critical_power_fails(self):
        # |s|^(4m/(N-2m)) s undamped: the ratio has a positive limit
        rep = check_hypothesis(power(7.0 / 3.0), "H2", 5, 1, FAST)
        assert not rep.satisfied

    def test_SUBii(self):
        assert check_hypothesis(power(3.0), "SUB-ii", 3, 1, FAST).satisfied
        assert not check_hypothesis(power(3.0), "SUB-ii", 5, 1, FAST).satisfied
        assert check_hypothesis(linear(2.0), "SUB-ii", 5, 1, FAST).satisfied


class TestLimitsAtInfinity:
    def test_H3_linear_slopes(self):
        assert not check_hypothesis(linear(0.5), "H3", 5, 1, FAST).satisfied
        assert check_hypothesis(linear(2.0), "H3", 5, 1, FAST).satisfied

    def test_H3_superlinear(self):
        assert check_hypothesis(power(3.0), "H3", 5, 1, FAST).satisfied

    def test_H3_oscillating_witnesses_near_vanishing_points(self):
        cfg = SamplingConfig(s_max=1e55, points_per_decade=60)
        rep = check_hypothesis(oscillating(2.0), "H3", 5, 1, cfg)
        assert not rep.satisfied
        l1 = math.exp(math.exp(1.5 * math.pi))
        s_star = rep.witnesses[0][0]
        assert abs(s_star - l1) / l1 < 0.01


class TestLimitsAtZero:
    def test_H4(self):
        assert check_hypothesis(power(3.0), "H4", 5, 1, FAST).satisfied
        assert not check_hypothesis(linear(2.0), "H4", 5, 1,
                                    SamplingConfig(points_per_decade=60,
                                                   lambda1=1.0)).satisfied

    def test_Hp4(self):
        assert check_hypothesis(power(3.0), "H'4", 5, 1, FAST).satisfied
        assert check_hypothesis(linear(50.0), "H'4", 5, 1, FAST).satisfied
        assert not check_hypothesis(power(0.5), "H'4", 5, 1, FAST).satisfied


class TestSuperquadratic:
    def test_power_theta(self):
        rep = check_hypothesis(power(3.0), "AR-i", 5, 1, FAST)
        assert rep.satisfied
        assert rep.constants["theta"] == pytest.approx(4.0, abs=0.01)

    def test_linear_fails_at_two(self):
        rep = check_hypothesis(linear(1.0), "AR-i", 5, 1, FAST)
        assert not rep.satisfied
        assert rep.witnesses[0][1] == pytest.approx(2.0, abs=1e-9)

    def test_iterated_log_gap_decays(self):
        assert not check_hypothesis(iterated_log(1.0, nu=2), "AR-i", 5, 1,
                                    FAST).satisfied


class TestStrongSuperlinear:
    def test_power_passes(self):
        rep = check_hypothesis(power(3.0), "SSL", 5, 1, FAST)
        assert rep.satisfied
        assert rep.constants["q"] > 1

    @pytest.mark.parametrize("spec", [linear(2.0), iterated_log(1.0, nu=2),
                                      linear_minus_power(2.0, 0.5)],
                             ids=["linear", "iterated-log", "linear-minus-power"])
    def test_slowly_varying_fail(self, spec):
        assert not check_hypothesis(spec, "SSL", 5, 1, FAST).satisfied


class TestPositiveHalfLineFamily:
    OSC = oscillating(2.0)
    CFG = SamplingConfig(points_per_decade=60, growth_p=2.0)

    def test_f1(self):
        rep = check_hypothesis(self.OSC, "f1", 5, 1, self.CFG)
        assert rep.satisfied
        assert rep.constants["fprime0"] < 1.0

    def test_f1_fails_above_lambda1(self):
        rep = check_hypothesis(positive_truncation(linear(2.0)), "f1", 5, 1,
                               self.CFG)
        assert not rep.satisfied

    def test_f2_bump_sequence(self):
        rep = check_hypothesis(self.OSC, "f2", 5, 1, self.CFG)
        assert rep.satisfied
        assert rep.constants["mu"] > 0

    def test_f3_decay(self):
        assert check_hypothesis(self.OSC, "f3", 5, 1, self.CFG).satisfied
        assert check_hypothesis(power(2.0), "f3", 5, 1, self.CFG).satisfied

    def test_f3_fails_for_wrong_exponent(self):
        # measuring s f' - p f against the wrong power leaves a residual
        cfg = SamplingConfig(points_per_decade=60, growth_p=1.5)
        assert not check_hypothesis(power(2.0), "f3", 5, 1, cfg).satisfied


class TestTwoSidedPositivity:
    def test_H0(self):
        assert check_hypothesis(power(3.0), "H0", 5, 1, FAST).satisfied
        assert not check_hypothesis(oscillating(2.0), "H0", 5, 1, FAST).satisfied


class TestImplications:
    """Sample-level consistency between related verdicts."""

    @pytest.mark.parametrize("spec,N,m", [
        (power(3.0), 3, 1),
        (composite(power(3.0), power(2.0)), 3, 1),
    ], ids=["power", "composite"])
    def test_H_and_ARi_imply_H1(self, spec, N, m):
        cfg = FAST
        if (check_hypothesis(spec, "H", N, m, cfg).satisfied
                and check_hypothesis(spec, "AR-i", N, m, cfg).satisfied):
            assert check_hypothesis(spec, "H1", N, m, cfg).satisfied

    @pytest.mark.parametrize("spec,N,m", [
        (linear_minus_power(2.0, 0.5), 5, 1),
        (power(3.0), 3, 1),
    ], ids=["linear-minus-power", "power"])
    def test_SUBii_and_H1_imply_Hp1(self, spec, N, m):
        cfg = FAST
        if (check_hypothesis(spec, "SUB-ii", N, m, cfg).satisfied
                and check_hypothesis(spec, "H1", N, m, cfg).satisfied):
            rep = check_hypothesis(spec, "H'1", N, m, cfg)
            assert rep.satisfied
            # the guaranteed exponent 2N/(N+2m) never exceeds the fitted one
            assert rep.constants["p1"] >= 2.0 * N / (N + 2 * m) - 0.05


class TestSuiteAndReporting:
    def test_suite_covers_applicable_ids(self):
        reports = hypothesis_suite(power(3.0), 3, 1, FAST)
        ids = [r.hypothesis_id for r in reports]
        assert ids == list(applicable_hypotheses(3, 1))
        assert all(r.satisfied for r in reports)

    def test_suite_skips_undefined(self):
        assert "H" not in applicable_hypotheses(2, 1)
        assert "H2" not in applicable_hypotheses(2, 1)
        assert "H" in applicable_hypotheses(3, 1)

    def test_unknown_id(self):
        with pytest.raises(ValueError):
            check_hypothesis(power(3.0), "H9", 5, 1)

    def test_violated_reports_carry_witnesses(self):
        for spec, hid in [(linear(1.0), "H1"), (linear(0.5), "H3"),
                          (power(0.5), "H'4")]:
            rep = check_hypothesis(spec, hid, 5, 1, FAST)
            assert not rep.satisfied
            assert len(rep.witnesses) >= 1

    def test_as_dict_round_trips_to_json(self):
        import json
        rep = check_hypothesis(linear(1.0), "H1", 5, 1, FAST)
        doc = json.loads(json.dumps(rep.as_dict()))
        assert doc["verdict"] == "violated"
        assert doc["N"] == 5

    def test_modulated_spec_notes_range(self):
        spec = linear(2.0).with_modulation(lambda x: 2.0 + np.sin(x))
        rep = check_hypothesis(spec, "H3", 5, 1, FAST)
        assert "g_min" in rep.constants and "g_max" in rep.constants
