import math

import numpy as np
import pytest

from polypass import bootstrap_chain


class TestKnownChains:
    def test_one_step(self):
        tr = bootstrap_chain(5, 1, 2, 10.0 / 7.0)
        assert tr.terminated and tr.steps == 1
        assert abs(tr.chain[0][1] - 10.0 / 3.0) < 1e-12

    def test_three_steps(self):
        tr = bootstrap_chain(5, 1, 2, 1.3)
        assert tr.terminated and tr.steps == 3
        p_ks = [pk for pk, _ in tr.chain]
        assert abs(p_ks[1] - 1.3541666666666667) < 1e-12
        assert abs(p_ks[2] - 1.4772727272727273) < 1e-12
        assert abs(tr.chain[2][1] - 3.6111111111111112) < 1e-12

    def test_exact_fixed_point(self):
        tr = bootstrap_chain(5, 1, 2, 1.25)
        assert not tr.terminated
        assert "fixed-point" in tr.reason
        assert not tr.threshold_ok
        assert abs(tr.chain[0][0] - 1.25) < 1e-12
        assert abs(tr.chain[0][1] - 2.5) < 1e-12

    def test_p_equal_one_branch(self):
        tr = bootstrap_chain(5, 1, 1, 1.1)
        assert tr.terminated and tr.branch == "p=1"
        # iterates follow N p1 / (N - 2 k m p1)
        for k, (pk, _) in enumerate(tr.chain):
            expected = 5 * 1.1 / (5 - 2 * k * 1.1)
            assert abs(pk - expected) < 1e-12

    def test_escape_to_infinity(self):
        tr = bootstrap_chain(3, 2, 1, 1.5)  # N <= 2 m p1 immediately
        assert tr.terminated and math.isinf(tr.chain[0][1])


class TestProperties:
    def test_strict_monotonicity_above_threshold(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            N = int(rng.integers(3, 12))
            m = int(rng.integers(1, 4))
            if N < 2 * m + 1:
                continue
            pc = (N + 2 * m) / (N - 2 * m)
            p = float(rng.uniform(1.01, min(pc - 1e-3, 4.0)))
            threshold = max(1.0, N * (p - 1) / (2 * m * p))
            p1 = float(threshold + rng.uniform(0.01, 1.0))
            tr = bootstrap_chain(N, m, p, p1)
            assert tr.threshold_ok
            p_ks = [pk for pk, _ in tr.chain]
            assert all(b > a for a, b in zip(p_ks, p_ks[1:]))
            assert tr.terminated

    def test_below_threshold_flagged(self):
        tr = bootstrap_chain(5, 1, 2, 1.1)
        assert not tr.threshold_ok
        assert not tr.terminated

    def test_chain_pairs_consistent(self):
        tr = bootstrap_chain(7, 1, 1.5, 1.4)
        for pk, star in tr.chain:
            if math.isinf(star):
                assert 7 <= 2 * pk
            else:
                assert abs(star - 7 * pk / (7 - 2 * pk)) < 1e-12


class TestPreconditions:
    def test_supercritical_p(self):
        with pytest.raises(ValueError):
            bootstrap_chain(5, 1, 3.0, 1.3)  # critical is 7/3

    def test_p1_not_above_one(self):
        with pytest.raises(ValueError):
            bootstrap_chain(5, 1, 2, 1.0)

    def test_p_below_one(self):
        with pytest.raises(ValueError):
            bootstrap_chain(5, 1, 0.5, 1.3)

    def test_any_p_when_low_dimension(self):
        tr = bootstrap_chain(2, 1, 7.0, 4.0)  # N <= 2m: no critical cap
        assert tr.steps >= 1


class TestExport:
    def test_csv_rows(self):
        tr = bootstrap_chain(5, 1, 2, 1.3)
        rows = tr.csv_rows()
        assert rows[0] == "k,p_k,p_k_star"
        assert len(rows) == 4
        assert rows[1].startswith("1,1.3,")

    def test_infinity_serialized(self):
        tr = bootstrap_chain(3, 2, 1, 1.5)
        assert tr.csv_rows()[1].endswith("inf")
        assert tr.as_dict()["chain"][0][1] == "inf"
