"""Binomial tail CDF and upper-bound solver.

Frozen expected values were computed ahead of time with exact rational
arithmetic (Fraction-based CDF, long-running exact bisection) and pasted in
as decimals.
"""

import math
import threading
from fractions import Fraction

import numpy as np
import pytest

from selcert import BinomialTail, DomainError, RiskBound, binom_cdf, risk_upper_bound


def rational_cdf(k: int, n: int, p: Fraction) -> Fraction:
    total = Fraction(0)
    for i in range(k + 1):
        total += math.comb(n, i) * p**i * (1 - p) ** (n - i)
    return total


class TestBinomCdf:
    def test_frozen_value(self):
        # exact rational value of CDF(3; 10, 0.37) rounded to double
        assert binom_cdf(3, 10, 0.37) == pytest.approx(0.45999620731185464, abs=1e-14)

    def test_matches_rational_oracle_small_n(self):
        for n in range(1, 9):
            for k in range(n + 1):
                for p in (0.1, 0.25, 0.5, 0.73, 0.9):
                    expected = float(rational_cdf(k, n, Fraction(p)))
                    assert binom_cdf(k, n, p) == pytest.approx(expected, abs=1e-13)

    def test_edges_exact(self):
        assert binom_cdf(0, 5, 0.0) == 1.0
        assert binom_cdf(3, 7, 0.0) == 1.0
        assert binom_cdf(7, 7, 1.0) == 1.0
        assert binom_cdf(6, 7, 1.0) == 0.0
        assert binom_cdf(4, 4, 0.3) == 1.0

    def test_k_zero_closed_form(self):
        # CDF(0; n, p) = (1-p)^n
        for n in (1, 3, 50, 400):
            for p in (0.01, 0.2, 0.9):
                assert binom_cdf(0, n, p) == pytest.approx((1 - p) ** n, rel=1e-12)

    def test_monotone_decreasing_in_p(self):
        values = [binom_cdf(4, 30, p) for p in np.linspace(0.01, 0.99, 25)]
        assert all(a >= b for a, b in zip(values, values[1:]))

    def test_never_exceeds_one(self):
        assert binom_cdf(999, 1000, 1e-12) <= 1.0

    @pytest.mark.parametrize(
        "k,n,p",
        [(-1, 5, 0.5), (6, 5, 0.5), (0, 0, 0.5), (2, 5, -0.1), (2, 5, 1.5), (2, 5, float("nan"))],
    )
    def test_rejects_bad_arguments(self, k, n, p):
        with pytest.raises(DomainError):
            binom_cdf(k, n, p)

    def test_rejects_non_integer_counts(self):
        with pytest.raises(DomainError):
            binom_cdf(1.5, 5, 0.5)
        with pytest.raises(DomainError):
            binom_cdf(1, 5.0, 0.5)

    def test_table_growth_is_thread_safe(self):
        # hammer a size the shared log-factorial table has not reached yet
        results = []
        barrier = threading.Barrier(8)

        def work():
            barrier.wait()
            results.append(binom_cdf(5, 4623, 0.001))

        threads = [threading.Thread(target=work) for _ in range(8)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert len(set(results)) == 1


class TestRiskUpperBound:
    def test_frozen_k0(self):
        # k=0, n=10, beta=0.1: closed form 1 - 0.1**0.1
        bound = risk_upper_bound(BinomialTail(0, 10), 0.1)
        assert bound.value == pytest.approx(0.2056717652757185, abs=1e-10)
        assert bound.value == pytest.approx(1 - 0.1**0.1, abs=1e-10)

    def test_frozen_k2_n20(self):
        bound = risk_upper_bound(BinomialTail(2, 20), 0.05)
        assert bound.value == pytest.approx(0.2826185248858609, abs=1e-10)

    def test_root_property(self):
        rng = np.random.default_rng(5)
        for _ in range(25):
            n = int(rng.integers(1, 300))
            k = int(rng.integers(0, n))
            beta = float(rng.uniform(0.01, 0.4))
            bound = risk_upper_bound(BinomialTail(k, n), beta)
            assert abs(binom_cdf(k, n, bound.value) - beta) < 1e-9
            assert bound.residual <= 1e-10

    def test_k_equals_n_is_pinned_at_one(self):
        bound = risk_upper_bound(BinomialTail(7, 7), 0.25)
        assert bound == RiskBound(value=1.0, beta=0.25, residual=0.75)

    def test_monotone_in_k(self):
        values = [risk_upper_bound(BinomialTail(k, 40), 0.1).value for k in range(41)]
        assert all(a < b for a, b in zip(values, values[1:]))
        assert values[-1] == 1.0

    def test_bound_exceeds_point_estimate(self):
        for k, n in [(0, 10), (3, 17), (9, 30)]:
            assert risk_upper_bound(BinomialTail(k, n), 0.1).value > k / n

    def test_tighter_with_larger_beta(self):
        loose = risk_upper_bound(BinomialTail(2, 30), 0.01).value
        tight = risk_upper_bound(BinomialTail(2, 30), 0.3).value
        assert tight < loose

    def test_accepts_bare_tuple(self):
        assert risk_upper_bound((0, 10), 0.1) == risk_upper_bound(BinomialTail(0, 10), 0.1)

    @pytest.mark.parametrize("beta", [0.0, 1.0, -0.2, 1.3, float("nan"), True])
    def test_rejects_bad_beta(self, beta):
        with pytest.raises(DomainError):
            risk_upper_bound(BinomialTail(1, 10), beta)

    def test_tail_validation(self):
        with pytest.raises(DomainError):
            BinomialTail(-1, 4)
        with pytest.raises(DomainError):
            BinomialTail(5, 4)
        with pytest.raises(DomainError):
            BinomialTail(0, 0)
