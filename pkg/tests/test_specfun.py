import math

import numpy as np
import pytest
from scipy.integrate import quad

from mmwnet.specfun import (gamma_sf, hyp2f1_bplus1, hyp2f1_bplus1_integral,
                            hyp2f1_bplus1_series, log_gamma)


class TestLogGamma:
    def test_at_one(self):
        assert log_gamma(1.0) == 0.0

    def test_half(self):
        # Gamma(1/2) = sqrt(pi)
        assert log_gamma(0.5) == pytest.approx(0.5723649429, abs=1e-10)

    def test_large_argument_stays_finite(self):
        assert math.isfinite(log_gamma(171.0))
        assert math.isfinite(log_gamma(1e6))

    def test_domain(self):
        with pytest.raises(ValueError):
            log_gamma(0.0)
        with pytest.raises(ValueError):
            log_gamma(-3.2)

    def test_recurrence(self):
        x = np.linspace(0.5, 200.0, 400)
        lhs = log_gamma(x + 1.0) - log_gamma(x)
        assert np.allclose(lhs, np.log(x), rtol=0, atol=1e-12 * np.abs(np.log(x) + 1))


class TestGammaSf:
    def test_trivial(self):
        assert gamma_sf(1, 0.0) == 1.0

    def test_known_value(self):
        # e^-4 (1 + 4 + 8 + 32/3), cross-checked below by quadrature
        assert gamma_sf(4, 4.0) == pytest.approx(0.4334701101, abs=1e-9)

    def test_against_density_integral(self):
        for k, x in [(1, 0.5), (2, 3.0), (4, 4.0), (6, 1.2)]:
            oracle, _ = quad(
                lambda s: s ** (k - 1) * math.exp(-s) / math.gamma(k), x, 60.0 + x)
            assert gamma_sf(k, x) == pytest.approx(oracle, rel=1e-9)

    def test_deep_tail_underflows_cleanly(self):
        v = gamma_sf(2, 700.0)
        assert v == 0.0 or v < 1e-300

    def test_monotone_in_x_and_k(self):
        x = np.linspace(0.0, 20.0, 100)
        v = gamma_sf(3, x)
        assert np.all(np.diff(v) <= 1e-15)
        for xi in (0.5, 2.0, 10.0):
            vals = [gamma_sf(k, xi) for k in range(1, 8)]
            assert all(b >= a for a, b in zip(vals, vals[1:]))

    def test_rejects_bad_shape(self):
        with pytest.raises(ValueError):
            gamma_sf(0, 1.0)
        with pytest.raises(ValueError):
            gamma_sf(2.5, 1.0)


class TestHyp2F1:
    def test_z_zero(self):
        assert hyp2f1_bplus1(3.0, 1.5, 0.0) == 1.0

    def test_log_identity(self):
        # 2F1(1, 1; 2; z) = -ln(1-z)/z
        assert hyp2f1_bplus1(1.0, 1.0, -1.0) == pytest.approx(
            math.log(2.0), rel=1e-11)
        for z in (-0.3, -2.0, -17.5):
            assert hyp2f1_bplus1(1.0, 1.0, z) == pytest.approx(
                -math.log1p(-z) / z, rel=1e-10)

    def test_dual_path_agreement(self):
        assert hyp2f1_bplus1_integral(4.5, 4.5, -3.7) == pytest.approx(
            hyp2f1_bplus1_series(4.5, 4.5, -3.7), rel=1e-10)
        rng = np.random.default_rng(42)
        for _ in range(100):
            a = rng.uniform(0.5, 12.0)
            b = rng.uniform(0.5, 12.0)
            z = -rng.uniform(1e-6, 20.0)
            assert hyp2f1_bplus1_integral(a, b, z) == pytest.approx(
                hyp2f1_bplus1_series(a, b, z), rel=1e-10), (a, b, z)

    def test_bounded_and_decreasing_in_magnitude(self):
        zs = -np.geomspace(1e-3, 1e6, 40)
        vals = [hyp2f1_bplus1(5.0, 2.5, z) for z in zs]
        assert all(0.0 < v <= 1.0 for v in vals)
        assert all(b <= a for a, b in zip(vals, vals[1:]))

    def test_extreme_z(self):
        v = hyp2f1_bplus1(6.0, 2.5, -1e9)
        assert 0.0 < v < 1e-15

    def test_domain(self):
        with pytest.raises(ValueError):
            hyp2f1_bplus1(1.0, 1.0, 0.5)
        with pytest.raises(ValueError):
            hyp2f1_bplus1(-1.0, 1.0, -0.5)
