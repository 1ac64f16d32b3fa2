import math

import numpy as np
import pytest

from mmwnet.antenna import (mainlobe_prob, radiated_power_integral,
                            upa_pattern)


def db(x):
    return 10.0 * math.log10(x)


class TestUpaPattern:
    def test_omni(self):
        p = upa_pattern(1)
        assert math.degrees(p.theta_az) == 360.0
        assert p.theta_el == math.pi
        assert p.gain_main == 1.0 and p.gain_side == 1.0

    def test_four_elements(self):
        p = upa_pattern(4)
        assert math.degrees(p.theta_az) == pytest.approx(49.6, abs=0.05)
        assert p.gain_main == 4.0
        assert db(p.gain_side) == pytest.approx(-0.8839, abs=1e-4)

    def test_sixteen_elements(self):
        p = upa_pattern(16)
        assert math.degrees(p.theta_az) == pytest.approx(24.8, abs=0.05)
        assert p.gain_main == 16.0
        assert db(p.gain_side) == pytest.approx(-1.1092, abs=1e-4)

    def test_rejects_zero(self):
        with pytest.raises(ValueError):
            upa_pattern(0)

    def test_power_conservation_sweep(self):
        for n in list(range(2, 40)) + [64, 100, 256, 555, 1024]:
            p = upa_pattern(n)
            assert 0.0 < p.gain_side < 1.0, n
            assert radiated_power_integral(p) == pytest.approx(
                4.0 * math.pi, rel=1e-9), n

    def test_beamwidth_and_gain_monotone(self):
        widths = [upa_pattern(n).theta_az for n in range(2, 200)]
        gains = [upa_pattern(n).gain_main for n in range(2, 200)]
        assert all(b < a for a, b in zip(widths, widths[1:]))
        assert all(b > a for a, b in zip(gains, gains[1:]))


class TestMainlobeProb:
    def test_omni_is_certain(self):
        assert mainlobe_prob(upa_pattern(1)) == pytest.approx(1.0, abs=1e-15)

    def test_formula_values(self):
        assert mainlobe_prob(upa_pattern(4)) == pytest.approx(0.05782, abs=5e-5)
        assert mainlobe_prob(upa_pattern(16)) == pytest.approx(0.014805, abs=2e-5)

    @pytest.mark.parametrize("n", [4, 16])
    def test_against_orientation_sampling(self, n):
        # uniform azimuth; elevation density cos(psi)/2 via inverse CDF
        p = upa_pattern(n)
        rng = np.random.default_rng(2024)
        draws = 10_000_000
        phi = rng.uniform(-math.pi, math.pi, draws)
        psi = np.arcsin(rng.uniform(-1.0, 1.0, draws))
        hit = (np.abs(phi) <= p.theta_az / 2.0) & (np.abs(psi) <= p.theta_el / 2.0)
        est = hit.mean()
        se = math.sqrt(est * (1.0 - est) / draws)
        assert abs(est - mainlobe_prob(p)) <= 3.0 * se


class TestRadiatedPower:
    def test_omni_exact(self):
        assert radiated_power_integral(upa_pattern(1)) == pytest.approx(
            4.0 * math.pi, rel=1e-15)

    def test_numeric_quadrature_cross_check(self):
        # midpoint grid over the sphere against the closed form
        p = upa_pattern(9)
        phis = np.linspace(-math.pi, math.pi, 4001)[:-1] + math.pi / 4000
        psis = np.linspace(-math.pi / 2, math.pi / 2, 2001)[:-1] + math.pi / 4000
        pp, ss = np.meshgrid(phis, psis, indexing="ij")
        gain = np.where((np.abs(pp) <= p.theta_az / 2) &
                        (np.abs(ss) <= p.theta_el / 2),
                        p.gain_main, p.gain_side)
        integral = np.sum(gain * np.cos(ss)) * (2 * math.pi / 4000) * (math.pi / 2000)
        assert integral == pytest.approx(radiated_power_integral(p), rel=1e-4)
