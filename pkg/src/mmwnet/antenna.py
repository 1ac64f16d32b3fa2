"""Sectorized 3-D antenna pattern of a uniform planar square array."""

import math
from dataclasses import dataclass

__all__ = ["AntennaPattern", "upa_pattern", "mainlobe_prob",
           "radiated_power_integral"]

_SQRT3 = math.sqrt(3.0)
_FOUR_PI = 4.0 * math.pi


@dataclass(frozen=True)
class AntennaPattern:
    """Four-parameter sectorized pattern: main lobe of gain `gain_main` inside
    the azimuth/elevation half-power beamwidths, `gain_side` outside.

    Gains are linear power gains; beamwidths are radians.
    """
    n_elements: int
    theta_az: float
    theta_el: float
    gain_main: float
    gain_side: float

    def __post_init__(self):
        if self.n_elements < 1:
            raise ValueError("n_elements must be >= 1")
        if not (0.0 < self.theta_az <= 2.0 * math.pi):
            raise ValueError("theta_az must be in (0, 2*pi]")
        if not (0.0 < self.theta_el <= math.pi):
            raise ValueError("theta_el must be in (0, pi]")
        if self.gain_side <= 0 or self.gain_main < self.gain_side:
            raise ValueError("need gain_main >= gain_side > 0")

    @property
    def mainlobe_solid_angle(self) -> float:
        """Integral of cos(psi) over the main-lobe sector."""
        return self.theta_az * 2.0 * math.sin(self.theta_el / 2.0)


def upa_pattern(n: int) -> AntennaPattern:
    """Sectorized pattern for an n-element uniform planar square array.

    n = 1 is the omni-directional reference (360 deg beams, unit gains).
    For n > 1 the half-power beamwidths are sqrt(3)/sqrt(n) rad in both
    azimuth and elevation, the main-lobe gain is n, and the side-lobe gain
    is chosen so the total radiated power integrates to 4*pi.

    Args:
        n: number of antenna elements (need not be a perfect square).

    Returns:
        AntennaPattern with linear gains.

    Raises:
        ValueError: if n < 1.
    """
    if n != int(n) or n < 1:
        raise ValueError(f"element count must be a positive integer, got {n}")
    n = int(n)
    if n == 1:
        return AntennaPattern(1, 2.0 * math.pi, math.pi, 1.0, 1.0)
    root_n = math.sqrt(n)
    theta = _SQRT3 / root_n
    s = math.sin(_SQRT3 / (2.0 * root_n))
    g = (root_n - (_SQRT3 / (2.0 * math.pi)) * n * s) / \
        (root_n - (_SQRT3 / (2.0 * math.pi)) * s)
    return AntennaPattern(n, theta, theta, float(n), g)


def mainlobe_prob(pattern: AntennaPattern) -> float:
    """Probability that a uniformly oriented antenna's main lobe covers a
    given far-field direction: (theta_az / 2*pi) * sin(theta_el / 2)."""
    return pattern.theta_az / (2.0 * math.pi) * math.sin(pattern.theta_el / 2.0)


def radiated_power_integral(pattern: AntennaPattern) -> float:
    """Closed-form total radiated power integral; equals 4*pi for a passive
    pattern (self-test for upa_pattern)."""
    main = pattern.mainlobe_solid_angle
    return pattern.gain_main * main + pattern.gain_side * (_FOUR_PI - main)
