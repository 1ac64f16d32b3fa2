"""Analytic distance-dependent blocking probability over the annulus, the
LOS-ball radius, and the step-function approximation."""

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .geometry import AnnulusRegion

__all__ = ["BlockProbProfile", "TabulatedBlockProfile", "LosBall",
           "pairwise_block_prob", "block_prob", "los_ball"]

_CLAMP_TOL = 1e-12


def _clamped_unit(v):
    """Clip to [-1, 1], tolerating only float-level boundary grazing."""
    v = np.asarray(v, dtype=float)
    if np.any(np.abs(v) > 1.0 + _CLAMP_TOL):
        raise ValueError(f"inverse-trig argument {v} outside [-1, 1]")
    return np.clip(v, -1.0, 1.0)


def _check_geometry(region: AnnulusRegion, w: float):
    if w <= 0:
        raise ValueError("blockage diameter must be positive")
    if w >= 2.0 * region.r_in:
        raise ValueError(
            f"blocking-probability geometry requires W < 2 r_in "
            f"(W={w}, r_in={region.r_in})")


def pairwise_block_prob(r, region: AnnulusRegion, w: float):
    """Probability that one uniformly placed blockage blocks a transmitter
    at distance r from the receiver.

    The blocking-region area is r*W + pi*W^2/8 - mu while the region stays
    inside the outer boundary (r <= r_out - W/2); past that the cap is
    replaced by its intersection with the outer disk (the nu term). mu
    removes the part of the strip inside the inner exclusion disk.

    Args:
        r: probe distance(s), within [r_in, r_out].
        region: the annulus.
        w: blockage diameter, must satisfy w < 2 * r_in.

    Returns:
        Probability (scalar for scalar input, else array).
    """
    _check_geometry(region, w)
    r_arr = np.asarray(r, dtype=float)
    if np.any((r_arr < region.r_in - _CLAMP_TOL) |
              (r_arr > region.r_out + _CLAMP_TOL)):
        raise ValueError(f"probe distance {r} outside [{region.r_in}, {region.r_out}]")
    flat = np.atleast_1d(np.clip(r_arr, region.r_in, region.r_out)).astype(float)
    r_in, r_out = region.r_in, region.r_out
    hw = w / 2.0
    mu = hw * math.sqrt(r_in ** 2 - hw ** 2) + r_in ** 2 * math.asin(hw / r_in)

    area = flat * w + math.pi * w ** 2 / 8.0 - mu
    far = flat > r_out - hw
    if far.any():
        rf = flat[far]
        s = (r_out + rf + hw) / 2.0
        heron = s * (s - rf) * (s - hw) * (s - r_out)
        nu = (hw ** 2 * np.arcsin(_clamped_unit((r_out ** 2 - hw ** 2 - rf ** 2)
                                                / (rf * w)))
              + r_out ** 2 * np.arccos(_clamped_unit((r_out ** 2 - hw ** 2 + rf ** 2)
                                                     / (2.0 * rf * r_out)))
              - 2.0 * np.sqrt(np.maximum(heron, 0.0)))
        area[far] = rf * w - mu + nu

    p = np.clip(area / region.area(), 0.0, 1.0)
    p = p.reshape(np.shape(r_arr))
    return float(p) if np.isscalar(r) or np.ndim(r) == 0 else p


@dataclass(frozen=True)
class BlockProbProfile:
    """Distance-dependent blocking probability for K independent uniformly
    placed blockages of diameter w over the region."""
    region: AnnulusRegion
    w: float
    k: int

    def __post_init__(self):
        _check_geometry(self.region, self.w)
        if self.k < 0:
            raise ValueError("blockage count must be non-negative")

    def pairwise(self, r):
        return pairwise_block_prob(r, self.region, self.w)

    def __call__(self, r):
        return block_prob(r, self)


@dataclass(frozen=True)
class TabulatedBlockProfile:
    """Empirical blocking-probability profile (linear interpolation over a
    radial grid); drop-in replacement for BlockProbProfile in the
    independent-blocking simulation level."""
    region: AnnulusRegion
    r_grid: np.ndarray
    p_grid: np.ndarray

    def __call__(self, r):
        out = np.interp(np.asarray(r, dtype=float), self.r_grid, self.p_grid)
        return float(out) if np.ndim(r) == 0 else out


@dataclass(frozen=True)
class LosBall:
    """Equivalent LOS ball: every interferer within `radius` is LOS, every
    one beyond is NLOS; rho is the matched mean unblocked count."""
    radius: float
    rho: float

    def step_block_prob(self, r):
        r = np.asarray(r, dtype=float)
        out = np.where(r <= self.radius, 0.0, 1.0)
        return float(out) if out.ndim == 0 else out


def block_prob(r, profile: BlockProbProfile):
    """Probability that a transmitter at distance r is blocked by any of the
    K independent blockages: 1 - (1 - p_pair(r))^K."""
    return 1.0 - (1.0 - profile.pairwise(r)) ** profile.k


def los_ball(profile) -> LosBall:
    """First-moment-matched LOS ball.

    Integrates the unblocked fraction (adaptive quadrature with the
    blocking-area branch point, when known, forced as a panel boundary) to
    get the mean LOS count rho and the matching radius R_B with
    rho = lambda * pi * (R_B^2 - r_in^2).

    Args:
        profile: anything with .region, .k, and a callable p_b(r) interface
            (BlockProbProfile in the analytic case).
    """
    region = profile.region
    branch = region.r_out - profile.w / 2.0 if hasattr(profile, "w") else None
    points = [branch] if branch and region.r_in < branch < region.r_out else None
    integral, _ = quad(lambda r: (1.0 - profile(r)) * r,
                       region.r_in, region.r_out,
                       points=points, limit=200, epsabs=0.0, epsrel=1e-8)
    radius = math.sqrt(2.0 * integral + region.r_in ** 2)
    rho = 2.0 * math.pi * (profile.k / region.area()) * integral
    return LosBall(radius=radius, rho=rho)
