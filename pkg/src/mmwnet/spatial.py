"""Closed-form spatially averaged coverage under the independent-interferer
LOS-ball model: the interferer gain density, its expected series
coefficients, and the averaged CCDF / ergodic spectral efficiency."""

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .antenna import AntennaPattern, mainlobe_prob
from .blockage import LosBall
from .channel import LinkModel, ReferenceLink, beta0
from .coverage import CoverageCurve, _check_m0, ergodic_spectral_efficiency
from .geometry import AnnulusRegion
from .specfun import gamma_sf, hyp2f1_bplus1

__all__ = ["OmegaSegment", "OmegaDensity", "omega_density", "expected_g_ti",
           "expected_gain_series", "coverage_spatial", "coverage_spatial_curve",
           "ergodic_spatial", "throughput", "calibrate_los_ball_radius"]


@dataclass(frozen=True)
class OmegaSegment:
    """One power-law branch of the interferer-gain density: gains in
    [omega_lo, omega_hi] arising from scale * R^-alpha with Nakagami shape m,
    carrying `weight` of the azimuth mixture and `mass` of the radial band."""
    omega_lo: float
    omega_hi: float
    scale: float
    alpha: float
    m: int
    weight: float
    mass: float


@dataclass
class OmegaDensity:
    """Four-segment mixture density of a random interferer's gain."""
    segments: list
    area: float

    def pdf(self, w):
        w = np.asarray(w, dtype=float)
        out = np.zeros_like(w)
        for s in self.segments:
            if s.mass == 0.0:
                continue
            inside = (w >= s.omega_lo) & (w <= s.omega_hi)
            with np.errstate(divide="ignore", invalid="ignore"):
                d = (2.0 * math.pi * s.scale ** (2.0 / s.alpha)
                     / (s.alpha * self.area)) * w ** (-(2.0 + s.alpha) / s.alpha)
            out += np.where(inside, s.weight * d, 0.0)
        return float(out) if out.ndim == 0 else out

    def cdf(self, w):
        w = np.asarray(w, dtype=float)
        out = np.zeros_like(w, dtype=float)
        for s in self.segments:
            if s.mass == 0.0:
                continue
            top = np.clip(w, s.omega_lo, s.omega_hi)
            piece = (math.pi * s.scale ** (2.0 / s.alpha) / self.area) * \
                (s.omega_lo ** (-2.0 / s.alpha) - top ** (-2.0 / s.alpha))
            out += np.where(w >= s.omega_lo, s.weight * piece, 0.0)
        return float(out) if out.ndim == 0 else out

    def total_mass(self) -> float:
        return sum(s.weight * s.mass for s in self.segments)


def omega_density(rx: AntennaPattern, link: LinkModel, region: AnnulusRegion,
                  ball: LosBall, power_ratio: float = None) -> OmegaDensity:
    """Gain density of one interferer uniform over the annulus under the
    LOS-ball rule (LOS with alpha_los/m_los inside the ball radius, NLOS
    beyond), mixed over the receiver's main/side azimuth sectors."""
    if not (region.r_in <= ball.radius <= region.r_out):
        raise ValueError(
            f"LOS-ball radius {ball.radius} outside [{region.r_in}, {region.r_out}]")
    ratio = link.power_ratio if power_ratio is None else power_ratio
    area = region.area()
    main_frac = rx.theta_az / (2.0 * math.pi)
    segments = []
    for gain, weight in ((rx.gain_main, main_frac),
                         (rx.gain_side, 1.0 - main_frac)):
        c = ratio * gain
        bands = (
            (link.alpha_los, link.m_los, region.r_in, ball.radius),
            (link.alpha_nlos, link.m_nlos, ball.radius, region.r_out),
        )
        for alpha, m, r_lo, r_hi in bands:
            mass = math.pi * (r_hi ** 2 - r_lo ** 2) / area
            segments.append(OmegaSegment(
                omega_lo=c / r_hi ** alpha, omega_hi=c / r_lo ** alpha,
                scale=c, alpha=alpha, m=m, weight=weight, mass=mass))
    return OmegaDensity(segments=segments, area=area)


def _m_ti(y: float, m: int, t: int, alpha: float, b0: float) -> float:
    """2F1(m+t, m+2/a; m+2/a+1; -m/(y b0)) / (y^m (m + 2/a))."""
    b = m + 2.0 / alpha
    f = hyp2f1_bplus1(m + t, b, -m / (y * b0))
    return f / (y ** m * b)


def _segment_expectation(seg: OmegaSegment, t: int, b0: float,
                         tx: AntennaPattern, p_t: float, area: float) -> float:
    """Integral of D(omega) * G_t(omega) over one density segment."""
    if seg.mass == 0.0 or seg.omega_hi <= seg.omega_lo:
        return 0.0
    out = (1.0 - p_t) * seg.mass if t == 0 else 0.0
    if p_t == 0.0:
        return out
    m, alpha, c = seg.m, seg.alpha, seg.scale
    p_m = mainlobe_prob(tx)
    log_k = (math.log(2.0 * math.pi / (alpha * area)) + m * math.log(m)
             + math.lgamma(m + t) - math.lgamma(m) - math.lgamma(t + 1)
             - (m + t) * math.log(b0) + (2.0 / alpha) * math.log(c))
    k_ti = math.exp(log_k)
    acc = 0.0
    for x, w in ((tx.gain_main, p_m), (tx.gain_side, 1.0 - p_m)):
        if w == 0.0:
            continue
        acc += w * (_m_ti(x * seg.omega_lo, m, t, alpha, b0) / seg.omega_lo ** (2.0 / alpha)
                    - _m_ti(x * seg.omega_hi, m, t, alpha, b0) / seg.omega_hi ** (2.0 / alpha))
    return out + p_t * k_ti * acc


def expected_g_ti(t_i: int, density: OmegaDensity, beta_0: float,
                  tx: AntennaPattern, p_t: float) -> float:
    """E[G_t_i(Omega)] over the interferer-gain density (closed form)."""
    if t_i < 0:
        raise ValueError("t_i must be non-negative")
    return sum(s.weight * _segment_expectation(s, t_i, beta_0, tx, p_t,
                                               density.area)
               for s in density.segments)


def expected_gain_series(density: OmegaDensity, beta_0: float,
                         tx: AntennaPattern, p_t: float, m0: int) -> np.ndarray:
    """Expected series coefficients E[G_t(Omega)] for t = 0 .. m0-1."""
    return np.array([expected_g_ti(t, density, beta_0, tx, p_t)
                     for t in range(m0)])


def _poly_power(coeffs: np.ndarray, k: int, m0: int) -> np.ndarray:
    """Degree-truncated k-th power of a polynomial (binary exponentiation)."""
    def mul(a, b):
        out = np.zeros(m0)
        for t in range(m0):
            out[t] = np.dot(a[:t + 1], b[t::-1])
        return out

    result = np.zeros(m0)
    result[0] = 1.0
    base = coeffs.copy()
    n = k
    while n > 0:
        if n & 1:
            result = mul(result, base)
        base = mul(base, base)
        n >>= 1
    return result


def coverage_spatial_curve(betas, k: int, density: OmegaDensity,
                           link: LinkModel, tx: AntennaPattern,
                           rx: AntennaPattern, ref: ReferenceLink,
                           power_ratios=None) -> CoverageCurve:
    """Spatially averaged coverage over a threshold grid.

    With i.i.d. interferers the product of per-interferer expectations is a
    k-fold self-convolution of one expected series; per-interferer power
    ratios (heterogeneous case) fall back to a generic product.

    Args:
        betas: increasing SINR thresholds (linear).
        k: number of interferers.
        density: interferer gain density (omega_density output).
        power_ratios: optional per-interferer P_i/P_0 array; scales the
            density per interferer.

    Returns:
        CoverageCurve of averaged probabilities.
    """
    m0 = _check_m0(ref.m0)
    if k < 0:
        raise ValueError("k must be non-negative")
    betas = np.asarray(betas, dtype=float)
    omega0 = rx.gain_main * ref.r0 ** (-ref.alpha0)
    b0s = beta0(betas, ref, tx, omega0)
    values = np.empty_like(betas)
    densities = None
    if power_ratios is not None:
        ratios = np.asarray(power_ratios, dtype=float)
        if ratios.shape != (k,):
            raise ValueError("power_ratios must have one entry per interferer")
        densities = [_scaled_density(density, r) for r in ratios]
    for i, b0 in enumerate(b0s):
        if b0 == 0.0:
            values[i] = 1.0
            continue
        if densities is None:
            series = expected_gain_series(density, b0, tx, link.p_t, m0)
            s = _poly_power(series, k, m0)
        else:
            s = np.zeros(m0)
            s[0] = 1.0
            for d in densities:
                s = _poly_power_mul(s, expected_gain_series(d, b0, tx, link.p_t, m0), m0)
        total = 0.0
        for t in range(m0):
            total += s[t] * b0 ** t * gamma_sf(m0 - t, b0 * link.noise)
        values[i] = min(max(total, 0.0), 1.0)
    return CoverageCurve(thresholds=betas, values=values)


def _poly_power_mul(a: np.ndarray, b: np.ndarray, m0: int) -> np.ndarray:
    out = np.zeros(m0)
    for t in range(m0):
        out[t] = np.dot(a[:t + 1], b[t::-1])
    return out


def _scaled_density(density: OmegaDensity, ratio: float) -> OmegaDensity:
    segs = [OmegaSegment(s.omega_lo * ratio, s.omega_hi * ratio,
                         s.scale * ratio, s.alpha, s.m, s.weight, s.mass)
            for s in density.segments]
    return OmegaDensity(segments=segs, area=density.area)


def coverage_spatial(beta: float, k: int, density: OmegaDensity,
                     link: LinkModel, tx: AntennaPattern, rx: AntennaPattern,
                     ref: ReferenceLink) -> float:
    """Spatially averaged coverage probability at a single threshold."""
    return float(coverage_spatial_curve(np.array([beta]), k, density, link,
                                        tx, rx, ref).values[0])


def ergodic_spatial(k: int, density: OmegaDensity, link: LinkModel,
                    tx: AntennaPattern, rx: AntennaPattern, ref: ReferenceLink,
                    beta_min: float = 1e-4, beta_max: float = 1e6,
                    n_points: int = 2000, **kwargs) -> float:
    """Spatially averaged ergodic spectral efficiency (bits/use)."""
    def pc(grid):
        return coverage_spatial_curve(grid, k, density, link, tx, rx, ref).values
    return ergodic_spectral_efficiency(pc, beta_min=beta_min, beta_max=beta_max,
                                       n_points=n_points, **kwargs)


def throughput(p_t: float, ergodic_se: float) -> float:
    """Network throughput: transmit probability times ergodic efficiency."""
    return p_t * ergodic_se


def calibrate_los_ball_radius(target_se: float, k: int, link: LinkModel,
                              tx: AntennaPattern, rx: AntennaPattern,
                              ref: ReferenceLink, region: AnnulusRegion,
                              bracket=None, xtol: float = 1e-4,
                              **ergodic_kwargs) -> LosBall:
    """Rate-matching calibration: find the LOS-ball radius whose spatially
    averaged ergodic efficiency equals target_se (bisection over the given
    bracket; defaults to the full annulus range)."""
    lo, hi = bracket if bracket is not None else (region.r_in, region.r_out)

    def objective(radius):
        ball = LosBall(radius=radius, rho=0.0)
        dens = omega_density(rx, link, region, ball)
        return ergodic_spatial(k, dens, link, tx, rx, ref, **ergodic_kwargs) - target_se

    radius = brentq(objective, lo, hi, xtol=xtol)
    lam = k / region.area()
    return LosBall(radius=radius,
                   rho=lam * math.pi * (radius ** 2 - region.r_in ** 2))
