"""Exact SINR coverage conditioned on the gain vector, rate coverage, and
ergodic spectral efficiency."""

import math
from dataclasses import dataclass
from itertools import product

import numpy as np

from .antenna import AntennaPattern, mainlobe_prob
from .channel import LinkModel, OmegaVector, ReferenceLink, beta0
from .specfun import gamma_sf

__all__ = ["CoverageCurve", "MultinomialPlan", "g_ti", "multinomial_plan",
           "coverage_conditional", "coverage_curve", "rate_ccdf", "rate_curve",
           "ergodic_spectral_efficiency", "beta_grid", "QuadratureError"]

_LN2 = math.log(2.0)


class QuadratureError(ArithmeticError):
    """Raised when the ergodic-efficiency quadrature fails to converge."""


@dataclass
class CoverageCurve:
    """CCDF samples over an increasing threshold grid."""
    thresholds: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        self.thresholds = np.asarray(self.thresholds, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.thresholds.shape != self.values.shape:
            raise ValueError("thresholds and values must align")
        if np.any(np.diff(self.thresholds) <= 0):
            raise ValueError("thresholds must be strictly increasing")
        if np.any(self.values < -1e-9) or np.any(self.values > 1.0 + 1e-9):
            raise ValueError("coverage values must lie in [0, 1]")
        if np.any(np.diff(self.values) > 1e-9):
            raise ValueError("coverage values must be non-increasing")


def _check_m0(m0):
    if m0 != int(m0):
        raise ValueError(
            f"non-integer reference Nakagami shape m0={m0} is unsupported; "
            "the exact expansion requires integer m0")
    if m0 < 1:
        raise ValueError("m0 must be >= 1")
    return int(m0)


def _log_gamma_ratio(m, t):
    """log of Gamma(m+t) / (t! Gamma(m)) for integer array m, scalar t."""
    vals, inv = np.unique(m, return_inverse=True)
    lut = np.array([math.lgamma(v + t) - math.lgamma(t + 1) - math.lgamma(v)
                    for v in vals])
    return lut[inv].reshape(np.shape(m))


def _gain_coeff_block(b0, omega, m, tx, p_t, t):
    """Degree-t series coefficient G_t for each interferer.

    b0: (n,) thresholds; omega, m: (..., K). Returns (..., n, K).
    """
    omega = omega[..., None, :]              # (..., 1, K)
    m = m[..., None, :]
    b0c = b0.reshape(-1, 1)                  # (n, 1)
    acc = np.zeros(np.broadcast_shapes(omega.shape, b0c.shape))
    p_m = mainlobe_prob(tx)
    with np.errstate(divide="ignore", invalid="ignore"):
        log_om = np.log(np.where(omega > 0, omega / m, 1.0))
        for x, w in ((tx.gain_main, p_m), (tx.gain_side, 1.0 - p_m)):
            if w == 0.0:
                continue
            acc += w * np.exp(t * (log_om + math.log(x))
                              - (m + t) * np.log1p(b0c * x * omega / m))
    coeff = p_t * np.exp(_log_gamma_ratio(m, t)) * acc
    # an absent interferer (omega 0) contributes the identity series
    coeff = np.where(omega > 0, coeff, 1.0 if t == 0 else 0.0)
    if t == 0:
        coeff = coeff + np.where(omega > 0, 1.0 - p_t, 0.0)
    return coeff


def _convolved_series(b0, omega, m, tx, p_t, m0):
    """Truncated coefficients of prod_i sum_t G_t(omega_i) z^t.

    b0: (n,); omega, m: (..., K). Returns (..., n, m0).
    """
    k = omega.shape[-1]
    lead = omega.shape[:-1]
    s = np.zeros(lead + (len(b0), m0))
    s[..., 0] = 1.0
    if k == 0:
        return s
    blocks = [_gain_coeff_block(b0, omega, m, tx, p_t, t) for t in range(m0)]
    coeffs = np.stack(blocks, axis=-1)       # (..., n, K, m0)
    for i in range(k):
        ci = coeffs[..., i, :]               # (..., n, m0)
        new = np.zeros_like(s)
        for t in range(m0):
            new[..., t] = np.einsum("...j,...j->...",
                                    s[..., :t + 1], ci[..., t::-1])
        s = new
    return s


def coverage_curve_batch(betas, omega_batch, m_batch, omega0, link: LinkModel,
                         tx: AntennaPattern, ref: ReferenceLink) -> np.ndarray:
    """Conditional coverage over a threshold grid for a batch of networks.

    Args:
        betas: (n,) increasing SINR thresholds (linear).
        omega_batch: (..., K) interferer gains (0 entries are inert).
        m_batch: (..., K) integer Nakagami shapes per interferer.
        omega0: reference-link gain.
        link, tx, ref: model parameters.

    Returns:
        (..., n) coverage probabilities.
    """
    m0 = _check_m0(ref.m0)
    betas = np.asarray(betas, dtype=float)
    omega_batch = np.asarray(omega_batch, dtype=float)
    m_batch = np.asarray(m_batch, dtype=float)
    b0 = beta0(betas, ref, tx, omega0)
    s = _convolved_series(b0, omega_batch, m_batch, tx, link.p_t, m0)
    out = np.zeros(s.shape[:-1])
    for t in range(m0):
        out += s[..., t] * b0 ** t * gamma_sf(m0 - t, b0 * link.noise)
    return np.clip(out, 0.0, 1.0)


def _omega_ms(omega: OmegaVector, link: LinkModel):
    m = np.where(omega.los_flags, link.m_los, link.m_nlos) \
        if omega.k else np.zeros(0)
    return omega.omega, m.astype(float)


def coverage_curve(betas, omega: OmegaVector, link: LinkModel,
                   tx: AntennaPattern, ref: ReferenceLink) -> CoverageCurve:
    """Conditional SINR coverage P[SINR > beta] over a threshold grid."""
    om, m = _omega_ms(omega, link)
    vals = coverage_curve_batch(betas, om, m, omega.omega0, link, tx, ref)
    return CoverageCurve(thresholds=np.asarray(betas, float), values=vals)


def coverage_conditional(beta: float, omega: OmegaVector, link: LinkModel,
                         tx: AntennaPattern, ref: ReferenceLink) -> float:
    """Exact conditional coverage probability at a single threshold."""
    om, m = _omega_ms(omega, link)
    return float(coverage_curve_batch(np.array([beta]), om, m, omega.omega0,
                                      link, tx, ref)[0])


def rate_ccdf(eta: float, omega: OmegaVector, link: LinkModel,
              tx: AntennaPattern, ref: ReferenceLink) -> float:
    """Rate coverage P[log2(1 + SINR) > eta] = coverage at 2**eta - 1."""
    if eta < 0:
        raise ValueError("eta must be non-negative")
    return coverage_conditional(2.0 ** eta - 1.0, omega, link, tx, ref)


def rate_curve(etas, omega: OmegaVector, link: LinkModel, tx: AntennaPattern,
               ref: ReferenceLink) -> CoverageCurve:
    """Rate-coverage CCDF over a grid of spectral efficiencies (bits/use)."""
    etas = np.asarray(etas, dtype=float)
    om, m = _omega_ms(omega, link)
    vals = coverage_curve_batch(2.0 ** etas - 1.0, om, m, omega.omega0,
                                link, tx, ref)
    return CoverageCurve(thresholds=etas, values=vals)


# ---------------------------------------------------------------------------
# per-interferer series: scalar coefficient and the explicit multinomial sum
# ---------------------------------------------------------------------------

def g_ti(t_i: int, omega_i: float, m_i: int, beta_0: float,
         tx: AntennaPattern, p_t: float) -> float:
    """Degree-t_i interference series coefficient for one interferer.

    p_t (omega_i/m_i)^t_i Gamma(m_i+t_i)/(t_i! Gamma(m_i)) *
    [p_M Q(G_t) + (1-p_M) Q(g_t)] + (1-p_t) delta[t_i],
    with Q(x) = x^t_i (1 + beta_0 x omega_i / m_i)^-(m_i + t_i).
    """
    if t_i < 0 or omega_i < 0 or m_i < 1:
        raise ValueError("t_i >= 0, omega_i >= 0, m_i >= 1 required")
    if omega_i == 0.0:
        return 1.0 if t_i == 0 else 0.0
    p_m = mainlobe_prob(tx)
    acc = 0.0
    for x, w in ((tx.gain_main, p_m), (tx.gain_side, 1.0 - p_m)):
        if w == 0.0:
            continue
        acc += w * math.exp(t_i * math.log(x * omega_i / m_i)
                            + math.lgamma(m_i + t_i) - math.lgamma(t_i + 1)
                            - math.lgamma(m_i)
                            - (m_i + t_i) * math.log1p(beta_0 * x * omega_i / m_i))
    return p_t * acc + ((1.0 - p_t) if t_i == 0 else 0.0)


@dataclass
class MultinomialPlan:
    """Per-interferer series coefficients up to degree m0 - 1, with both the
    convolution evaluation and the explicit multinomial-sum evaluation of
    the degree-t products."""
    m0: int
    coeffs: np.ndarray  # (K, m0)

    @property
    def k(self) -> int:
        return self.coeffs.shape[0]

    def convolved(self) -> np.ndarray:
        """Degree-t coefficients of the product series, by convolution."""
        s = np.zeros(self.m0)
        s[0] = 1.0
        for i in range(self.k):
            new = np.zeros(self.m0)
            for t in range(self.m0):
                new[t] = np.dot(s[:t + 1], self.coeffs[i, t::-1])
            s = new
        return s

    def enumerated(self) -> np.ndarray:
        """Same coefficients by brute-force enumeration of every length-K
        non-negative integer sequence summing to t. Exponential in K;
        intended for validation on small instances."""
        out = np.zeros(self.m0)
        if self.k == 0:
            out[0] = 1.0
            return out
        for seq in product(range(self.m0), repeat=self.k):
            t = sum(seq)
            if t < self.m0:
                out[t] += math.prod(self.coeffs[i, ti] for i, ti in enumerate(seq))
        return out


def multinomial_plan(beta: float, omega: OmegaVector, link: LinkModel,
                     tx: AntennaPattern, ref: ReferenceLink) -> MultinomialPlan:
    """Series coefficients for every interferer at one threshold."""
    m0 = _check_m0(ref.m0)
    b0 = beta0(beta, ref, tx, omega.omega0)
    om, m = _omega_ms(omega, link)
    coeffs = np.array([[g_ti(t, om[i], int(m[i]), b0, tx, link.p_t)
                        for t in range(m0)] for i in range(omega.k)])
    return MultinomialPlan(m0=m0, coeffs=coeffs.reshape(omega.k, m0))


# ---------------------------------------------------------------------------
# ergodic spectral efficiency
# ---------------------------------------------------------------------------

def beta_grid(beta_min: float, beta_max: float, n_points: int) -> np.ndarray:
    """Log-spaced threshold grid; beta_min = 0 is handled by prepending 0."""
    if beta_min < 0 or beta_max <= beta_min:
        raise ValueError("need 0 <= beta_min < beta_max")
    if n_points < 2:
        raise ValueError("need at least two grid points")
    if beta_min == 0.0:
        lo = beta_max * 1e-10
        return np.concatenate([[0.0], np.geomspace(lo, beta_max, n_points - 1)])
    return np.geomspace(beta_min, beta_max, n_points)


def ergodic_spectral_efficiency(coverage_fn, beta_min: float = 1e-4,
                                beta_max: float = 1e6, n_points: int = 2000,
                                check_convergence: bool = False,
                                rtol: float = 1e-3,
                                max_points: int = 200_000) -> float:
    """Mean spectral efficiency by trapezoidal quadrature of the coverage
    curve: integral of P_c(beta) / (ln 2 (1 + beta)) over [beta_min, beta_max]
    on a log-spaced grid.

    Args:
        coverage_fn: maps a threshold array to coverage values.
        check_convergence: double the grid until the value changes by less
            than rtol (relative); raises QuadratureError past max_points.

    Returns:
        Ergodic spectral efficiency in bits per channel use.
    """
    def evaluate(n):
        grid = beta_grid(beta_min, beta_max, n)
        vals = np.asarray(coverage_fn(grid), dtype=float)
        return float(np.trapezoid(vals / (_LN2 * (1.0 + grid)), grid))

    value = evaluate(n_points)
    if not check_convergence:
        return value
    n = n_points
    while True:
        n *= 2
        if n > max_points:
            raise QuadratureError(
                f"ergodic-efficiency quadrature not converged at {n // 2} "
                f"points (rtol={rtol})")
        refined = evaluate(n)
        if abs(refined - value) <= rtol * max(abs(refined), 1e-300):
            return refined
        value = refined
