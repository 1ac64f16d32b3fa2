"""Special-function kernel: log-gamma, the Erlang (integer-shape gamma) survival
function, and the constrained Gauss hypergeometric family 2F1(a, b; b+1; z<=0)."""

import math

import numpy as np
from scipy.integrate import quad

__all__ = ["log_gamma", "gamma_sf", "hyp2f1_bplus1",
           "hyp2f1_bplus1_integral", "hyp2f1_bplus1_series"]

_SERIES_Z_CUTOFF = 0.5
_SERIES_MAX_TERMS = 800


class SpecFunError(ArithmeticError):
    """Raised when a special-function evaluation fails to converge."""


def log_gamma(x):
    """Natural log of Gamma(x) for x > 0.

    Args:
        x: positive real (scalar or array).

    Returns:
        ln Gamma(x), same shape as input.

    Raises:
        ValueError: if any x <= 0.
    """
    arr = np.asarray(x, dtype=float)
    if np.any(arr <= 0):
        raise ValueError(f"log_gamma requires x > 0, got {x}")
    out = np.vectorize(math.lgamma, otypes=[float])(arr)
    return float(out) if np.isscalar(x) or arr.ndim == 0 else out


def gamma_sf(k, x):
    """Survival function of a unit-rate gamma with integer shape k.

    Computes exp(-x) * sum_{j<k} x^j / j! (the Erlang tail) in log space,
    so large x underflows to 0 instead of producing inf*0 artifacts.

    Args:
        k: positive integer shape.
        x: non-negative real (scalar or array).

    Returns:
        P[Gamma(k, 1) > x], in [0, 1].
    """
    if k != int(k) or k < 1:
        raise ValueError(f"gamma_sf requires positive integer shape, got {k}")
    k = int(k)
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0):
        raise ValueError("gamma_sf requires x >= 0")
    with np.errstate(divide="ignore"):
        logx = np.log(arr, out=np.full(arr.shape, -np.inf), where=arr > 0)
    total = np.zeros_like(arr)
    for j in range(k):
        log_term = j * logx - math.lgamma(j + 1) - arr
        if j == 0:
            log_term = np.where(arr == 0, 0.0, -arr)
        total += np.exp(log_term)
    total = np.clip(total, 0.0, 1.0)
    return float(total) if np.isscalar(x) or arr.ndim == 0 else total


def _validate_2f1(a, b, z):
    if a <= 0 or b <= 0:
        raise ValueError(f"hyp2f1_bplus1 requires a, b > 0, got a={a}, b={b}")
    if z > 0:
        raise ValueError(f"hyp2f1_bplus1 requires z <= 0, got z={z}")


def hyp2f1_bplus1_integral(a, b, z):
    """2F1(a, b; b+1; z) via the Euler integral b * int_0^1 t^(b-1) (1-z t)^-a dt."""
    _validate_2f1(a, b, z)
    if z == 0.0:
        return 1.0
    # for very negative z the integrand decays on the 1/|z| scale; seed the
    # adaptive subdivision with that boundary layer
    pts = None
    if abs(z) > 50.0:
        pts = [p for p in (1.0 / abs(z), 10.0 / abs(z), 100.0 / abs(z)) if p < 1.0]
    val, err = quad(lambda t: t ** (b - 1.0) * (1.0 - z * t) ** (-a),
                    0.0, 1.0, epsabs=0.0, epsrel=1e-12, limit=200, points=pts)
    if not np.isfinite(val) or (val != 0 and err > 1e-8 * abs(val)):
        raise SpecFunError(
            f"hyp2f1 quadrature did not converge for a={a}, b={b}, z={z} "
            f"(value={val}, err={err})")
    return b * val


def hyp2f1_bplus1_series(a, b, z):
    """2F1(a, b; b+1; z) via the Pfaff transform and a power series in z/(z-1).

    Pfaff: 2F1(a, b; b+1; z) = (1-z)^-a 2F1(a, 1; b+1; u), u = z/(z-1), which
    for z <= 0 gives u in [0, 1). Intended for |z| < 0.5 where u <= 1/3.
    """
    _validate_2f1(a, b, z)
    if z == 0.0:
        return 1.0
    u = z / (z - 1.0)
    term = 1.0
    total = 1.0
    for k in range(_SERIES_MAX_TERMS):
        term *= (a + k) / (b + 1.0 + k) * u
        total += term
        if abs(term) < 1e-17 * abs(total):
            return (1.0 - z) ** (-a) * total
    raise SpecFunError(
        f"hyp2f1 series did not converge for a={a}, b={b}, z={z}")


def hyp2f1_bplus1(a, b, z):
    """Gauss hypergeometric 2F1(a, b; c; z) restricted to c = b+1 and z <= 0.

    Uses the Pfaff-transformed series for small |z| and the Euler integral
    (adaptive quadrature) otherwise; the two paths agree to ~1e-12 where
    both apply.

    Args:
        a, b: positive reals.
        z: real <= 0.

    Returns:
        The (positive, <= 1) value of 2F1(a, b; b+1; z).
    """
    if abs(z) < _SERIES_Z_CUTOFF:
        return hyp2f1_bplus1_series(a, b, z)
    return hyp2f1_bplus1_integral(a, b, z)
