"""Inverse Gaussian distribution toolkit and the moment-bound constants.

The sampler is the exact two-root transform (chi-squared root plus a uniform
choice between the conjugate roots), parametrized by ``1/mu`` so the
infinite-mean limit is handled without branching.  The exponential integral
E1 is computed by a power series below 1.5 and a continued fraction above;
the logarithmic moment of IG(1/W, 1) uses the scaled form ``exp(x) E1(x)``
so no overflow occurs for large W.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from ._kernels import ig_transform

#: Euler-Mascheroni constant gamma = -int_0^inf exp(-t) log t dt.
GAMMA_EULER = 0.57721566490153286061

#: gamma + log 2, the limit of E[log X_W] as W -> 0.
C2 = 1.27036284546147817002

_E1_SPLIT = 1.5


@dataclass(frozen=True)
class IGParams:
    """Mean/shape parameters of an inverse Gaussian law."""

    mu: float
    lam: float

    def __post_init__(self):
        if not (self.mu > 0 and self.lam > 0):
            raise ValueError("inverse Gaussian parameters must be positive")


def ig_density(x, p: IGParams):
    """Density sqrt(lam/(2 pi x^3)) exp(-lam (x-mu)^2 / (2 mu^2 x))."""
    x = np.asarray(x, dtype=np.float64)
    if np.any(x <= 0):
        raise ValueError("density is defined for x > 0 only")
    return np.sqrt(p.lam / (2.0 * np.pi * x ** 3)) * np.exp(
        -p.lam * (x - p.mu) ** 2 / (2.0 * p.mu ** 2 * x))


def ig_sample(p: IGParams, rng: np.random.Generator, size=None):
    """Exact i.i.d. draws from IG(mu, lam)."""
    z = rng.standard_normal(size)
    u = rng.random(size)
    return ig_transform(1.0 / p.mu, p.lam, z, u)


def ig_laplace(t, p: IGParams):
    """E[exp(t X)] = exp((lam/mu)(1 - sqrt(1 - 2 mu^2 t / lam)))."""
    t = np.asarray(t, dtype=np.float64)
    arg = 1.0 - 2.0 * p.mu ** 2 * t / p.lam
    if np.any(arg < -1e-12):
        raise ValueError("Laplace transform requires t <= lam / (2 mu^2)")
    return np.exp(p.lam / p.mu * (1.0 - np.sqrt(np.maximum(arg, 0.0))))


def ig_mode(p: IGParams) -> float:
    """Location of the density maximum."""
    r = 3.0 * p.mu / (2.0 * p.lam)
    return p.mu * (math.sqrt(1.0 + r * r) - r)


def _e1_series(x: float) -> float:
    total = -GAMMA_EULER - math.log(x)
    term = 1.0
    for k in range(1, 60):
        term *= -x / k
        inc = -term / k
        total += inc
        if abs(inc) < 1e-18 * max(abs(total), 1e-30):
            break
    return total


def _exp_e1_cf(x: float) -> float:
    """Continued fraction for exp(x) E1(x), modified Lentz iteration."""
    tiny = 1e-300
    b = x + 1.0
    c = 1.0 / tiny
    d = 1.0 / b
    f = d
    for k in range(1, 200):
        a = -float(k * k)
        b += 2.0
        d = b + a * d
        if d == 0.0:
            d = tiny
        c = b + a / c
        if c == 0.0:
            c = tiny
        d = 1.0 / d
        delta = c * d
        f *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return f


def exp_e1_scaled(x: float) -> float:
    """exp(x) E1(x); safe for arbitrarily large x."""
    x = float(x)
    if x <= 0:
        raise ValueError("E1 requires x > 0")
    if x < _E1_SPLIT:
        return math.exp(x) * _e1_series(x)
    return _exp_e1_cf(x)


def exp_integral_e1(x: float) -> float:
    """Exponential integral E1(x) = int_x^inf exp(-u)/u du."""
    x = float(x)
    if x <= 0:
        raise ValueError("E1 requires x > 0")
    if x < _E1_SPLIT:
        return _e1_series(x)
    return math.exp(-x) * _exp_e1_cf(x)


def c_alpha(alpha: float) -> float:
    """The fractional-moment limit constant 2^{-alpha} Gamma(1/2 - alpha) / sqrt(pi)."""
    if not 0 <= alpha < 0.5:
        raise ValueError("c_alpha is defined for 0 <= alpha < 1/2")
    return 2.0 ** (-alpha) * math.gamma(0.5 - alpha) / math.sqrt(math.pi)


def frac_moment(w: float, alpha: float) -> float:
    """E[X^alpha] for X ~ IG(1/W, 1) by adaptive quadrature.

    The integral splits at x = 1; the upper half is mapped through
    y = 1/(2x), matching the integrand's dominating behaviour at both ends.
    """
    if not 0 <= alpha <= 1:
        raise ValueError("fractional moment implemented for alpha in [0, 1]")
    if w <= 0:
        raise ValueError("W must be positive")
    pref = 1.0 / math.sqrt(2.0 * math.pi)

    def lower(x):
        return pref * x ** (alpha - 1.5) * math.exp(w - 0.5 * w * w * x - 0.5 / x)

    def upper(y):
        return pref * 2.0 ** (0.5 - alpha) * y ** (-0.5 - alpha) * math.exp(
            w - y - 0.25 * w * w / y)

    i1, _ = integrate.quad(lower, 0.0, 1.0, epsabs=1e-10, epsrel=1e-12, limit=200)
    i2, _ = integrate.quad(upper, 0.0, 0.5, epsabs=1e-10, epsrel=1e-12, limit=200)
    return i1 + i2


def log_moment(w: float) -> float:
    """E[log X] for X ~ IG(1/W, 1): -log W - exp(2W) E1(2W)."""
    if w <= 0:
        raise ValueError("W must be positive")
    return -math.log(w) - exp_e1_scaled(2.0 * w)
