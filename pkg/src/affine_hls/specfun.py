"""Gamma, digamma and the sharp constants of the affine HLS / log-Sobolev family.

Everything here is a pure function of ``(n, alpha)``. Gamma and digamma are
implemented directly (Lanczos approximation, recurrence and an asymptotic
series) so that the constants do not depend on an external special-function
library.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "DomainError",
    "gamma_fn",
    "log_gamma",
    "digamma",
    "unit_ball_volume",
    "sphere_area",
    "hls_constant",
    "log_hls_constant",
    "log_sobolev_constant",
    "SharpConstants",
    "sharp_constants",
    "EULER_GAMMA",
]

EULER_GAMMA = 0.57721566490153286061


class DomainError(ValueError):
    """Raised when an argument lies outside the domain of a function."""


# Lanczos coefficients, g = 7, nine terms.
_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_SQRT_2PI = 2.5066282746310005024


def _lanczos_sum(z):
    # z = x - 1 with x >= 1/2
    acc = _LANCZOS[0]
    for k in range(1, 9):
        acc += _LANCZOS[k] / (z + k)
    return acc


def _is_pole(x):
    return x <= 0 and x == math.floor(x)


def gamma_fn(x: float) -> float:
    """Gamma function on the real line.

    For ``x > 0`` this is Euler's integral. For negative non-integers the
    value is the analytic continuation, obtained from the recurrence
    ``Gamma(x) = Gamma(x + 1) / x``; on ``(-1, 0)`` it coincides with
    ``int_0^inf t^(x-1) (e^-t - 1) dt``.

    Raises
    ------
    DomainError
        At the poles ``0, -1, -2, ...``.
    """
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"gamma_fn: non-finite argument {x!r}")
    if _is_pole(x):
        raise DomainError(f"gamma_fn: pole at x = {x}")
    if x < 0.5:
        # shift up, dividing out the factors
        denom = 1.0
        while x < 0.5:
            denom *= x
            x += 1.0
        return gamma_fn(x) / denom
    z = x - 1.0
    t = z + _LANCZOS_G + 0.5
    return _SQRT_2PI * t ** (z + 0.5) * math.exp(-t) * _lanczos_sum(z)


def log_gamma(x: float) -> float:
    """log Gamma(x) for x > 0, without overflow for large x."""
    x = float(x)
    if not x > 0:
        raise DomainError(f"log_gamma: requires x > 0, got {x}")
    if x < 0.5:
        return log_gamma(x + 1.0) - math.log(x)
    z = x - 1.0
    t = z + _LANCZOS_G + 0.5
    return 0.5 * math.log(2 * math.pi) + (z + 0.5) * math.log(t) - t + math.log(_lanczos_sum(z))


# Bernoulli numbers B_2k / (2k), k = 1..7
_DIGAMMA_SERIES = (
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
)


def digamma(x: float) -> float:
    """Logarithmic derivative of the Gamma function, for x > 0."""
    x = float(x)
    if not x > 0 or not math.isfinite(x):
        raise DomainError(f"digamma: requires finite x > 0, got {x}")
    acc = 0.0
    while x < 10.0:
        acc -= 1.0 / x
        x += 1.0
    inv2 = 1.0 / (x * x)
    series = 0.0
    p = inv2
    for c in _DIGAMMA_SERIES:
        series += c * p
        p *= inv2
    return acc + math.log(x) - 0.5 / x - series


def unit_ball_volume(n: int) -> float:
    """Volume omega_n of the n-dimensional unit ball."""
    n = _check_dim(n)
    return math.pi ** (n / 2) / gamma_fn(n / 2 + 1)


def sphere_area(n: int) -> float:
    """Surface measure n*omega_n of the unit sphere in R^n."""
    return n * unit_ball_volume(n)


def _check_dim(n):
    if int(n) != n or n < 1:
        raise DomainError(f"dimension must be a positive integer, got {n!r}")
    return int(n)


def hls_constant(n: int, alpha: float) -> float:
    """Sharp HLS constant gamma_{n,alpha}.

    ``pi^((n-a)/2) |Gamma(a/2)| / Gamma((n+a)/2) * (Gamma(n)/Gamma(n/2))^(a/n)``.

    Defined for ``alpha`` in ``(0, n]`` and, through the continuation of
    Gamma, for ``alpha`` in ``(-2, 0)`` where it appears with ``2*alpha`` in the
    fractional L^2 chain. At ``alpha = n`` the value is exactly 1.
    """
    n = _check_dim(n)
    alpha = float(alpha)
    if not (-2.0 < alpha <= n) or alpha == 0.0:
        raise DomainError(f"hls_constant: alpha must lie in (-2, 0) or (0, {n}], got {alpha}")
    if alpha == n:
        return 1.0
    return (
        math.pi ** ((n - alpha) / 2)
        * abs(gamma_fn(alpha / 2))
        / gamma_fn((n + alpha) / 2)
        * (gamma_fn(n) / gamma_fn(n / 2)) ** (alpha / n)
    )


def log_hls_constant(n: int) -> float:
    """Sharp constant gamma_n of the logarithmic HLS inequality."""
    n = _check_dim(n)
    return (
        0.5 * math.log(math.pi)
        + (log_gamma(n / 2) - log_gamma(n)) / n
        + 0.5 * (digamma(n) - digamma(n / 2))
    )


def log_sobolev_constant(n: int) -> float:
    """Constant gamma_0 of the affine logarithmic Sobolev inequality."""
    n = _check_dim(n)
    return (
        -0.5 * math.log(math.pi)
        + (log_gamma(n) - log_gamma(n / 2)) / n
        + 0.5 * (digamma(1.0) - digamma(n / 2))
    )


@dataclass(frozen=True)
class SharpConstants:
    n: int
    alpha: float | None
    gamma_n_alpha: float | None
    gamma_n: float
    gamma_0: float
    omega_n: float


def sharp_constants(n: int, alpha: float | None = None) -> SharpConstants:
    """Bundle every constant for dimension ``n`` (and order ``alpha`` if given)."""
    n = _check_dim(n)
    return SharpConstants(
        n=n,
        alpha=None if alpha is None else float(alpha),
        gamma_n_alpha=None if alpha is None else hls_constant(n, alpha),
        gamma_n=log_hls_constant(n),
        gamma_0=log_sobolev_constant(n),
        omega_n=unit_ball_volume(n),
    )
