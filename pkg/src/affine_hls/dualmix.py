"""Dual mixed volumes of star bodies sampled on a common sphere rule."""

from __future__ import annotations

import numpy as np

from .bodies import StarBody, star_volume

__all__ = ["dual_mixed_volume", "dual_mixed_volume_log", "dual_mixed_volume_bound", "log_volume_bound"]


def _check_pair(K: StarBody, L: StarBody):
    if not K.quadrature.same_as(L.quadrature):
        raise ValueError("K and L must be sampled on the same sphere rule")


def dual_mixed_volume(K: StarBody, L: StarBody, alpha: float) -> float:
    """``(1/n) int rho_K^(n - alpha) rho_L^alpha du``."""
    _check_pair(K, L)
    n = K.n
    alpha = float(alpha)
    if alpha == 0.0 or alpha == n:
        raise ValueError(f"alpha must differ from 0 and {n}")
    w = K.quadrature.weights
    with np.errstate(divide="ignore"):
        terms = K.rho ** (n - alpha) * L.rho**alpha
    return float(np.sum(w * terms)) / n


def dual_mixed_volume_log(K: StarBody, L: StarBody) -> float:
    """``(1/(n|K|)) int rho_K^n log(rho_L / rho_K) du``.

    This is ``lim_{alpha -> 0} (1/alpha) log(V_alpha(K, L) / |K|)``, so that
    ``L = cK`` gives ``log c`` and the bound ``<= (1/n) log(|L|/|K|)`` holds
    with equality for dilates.
    """
    _check_pair(K, L)
    if np.any(K.rho <= 0) or np.any(L.rho <= 0):
        raise ValueError("radial functions must be positive")
    n = K.n
    w = K.quadrature.weights
    vol = star_volume(K)
    return float(np.sum(w * K.rho**n * np.log(L.rho / K.rho))) / (n * vol)


def dual_mixed_volume_bound(K: StarBody, L: StarBody, alpha: float) -> float:
    """``|K|^((n - alpha)/n) |L|^(alpha/n)``, the Holder bound for ``0 < alpha < n``."""
    n = K.n
    return star_volume(K) ** ((n - alpha) / n) * star_volume(L) ** (alpha / n)


def log_volume_bound(K: StarBody, L: StarBody) -> float:
    """``(1/n) log(|L| / |K|)``, the Jensen bound for the log dual mixed volume."""
    return float(np.log(star_volume(L) / star_volume(K))) / K.n
