"""Star bodies built from correlation curves.

Every body is a radial function sampled on a :class:`SphereQuadrature`:

* ``S_alpha f``: ``rho^alpha = int_0^inf t^(alpha-1) g_u(t) dt`` (alpha > 0)
* ``Pi_2^{*,-alpha} f``: ``rho^(2 alpha) = int_0^inf t^(2 alpha - 1) d_u(t) dt``
  (-1 < alpha < 0)
* ``R_alpha f``: ``(alpha/||f||^2) rho_S^alpha`` for alpha > 0 and
  ``(-alpha/(2||f||^2)) int t^(alpha-1) d_u`` for -1 < alpha < 0
* ``R_0 f``: ``log rho = int_0^1 (ghat - 1)/t dt + int_1^inf ghat/t dt``,
  ``ghat = g_u/||f||^2``

The ``rho`` integrals are also available on single
:class:`~affine_hls.correlation.DirectionalCorrelation` curves, which is how
synthetic curves (for instance ``g = e^-t``) are handled.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree
from scipy.special import roots_legendre

from .correlation import CorrelationBundle, DirectionalCorrelation, correlation_bundle, power_integral
from .specfun import sphere_area

__all__ = [
    "SphereQuadrature",
    "StarBody",
    "sphere_quadrature",
    "s_alpha_body",
    "polar_projection_body",
    "radial_mean_body",
    "r_zero_body",
    "gauge",
    "star_volume",
    "ball_body",
    "body_from_function",
    "linear_image",
    "curve_rho_s",
    "curve_rho_pi",
    "curve_rho_r",
    "curve_log_rho_r0",
    "DEFAULT_NODES",
]

DEFAULT_NODES = {1: 2, 2: 256, 3: (32, 64)}
DIVERGENCE_FRACTION = 0.01


@dataclass(frozen=True, eq=False)
class SphereQuadrature:
    n: int
    nodes: np.ndarray
    weights: np.ndarray

    @property
    def size(self) -> int:
        return self.weights.size

    def same_as(self, other: "SphereQuadrature") -> bool:
        return (
            self is other
            or (self.n == other.n and self.nodes.shape == other.nodes.shape
                and np.array_equal(self.nodes, other.nodes) and np.array_equal(self.weights, other.weights))
        )


def sphere_quadrature(n: int, size=None) -> SphereQuadrature:
    """Quadrature rule on the unit sphere S^(n-1).

    n = 1: the two points +-1 with unit weights. n = 2: ``size`` equally
    spaced angles starting at 0. n = 3: a product of Gauss-Legendre in
    ``cos(theta)`` with a uniform azimuthal rule; ``size = (k_theta, k_phi)``.
    """
    if n == 1:
        nodes = np.array([[1.0], [-1.0]])
        weights = np.array([1.0, 1.0])
    elif n == 2:
        k = DEFAULT_NODES[2] if size is None else int(size)
        th = 2.0 * np.pi * np.arange(k) / k
        nodes = np.stack([np.cos(th), np.sin(th)], axis=1)
        weights = np.full(k, 2.0 * np.pi / k)
    elif n == 3:
        kt, kp = DEFAULT_NODES[3] if size is None else size
        mu, wmu = roots_legendre(int(kt))
        ph = 2.0 * np.pi * np.arange(int(kp)) / int(kp)
        MU, PH = np.meshgrid(mu, ph, indexing="ij")
        S = np.sqrt(1.0 - MU**2)
        nodes = np.stack([S * np.cos(PH), S * np.sin(PH), MU], axis=-1).reshape(-1, 3)
        weights = (wmu[:, None] * np.full(int(kp), 2.0 * np.pi / int(kp))[None, :]).reshape(-1)
    else:
        raise ValueError(f"sphere rules exist for n in {{1, 2, 3}}, got {n}")
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return SphereQuadrature(n, nodes, weights)


@dataclass(frozen=True, eq=False)
class StarBody:
    """Radial function on a sphere rule.

    ``flags`` marks nodes where the defining integral vanished or diverged;
    ``diagnostics`` carries per-construction details such as tail fractions.
    """

    quadrature: SphereQuadrature
    rho: np.ndarray
    label: str = ""
    flags: np.ndarray | None = None
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        rho = np.asarray(self.rho, dtype=float)
        if rho.shape != (self.quadrature.size,):
            raise ValueError("rho must have one value per quadrature node")
        if np.any(~np.isfinite(rho)) or np.any(rho < 0):
            raise ValueError("rho must be finite and nonnegative")
        object.__setattr__(self, "rho", rho)
        flags = np.zeros(rho.size, dtype=bool) if self.flags is None else np.asarray(self.flags, dtype=bool)
        object.__setattr__(self, "flags", flags | (rho <= 0))

    @property
    def n(self) -> int:
        return self.quadrature.n

    @property
    def ok(self) -> bool:
        return not bool(np.any(self.flags))

    def scaled(self, c: float, label: str | None = None) -> "StarBody":
        return StarBody(self.quadrature, self.rho * c, self.label if label is None else label, self.flags, dict(self.diagnostics))

    def with_volume(self, volume: float) -> "StarBody":
        """Dilate so that the volume equals ``volume``."""
        return self.scaled((volume / star_volume(self)) ** (1.0 / self.n))

    def rho_at(self, directions) -> np.ndarray:
        """Radial function at arbitrary unit vectors by angular interpolation."""
        return _interp_rho(self, np.atleast_2d(np.asarray(directions, dtype=float)))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([f"u{i + 1}" for i in range(self.n)] + ["weight", "rho", "flag"])
        for u, wt, r, fl in zip(self.quadrature.nodes, self.quadrature.weights, self.rho, self.flags):
            w.writerow([repr(float(c)) for c in u] + [repr(float(wt)), repr(float(r)), int(fl)])
        return buf.getvalue()


def _interp_rho(body: StarBody, U: np.ndarray) -> np.ndarray:
    n = body.n
    rho = body.rho
    if n == 1:
        return np.where(U[:, 0] >= 0, rho[0], rho[1])
    if n == 2:
        k = rho.size
        ang = np.mod(np.arctan2(U[:, 1], U[:, 0]), 2.0 * np.pi)
        pos = ang / (2.0 * np.pi) * k
        i0 = np.floor(pos).astype(int) % k
        frac = pos - np.floor(pos)
        return (1.0 - frac) * rho[i0] + frac * rho[(i0 + 1) % k]
    tree = body.quadrature.__dict__.get("_tree")
    if tree is None:
        tree = cKDTree(body.quadrature.nodes)
        object.__setattr__(body.quadrature, "_tree", tree)
    dist, idx = tree.query(U, k=3)
    exact = dist[:, 0] < 1e-14
    w = 1.0 / np.where(exact[:, None], 1.0, dist)
    val = np.sum(w * rho[idx], axis=1) / np.sum(w, axis=1)
    return np.where(exact, rho[idx[:, 0]], val)


def gauge(body: StarBody, z) -> np.ndarray | float:
    """``||z||_K = |z| / rho_K(z/|z|)``; ``gauge(0) = 0``.

    ``z`` may be a single vector or an array of shape ``(..., n)``.
    """
    z = np.asarray(z, dtype=float)
    single = z.ndim == 1
    Z = z.reshape(-1, body.n)
    r = np.linalg.norm(Z, axis=1)
    U = Z / np.where(r > 0, r, 1.0)[:, None]
    out = np.where(r > 0, r / _interp_rho(body, U), 0.0)
    return float(out[0]) if single else out.reshape(z.shape[:-1])


def star_volume(body: StarBody) -> float:
    """``|K| = (1/n) sum_i w_i rho_i^n`` (flagged nodes count as 0)."""
    rho = np.where(body.flags, 0.0, body.rho)
    return float(np.sum(body.quadrature.weights * rho**body.n) / body.n)


def ball_body(quad: SphereQuadrature, radius: float = 1.0) -> StarBody:
    return StarBody(quad, np.full(quad.size, float(radius)), f"ball(r={radius:g})")


def body_from_function(quad: SphereQuadrature, rho_fn, label: str = "") -> StarBody:
    """Body with ``rho(u) = rho_fn(u)`` evaluated at the nodes."""
    return StarBody(quad, np.asarray(rho_fn(quad.nodes), dtype=float), label)


def linear_image(quad: SphereQuadrature, phi, base: StarBody | None = None) -> StarBody:
    """``phi K`` for ``K = base`` (unit ball if None): ``rho(u) = rho_K(v/|v|)/|v|``, ``v = phi^-1 u``."""
    phi = np.asarray(phi, dtype=float).reshape(quad.n, quad.n)
    V = quad.nodes @ np.linalg.inv(phi).T
    nv = np.linalg.norm(V, axis=1)
    rk = np.ones(quad.size) if base is None else _interp_rho(base, V / nv[:, None])
    return StarBody(quad, rk / nv, "linear image")


# curve integrals ----------------------------------------------------------


def _tail_of(bundle_like):
    return bundle_like.tail_exponent if np.isinf(bundle_like.support_bound) else None


def _g_integral(t, g, s, loglog, tail):
    total, tail_part = power_integral(t, g, s, loglog=loglog, tail_exponent=tail)
    with np.errstate(invalid="ignore", divide="ignore"):
        frac = np.where(np.isfinite(total) & (total != 0), np.abs(tail_part) / np.abs(total), np.where(np.isfinite(total), 0.0, np.inf))
    return total, frac


def _d_integral(t, g, d, l2, s, loglog, tail, small_exp):
    """int_0^inf t^s d(t) dt with d -> 2 l2 at infinity, s + 1 < 0."""
    total, _ = power_integral(t, d, s, loglog=loglog)
    T = t[-1]
    const_tail = -2.0 * l2 * T ** (s + 1.0) / (s + 1.0)
    g_tail = 0.0
    if tail is not None:
        k = s + tail + 1.0
        gT = g[..., -1]
        g_tail = np.where(gT == 0, 0.0, np.where(k < 0, -gT * T ** (s + 1.0) / k, np.inf))
    total = total + const_tail - 2.0 * g_tail
    diverged = ~np.isfinite(total) | (s + np.asarray(small_exp) + 1.0 <= 0)
    return np.where(diverged, np.inf, total), diverged


def _log_integral(t, g, d, l2, loglog, tail):
    t = np.asarray(t, dtype=float)
    if not np.any(t == 1.0):
        if t[-1] >= 1.0:
            raise ValueError("the shift grid must contain t = 1 for the split at 1")
        # beyond the grid g = 0 and d = 2 l2
        t = np.append(t, 1.0)
        g = np.concatenate([g, np.zeros(g.shape[:-1] + (1,))], axis=-1)
        d = np.concatenate([d, np.full(d.shape[:-1] + (1,), 2.0 * l2)], axis=-1)
    i1 = int(np.flatnonzero(t == 1.0)[0])
    near, _ = power_integral(t[: i1 + 1], -d[..., : i1 + 1] / (2.0 * l2), -1.0, loglog=False)
    if loglog:
        # log-log interpolation of d on the positive part, linear on [0, t_1]
        near_pos, _ = power_integral(t[1 : i1 + 1], d[..., 1 : i1 + 1] / (2.0 * l2), -1.0, loglog=True)
        first, _ = power_integral(t[:2], d[..., :2] / (2.0 * l2), -1.0)
        near = -(near_pos + first)
    far, tail_part = power_integral(t[i1:], g[..., i1:] / l2, -1.0, loglog=loglog, tail_exponent=tail)
    return near + far


def curve_rho_s(curve: DirectionalCorrelation, alpha: float) -> float:
    """``rho_{S_alpha f}(u)^alpha`` from one curve."""
    total, _ = _g_integral(curve.t, curve.g, alpha - 1.0, curve.loglog, _tail_of(curve))
    return float(total)


def curve_rho_pi(curve: DirectionalCorrelation, alpha: float) -> float:
    """``rho_{Pi_2^{*,-alpha} f}(u)^(2 alpha)`` from one curve, -1 < alpha < 0."""
    from .correlation import _small_exponent

    total, _ = _d_integral(curve.t, curve.g, curve.d, curve.l2sq, 2.0 * alpha - 1.0, curve.loglog,
                           _tail_of(curve), _small_exponent(curve.t, curve.d))
    return float(total)


def curve_rho_r(curve: DirectionalCorrelation, alpha: float) -> float:
    """``rho_{R_alpha f}(u)`` from one curve, alpha > -1; alpha = 0 gives ``R_0``."""
    if alpha == 0:
        return math.exp(curve_log_rho_r0(curve))
    if alpha > 0:
        val = alpha / curve.l2sq * curve_rho_s(curve, alpha)
    else:
        from .correlation import _small_exponent

        total, _ = _d_integral(curve.t, curve.g, curve.d, curve.l2sq, alpha - 1.0, curve.loglog,
                               _tail_of(curve), _small_exponent(curve.t, curve.d))
        val = -alpha / (2.0 * curve.l2sq) * float(total)
    return val ** (1.0 / alpha)


def curve_log_rho_r0(curve: DirectionalCorrelation) -> float:
    return float(_log_integral(curve.t, curve.g, curve.d, curve.l2sq, curve.loglog, _tail_of(curve)))


# bodies from functions ----------------------------------------------------


def _bundle(f, quad, resolution):
    if quad.n != f.n:
        raise ValueError(f"quadrature is for n={quad.n}, function lives in n={f.n}")
    return correlation_bundle(f, quad.nodes, resolution)


def _default_quad(f, quad):
    return sphere_quadrature(f.n) if quad is None else quad


def _finish(quad, rho_pow, power, label, flags, diagnostics):
    rho_pow = np.asarray(rho_pow, dtype=float)
    bad = flags | ~np.isfinite(rho_pow) | (rho_pow <= 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        rho = np.where(bad, 0.0, np.abs(rho_pow) ** (1.0 / power))
    return StarBody(quad, rho, label, bad, diagnostics)


def s_alpha_body(f, alpha: float, quad: SphereQuadrature | None = None, *, resolution=None) -> StarBody:
    """``S_alpha f``: ``rho^alpha = int_0^inf t^(alpha-1) g_u(t) dt``."""
    if not alpha > 0:
        raise ValueError(f"S_alpha needs alpha > 0, got {alpha}")
    quad = _default_quad(f, quad)
    b = _bundle(f, quad, resolution)
    total, frac = _g_integral(b.t, b.g, alpha - 1.0, b.loglog, _tail_of(b))
    flags = frac > DIVERGENCE_FRACTION
    return _finish(quad, total, alpha, f"S_{alpha:g} f", flags,
                   {"tail_fraction": float(np.max(frac)), "rho_pow": np.asarray(total, dtype=float)})


def polar_projection_body(f, alpha: float, quad: SphereQuadrature | None = None, *, resolution=None) -> StarBody:
    """``Pi_2^{*,-alpha} f``: ``rho^(2 alpha) = int_0^inf t^(2 alpha - 1) d_u(t) dt``."""
    if not -1.0 < alpha < 0.0:
        raise ValueError(f"the polar projection body needs alpha in (-1, 0), got {alpha}")
    quad = _default_quad(f, quad)
    b = _bundle(f, quad, resolution)
    total, diverged = _d_integral(b.t, b.g, b.d, b.l2sq, 2.0 * alpha - 1.0, b.loglog, _tail_of(b), b.d_small_exponent)
    return _finish(quad, total, 2.0 * alpha, f"Pi_2^(*,{-alpha:g}) f", diverged,
                   {"rho_pow": np.asarray(total, dtype=float)})


def radial_mean_body(f, alpha: float, quad: SphereQuadrature | None = None, *, resolution=None) -> StarBody:
    """``R_alpha f`` for alpha > -1, alpha != 0 (use :func:`r_zero_body` at 0)."""
    if not alpha > -1.0 or alpha == 0.0:
        raise ValueError(f"R_alpha needs alpha in (-1, 0) or alpha > 0, got {alpha}")
    quad = _default_quad(f, quad)
    b = _bundle(f, quad, resolution)
    if alpha > 0:
        total, frac = _g_integral(b.t, b.g, alpha - 1.0, b.loglog, _tail_of(b))
        flags = frac > DIVERGENCE_FRACTION
        val = alpha / b.l2sq * total
    else:
        total, flags = _d_integral(b.t, b.g, b.d, b.l2sq, alpha - 1.0, b.loglog, _tail_of(b), b.d_small_exponent)
        val = -alpha / (2.0 * b.l2sq) * total
    return _finish(quad, val, alpha, f"R_{alpha:g} f", flags, {"rho_pow": np.asarray(val, dtype=float)})


def r_zero_body(f, quad: SphereQuadrature | None = None, *, resolution=None) -> StarBody:
    """``R_0 f`` through the split-at-1 formula (additive constant 0)."""
    quad = _default_quad(f, quad)
    b = _bundle(f, quad, resolution)
    logrho = _log_integral(b.t, b.g, b.d, b.l2sq, b.loglog, _tail_of(b))
    flags = ~np.isfinite(logrho) | (b.d_small_exponent <= 0)
    rho = np.where(flags, 0.0, np.exp(np.where(np.isfinite(logrho), logrho, 0.0)))
    return StarBody(quad, rho, "R_0 f", flags, {"log_rho": np.asarray(logrho, dtype=float)})
