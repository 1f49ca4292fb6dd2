"""Directional autocorrelation and difference-correlation curves.

For a direction ``u`` the curves are

    g_u(t) = int f(x) f(x + t u) dx,        d_u(t) = int |f(x + t u) - f(x)|^2 dx,

related by ``d_u = 2 (g_u(0) - g_u)``. They feed every body construction.

Grid functions are read as the cell-wise constant ``f_h``. Then ``g_u`` is
exactly the multilinear interpolant of the lattice autocorrelation
``A[k] = h^n sum_i f_i f_{i+k}``, so the curves carry no quadrature error
beyond floating point. Radial profiles use a polar quadrature restricted to
the half-space ``x.u >= -t/2``, using the symmetry ``x -> -x - t u`` of the
integrand. Both peaks of the product then stay resolved for every ``t``.

The module also provides :func:`power_integral`, the product-integration rule
``int t^s y(t) dt`` for piecewise-linear (or piecewise power-law) ``y``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage, signal
from scipy.special import roots_legendre

from .grid import GridFunction, RadialProfile, _gauss_on_segments

__all__ = [
    "DirectionalCorrelation",
    "DifferenceCorrelation",
    "CorrelationBundle",
    "power_integral",
    "lattice_autocorrelation",
    "default_t_grid",
    "autocorrelation",
    "difference_correlation",
    "correlation_bundle",
]


# product integration ------------------------------------------------------


def _phi(z):
    """expm1(z)/z with the removable singularity filled in."""
    z = np.asarray(z, dtype=float)
    small = np.abs(z) < 1e-8
    safe = np.where(small, 1.0, z)
    return np.where(small, 1.0 + 0.5 * z, np.expm1(safe) / safe)


def _moment(a, L, p):
    """int_a^b t^p dt with L = log(b/a), a > 0."""
    q = p + 1.0
    return a**q * L * _phi(q * L)


def power_integral(t, y, s, *, loglog=False, tail_exponent=None):
    """Integrate ``t^s y(t)`` over ``[t[0], inf)`` by product integration.

    ``y`` is interpolated linearly between samples, or as a power law
    ``y_a (t/a)^kappa`` on segments where ``loglog`` is set and both ends
    are positive. The weight ``t^s`` is integrated exactly on every segment,
    so the singularity at ``t = 0`` is absorbed analytically. Beyond
    ``t[-1]`` the integrand is zero unless ``tail_exponent`` (``kappa``) is
    given, in which case ``y = y[-1] (t/t[-1])^kappa``.

    Parameters
    ----------
    t : (N,) array
        Increasing abscissae, ``t[0] >= 0``.
    y : (..., N) array
        Samples; leading axes are independent curves.
    s : float
        Exponent of the weight.

    Returns
    -------
    total, tail : arrays of shape ``y.shape[:-1]``
        ``inf`` marks a divergent integral.
    """
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    lead = y.shape[:-1]
    y = y.reshape(-1, t.size)
    total = np.zeros(y.shape[0])
    start = 0
    if t[0] == 0.0:
        b = t[1]
        y0, y1 = y[:, 0], y[:, 1]
        with np.errstate(divide="ignore", invalid="ignore"):
            if s + 2.0 <= 0:
                first = np.where((y0 == 0) & (y1 == 0), 0.0, np.inf)
            else:
                slope_part = y1 * b ** (s + 1.0) / (s + 2.0)
                if s + 1.0 > 0:
                    first = y0 * b ** (s + 1.0) / ((s + 1.0) * (s + 2.0)) + slope_part
                else:
                    first = np.where(y0 == 0, slope_part, np.inf)
        total += first
        start = 1
    a = t[start:-1]
    bb = t[start + 1 :]
    if a.size:
        L = np.log(bb / a)
        ya = y[:, start:-1]
        yb = y[:, start + 1 :]
        m0 = _moment(a, L, s)
        m1 = _moment(a, L, s + 1.0)
        width = bb - a
        lin = (ya * (bb * m0 - m1) + yb * (m1 - a * m0)) / width
        if loglog:
            ok = (ya > 0) & (yb > 0)
            with np.errstate(divide="ignore", invalid="ignore"):
                kappa = np.where(ok, np.log(np.where(ok, yb / np.where(ok, ya, 1.0), 1.0)) / L, 0.0)
            pw = ya * a ** (s + 1.0) * L * _phi((s + kappa + 1.0) * L)
            seg = np.where(ok, pw, lin)
        else:
            seg = lin
        total += seg.sum(axis=1)
    tail = np.zeros_like(total)
    if tail_exponent is not None:
        T = t[-1]
        k = s + tail_exponent + 1.0
        yN = y[:, -1]
        with np.errstate(divide="ignore", invalid="ignore"):
            tail = np.where(yN == 0, 0.0, np.where(k < 0, -yN * T ** (s + 1.0) / k, np.inf))
        total = total + tail
    return total.reshape(lead), tail.reshape(lead)


# grid path ----------------------------------------------------------------


def lattice_autocorrelation(f: GridFunction) -> np.ndarray:
    """``h^n sum_i f_i f_{i+k}`` for all lags, zero-padded by one lag.

    The returned array has shape ``(2m + 1,)^n`` with lag 0 at index ``m``.
    The outer layer (lag ``+-m``) is zero, so multilinear interpolation
    reproduces the autocorrelation of ``f_h`` for every shift.
    """
    if "lattice" in f._cache:
        return f._cache["lattice"]
    v = f.values
    if f.n == 1:
        a = np.correlate(v, v, mode="full")
    else:
        a = signal.fftconvolve(v, v[(slice(None, None, -1),) * f.n], mode="full")
    a = 0.5 * (a + a[(slice(None, None, -1),) * f.n])
    a = np.maximum(a, 0.0) * f.cell_volume
    out = np.pad(a, 1)
    out.setflags(write=False)
    f._cache["lattice"] = out
    return out


def _grid_t_grid(f: GridFunction, step_fraction=0.25, t_max=None):
    ext = f.support_extent()
    T = float(np.linalg.norm(ext)) if t_max is None else float(t_max)
    dt = f.h * step_fraction
    k = max(int(math.ceil(T / dt)), 2)
    t = dt * np.arange(k + 1)
    if t[-1] > 1.0 and not np.any(np.isclose(t, 1.0, rtol=0, atol=1e-14)):
        t = np.sort(np.append(t, 1.0))
    return t


def _grid_curves(f: GridFunction, directions, t):
    lat = lattice_autocorrelation(f)
    U = np.atleast_2d(np.asarray(directions, dtype=float))
    centre = f.m
    coords = centre + t[None, :, None] * U[:, None, :] / f.h  # (nu, nt, n)
    pts = coords.reshape(-1, f.n).T
    g = ndimage.map_coordinates(lat, pts, order=1, mode="constant", cval=0.0, prefilter=False)
    return np.maximum(g.reshape(U.shape[0], t.size), 0.0)


def _grid_direct_difference(f: GridFunction, u, t):
    """``sum_x |f_lin(x + t u) - f(x)|^2 h^n`` over a zero-padded grid."""
    pad = int(math.ceil(np.max(t) / f.h)) + 2
    v = np.pad(f.values, pad)
    idx = np.indices(v.shape).reshape(f.n, -1).astype(float)
    base = v.reshape(-1)
    out = np.empty(t.size)
    for j, tj in enumerate(t):
        shifted = ndimage.map_coordinates(v, idx + (tj * np.asarray(u) / f.h)[:, None], order=1, mode="constant", cval=0.0, prefilter=False)
        out[j] = np.sum((shifted - base) ** 2) * f.cell_volume
    return out


# radial path --------------------------------------------------------------

_GL_CACHE: dict = {}


def _gl(k):
    if k not in _GL_CACHE:
        _GL_CACHE[k] = roots_legendre(k)
    return _GL_CACHE[k]


def _segments(edges):
    return _gauss_on_segments(np.asarray(edges, dtype=float))


def _radial_nodes(f: RadialProfile, lo, hi):
    """Gauss nodes on [lo, hi] following the profile breakpoints (hi may be inf)."""
    r = f.radii
    if np.isinf(hi):
        inner = np.concatenate([[lo], r[(r > lo)]]) if lo < f.r_max else np.array([lo])
        x1, w1 = _segments(inner) if inner.size > 1 else (np.empty(0), np.empty(0))
        if f.has_tail:
            start = max(lo, f.r_max)
            edges = start * 2.0 ** np.arange(49)
            x2, w2 = _segments(edges)
        else:
            x2 = w2 = np.empty(0)
        return np.concatenate([x1, x2]), np.concatenate([w1, w2])
    inner = np.concatenate([[lo], r[(r > lo) & (r < hi)], [hi]])
    if f.has_tail and hi > 2.0 * f.r_max:
        # geometric panels through the power-law tail
        start = max(lo, f.r_max)
        k = int(math.floor(math.log2(hi / start)))
        geo = start * 2.0 ** np.arange(1, k + 1)
        inner = np.unique(np.concatenate([inner, geo[geo < hi]]))
    if not f.has_tail and hi > f.r_max:
        inner = inner[inner <= f.r_max]
        if inner[-1] < f.r_max and lo < f.r_max:
            inner = np.append(inner, f.r_max)
        if inner.size < 2:
            return np.empty(0), np.empty(0)
    return _segments(inner)


def _radial_pair_sums(f: RadialProfile, t, n_angle):
    """g(t) and direct d(t) for a radial profile on a list of shifts."""
    n = f.n
    G = np.empty(t.size)
    D = np.empty(t.size)
    xa, wa = _gl(n_angle)
    for j, tj in enumerate(t):
        if tj == 0.0:
            r, w = _radial_nodes(f, 0.0, np.inf)
            fr = f(r)
            jac = w * (2.0 if n == 1 else (2 * np.pi * r if n == 2 else 4 * np.pi * r * r))
            G[j] = np.sum(jac * fr * fr)
            D[j] = 0.0
            continue
        half = 0.5 * tj
        if n == 1:
            # x in [-t/2, 0] and [0, inf), doubled
            r1, w1 = _radial_nodes(f, 0.0, half)
            r2, w2 = _radial_nodes(f, 0.0, np.inf)
            a1 = f(r1)
            b1 = f(np.abs(tj - r1))  # x = -r  ->  |x + t| = t - r
            a2 = f(r2)
            b2 = f(r2 + tj)
            G[j] = 2.0 * (np.sum(w1 * a1 * b1) + np.sum(w2 * a2 * b2))
            D[j] = 2.0 * (np.sum(w1 * (a1 - b1) ** 2) + np.sum(w2 * (a2 - b2) ** 2))
            continue
        r_in, w_in = _radial_nodes(f, 0.0, half)
        if n == 2:
            # outer panels start with a v^2 substitution at r = t/2
            seg = f.radii[np.searchsorted(f.radii, half, side="right") - 1 : np.searchsorted(f.radii, half, side="right") + 1]
            local = (seg[1] - seg[0]) if seg.size == 2 else 0.1 * half
            delta = max(2.0 * local, 1e-3 * half)
            xv, wv = _gl(8)
            v = 0.5 * (xv + 1.0)
            r_sub = half + delta * v * v
            w_sub = delta * 2.0 * v * 0.5 * wv
            r_out, w_out = _radial_nodes(f, half + delta, np.inf)
            r_out = np.concatenate([r_sub, r_out])
            w_out = np.concatenate([w_sub, w_out])
            # inner disc: theta in [0, pi]
            th_in = 0.5 * np.pi * (xa + 1.0)
            wth_in = 0.5 * np.pi * wa
            cmax = np.arccos(np.clip(-half / r_out, -1.0, 1.0))
            th_out = 0.5 * cmax[:, None] * (xa[None, :] + 1.0)
            wth_out = 0.5 * cmax[:, None] * wa[None, :]
            parts = [(r_in, w_in, np.broadcast_to(th_in, (r_in.size, n_angle)), np.broadcast_to(wth_in, (r_in.size, n_angle))),
                     (r_out, w_out, th_out, wth_out)]
            g_acc = d_acc = 0.0
            for rr, ww, th, wth in parts:
                if rr.size == 0:
                    continue
                fr = f(rr)[:, None]
                s = np.sqrt(np.maximum(rr[:, None] ** 2 + tj * tj + 2.0 * rr[:, None] * tj * np.cos(th), 0.0))
                fs = f(s)
                wt = (ww * rr)[:, None] * wth
                g_acc += np.sum(wt * fr * fs)
                d_acc += np.sum(wt * (fs - fr) ** 2)
            # factor 2 (theta symmetry) x 2 (half-space symmetry)
            G[j] = 4.0 * g_acc
            D[j] = 4.0 * d_acc
            continue
        # n == 3: mu = cos(theta) in [max(-1, -t/(2r)), 1]
        r_out, w_out = _radial_nodes(f, half, np.inf)
        rr = np.concatenate([r_in, r_out])
        ww = np.concatenate([w_in, w_out])
        lo = np.maximum(-1.0, -half / np.maximum(rr, 1e-300))
        mu = lo[:, None] + 0.5 * (1.0 - lo)[:, None] * (xa[None, :] + 1.0)
        wmu = 0.5 * (1.0 - lo)[:, None] * wa[None, :]
        fr = f(rr)[:, None]
        s = np.sqrt(np.maximum(rr[:, None] ** 2 + tj * tj + 2.0 * rr[:, None] * tj * mu, 0.0))
        fs = f(s)
        wt = (ww * 2.0 * np.pi * rr * rr)[:, None] * wmu
        G[j] = 2.0 * np.sum(wt * fr * fs)
        D[j] = 2.0 * np.sum(wt * (fs - fr) ** 2)
    return np.maximum(G, 0.0), np.maximum(D, 0.0)


def _radial_t_grid(f: RadialProfile, per_decade):
    r1 = f.radii[1]
    t_min = 1e-3 * r1
    t_max = (8.0 if f.has_tail else 2.0) * f.r_max
    if f.has_tail and f.tail_exponent <= f.n + 1:
        # slowly decaying correlations: push the analytic tail far out so
        # that it stays a small fraction of the partial sums
        t_max *= 1.0e8
    k = int(math.ceil(per_decade * math.log10(t_max / t_min)))
    t = np.concatenate([[0.0], np.geomspace(t_min, t_max, k + 1), [1.0]])
    return np.unique(t)


# public types -------------------------------------------------------------


@dataclass(frozen=True)
class DirectionalCorrelation:
    """One direction's autocorrelation curve with tail metadata.

    Attributes
    ----------
    direction : (n,) array
    t : (N,) array, ``t[0] = 0``
    g : (N,) array, unnormalized autocorrelation
    d : (N,) array, difference correlation
    l2sq : float, ``g(0) = ||f||_2^2``
    support_bound : float
        ``t`` beyond which ``g`` vanishes, ``inf`` for a power-law tail.
    tail_exponent : float or None
        ``g ~ g[-1] (t/t[-1])^kappa`` beyond the grid when not None.
    loglog : bool
        Interpolate ``g`` and ``d`` as piecewise power laws.
    """

    direction: np.ndarray
    t: np.ndarray
    g: np.ndarray
    d: np.ndarray
    l2sq: float
    support_bound: float
    tail_exponent: float | None = None
    loglog: bool = False

    @property
    def normalized(self) -> np.ndarray:
        return self.g / self.l2sq

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "g", "d"])
        for row in zip(self.t, self.g, self.d):
            w.writerow([repr(float(x)) for x in row])
        return buf.getvalue()


@dataclass(frozen=True)
class DifferenceCorrelation:
    """``d_u(t)`` computed directly and through ``2 (g(0) - g(t))``."""

    direction: np.ndarray
    t: np.ndarray
    direct: np.ndarray
    identity: np.ndarray


@dataclass(frozen=True)
class CorrelationBundle:
    """Curves for every node of a sphere rule, on a shared t-grid.

    ``g`` and ``d`` have shape ``(n_nodes, N)``. For radial profiles all rows
    coincide.
    """

    t: np.ndarray
    g: np.ndarray
    d: np.ndarray
    l2sq: float
    support_bound: float
    tail_exponent: float | None
    loglog: bool
    d_small_exponent: np.ndarray  # local power of d near t = 0, per node

    def curve(self, i, direction) -> DirectionalCorrelation:
        return DirectionalCorrelation(
            np.asarray(direction, dtype=float), self.t, self.g[i], self.d[i], self.l2sq,
            self.support_bound, self.tail_exponent, self.loglog,
        )


def _check_unit(u, n):
    u = np.asarray(u, dtype=float).reshape(-1)
    if u.size != n:
        raise ValueError(f"direction has {u.size} components, expected {n}")
    if abs(np.linalg.norm(u) - 1.0) > 1e-12:
        raise ValueError("direction must be a unit vector")
    return u


def _check_t(t):
    t = np.asarray(t, dtype=float).reshape(-1)
    if t.size < 2 or t[0] != 0.0 or np.any(np.diff(t) <= 0):
        raise ValueError("t_grid must start at 0 and increase strictly")
    return t


def default_t_grid(f, resolution: int | None = None) -> np.ndarray:
    """Default shifts: uniform ``h/4`` steps (grid) or a log grid (radial)."""
    if isinstance(f, GridFunction):
        return _grid_t_grid(f)
    if isinstance(f, RadialProfile):
        return _radial_t_grid(f, _per_decade(f, resolution))
    raise TypeError(f"unsupported function type {type(f).__name__}")


def _per_decade(f, resolution):
    k = f.m if resolution is None else resolution
    return max(16, k // 4)


def _angle_nodes(f, resolution):
    k = f.m if resolution is None else resolution
    return max(24, k // 4)


def _tail_slope(t, g):
    if g[-1] <= 0 or g[-2] <= 0 or t[-2] <= 0:
        return None
    return float(np.log(g[-1] / g[-2]) / np.log(t[-1] / t[-2]))


def _small_exponent(t, d):
    """Local power p with d ~ t^p at the first two positive shifts."""
    pos = np.flatnonzero((t > 0) & (d > 0))
    if pos.size < 2:
        return np.inf
    i, j = pos[0], pos[1]
    return float(np.log(d[j] / d[i]) / np.log(t[j] / t[i]))


def correlation_bundle(f, directions, resolution: int | None = None) -> CorrelationBundle:
    """Curves ``g_u``, ``d_u`` for all ``directions`` (rows of an array)."""
    U = np.atleast_2d(np.asarray(directions, dtype=float))
    if isinstance(f, GridFunction):
        t = _grid_t_grid(f)
        g = _grid_curves(f, U, t)
        l2 = float(lattice_autocorrelation(f)[(f.m,) * f.n])
        d = np.maximum(2.0 * (l2 - g), 0.0)
        # f_h jumps across cell faces, so d_u(t) = c t + O(t^2) with c > 0
        # unless f vanishes identically; a finite-difference slope estimate
        # is fooled by the quadratic cross terms of the multilinear patch
        small = np.where(d[:, 1] > 0, 1.0, np.inf)
        return CorrelationBundle(t, g, d, l2, float(t[-1]), None, False, small)
    if isinstance(f, RadialProfile):
        key = ("radial_curves", resolution)
        if key not in f._cache:
            t = _radial_t_grid(f, _per_decade(f, resolution))
            G, D = _radial_pair_sums(f, t, _angle_nodes(f, resolution))
            f._cache[key] = (t, G, D)
        t, G, D = f._cache[key]
        kappa = _tail_slope(t, G) if f.has_tail else None
        bound = np.inf if f.has_tail else 2.0 * f.r_max
        k = U.shape[0]
        small = np.full(k, _small_exponent(t, D))
        return CorrelationBundle(
            t, np.broadcast_to(G, (k, t.size)), np.broadcast_to(D, (k, t.size)),
            float(G[0]), bound, kappa, True, small,
        )
    raise TypeError(f"unsupported function type {type(f).__name__}")


def autocorrelation(f, u, t_grid=None) -> DirectionalCorrelation:
    """``g_u(t) = int f(x) f(x + t u) dx`` on ``t_grid`` (default grid if None)."""
    u = _check_unit(u, f.n)
    if t_grid is None:
        return correlation_bundle(f, u[None, :]).curve(0, u)
    t = _check_t(t_grid)
    if isinstance(f, GridFunction):
        g = _grid_curves(f, u[None, :], t)[0]
        l2 = float(lattice_autocorrelation(f)[(f.m,) * f.n])
        ext = f.support_extent()
        with np.errstate(divide="ignore", over="ignore"):
            bound = float(np.min(np.where(np.abs(u) > 0, ext / np.abs(u), np.inf)))
        return DirectionalCorrelation(u, t, g, np.maximum(2 * (l2 - g), 0.0), l2, bound)
    if isinstance(f, RadialProfile):
        G, D = _radial_pair_sums(f, t, _angle_nodes(f, None))
        bound = np.inf if f.has_tail else 2.0 * f.r_max
        kappa = _tail_slope(t, G) if f.has_tail else None
        return DirectionalCorrelation(u, t, G, D, float(G[0]), bound, kappa, True)
    raise TypeError(f"unsupported function type {type(f).__name__}")


def difference_correlation(f, u, t_grid) -> DifferenceCorrelation:
    """``d_u(t)`` both by direct quadrature and through the autocorrelation."""
    u = _check_unit(u, f.n)
    t = _check_t(t_grid)
    if isinstance(f, GridFunction):
        g = _grid_curves(f, u[None, :], t)[0]
        l2 = float(lattice_autocorrelation(f)[(f.m,) * f.n])
        direct = _grid_direct_difference(f, u, t)
        return DifferenceCorrelation(u, t, direct, 2.0 * (l2 - g))
    if isinstance(f, RadialProfile):
        G, D = _radial_pair_sums(f, t, _angle_nodes(f, None))
        return DifferenceCorrelation(u, t, D, 2.0 * (G[0] - G))
    raise TypeError(f"unsupported function type {type(f).__name__}")
