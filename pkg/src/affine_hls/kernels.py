"""Double-integral energies, fractional seminorms and Fourier-side functionals.

Grid energies (n = 1, 2) are exact for the cell-wise constant ``f_h``:

    E = sum_k A[k] W[k],    W[k] = int K(z) T_h(z - k h) dz,

where ``A`` is the lattice autocorrelation and ``T_h`` is the tensor tent
(the autocorrelation of one cell's indicator). For ``h = 1`` the weights are
computed once per kernel. In 1-D they are exact second differences of
``Phi`` with ``Phi'' = K``. In 2-D the four cells touching the origin use polar
coordinates with the radial integral in closed form, and every other cell
uses tensor Gauss rules. Homogeneity rescales the unit weights to any ``h``.
In 3-D, energies follow the polar route through the sphere rule.

Radial profiles use the spherical mean of the kernel,
``M(r, s) = int_S K(r e - s u) du``, which is elementary in 1-D and 3-D and a
hypergeometric function in 2-D.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate
from scipy.interpolate import CubicSpline
from scipy.special import ellipk, gamma, hyp2f1, roots_legendre, sici

from .bodies import (
    StarBody,
    _interp_rho,
    polar_projection_body,
    s_alpha_body,
    sphere_quadrature,
)
from .correlation import correlation_bundle, lattice_autocorrelation, power_integral
from .grid import GridFunction, RadialProfile, _gauss_on_segments, lp_norm
from .specfun import digamma, gamma_fn, sphere_area

__all__ = [
    "EnergyValue",
    "FourierWindowWarning",
    "riesz_energy",
    "log_energy",
    "fractional_seminorm",
    "fourier_transform",
    "fourier_log_moment",
    "fourier_power_moment",
    "radial_fourier_transform",
    "riesz_fourier_constant",
    "seminorm_fourier_constant",
]


@dataclass(frozen=True)
class EnergyValue:
    value: float
    quadrature_error_estimate: float
    diagonal_correction: float

    def __post_init__(self):
        for name in ("value", "quadrature_error_estimate", "diagonal_correction"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if self.quadrature_error_estimate < 0:
            raise ValueError("error estimates are nonnegative")

    def __float__(self):
        return float(self.value)


class FourierWindowWarning(RuntimeWarning):
    """The frequency window misses more than 1% of the L^2 mass."""


# tent weights -------------------------------------------------------------


def _phi_power(z, beta):
    return np.abs(z) ** (2.0 - beta) / ((1.0 - beta) * (2.0 - beta))


def _phi_log(z):
    z = np.abs(np.asarray(z, dtype=float))
    with np.errstate(divide="ignore", invalid="ignore"):
        v = 0.5 * z * z * np.log(z) - 0.75 * z * z
    return -np.where(z > 0, v, 0.0)


def _weights_1d(kind, beta, m):
    k = np.arange(-(m - 1), m, dtype=float)
    if kind == "power":
        if beta == 1.0:
            # Phi'' = 1/|z|: Phi = |z| log|z| - |z|
            def phi(z):
                z = np.abs(z)
                with np.errstate(divide="ignore", invalid="ignore"):
                    return np.where(z > 0, z * np.log(z) - z, 0.0)
        else:
            def phi(z):
                return _phi_power(z, beta)
    else:
        phi = _phi_log
    return phi(k + 1) - 2.0 * phi(k) + phi(k - 1)


_ORIGIN_TH = None


def _origin_angles(order=48):
    global _ORIGIN_TH
    if _ORIGIN_TH is None or _ORIGIN_TH[0] != order:
        x, w = roots_legendre(order)
        th = np.concatenate([np.pi / 8 * (x + 1.0), np.pi / 4 + np.pi / 8 * (x + 1.0)])
        wt = np.concatenate([np.pi / 8 * w, np.pi / 8 * w])
        _ORIGIN_TH = (order, th, wt)
    return _ORIGIN_TH[1], _ORIGIN_TH[2]


def _radial_moment(kind, beta, R, j):
    """int_0^R K(r) r^j dr for K = r^-beta or -log r."""
    if kind == "power":
        return R ** (j + 1 - beta) / (j + 1 - beta)
    return -R ** (j + 1) * (np.log(R) / (j + 1) - 1.0 / (j + 1) ** 2)


def _origin_square_moments(kind, beta, aniso=None):
    """int over [0,1]^2 of K(w) w1^p w2^q, (p, q) in {0,1}^2; aniso adds log rho(theta)."""
    th, wt = _origin_angles()
    c, s = np.cos(th), np.sin(th)
    R = 1.0 / np.maximum(c, s)
    out = np.zeros((2, 2))
    for p in (0, 1):
        for q in (0, 1):
            ang = c**p * s**q
            j = 1 + p + q
            if aniso is None:
                rad = _radial_moment(kind, beta, R, j)
            else:
                rad = aniso(th) * R ** (j + 1) / (j + 1)
            out[p, q] = np.sum(wt * ang * rad)
    return out


def _square_moments_2d(kernel, m, order_far=4, order_near=10, near=4):
    """Bilinear moments of ``kernel`` over unit squares [a,a+1]x[b,b+1], a,b in [-m, m-1].

    Returns an array of shape (2m, 2m, 2, 2) indexed by (a+m, b+m, p, q) with
    moment int K(w) (w1-a)^p (w2-b)^q dw. Squares touching the origin are
    left at zero for the caller to fill.
    """
    idx = np.arange(-m, m)
    A, B = np.meshgrid(idx, idx, indexing="ij")
    out = np.zeros((2 * m, 2 * m, 2, 2))
    dist = np.maximum(np.maximum(A, -A - 1), np.maximum(B, -B - 1))
    origin = (np.isin(A, (-1, 0))) & (np.isin(B, (-1, 0)))
    for order, mask in ((order_near, (dist < near) & ~origin), (order_far, dist >= near)):
        if not np.any(mask):
            continue
        x, w = roots_legendre(order)
        x = 0.5 * (x + 1.0)
        w = 0.5 * w
        a = A[mask].astype(float)[:, None, None]
        b = B[mask].astype(float)[:, None, None]
        X = x[None, :, None]
        Y = x[None, None, :]
        kv = kernel(a + X, b + Y)
        W2 = (w[:, None] * w[None, :])[None]
        base = kv * W2
        out[mask, 0, 0] = base.sum(axis=(1, 2))
        out[mask, 1, 0] = (base * X).sum(axis=(1, 2))
        out[mask, 0, 1] = (base * Y).sum(axis=(1, 2))
        out[mask, 1, 1] = (base * X * Y).sum(axis=(1, 2))
    return out


def _fill_origin(mom, m, I):
    """Moments of the four origin squares from the [0,1]^2 moments I (radially symmetric kernels)."""
    # square a = 0, b = 0
    mom[m, m] = I
    # a = -1: (w1 - a) = 1 - |w1|
    mom[m - 1, m, 0, :] = I[0, :]
    mom[m - 1, m, 1, :] = I[0, :] - I[1, :]
    mom[m, m - 1, :, 0] = I[:, 0]
    mom[m, m - 1, :, 1] = I[:, 0] - I[:, 1]
    J = np.empty((2, 2))
    J[0, 0] = I[0, 0]
    J[1, 0] = I[0, 0] - I[1, 0]
    J[0, 1] = I[0, 0] - I[0, 1]
    J[1, 1] = I[0, 0] - I[1, 0] - I[0, 1] + I[1, 1]
    mom[m - 1, m - 1] = J


def _tent_from_moments(mom, m):
    """W[k] for k in [-(m-1), m-1]^2 from square moments."""
    # tent factor on square [k-1,k]: (w - a); on [k, k+1]: 1 - (w - a)
    def lo(M):  # square with a = k - 1 -> weight (w - a)
        return M[..., 1, :]

    def hi(M):  # square with a = k -> weight 1 - (w - a)
        return M[..., 0, :] - M[..., 1, :]

    # square index is a + m; a = k - 1 -> k + m - 1, a = k -> k + m
    sl_lo = slice(0, 2 * m - 1)
    sl_hi = slice(1, 2 * m)
    out = np.zeros((2 * m - 1, 2 * m - 1))
    for xs, xf in ((sl_lo, lo), (sl_hi, hi)):
        Mx = xf(mom[xs])  # shape (2m-1, 2m, 2) over (k1, b, q)
        for ys, yf in ((sl_lo, 1), (sl_hi, 0)):
            My = Mx[:, ys, :]
            if yf == 1:
                out += My[..., 1]
            else:
                out += My[..., 0] - My[..., 1]
    return out


@lru_cache(maxsize=16)
def _unit_weights(kind, beta, n, m):
    if n == 1:
        w = _weights_1d(kind, beta, m)
    elif n == 2:
        if kind == "power":
            def kern(x, y):
                return (x * x + y * y) ** (-beta / 2)
        else:
            def kern(x, y):
                return -0.5 * np.log(x * x + y * y)
        mom = _square_moments_2d(kern, m)
        _fill_origin(mom, m, _origin_square_moments(kind, beta))
        w = _tent_from_moments(mom, m)
    else:
        raise ValueError("lattice weights exist for n = 1, 2")
    w.setflags(write=False)
    return w


def _aniso_unit_weights(body: StarBody, m):
    """Weights of log rho_K(z/|z|) against the unit tent (2-D)."""
    def aniso_dir(U):
        return np.log(_interp_rho(body, U))

    def kern(x, y):
        shp = np.broadcast(x, y).shape
        X = np.broadcast_to(x, shp).reshape(-1)
        Y = np.broadcast_to(y, shp).reshape(-1)
        r = np.hypot(X, Y)
        U = np.stack([X / r, Y / r], axis=1)
        return aniso_dir(U).reshape(shp)

    mom = _square_moments_2d(kern, m, order_far=3, order_near=8)
    # origin squares: polar with the angular factor, per quadrant
    for a, b, sx, sy in ((0, 0, 1, 1), (-1, 0, -1, 1), (0, -1, 1, -1), (-1, -1, -1, -1)):
        def ang(th, sx=sx, sy=sy):
            return aniso_dir(np.stack([sx * np.cos(th), sy * np.sin(th)], axis=1))

        I = _origin_square_moments("aniso", 0.0, aniso=ang)
        # I holds moments in |w1|^p |w2|^q; convert to (w - a) factors
        J = np.empty((2, 2))
        for p in (0, 1):
            for q in (0, 1):
                J[p, q] = I[p, q]
        if a == -1:
            J = np.array([J[0], J[0] - J[1]])
        if b == -1:
            J = np.stack([J[:, 0], J[:, 0] - J[:, 1]], axis=1)
        mom[a + m, b + m] = J
    return _tent_from_moments(mom, m)


def _naive_weights(kernel_at, n, m):
    k = np.arange(-(m - 1), m, dtype=float)
    grids = np.meshgrid(*([k] * n), indexing="ij")
    r = np.sqrt(sum(g * g for g in grids))
    with np.errstate(divide="ignore"):
        w = np.where(r > 0, kernel_at(np.where(r > 0, r, 1.0)), 0.0)
    return w


def _lattice_energy(f: GridFunction, W_unit, scale, shift=0.0):
    lat = lattice_autocorrelation(f)
    inner = lat[(slice(1, -1),) * f.n]
    # E = sum_k (lat[k]/h^n) * h^{2n} * (scale * W1[k] + shift)
    return f.cell_volume * (scale * float(np.sum(inner * W_unit)) + shift * float(np.sum(inner)))


# public energies ----------------------------------------------------------


def riesz_energy(f, alpha: float) -> EnergyValue:
    """``int int f(x) f(y) |x - y|^(alpha - n) dx dy`` for ``alpha`` in ``(0, n)``."""
    n = f.n
    if not 0 < alpha < n:
        raise ValueError(f"alpha must lie in (0, {n}), got {alpha}")
    beta = n - alpha
    if isinstance(f, RadialProfile):
        return _radial_energy(f, "power", beta)
    if not isinstance(f, GridFunction):
        raise TypeError(f"unsupported function type {type(f).__name__}")
    if n == 3:
        return _polar_riesz(f, alpha)
    h = f.h
    W = _unit_weights("power", beta, n, f.m)
    E = _lattice_energy(f, W, h**-beta)
    naive = _lattice_energy(f, _naive_weights(lambda r: r**-beta, n, f.m), h**-beta)
    err = 0.0
    if n == 2:
        coarse = _square_far_variation(f, "power", beta)
        err = abs(coarse - E)
    return EnergyValue(E, err + 1e-14 * abs(E), E - naive)


def _square_far_variation(f, kind, beta):
    """Same energy with a lower-order far-field rule (error indicator)."""
    m = f.m
    if kind == "power":
        def kern(x, y):
            return (x * x + y * y) ** (-beta / 2)
    else:
        def kern(x, y):
            return -0.5 * np.log(x * x + y * y)
    mom = _square_moments_2d(kern, m, order_far=3, order_near=6)
    _fill_origin(mom, m, _origin_square_moments(kind, beta))
    W = _tent_from_moments(mom, m)
    if kind == "power":
        return _lattice_energy(f, W, f.h**-beta)
    return _lattice_energy(f, W, 1.0, -math.log(f.h))


def _polar_riesz(f, alpha):
    quad = sphere_quadrature(f.n)
    body = s_alpha_body(f, alpha, quad)
    vals = body.diagnostics["rho_pow"]
    E = float(np.sum(quad.weights * vals))
    half = float(np.sum(quad.weights[::2] * vals[::2]) * 2.0)
    return EnergyValue(E, abs(E - half), 0.0)


def log_energy(f, body: StarBody | None = None) -> EnergyValue:
    """``-int int f(x) log ||x - y||_K f(y) dx dy`` (Euclidean when ``body`` is None)."""
    n = f.n
    if isinstance(f, RadialProfile):
        E = _radial_energy(f, "log", 0.0)
        if body is None:
            return E
        # split identity with S_n f is exact for radial inputs
        quad = body.quadrature
        sn = s_alpha_body(f, float(n), quad)
        shift = float(np.sum(quad.weights * sn.diagnostics["rho_pow"] * np.log(body.rho)))
        return EnergyValue(E.value + shift, E.quadrature_error_estimate, E.diagonal_correction)
    if not isinstance(f, GridFunction):
        raise TypeError(f"unsupported function type {type(f).__name__}")
    if n == 3:
        return _polar_log(f, body)
    h = f.h
    W = _unit_weights("log", 0.0, n, f.m)
    E = _lattice_energy(f, W, 1.0, -math.log(h))
    naive = _lattice_energy(f, _naive_weights(lambda r: -np.log(r), n, f.m), 1.0, -math.log(h))
    # naive drops the diagonal term entirely
    lat = lattice_autocorrelation(f)
    naive -= f.cell_volume * (-math.log(h)) * float(lat[(f.m,) * n])
    err = 0.0
    if n == 2:
        err = abs(_square_far_variation(f, "log", 0.0) - E)
    if body is not None:
        if body.n != n:
            raise ValueError("body dimension does not match f")
        if n == 1:
            lat_in = lat[1:-1]
            k = np.arange(-(f.m - 1), f.m)
            # log rho_K(sign z): tent mass splits by the sign of z
            frac_pos = np.where(k > 0, 1.0, np.where(k < 0, 0.0, 0.5))
            lr = frac_pos * math.log(body.rho[0]) + (1 - frac_pos) * math.log(body.rho[1])
            E += f.cell_volume * float(np.sum(lat_in * lr))
        else:
            Wa = _aniso_unit_weights(body, f.m)
            E += _lattice_energy(f, Wa, 1.0)
    return EnergyValue(E, err + 1e-14 * abs(E), E - naive)


def _polar_log(f, body):
    quad = sphere_quadrature(f.n) if body is None else body.quadrature
    b = correlation_bundle(f, quad.nodes)
    n = f.n
    # -int_S int t^{n-1} log t g_u(t) dt du = -d/ds int t^s g at s = n - 1
    eps = 1e-4
    def I(s):
        return power_integral(b.t, b.g, s, loglog=b.loglog, tail_exponent=b.tail_exponent)[0]
    d1 = (I(n - 1 + eps) - I(n - 1 - eps)) / (2 * eps)
    d2 = (I(n - 1 + 2 * eps) - I(n - 1 - 2 * eps)) / (4 * eps)
    deriv = (4 * d1 - d2) / 3.0
    E = -float(np.sum(quad.weights * deriv))
    if body is not None:
        E += float(np.sum(quad.weights * I(n - 1.0) * np.log(body.rho)))
    return EnergyValue(E, abs(float(np.sum(quad.weights * (d1 - d2)))), 0.0)


# radial energies ----------------------------------------------------------


def _hyp_mean(beta, z):
    """``2F1(beta/2, beta/2; 1; z)`` for ``0 <= z < 1``.

    Near ``z = 1`` the series is slow, so the ``1 - z`` connection formula is
    used there (complete elliptic integral when ``beta = 1``).
    """
    z = np.asarray(z, dtype=float)
    a = beta / 2
    nu = 1.0 - beta
    if beta == 1.0:
        return 2.0 / np.pi * ellipk(z)
    if abs(nu) < 0.02:
        return hyp2f1(a, a, 1.0, z)
    near = z > 0.5
    out = np.empty_like(z)
    out[~near] = hyp2f1(a, a, 1.0, z[~near])
    w = 1.0 - z[near]
    c1 = gamma(nu) / gamma(1.0 - a) ** 2
    c2 = gamma(-nu) / gamma(a) ** 2
    out[near] = c1 * hyp2f1(a, a, 1.0 - nu, w) + w**nu * c2 * hyp2f1(1.0 - a, 1.0 - a, 1.0 + nu, w)
    return out


def _mean_kernel(n, kind, beta):
    """Spherical mean M(r, s) of the kernel, vectorized; r, s > 0."""
    if kind == "power":
        if n == 1:
            return lambda r, s: np.abs(r - s) ** -beta + (r + s) ** -beta
        if n == 2:
            def M(r, s):
                hi = np.maximum(r, s)
                lo = np.minimum(r, s)
                return 2 * np.pi * hi**-beta * _hyp_mean(beta, (lo / hi) ** 2)
            return M
        if n == 3:
            e = 2.0 - beta
            if abs(e) < 1e-14:
                return lambda r, s: 2 * np.pi / (r * s) * np.log((r + s) / np.abs(r - s))
            return lambda r, s: 2 * np.pi * ((r + s) ** e - np.abs(r - s) ** e) / (e * r * s)
    else:
        if n == 1:
            return lambda r, s: -np.log(np.abs(r - s)) - np.log(r + s)
        if n == 2:
            return lambda r, s: -2 * np.pi * np.log(np.maximum(r, s))
        if n == 3:
            def M(r, s):
                a = (r - s) ** 2
                b = (r + s) ** 2
                with np.errstate(divide="ignore", invalid="ignore"):
                    fa = np.where(a > 0, a * np.log(np.where(a > 0, a, 1.0)) - a, 0.0)
                return -np.pi / (2 * r * s) * (b * np.log(b) - b - fa)
            return M
    raise ValueError(f"no spherical-mean kernel for n={n}")


def _scalar_mean_kernel(n, kind, beta):
    """Scalar twin of :func:`_mean_kernel` (math module, no array overhead)."""
    log = math.log
    if kind == "power":
        if n == 1:
            return lambda r, s: abs(r - s) ** -beta + (r + s) ** -beta
        if n == 2:
            a = beta / 2
            nu = 1.0 - beta
            generic = beta != 1.0 and abs(nu) >= 0.02
            if generic:
                c1 = math.gamma(nu) / math.gamma(1.0 - a) ** 2
                c2 = math.gamma(-nu) / math.gamma(a) ** 2

            def M(r, s):
                hi, lo = (r, s) if r >= s else (s, r)
                z = (lo / hi) ** 2
                if z <= 0.5:
                    h = hyp2f1(a, a, 1.0, z)
                elif beta == 1.0:
                    h = 2.0 / math.pi * ellipk(z)
                elif generic:
                    w = 1.0 - z
                    h = c1 * hyp2f1(a, a, 1.0 - nu, w) + w**nu * c2 * hyp2f1(1.0 - a, 1.0 - a, 1.0 + nu, w)
                else:
                    h = hyp2f1(a, a, 1.0, z)
                return 2 * math.pi * hi**-beta * float(h)
            return M
        e = 2.0 - beta
        if abs(e) < 1e-14:
            return lambda r, s: 2 * math.pi / (r * s) * log((r + s) / abs(r - s))
        return lambda r, s: 2 * math.pi * ((r + s) ** e - abs(r - s) ** e) / (e * r * s)
    if n == 1:
        return lambda r, s: -log(abs(r - s)) - log(r + s)
    if n == 2:
        return lambda r, s: -2 * math.pi * log(max(r, s))

    def M3(r, s):
        a = (r - s) ** 2
        b = (r + s) ** 2
        fa = a * log(a) - a if a > 0 else 0.0
        return -math.pi / (2 * r * s) * (b * log(b) - b - fa)
    return M3


def _scalar_profile(f: RadialProfile):
    """Scalar evaluation of a radial profile (linear interpolation, power tail)."""
    import bisect

    r = f.radii.tolist()
    v = f.values.tolist()
    rk = r[-1]
    c = v[-1]
    q = f.tail_exponent if f.has_tail else None

    def ev(s):
        if s >= rk:
            return 0.0 if q is None else c * (s / rk) ** -q
        i = bisect.bisect_right(r, s) - 1
        t = (s - r[i]) / (r[i + 1] - r[i])
        return v[i] + t * (v[i + 1] - v[i])
    return ev


def _kernel_at_origin(n, kind, beta):
    """M(0, s) = n w_n K(s)."""
    area = sphere_area(n)
    if kind == "power":
        return lambda s: area * s**-beta
    return lambda s: -area * np.log(s)


def _radial_energy(f: RadialProfile, kind, beta) -> EnergyValue:
    n = f.n
    M = _mean_kernel(n, kind, beta)
    M0 = _kernel_at_origin(n, kind, beta)
    radii = f.radii
    edges = radii
    if f.has_tail:
        edges = np.concatenate([radii, f.r_max * 2.0 ** np.arange(1, 49)])
    x8, w8 = roots_legendre(8)
    a = edges[:-1, None]
    b = edges[1:, None]
    S = 0.5 * (a + b) + 0.5 * (b - a) * x8[None, :]
    WS = 0.5 * (b - a) * w8[None, :]
    FS = f(S) * S ** (n - 1)

    fs = _scalar_profile(f)
    Ms = _scalar_mean_kernel(n, kind, beta)

    def scalar_integrand(s, r):
        return fs(s) * s ** (n - 1) * Ms(r, s)

    U = np.empty(edges.size)
    for j, r in enumerate(edges):
        if r == 0.0:
            U[j] = float(np.sum(WS * FS * M0(S)))
            continue
        mask = np.ones(edges.size - 1, dtype=bool)
        mask[max(j - 1, 0): j + 1] = False
        with np.errstate(divide="ignore", invalid="ignore"):
            vals = M(r, S[mask])
        acc = float(np.sum(WS[mask] * FS[mask] * vals))
        for seg in range(max(j - 1, 0), min(j + 1, edges.size - 1)):
            lo, hi = edges[seg], edges[seg + 1]
            with warnings.catch_warnings():
                # roundoff near the endpoint singularity is reported but harmless
                warnings.simplefilter("ignore", integrate.IntegrationWarning)
                acc += integrate.quad(scalar_integrand, lo, hi, args=(r,), limit=200, epsabs=0.0, epsrel=1e-11)[0]
        U[j] = acc
    k = radii.size
    area = sphere_area(n)
    # outer integral: f r^{n-1} U with U spline-interpolated (in r on the
    # profile, in log r on the geometric tail panels)
    spline = CubicSpline(radii, U[:k])
    r_out, w_out = f.quadrature(order=8)
    weight = w_out * f(r_out) * r_out ** (n - 1)
    E = float(np.sum(weight * spline(r_out)))
    lin = float(np.sum(weight * np.interp(r_out, radii, U[:k])))
    if f.has_tail:
        tail_spline = CubicSpline(np.log(edges[k - 1:]), U[k - 1:])
        rt, wt = f.tail_quadrature(panels=edges.size - k, order=8)
        E += float(np.sum(wt * f(rt) * rt ** (n - 1) * tail_spline(np.log(rt))))
        # beyond the last panel: U ~ power (Riesz) or U_E + slope log r (log)
        c_e, r_e, q = float(f(edges[-1])), edges[-1], f.tail_exponent
        if kind == "power":
            if U[-1] <= 0 or U[-2] <= 0:
                return EnergyValue(math.inf, math.inf, 0.0)
            p = math.log(U[-1] / U[-2]) / math.log(edges[-1] / edges[-2])
            kk = q - p - n
            if kk <= 0:
                return EnergyValue(math.inf, math.inf, 0.0)
            E += c_e * U[-1] * r_e**n / kk
        else:
            slope = (U[-1] - U[-2]) / math.log(edges[-1] / edges[-2])
            kk = q - n
            if kk <= 0:
                return EnergyValue(math.inf, math.inf, 0.0)
            E += c_e * r_e**n * (U[-1] / kk + slope / kk**2)
    E *= area
    # error indicator: linear against cubic interpolation of U on the profile
    err = 0.1 * abs(lin - float(np.sum(weight * spline(r_out)))) * area
    return EnergyValue(E, err, 0.0)


# fractional seminorm -----------------------------------------------------


def fractional_seminorm(f, alpha: float, quad=None) -> EnergyValue:
    """``int int |f(x) - f(y)|^2 |x - y|^(2 alpha - n) dx dy`` for alpha in (-1, 0).

    Computed in polar coordinates as ``sum_i w_i rho_{Pi_2^{*,-alpha} f}(u_i)^(2 alpha)``.
    Returns ``inf`` when the difference correlation is not integrable at 0.
    """
    body = polar_projection_body(f, alpha, quad)
    q = body.quadrature
    vals = body.diagnostics["rho_pow"]
    if not body.ok:
        return EnergyValue(math.inf, math.inf, 0.0)
    E = float(np.sum(q.weights * vals))
    err = 0.0
    if q.n >= 2 and q.size >= 4:
        err = abs(E - 2.0 * float(np.sum(q.weights[::2] * vals[::2])))
    return EnergyValue(E, err, 0.0)


# Fourier side -------------------------------------------------------------


def riesz_fourier_constant(n: int, alpha: float) -> float:
    """``c`` with ``alpha int int f f |x-y|^(alpha-n) = c int |fhat|^2 |xi|^-alpha``."""
    return 2.0 * math.pi ** (n / 2 - alpha) * gamma_fn(alpha / 2 + 1) / gamma_fn((n - alpha) / 2)


def seminorm_fourier_constant(n: int, alpha: float) -> float:
    """``c`` with ``int int |f(x)-f(y)|^2 |x-y|^(2alpha-n) = c int |xi|^(-2alpha) |fhat|^2``."""
    return 2.0 * math.pi ** (n / 2 - 2 * alpha) * abs(gamma_fn(alpha)) / gamma_fn(n / 2 - alpha)


def fourier_transform(f: GridFunction, xi) -> np.ndarray:
    """``fhat(xi) = int e^(-2 pi i xi.x) f(x) dx`` by the midpoint rule.

    For n = 1, ``xi`` is a 1-D array of frequencies. For n = 2, ``xi`` is a
    1-D array of frequencies per axis and the result is on the tensor grid
    ``xi x xi``.
    """
    if not isinstance(f, GridFunction):
        raise TypeError("fourier_transform takes a GridFunction")
    if f.n > 2:
        raise ValueError("direct Fourier quadrature is limited to n <= 2")
    xi = np.asarray(xi, dtype=float)
    x = f.axis()
    E = np.exp(-2j * np.pi * np.outer(xi, x)) * f.h
    if f.n == 1:
        return E @ f.values
    return E @ f.values @ E.T


def _dft_window(f: GridFunction, pad=2):
    """Frequencies spaced 1/(pad m h) covering one period of the sampled transform."""
    N = pad * f.m
    dxi = 1.0 / (N * f.h)
    j = np.arange(-N // 2, N // 2)
    return j * dxi, dxi


def _weight_moment_gauss(n, weight, sigma):
    """int exp(-pi |xi/sigma|^2) w(|xi|) dxi for w = log or a power."""
    kind, s = weight
    if kind == "log":
        return sigma**n * (0.5 * (digamma(n / 2) - math.log(math.pi)) + math.log(sigma))
    return sigma ** (n + s) * math.pi ** (-s / 2) * gamma_fn((n + s) / 2) / gamma_fn(n / 2)


def _grid_fourier_moment(f: GridFunction, weight, pad=2):
    xi, dxi = _dft_window(f, pad)
    F = fourier_transform(f, xi)
    P = np.abs(F) ** 2
    mass = float(np.sum(P) * dxi**f.n)
    l2 = float(np.sum(f.values**2) * f.cell_volume)
    deficit = abs(1.0 - mass / l2) if l2 > 0 else 0.0
    grids = np.meshgrid(*([xi] * f.n), indexing="ij")
    r = np.sqrt(sum(g * g for g in grids))
    sigma = xi.max() / 8.0
    bump = np.exp(-np.pi * (r / sigma) ** 2)
    c0 = float(P[(f.m * pad // 2,) * f.n])
    kind, s = weight
    with np.errstate(divide="ignore"):
        w = np.log(np.where(r > 0, r, 1.0)) if kind == "log" else np.where(r > 0, r, 1.0) ** s
    rem = (P - c0 * bump) * np.where(r > 0, w, 0.0)
    val = float(np.sum(rem) * dxi**f.n) + c0 * _weight_moment_gauss(f.n, weight, sigma)
    return val, deficit


def _check_window(deficit):
    if deficit > 1e-2:
        warnings.warn(f"frequency window misses {100 * deficit:.2f}% of the L^2 mass", FourierWindowWarning, stacklevel=3)


def radial_fourier_transform(f: RadialProfile, rho) -> np.ndarray:
    """Fourier transform of a radial profile (n = 1) at frequencies ``rho > 0``."""
    if f.n != 1:
        raise NotImplementedError("radial Fourier transforms are implemented for n = 1")
    rho = np.atleast_1d(np.asarray(rho, dtype=float))
    k = 2 * np.pi * rho
    r = f.radii
    v = f.values
    slope = np.diff(v) / np.diff(r)
    mid = 0.5 * (r[1:] + r[:-1])
    half = 0.5 * np.diff(r)
    K = k[:, None]
    # int_0^{r_K} f cos(kr) = f_K sin(k r_K)/k + sum_j s_j (cos(k r_{j+1}) - cos(k r_j))/k^2
    edge = v[-1] * r[-1] * np.sinc(k * r[-1] / np.pi)
    seg = -2.0 * (mid[None, :] * np.sinc(K * mid[None, :] / np.pi)) * (half[None, :] * np.sinc(K * half[None, :] / np.pi))
    body = edge + seg @ slope
    tail = np.zeros_like(k)
    if f.has_tail:
        tail = v[-1] * r[-1] ** f.tail_exponent * _power_cos_tail(r[-1], f.tail_exponent, k)
    return 2.0 * (body + tail)


def _power_cos_tail(a, q, k):
    """int_a^inf r^-q cos(k r) dr for k > 0."""
    qi = int(round(q))
    if abs(q - qi) < 1e-12 and qi >= 1:
        si, ci = sici(k * a)
        cos_int = -ci  # q = 1
        sin_int = np.pi / 2 - si
        for p in range(2, qi + 1):
            c_new = a ** (1 - p) * np.cos(k * a) / (p - 1) - k / (p - 1) * sin_int
            s_new = a ** (1 - p) * np.sin(k * a) / (p - 1) + k / (p - 1) * cos_int
            cos_int, sin_int = c_new, s_new
        return cos_int
    out = np.empty_like(k)
    u0 = k * a
    small = (u0 < 1.0) & (0.0 < q < 3.0)
    if np.any(small):
        # int_u0^inf u^-q cos u du = Gamma(1-q) cos(pi(1-q)/2) - int_0^u0 u^-q cos u du
        u = u0[small]
        acc = u ** (1.0 - q) / (1.0 - q)
        for j in range(1, 12):
            acc = acc + (-1) ** j * u ** (2 * j + 1 - q) / (math.factorial(2 * j) * (2 * j + 1 - q))
        const = math.gamma(1.0 - q) * math.cos(0.5 * np.pi * (1.0 - q))
        out[small] = k[small] ** (q - 1.0) * (const - acc)
    for i in np.flatnonzero(~small):
        out[i] = integrate.quad(lambda r: r**-q, a, np.inf, weight="cos", wvar=k[i], limit=200)[0]
    return out


def _radial_fourier_moment(f: RadialProfile, weight, per_unit=40):
    if f.n != 1:
        raise NotImplementedError("radial Fourier moments are implemented for n = 1")
    dr = float(np.min(np.diff(f.radii)))
    tau = np.arange(-40.0, math.log(40.0 / dr), 1.0 / per_unit)
    rho = np.exp(tau)
    P = np.abs(radial_fourier_transform(f, rho)) ** 2
    kind, s = weight
    w = tau if kind == "log" else rho**s
    dtau = tau[1] - tau[0]
    val = 2.0 * float(np.sum(P * w * rho) * dtau)
    mass = 2.0 * float(np.sum(P * rho) * dtau)
    l2 = lp_norm(f, 2.0) ** 2
    return val, abs(1.0 - mass / l2)


def fourier_log_moment(f) -> float:
    """``int |fhat(xi)|^2 log|xi| dxi``.

    Grid functions (n <= 2) use a DFT-compatible frequency window on which
    Plancherel holds; the logarithmic singularity at 0 is removed by
    subtracting ``|fhat(0)|^2`` times a Gaussian whose log-moment is known.
    Radial profiles (n = 1) use exact cosine transforms of the piecewise
    linear profile and a logarithmic frequency grid.
    """
    if isinstance(f, GridFunction):
        val, deficit = _grid_fourier_moment(f, ("log", 0.0))
    elif isinstance(f, RadialProfile):
        val, deficit = _radial_fourier_moment(f, ("log", 0.0))
    else:
        raise TypeError(f"unsupported function type {type(f).__name__}")
    _check_window(deficit)
    return val


def fourier_power_moment(f, s: float) -> float:
    """``int |fhat(xi)|^2 |xi|^s dxi`` for ``s > -n``."""
    if not s > -f.n:
        raise ValueError("the power moment needs s > -n")
    if isinstance(f, GridFunction):
        val, deficit = _grid_fourier_moment(f, ("power", float(s)))
    elif isinstance(f, RadialProfile):
        val, deficit = _radial_fourier_moment(f, ("power", float(s)))
    else:
        raise TypeError(f"unsupported function type {type(f).__name__}")
    _check_window(deficit)
    return val
