"""Inequality chains, equality residuals, limit sweeps and invariance checks.

Each ``verify_*`` function evaluates the terms of one chain on a function and
returns a :class:`ChainReport`. Error estimates come from recomputing every
term on the coarsened input (``f.coarsen()``); a slack passes when it is at
least ``-multiplier * (err_a + err_b)`` for the two terms it compares.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .bodies import (
    StarBody,
    ball_body,
    polar_projection_body,
    r_zero_body,
    s_alpha_body,
    star_volume,
)
from .dualmix import dual_mixed_volume_log
from .grid import (
    GridFunction,
    NonIntegrableError,
    RadialProfile,
    apply_affine,
    entropy_l1,
    entropy_l2,
    lp_norm,
    radial_radii,
    schwarz_symmetrize,
)
from .kernels import (
    fourier_log_moment,
    fractional_seminorm,
    log_energy,
    riesz_energy,
)
from .specfun import (
    digamma,
    hls_constant,
    log_gamma,
    log_hls_constant,
    log_sobolev_constant,
    unit_ball_volume,
)

__all__ = [
    "ChainReport",
    "DEFAULT_MULTIPLIER",
    "verify_affine_hls",
    "verify_affine_log_hls",
    "verify_affine_log_sobolev",
    "verify_beckner",
    "verify_affine_frac_l2",
    "limit_sweep_hls",
    "limit_sweep_frac",
    "affine_invariance_check",
    "sup_gauge_check",
    "symmetrization_comparison",
    "beckner_rhs",
    "normalized",
    "richardson",
    "specfun_self_test",
]

DEFAULT_MULTIPLIER = 3.0
_FLOOR = 1e-12


@dataclass
class ChainReport:
    """Terms, slacks and verdict of one chain evaluation.

    ``terms`` are ordered left to right as the chain is written. For a chain
    ``a >= b >= c`` the slacks are ``a - b`` and ``b - c``; for a ``<=`` chain
    they are ``b - a`` and ``c - b``, so a nonnegative slack always means the
    inequality holds.
    """

    chain: str
    function: str
    n: int
    params: dict
    terms: list
    errors: list
    slacks: list
    tolerances: list
    passed: bool
    flags: list = field(default_factory=list)
    residuals: list = field(default_factory=list)
    equality_direction: str = "sufficiency"

    def to_record(self) -> dict:
        return asdict(self)


def normalized(f, p: float):
    """``f / ||f||_p``."""
    return f.scaled(1.0 / lp_norm(f, p))


def _coarse(f):
    c = f._cache.get("coarse")
    if c is None:
        c = f.coarsen()
        f._cache["coarse"] = c
    return c


def _with_error(term, f, coarse=True):
    v = term(f)
    if not coarse:
        return v, 0.0
    try:
        c = term(_coarse(f))
    except (ValueError, ArithmeticError):
        return v, math.inf
    if not (math.isfinite(v) and math.isfinite(c)):
        return v, math.inf
    return v, abs(v - c)


def _assemble(chain, name, f, params, terms, errors, orientation, multiplier, flags):
    if orientation == ">=":
        slacks = [terms[i] - terms[i + 1] for i in range(len(terms) - 1)]
    else:
        slacks = [terms[i + 1] - terms[i] for i in range(len(terms) - 1)]
    tols = [multiplier * (errors[i] + errors[i + 1]) + _FLOOR * max(1.0, abs(terms[i])) for i in range(len(slacks))]
    residuals = [abs(s) / max(abs(terms[i]), abs(terms[i + 1]), _FLOOR) for i, s in enumerate(slacks)]
    finite = all(math.isfinite(t) for t in terms)
    passed = finite and not flags and all(s >= -t for s, t in zip(slacks, tols))
    p = {"n": f.n, **params, **_resolution(f)}
    return ChainReport(chain, name, f.n, p, [float(t) for t in terms], [float(e) for e in errors],
                       [float(s) for s in slacks], [float(t) for t in tols], bool(passed), list(flags),
                       [float(r) for r in residuals])


def _resolution(f):
    if isinstance(f, GridFunction):
        return {"m": f.m, "half_width": f.half_width}
    return {"m": f.m, "r_max": f.r_max}


# chains -----------------------------------------------------------------


def verify_affine_hls(f, alpha: float, *, name: str = "f", multiplier: float = DEFAULT_MULTIPLIER,
                      coarse_errors: bool = True, quad=None) -> ChainReport:
    """``gamma ||f||_{2n/(n+a)}^2 >= n w_n^((n-a)/n) |S_a f|^(a/n) >= int int f f |x-y|^(a-n)``."""
    n = f.n
    if not 0 < alpha < n:
        raise ValueError(f"alpha must lie in (0, {n}), got {alpha}")
    gamma = hls_constant(n, alpha)
    omega = unit_ball_volume(n)
    p = 2.0 * n / (n + alpha)
    flags = []

    def left(g):
        return gamma * lp_norm(g, p) ** 2

    def middle(g):
        body = s_alpha_body(g, alpha, quad)
        if not body.ok:
            flags.append(f"S_{alpha:g} diverged")
        return n * omega ** ((n - alpha) / n) * star_volume(body) ** (alpha / n)

    def right(g):
        return riesz_energy(g, alpha).value

    terms, errors = zip(*(_with_error(t, f, coarse_errors) for t in (left, middle, right)))
    return _assemble("affine_hls", name, f, {"alpha": float(alpha)}, list(terms), list(errors), ">=",
                     multiplier, sorted(set(flags)))


def verify_affine_log_hls(f, *, name: str = "f", multiplier: float = DEFAULT_MULTIPLIER,
                          coarse_errors: bool = True, quad=None) -> ChainReport:
    """Affine log-HLS chain for ``||f||_1 = 1`` (``f`` is normalized here).

    ``-int int f log|x-y| f <= -int int f log||x-y||_{S_n f} f + (1/n) log(n w_n)
    <= (1/n) int f log f + gamma_n``.
    """
    f = normalized(f, 1.0)
    n = f.n
    omega = unit_ball_volume(n)
    gn = log_hls_constant(n)

    def left(g):
        return log_energy(g).value

    def middle(g):
        body = s_alpha_body(g, float(n), quad)
        return log_energy(g, body).value + math.log(n * omega) / n

    def right(g):
        return entropy_l1(g) / n + gn

    terms, errors = zip(*(_with_error(t, f, coarse_errors) for t in (left, middle, right)))
    return _assemble("affine_log_hls", name, f, {}, list(terms), list(errors), "<=", multiplier, [])


def verify_affine_log_sobolev(f, *, name: str = "f", multiplier: float = DEFAULT_MULTIPLIER,
                              coarse_errors: bool = True, quad=None) -> ChainReport:
    """Affine log-Sobolev chain for ``||f||_2 = 1`` (``f`` is normalized here).

    ``gamma_0 - (2/n) int f^2 log f >= (1/n) log(|R_0 f| / w_n)
    >= (1/(n w_n)) int log rho_{R_0 f}``.
    """
    f = normalized(f, 2.0)
    n = f.n
    omega = unit_ball_volume(n)
    g0 = log_sobolev_constant(n)
    flags = []

    def body_of(g):
        key = ("r0_body", None if quad is None else quad.size)
        if key not in g._cache:
            g._cache[key] = r_zero_body(g, quad)
        b = g._cache[key]
        if not b.ok:
            flags.append("R_0 flagged")
        return b

    def left(g):
        return g0 - 2.0 / n * entropy_l2(g)

    def middle(g):
        return math.log(star_volume(body_of(g)) / omega) / n

    def right(g):
        b = body_of(g)
        return float(np.sum(b.quadrature.weights * b.diagnostics["log_rho"])) / (n * omega)

    terms, errors = zip(*(_with_error(t, f, coarse_errors) for t in (left, middle, right)))
    return _assemble("affine_log_sobolev", name, f, {}, list(terms), list(errors), ">=", multiplier,
                     sorted(set(flags)))


def beckner_rhs(f) -> float:
    """``(2/n) int f^2 log f + psi(n/2) - log(pi)/2 - (1/n) log(Gamma(n)/Gamma(n/2))``."""
    n = f.n
    return (2.0 / n * entropy_l2(f) + digamma(n / 2) - 0.5 * math.log(math.pi)
            - (log_gamma(n) - log_gamma(n / 2)) / n)


def verify_beckner(f, *, name: str = "f", multiplier: float = DEFAULT_MULTIPLIER,
                   coarse_errors: bool = True) -> ChainReport:
    """``int |fhat|^2 log|xi| >= beckner_rhs(f)`` for ``||f||_2 = 1``."""
    f = normalized(f, 2.0)
    terms, errors = zip(*(_with_error(t, f, coarse_errors) for t in (fourier_log_moment, beckner_rhs)))
    return _assemble("beckner", name, f, {}, list(terms), list(errors), ">=", multiplier, [])


def verify_affine_frac_l2(f, alpha: float, *, name: str = "f", multiplier: float = DEFAULT_MULTIPLIER,
                          coarse_errors: bool = True, quad=None) -> ChainReport:
    """``2 gamma_{n,2a} ||f||_{2n/(n+2a)}^2 <= n w_n^((n-2a)/n) |Pi f|^(2a/n) <= seminorm``."""
    n = f.n
    if not -1.0 < alpha < 0.0 or n + 2 * alpha <= 0:
        raise ValueError(f"alpha must lie in (-1, 0) with n + 2 alpha > 0, got {alpha}")
    gamma = hls_constant(n, 2.0 * alpha)
    omega = unit_ball_volume(n)
    p = 2.0 * n / (n + 2.0 * alpha)
    flags = []

    def left(g):
        return 2.0 * gamma * lp_norm(g, p) ** 2

    def middle(g):
        body = polar_projection_body(g, alpha, quad)
        if not body.ok:
            flags.append("Pi diverged")
            return math.inf
        return n * omega ** ((n - 2 * alpha) / n) * star_volume(body) ** (2 * alpha / n)

    def right(g):
        return fractional_seminorm(g, alpha, quad).value

    terms, errors = zip(*(_with_error(t, f, coarse_errors) for t in (left, middle, right)))
    return _assemble("affine_frac_l2", name, f, {"alpha": float(alpha)}, list(terms), list(errors), "<=",
                     multiplier, sorted(set(flags)))


# constants self-test ----------------------------------------------------


def richardson(D, h: float, levels: int = 4) -> float:
    """Extrapolate ``D(h) = D0 + c1 h + c2 h^2 + ...`` to ``h = 0`` by halving."""
    T = [[D(h / 2**k)] for k in range(levels)]
    for j in range(1, levels):
        for k in range(j, levels):
            T[k].append((2**j * T[k][j - 1] - T[k - 1][j - 1]) / (2**j - 1))
    return T[-1][-1]


def specfun_self_test(n: int) -> ChainReport:
    """Check ``gamma_{n,n} = 1`` and both logarithmic constants against derivatives.

    ``gamma_n = -d/da gamma_{n,a}`` at ``a = n`` and ``gamma_0 = d/da [a gamma_{n,a} / (n w_n)]``
    at ``a = 0+``; both derivatives are one-sided Richardson extrapolations.
    """
    omega = unit_ball_volume(n)
    g_nn = hls_constant(n, float(n))
    g_n = log_hls_constant(n)
    g_0 = log_sobolev_constant(n)
    fd_n = -richardson(lambda h: (1.0 - hls_constant(n, n - h)) / h, 1e-2)
    fd_0 = richardson(lambda h: (h * hls_constant(n, h) / (n * omega) - 1.0) / h, 1e-2)
    diffs = [abs(g_nn - 1.0), abs(g_n - fd_n), abs(g_0 - fd_0)]
    tols = [1e-12, 1e-6, 1e-5]
    return ChainReport("specfun", "constants", n, {"n": n}, [g_nn, g_n, fd_n, g_0, fd_0],
                       [0.0] * 5, [-d for d in diffs], tols,
                       all(d <= t for d, t in zip(diffs, tols)), [], diffs)


# sweeps -----------------------------------------------------------------


def limit_sweep_hls(f, alphas) -> list[dict]:
    """Scaled chain terms ``alpha * term`` against ``n w_n ||f||_2^2`` as ``alpha -> 0+``."""
    n = f.n
    target = n * unit_ball_volume(n) * lp_norm(f, 2.0) ** 2
    rows = []
    for a in alphas:
        rep = verify_affine_hls(f, a, coarse_errors=False)
        scaled = [a * t for t in rep.terms]
        rows.append({
            "alpha": float(a),
            "target": target,
            "scaled_terms": scaled,
            "deviations": [abs(s / target - 1.0) for s in scaled],
        })
    return rows


def limit_sweep_frac(f, alphas) -> list[dict]:
    """``(-alpha) * seminorm`` against ``n w_n ||f||_2^2`` as ``alpha -> 0-``."""
    n = f.n
    target = n * unit_ball_volume(n) * lp_norm(f, 2.0) ** 2
    rows = []
    for a in alphas:
        v = -a * fractional_seminorm(f, a).value
        rows.append({"alpha": float(a), "target": target, "scaled": v, "deviation": abs(v / target - 1.0)})
    return rows


# invariance and extremal checks ------------------------------------------


def _middle_terms(f, alpha):
    n = f.n
    s = star_volume(s_alpha_body(f, alpha))
    r0 = star_volume(r_zero_body(f))
    g = normalized(f, 1.0)
    aniso = log_energy(g, s_alpha_body(g, float(n))).value
    return {"S_alpha_volume": s, "R0_volume": r0, "aniso_log": aniso}


def affine_invariance_check(f: GridFunction, transforms, alpha: float = 1.0) -> list[dict]:
    """Middle terms after each ``(phi, x0)`` in ``transforms`` (``det phi = 1``).

    Volumes are compared relatively and the anisotropic log term absolutely
    (it is a logarithm).
    """
    base = _middle_terms(f, alpha)
    rows = []
    for k, (phi, x0) in enumerate(transforms):
        phi = np.asarray(phi, dtype=float)
        if abs(abs(np.linalg.det(phi)) - 1.0) > 1e-12:
            raise ValueError(f"transform {k} is not volume preserving")
        g = apply_affine(f, phi, x0)
        cur = _middle_terms(g, alpha)
        dev = {
            "S_alpha_volume": abs(cur["S_alpha_volume"] / base["S_alpha_volume"] - 1.0),
            "R0_volume": abs(cur["R0_volume"] / base["R0_volume"] - 1.0),
            "aniso_log": abs(cur["aniso_log"] - base["aniso_log"]),
        }
        rows.append({"index": k, "phi": phi.tolist(), "x0": None if x0 is None else list(map(float, x0)),
                     "values": cur, "deviations": dev, "max_deviation": max(dev.values())})
    return rows


def sup_gauge_check(f, bodies: dict) -> dict:
    """Anisotropic log term for candidate gauges rescaled to volume ``w_n``.

    The candidate built from ``S_n f`` is added under the key ``"S_n f"``;
    it should attain the maximum.
    """
    f = normalized(f, 1.0)
    n = f.n
    omega = unit_ball_volume(n)
    sn = s_alpha_body(f, float(n))
    cands = dict(bodies)
    cands["S_n f"] = sn
    values = {}
    for key, K in cands.items():
        if not K.quadrature.same_as(sn.quadrature):
            raise ValueError(f"candidate {key!r} uses a different sphere rule")
        values[key] = log_energy(f, K.with_volume(omega)).value
    best = max(values, key=values.get)
    others = [v for k, v in values.items() if k != "S_n f"]
    margin = values["S_n f"] - max(others) if others else math.inf
    return {"values": values, "argmax": best, "margin": margin}


def _compact_profile(p: RadialProfile, knots: int = 512) -> RadialProfile:
    """Resample a long decreasing profile on ``knots`` sinh-spaced radii."""
    if p.radii.size <= knots + 1:
        return p
    r = radial_radii(knots, scale=max(p.radii[1], p.r_max / knots), r_max=p.r_max)
    r[-1] = p.r_max
    return RadialProfile(p.n, r, p(r), p.tail_exponent)


def symmetrization_comparison(f, K: StarBody | None = None, alpha: float | None = None) -> dict:
    """Rearrangement inequalities for ``f`` and its Schwarz symmetral ``f*``.

    Each entry has ``value``, ``symmetral`` and ``slack = symmetral - value``
    (nonnegative when the inequality holds):

    * Riesz energy (``alpha``, default ``n/2``) and Euclidean log energy
      (omitted when ``f`` is not integrable);
    * ``|R_0 f| <= |R_0 f*|``;
    * ``V_log(K, R_0 f) <= V_log(K*, R_0 f*)`` with ``K*`` the centred ball of
      volume ``|K|`` (``K`` defaults to the unit ball).

    For grid input ``f*`` is sampled back on the grid of ``f``, so both sides
    carry the same cell-model bias.
    """
    n = f.n
    if isinstance(f, RadialProfile):
        fs = f
    else:
        prof = _compact_profile(schwarz_symmetrize(f))
        fs = GridFunction.from_callable(lambda x: prof(np.linalg.norm(x, axis=-1)), n, f.half_width, f.m)
    alpha = n / 2.0 if alpha is None else alpha
    out = {}

    def rec(key, a, b):
        out[key] = {"value": a, "symmetral": b, "slack": b - a, "relative": (b - a) / max(abs(a), abs(b), _FLOOR)}

    rec("riesz", riesz_energy(f, alpha).value, riesz_energy(fs, alpha).value)
    try:
        rec("log_energy", log_energy(normalized(f, 1.0)).value, log_energy(normalized(fs, 1.0)).value)
    except NonIntegrableError:
        pass
    r0 = r_zero_body(f)
    r0s = r_zero_body(fs, r0.quadrature)
    rec("R0_volume", star_volume(r0), star_volume(r0s))
    quad = r0.quadrature
    K = ball_body(quad) if K is None else K
    Ks = ball_body(quad, (star_volume(K) / unit_ball_volume(n)) ** (1.0 / n))
    rec("V_log", dual_mixed_volume_log(K, r0), dual_mixed_volume_log(Ks, r0s))
    return out
