import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from affine_hls.bodies import (
    StarBody,
    ball_body,
    body_from_function,
    curve_rho_r,
    gauge,
    linear_image,
    polar_projection_body,
    r_zero_body,
    radial_mean_body,
    s_alpha_body,
    sphere_quadrature,
    star_volume,
)
from affine_hls.correlation import DirectionalCorrelation
from affine_hls.grid import (
    ExtremizerSpec,
    Family,
    GridFunction,
    RadialProfile,
    RadialShape,
    apply_affine,
    make_extremizer,
    radial_radii,
)
from affine_hls.specfun import EULER_GAMMA, hls_constant, unit_ball_volume


def chi01(m=256):
    return GridFunction.from_callable(lambda x: ((x[..., 0] > 0) & (x[..., 0] < 1)).astype(float), 1, 2.0, m)


def gauss1(m=256, R=6.0):
    return GridFunction.from_callable(lambda x: (2 / np.pi) ** 0.25 * np.exp(-x[..., 0] ** 2), 1, R, m)


def zeta(rho, alpha):
    return rho / (math.gamma(alpha + 1) ** (1 / alpha) if alpha else math.exp(-EULER_GAMMA))


# sphere rules -----------------------------------------------------------


@pytest.mark.parametrize("n, size", [(1, None), (2, 256), (2, 7), (3, (8, 16)), (3, None)])
def test_sphere_weights_sum_to_area(n, size):
    q = sphere_quadrature(n, size)
    assert abs(q.weights.sum() - n * unit_ball_volume(n)) < 1e-10
    assert np.allclose(np.linalg.norm(q.nodes, axis=1), 1.0, atol=1e-14)


def test_sphere_rule_layout():
    q1 = sphere_quadrature(1)
    assert q1.nodes.ravel().tolist() == [1.0, -1.0] and q1.weights.tolist() == [1.0, 1.0]
    q2 = sphere_quadrature(2, 4)
    assert np.allclose(q2.nodes, [[1, 0], [0, 1], [-1, 0], [0, -1]], atol=1e-15)
    with pytest.raises(ValueError):
        sphere_quadrature(4)


def test_star_body_rejects_bad_rho():
    q = sphere_quadrature(2, 4)
    with pytest.raises(ValueError):
        StarBody(q, np.ones(3))
    with pytest.raises(ValueError):
        StarBody(q, np.array([1.0, np.inf, 1.0, 1.0]))
    assert not StarBody(q, np.array([1.0, 0.0, 1.0, 1.0])).ok


# S_alpha and R_alpha ----------------------------------------------------


@pytest.mark.parametrize("alpha", [0.25, 0.5, 1.0, 2.0])
def test_s_alpha_indicator_beta_value(alpha):
    b = s_alpha_body(chi01(), alpha)
    assert b.rho[0] ** alpha == pytest.approx(1 / (alpha * (alpha + 1)), rel=1e-3)
    assert b.rho[1] == pytest.approx(b.rho[0], rel=1e-12)


@pytest.mark.parametrize("alpha", [-0.25, 0.5, 1.0, 2.0])
def test_radial_mean_indicator(alpha):
    b = radial_mean_body(chi01(), alpha)
    assert b.rho[0] == pytest.approx((1 / (alpha + 1)) ** (1 / alpha), rel=1e-3)


def test_r_zero_indicator():
    b = r_zero_body(chi01())
    assert b.rho == pytest.approx([1 / math.e, 1 / math.e], rel=1e-3)
    assert star_volume(b) == pytest.approx(2 / math.e, rel=1e-3)


def test_r_zero_gaussian():
    b = r_zero_body(gauss1(512, 8.0))
    assert abs(b.rho[0] - math.sqrt(2 * math.exp(-EULER_GAMMA))) < 1e-3


def test_r_zero_frullani_oracle():
    # the closed form above rests on this Frullani-type integral
    val = integrate.quad(lambda t: (math.exp(-t * t / 2) - math.exp(-t)) / t, 0, np.inf, limit=200)[0]
    assert val == pytest.approx((EULER_GAMMA + math.log(2)) / 2, rel=1e-10)


def test_r_zero_scale_invariance():
    f = gauss1()
    g = f.scaled(3.0)
    assert np.max(np.abs(r_zero_body(f).rho - r_zero_body(g).rho)) < 1e-10


@pytest.mark.parametrize("alpha", [1e-2, -1e-2])
def test_continuity_across_zero(alpha):
    f = gauss1()
    assert abs(radial_mean_body(f, alpha).rho[0] - r_zero_body(f).rho[0]) < 1e-2


def test_radial_mean_domain():
    with pytest.raises(ValueError):
        radial_mean_body(chi01(), 0.0)
    with pytest.raises(ValueError):
        radial_mean_body(chi01(), -1.0)
    with pytest.raises(ValueError):
        s_alpha_body(chi01(), -0.5)


# polar projection body --------------------------------------------------


def test_polar_projection_indicator():
    b = polar_projection_body(chi01(), -0.25)
    assert b.rho[0] ** -0.5 == pytest.approx(8.0, rel=1e-2)


def test_polar_projection_gaussian_oracle():
    # the cell model f_h has d_h(t) ~ t near 0, a bias of order h^1.5 here; m = 1024 keeps it under 1e-3
    f = gauss1(1024, 8.0)
    l2 = float(np.sum(f.values**2) * f.cell_volume)
    d = lambda t: 2 * l2 * (1 - math.exp(-t * t / 2))
    oracle = integrate.quad(lambda t: t**-1.5 * d(t), 0, 1)[0] + integrate.quad(lambda t: t**-1.5 * d(t), 1, np.inf)[0]
    b = polar_projection_body(f, -0.25)
    assert b.rho[0] ** -0.5 == pytest.approx(oracle, rel=1e-3)


def test_polar_projection_domain():
    with pytest.raises(ValueError):
        polar_projection_body(chi01(), 0.25)


# radial inputs ----------------------------------------------------------


@pytest.fixture(scope="module")
def radial_profile():
    r = radial_radii(128, 1.0, 1e3)
    return RadialProfile(2, r, np.exp(-r * r))


@pytest.mark.parametrize("build", [
    lambda f, q: s_alpha_body(f, 0.5, q),
    lambda f, q: polar_projection_body(f, -0.25, q),
    lambda f, q: radial_mean_body(f, 1.0, q),
    lambda f, q: radial_mean_body(f, -0.25, q),
    lambda f, q: r_zero_body(f, q),
], ids=["S", "Pi", "R+", "R-", "R0"])
def test_radial_input_gives_constant_rho(radial_profile, build):
    b = build(radial_profile, sphere_quadrature(2, 16))
    assert b.ok
    assert np.ptp(b.rho) < 1e-6 * b.rho.max()


def test_radial_grid_input_nearly_constant():
    f = GridFunction.from_callable(lambda x: np.exp(-np.sum(x * x, -1)), 2, 4.0, 64)
    b = s_alpha_body(f, 1.0, sphere_quadrature(2, 16))
    assert np.ptp(b.rho) < 1e-2 * b.rho.max()


@pytest.mark.parametrize("alpha", [0.5, 1.0])
def test_extremizer_closed_form(alpha):
    n = 2
    f = make_extremizer(ExtremizerSpec(n, Family.HLS, alpha=alpha, normalize=None), RadialShape(n, radial_radii(128)))
    b = s_alpha_body(f, alpha, sphere_quadrature(n, 8))
    # int (1 + |x|^2)^-n dx = pi at n = 2
    closed = hls_constant(n, alpha) * math.pi ** ((n + alpha) / n) / (n * unit_ball_volume(n))
    assert b.rho[0] ** alpha == pytest.approx(closed, rel=5e-3)


# convex-body bridge -----------------------------------------------------


def _gardner_zhang_disk(alpha):
    # (1/|K|) int_K rho_{K-x}(e1)^alpha dx for the unit disk
    inner = lambda x2: integrate.quad(lambda x1: (math.sqrt(1 - x2 * x2) - x1) ** alpha,
                                      -math.sqrt(1 - x2 * x2), math.sqrt(1 - x2 * x2))[0]
    return (integrate.quad(inner, -1, 1)[0] / math.pi) ** (1 / alpha)


def _gardner_zhang_square_diagonal(alpha):
    val = integrate.dblquad(lambda x2, x1: (math.sqrt(2) * min(0.5 - x1, 0.5 - x2)) ** alpha, -0.5, 0.5, -0.5, 0.5)[0]
    return val ** (1 / alpha)


@pytest.mark.parametrize("alpha", [-0.25, 0.5, 1.0])
def test_gardner_zhang_bridge(alpha):
    q = sphere_quadrature(2, 8)
    assert radial_mean_body(chi01(), alpha).rho[0] == pytest.approx((1 / (alpha + 1)) ** (1 / alpha), rel=1e-2)
    disk = GridFunction.from_callable(lambda x: (np.sum(x * x, -1) < 1).astype(float), 2, 1.5, 128)
    assert radial_mean_body(disk, alpha, q).rho[0] == pytest.approx(_gardner_zhang_disk(alpha), rel=1e-2)
    square = GridFunction.from_callable(
        lambda x: ((np.abs(x[..., 0]) < 0.5) & (np.abs(x[..., 1]) < 0.5)).astype(float), 2, 1.0, 64)
    bs = radial_mean_body(square, alpha, q)
    assert bs.rho[0] == pytest.approx((1 / (alpha + 1)) ** (1 / alpha), rel=1e-2)
    assert bs.rho[1] == pytest.approx(_gardner_zhang_square_diagonal(alpha), rel=1e-2)


# monotonicity -----------------------------------------------------------

ZETA_ALPHAS = [-0.4, -0.2, -0.1, 0.0, 0.25, 0.5, 1.0, 1.5, 2.0]


@pytest.mark.parametrize("f", [gauss1(), chi01()], ids=["gauss", "chi"])
def test_zeta_nonincreasing(f):
    z = [zeta((r_zero_body(f) if a == 0 else radial_mean_body(f, a)).rho[0], a) for a in ZETA_ALPHAS]
    assert np.all(np.diff(z) <= 1e-3)


def test_zeta_constant_for_exponential_curve():
    t = np.unique(np.concatenate([np.linspace(0, 1, 2001), np.linspace(1, 60, 20001)]))
    c = DirectionalCorrelation(np.array([1.0]), t, np.exp(-t), 2 * (1 - np.exp(-t)), 1.0, 60.0)
    z = np.array([zeta(curve_rho_r(c, a), a) for a in ZETA_ALPHAS])
    assert np.max(np.abs(z - 1.0)) < 1e-3


# affine equivariance ----------------------------------------------------


@pytest.mark.parametrize("phi", [
    [[math.cos(0.7), -math.sin(0.7)], [math.sin(0.7), math.cos(0.7)]],
    [[2.0, 0.0], [0.0, 0.5]],
    [[1.0, 0.5], [0.0, 1.0]],
], ids=["rotation", "diag", "shear"])
def test_s_alpha_volume_sl2_invariant(phi):
    f = GridFunction.from_callable(lambda x: np.exp(-np.sum(x * x, -1)), 2, 6.0, 128)
    q = sphere_quadrature(2, 64)
    v0 = star_volume(s_alpha_body(f, 1.0, q))
    v1 = star_volume(s_alpha_body(apply_affine(f, phi), 1.0, q))
    assert v1 == pytest.approx(v0, rel=2e-2)


# gauges and volumes -----------------------------------------------------


@settings(max_examples=50, deadline=None)
@given(st.floats(-5, 5), st.floats(-5, 5), st.floats(0.01, 100))
def test_gauge_ball_and_homogeneity(x, y, c):
    q = sphere_quadrature(2, 64)
    ball = ball_body(q)
    z = np.array([x, y])
    assert gauge(ball, z) == pytest.approx(np.linalg.norm(z), rel=1e-12, abs=1e-300)
    e = linear_image(q, np.diag([2.0, 0.5]))
    assert gauge(e, c * z) == pytest.approx(c * gauge(e, z), rel=1e-12, abs=1e-300)


def test_gauge_of_zero():
    assert gauge(ball_body(sphere_quadrature(2, 8)), np.zeros(2)) == 0.0


def test_gauge_ellipse():
    q = sphere_quadrature(2, 256)
    phi = np.diag([2.0, 0.5])
    e = linear_image(q, phi)
    rng = np.random.default_rng(0)
    Z = rng.normal(size=(200, 2))
    exact = np.linalg.norm(Z @ np.linalg.inv(phi).T, axis=1)
    assert np.max(np.abs(gauge(e, Z) / exact - 1)) < 1e-2


def test_gauge_three_dimensions():
    q = sphere_quadrature(3)
    assert gauge(ball_body(q, 2.0), np.array([0.3, -0.4, 1.2])) == pytest.approx(0.65, rel=1e-12)


def test_volumes():
    assert abs(star_volume(ball_body(sphere_quadrature(2, 256))) - math.pi) < 1e-10
    e = linear_image(sphere_quadrature(2, 512), [[2.0, 0.0], [0.0, 0.5]])
    assert abs(star_volume(e) - math.pi) < 1e-4
    assert star_volume(ball_body(sphere_quadrature(3))) == pytest.approx(4 * math.pi / 3, rel=1e-10)


def test_with_volume_and_scaled():
    q = sphere_quadrature(2, 32)
    b = body_from_function(q, lambda u: 1 + 0.2 * u[:, 0] ** 2)
    assert star_volume(b.with_volume(1.0)) == pytest.approx(1.0, rel=1e-12)
    assert star_volume(b.scaled(2.0)) == pytest.approx(4 * star_volume(b), rel=1e-12)


def test_flagged_nodes_count_as_zero_volume():
    q = sphere_quadrature(2, 4)
    b = StarBody(q, np.array([1.0, 1.0, 1.0, 1.0]), flags=np.array([True, False, False, False]))
    assert star_volume(b) == pytest.approx(0.75 * math.pi, rel=1e-12)


def test_body_csv_export():
    b = ball_body(sphere_quadrature(2, 4))
    lines = b.to_csv().strip().splitlines()
    assert lines[0] == "u1,u2,weight,rho,flag" and len(lines) == 5
