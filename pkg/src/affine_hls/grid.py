"""Representations of nonnegative functions on R^n.

Two representations are used throughout the package:

``GridFunction``
    Cell-centred samples on the box ``[-R, R]^n`` with ``m`` cells per axis.
    Integrals use the midpoint rule. Correlation and energy routines read the
    samples as the cell-wise constant function ``f_h``, so every derived
    quantity belongs to one genuine function.
``RadialProfile``
    Samples ``r -> f(r)`` of a radially symmetric function on an increasing
    radius grid, linearly interpolated, with either a zero tail or a power-law
    tail ``f(r_k) (r / r_k)^(-q)`` beyond the last radius.
"""

from __future__ import annotations

import csv
import enum
import io
import math
import struct
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage
from scipy.special import roots_legendre

from .specfun import unit_ball_volume

__all__ = [
    "GridFunction",
    "RadialProfile",
    "NonIntegrableError",
    "Family",
    "ExtremizerSpec",
    "GridShape",
    "RadialShape",
    "radial_radii",
    "lp_norm",
    "entropy_l1",
    "entropy_l2",
    "schwarz_symmetrize",
    "rearrange_on_grid",
    "make_extremizer",
    "apply_affine",
]

_HEADER = struct.Struct("<4sidi")
_MAGIC = b"AHGF"


class NonIntegrableError(ValueError):
    """An integral over a declared tail model diverges."""


class GridFunction:
    """Nonnegative cell-centred samples on ``[-R, R]^n``.

    Parameters
    ----------
    values : array_like
        Array of shape ``(m,) * n`` with ``n`` in ``{1, 2, 3}``.
    half_width : float
        ``R``, so the cell size is ``h = 2R/m``.
    """

    def __init__(self, values, half_width: float):
        v = np.array(values, dtype=float)
        if v.ndim not in (1, 2, 3):
            raise ValueError(f"grid functions need 1 <= n <= 3, got an array with ndim={v.ndim}")
        if len(set(v.shape)) != 1:
            raise ValueError(f"grid must be cubic, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("grid values must be finite")
        if np.any(v < 0):
            raise ValueError("grid values must be nonnegative")
        if not half_width > 0:
            raise ValueError(f"half_width must be positive, got {half_width}")
        v.setflags(write=False)
        self.values = v
        self.half_width = float(half_width)
        self._cache: dict = {}

    @property
    def n(self) -> int:
        return self.values.ndim

    @property
    def m(self) -> int:
        return self.values.shape[0]

    @property
    def h(self) -> float:
        return 2.0 * self.half_width / self.m

    @property
    def cell_volume(self) -> float:
        return self.h**self.n

    def axis(self) -> np.ndarray:
        """Cell centres along one axis."""
        return -self.half_width + (np.arange(self.m) + 0.5) * self.h

    def points(self) -> np.ndarray:
        """Cell centres, shape ``(m,)*n + (n,)``."""
        ax = self.axis()
        return np.stack(np.meshgrid(*([ax] * self.n), indexing="ij"), axis=-1)

    @classmethod
    def from_callable(cls, fn, n: int, half_width: float, m: int, supersample: int = 1):
        """Sample ``fn`` at cell centres.

        ``fn`` maps an array of points of shape ``(..., n)`` to values of shape
        ``(...)``. With ``supersample = s > 1`` each cell value is the mean of
        ``fn`` over an ``s^n`` sub-lattice, which is the cell average of an
        indicator up to ``O(h/s)``.
        """
        h = 2.0 * half_width / m
        if supersample <= 1:
            ax = -half_width + (np.arange(m) + 0.5) * h
            pts = np.stack(np.meshgrid(*([ax] * n), indexing="ij"), axis=-1)
            return cls(fn(pts), half_width)
        s = int(supersample)
        sub = -half_width + (np.arange(m * s) + 0.5) * (h / s)
        pts = np.stack(np.meshgrid(*([sub] * n), indexing="ij"), axis=-1)
        fine = np.asarray(fn(pts), dtype=float)
        shape = []
        for _ in range(n):
            shape += [m, s]
        fine = fine.reshape(shape)
        return cls(fine.mean(axis=tuple(range(1, 2 * n, 2))), half_width)

    def with_values(self, values) -> "GridFunction":
        return GridFunction(values, self.half_width)

    def scaled(self, c: float) -> "GridFunction":
        return GridFunction(self.values * c, self.half_width)

    def integral(self) -> float:
        return float(self.values.sum() * self.cell_volume)

    def coarsen(self) -> "GridFunction":
        """Average 2^n blocks; the half-width is unchanged and ``m`` halves."""
        if self.m % 2:
            raise ValueError("coarsening needs an even number of cells per axis")
        k = self.m // 2
        shape = []
        for _ in range(self.n):
            shape += [k, 2]
        v = self.values.reshape(shape).mean(axis=tuple(range(1, 2 * self.n, 2)))
        return GridFunction(v, self.half_width)

    def refine(self) -> "GridFunction":
        """Split each cell into 2^n equal cells (same function ``f_h``)."""
        v = self.values
        for ax in range(self.n):
            v = np.repeat(v, 2, axis=ax)
        return GridFunction(v, self.half_width)

    def support_extent(self) -> np.ndarray:
        """Per-axis length of the bounding box of the nonzero cells."""
        nz = np.nonzero(self.values)
        if len(nz[0]) == 0:
            return np.zeros(self.n)
        return np.array([(ix.max() - ix.min() + 1) * self.h for ix in nz])

    def __repr__(self):
        return f"GridFunction(n={self.n}, m={self.m}, R={self.half_width:g})"

    # serialization -------------------------------------------------------
    def to_bytes(self) -> bytes:
        head = _HEADER.pack(_MAGIC, self.n, self.half_width, self.m)
        return head + np.ascontiguousarray(self.values, dtype="<f8").tobytes(order="C")

    @classmethod
    def from_bytes(cls, blob: bytes) -> "GridFunction":
        if len(blob) < _HEADER.size:
            raise ValueError("truncated grid-function header")
        magic, n, half_width, m = _HEADER.unpack_from(blob)
        if magic != _MAGIC:
            raise ValueError("not a grid-function blob")
        payload = np.frombuffer(blob, dtype="<f8", offset=_HEADER.size)
        if payload.size != m**n:
            raise ValueError(f"payload holds {payload.size} values, expected {m**n}")
        return cls(payload.reshape((m,) * n), half_width)

    def save(self, path) -> None:
        with open(path, "wb") as fh:
            fh.write(self.to_bytes())

    @classmethod
    def load(cls, path) -> "GridFunction":
        with open(path, "rb") as fh:
            return cls.from_bytes(fh.read())

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([f"x{i + 1}" for i in range(self.n)] + ["value"])
        pts = self.points().reshape(-1, self.n)
        for p, v in zip(pts, self.values.reshape(-1)):
            w.writerow([repr(float(c)) for c in p] + [repr(float(v))])
        return buf.getvalue()


_GAUSS4 = roots_legendre(4)


def _gauss_on_segments(edges, order=4):
    """Composite Gauss-Legendre nodes and weights on consecutive segments."""
    x, w = _GAUSS4 if order == 4 else roots_legendre(order)
    a = edges[:-1, None]
    b = edges[1:, None]
    nodes = 0.5 * (a + b) + 0.5 * (b - a) * x[None, :]
    weights = 0.5 * (b - a) * w[None, :]
    return nodes.ravel(), weights.ravel()


class RadialProfile:
    """Radial function ``x -> f(|x|)`` on R^n given by samples of ``f``.

    Parameters
    ----------
    n : int
        Ambient dimension.
    radii : array_like
        Increasing radii starting at 0.
    values : array_like
        Nonnegative samples at ``radii``.
    tail_exponent : float, optional
        If given, ``f(r) = values[-1] * (r / radii[-1]) ** -tail_exponent`` for
        ``r > radii[-1]``; otherwise ``f`` vanishes there.
    """

    def __init__(self, n: int, radii, values, tail_exponent: float | None = None):
        r = np.array(radii, dtype=float)
        v = np.array(values, dtype=float)
        if r.ndim != 1 or r.shape != v.shape or r.size < 2:
            raise ValueError("radii and values must be 1-D arrays of equal length >= 2")
        if r[0] != 0.0 or np.any(np.diff(r) <= 0):
            raise ValueError("radii must start at 0 and increase strictly")
        if not np.all(np.isfinite(v)) or np.any(v < 0):
            raise ValueError("profile values must be finite and nonnegative")
        if tail_exponent is not None and not tail_exponent > 0:
            raise ValueError("tail exponent must be positive")
        r.setflags(write=False)
        v.setflags(write=False)
        self.n = int(n)
        self.radii = r
        self.values = v
        self.tail_exponent = None if tail_exponent is None else float(tail_exponent)
        self._cache: dict = {}

    @property
    def r_max(self) -> float:
        return float(self.radii[-1])

    @property
    def m(self) -> int:
        return self.radii.size - 1

    @property
    def has_tail(self) -> bool:
        return self.tail_exponent is not None and self.values[-1] > 0

    def __call__(self, r) -> np.ndarray:
        r = np.abs(np.asarray(r, dtype=float))
        out = np.interp(r, self.radii, self.values, right=0.0)
        if self.has_tail:
            far = r > self.r_max
            if np.any(far):
                out = np.where(far, self.values[-1] * (np.maximum(r, self.r_max) / self.r_max) ** -self.tail_exponent, out)
        return out

    def scaled(self, c: float) -> "RadialProfile":
        return RadialProfile(self.n, self.radii, self.values * c, self.tail_exponent)

    def coarsen(self) -> "RadialProfile":
        """Keep every other sample (always keeping the last radius)."""
        idx = np.arange(0, self.radii.size, 2)
        if idx[-1] != self.radii.size - 1:
            idx = np.append(idx, self.radii.size - 1)
        return RadialProfile(self.n, self.radii[idx], self.values[idx], self.tail_exponent)

    def quadrature(self, order: int = 4):
        """Nodes and weights for ``int_0^{r_k} F(r) dr`` (composite Gauss)."""
        key = ("quad", order)
        if key not in self._cache:
            self._cache[key] = _gauss_on_segments(self.radii, order)
        return self._cache[key]

    def tail_quadrature(self, panels: int = 48, order: int = 4):
        """Nodes and weights for ``int_{r_k}^{r_k 2^panels} F(r) dr`` on geometric panels."""
        if not self.has_tail:
            return np.empty(0), np.empty(0)
        edges = self.r_max * 2.0 ** np.arange(panels + 1)
        return _gauss_on_segments(edges, order)

    def to_grid(self, half_width: float, m: int) -> GridFunction:
        """Sample the radial function at the cell centres of a grid."""
        return GridFunction.from_callable(lambda x: self(np.linalg.norm(x, axis=-1)), self.n, half_width, m)

    def __repr__(self):
        tail = "zero" if self.tail_exponent is None else f"r^-{self.tail_exponent:g}"
        return f"RadialProfile(n={self.n}, k={self.m}, r_max={self.r_max:g}, tail={tail})"


def radial_radii(m: int, scale: float = 1.0, r_max: float = 1.0e3) -> np.ndarray:
    """``m + 1`` radii in ``[0, r_max]``, uniform in ``asinh(r / scale)``."""
    delta = math.asinh(r_max / scale) / m
    return scale * np.sinh(delta * np.arange(m + 1))


# norms and entropies ------------------------------------------------------


def _radial_power_integral(f: RadialProfile, p: float):
    """``n w_n int_0^inf f(r)^p r^(n-1) dr`` including the analytic tail."""
    r, w = f.quadrature()
    body = float(np.sum(w * f(r) ** p * r ** (f.n - 1)))
    tail = 0.0
    if f.has_tail:
        c, rk, q = f.values[-1], f.r_max, f.tail_exponent
        if p * q <= f.n:
            raise NonIntegrableError(f"f^{p} is not integrable: tail r^-{q} in dimension {f.n}")
        tail = c**p * rk**f.n / (p * q - f.n)
    return f.n * unit_ball_volume(f.n) * (body + tail)


def lp_norm(f, p: float) -> float:
    """``(int |f|^p)^(1/p)`` for a grid function or radial profile."""
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    if isinstance(f, GridFunction):
        return float((np.sum(f.values**p) * f.cell_volume) ** (1.0 / p))
    if isinstance(f, RadialProfile):
        return _radial_power_integral(f, p) ** (1.0 / p)
    raise TypeError(f"unsupported function type {type(f).__name__}")


def _xlogx_weighted(v, p):
    out = np.zeros_like(v, dtype=float)
    pos = v > 0
    out[pos] = v[pos] ** p * np.log(v[pos])
    return out


def _entropy(f, p):
    if isinstance(f, GridFunction):
        return float(np.sum(_xlogx_weighted(f.values, p)) * f.cell_volume)
    if isinstance(f, RadialProfile):
        r, w = f.quadrature()
        body = float(np.sum(w * _xlogx_weighted(f(r), p) * r ** (f.n - 1)))
        tail = 0.0
        if f.has_tail:
            c, rk, q = f.values[-1], f.r_max, f.tail_exponent
            k = p * q - f.n
            if k <= 0:
                raise NonIntegrableError(f"f^{p} log f is not integrable: tail r^-{q} in dimension {f.n}")
            tail = c**p * rk**f.n * (math.log(c) / k - q / k**2)
        return f.n * unit_ball_volume(f.n) * (body + tail)
    raise TypeError(f"unsupported function type {type(f).__name__}")


def entropy_l1(f) -> float:
    """``int f log f`` with ``0 log 0 = 0``."""
    return _entropy(f, 1.0)


def entropy_l2(f) -> float:
    """``int f^2 log f`` with ``0 log 0 = 0``."""
    return _entropy(f, 2.0)


# symmetrization -----------------------------------------------------------


def _refill_order(f: GridFunction):
    radius = np.linalg.norm(f.points(), axis=-1).ravel()
    cells = np.argsort(radius, kind="stable")
    ranked = np.sort(f.values.ravel(), kind="stable")[::-1]
    return cells, ranked


def rearrange_on_grid(f: GridFunction) -> GridFunction:
    """Discrete symmetric decreasing rearrangement on the same grid.

    Cell values are sorted in decreasing order and written into the cells in
    order of increasing distance from the origin (ties by cell index), so the
    result is exactly equimeasurable with ``f``.
    """
    cells, ranked = _refill_order(f)
    out = np.empty(f.values.size)
    out[cells] = ranked
    return f.with_values(out.reshape(f.values.shape))


def schwarz_symmetrize(f: GridFunction) -> RadialProfile:
    """Symmetric decreasing rearrangement of ``f_h`` as a radial profile.

    The j-th largest cell value sits at the radius of the ball whose volume is
    ``(j - 1/2) h^n``, so each superlevel set has the measure of the matching
    cell count up to half a cell.
    """
    ranked = np.sort(f.values.ravel(), kind="stable")[::-1]
    ranked = ranked[ranked > 0]
    if ranked.size == 0:
        return RadialProfile(f.n, [0.0, f.h], [0.0, 0.0])
    omega = unit_ball_volume(f.n)
    vol = f.cell_volume
    j = np.arange(1, ranked.size + 1)
    mids = ((j - 0.5) * vol / omega) ** (1.0 / f.n)
    edge = (ranked.size * vol / omega) ** (1.0 / f.n)
    radii = np.concatenate([[0.0], mids, [edge]])
    values = np.concatenate([[ranked[0]], ranked, [ranked[-1]]])
    keep = np.ones(radii.size, dtype=bool)
    # drop interior nodes inside constant runs (the interpolant is unchanged)
    flat = (values[1:-1] == values[:-2]) & (values[1:-1] == values[2:])
    keep[1:-1] = ~flat
    return RadialProfile(f.n, radii[keep], values[keep])


# extremizers --------------------------------------------------------------


class Family(enum.Enum):
    """Exponent families ``a (1 + |phi(x - x0)|^2)^(-p)``."""

    HLS = "hls"  # p = (n + alpha) / 2
    LOG_HLS = "log_hls"  # p = n
    LOG_SOB = "log_sob"  # p = n / 2


@dataclass(frozen=True)
class ExtremizerSpec:
    n: int
    family: Family
    alpha: float | None = None
    amplitude: float = 1.0
    phi: np.ndarray | None = None
    x0: np.ndarray | None = None
    normalize: str | None = "l2"  # "l1", "l2" or None

    def __post_init__(self):
        if self.family is Family.HLS and (self.alpha is None or not 0 < self.alpha < self.n):
            raise ValueError(f"HLS family needs alpha in (0, {self.n}), got {self.alpha}")
        if self.normalize not in (None, "l1", "l2"):
            raise ValueError(f"normalize must be 'l1', 'l2' or None, got {self.normalize!r}")
        phi = self.phi_matrix
        if phi.shape != (self.n, self.n):
            raise ValueError(f"phi must be {self.n}x{self.n}")
        if abs(np.linalg.det(phi)) < 1e-12:
            raise ValueError("phi must be invertible")

    @property
    def phi_matrix(self) -> np.ndarray:
        return np.eye(self.n) if self.phi is None else np.asarray(self.phi, dtype=float).reshape(self.n, self.n)

    @property
    def shift(self) -> np.ndarray:
        return np.zeros(self.n) if self.x0 is None else np.asarray(self.x0, dtype=float).reshape(self.n)

    @property
    def power(self) -> float:
        if self.family is Family.HLS:
            return (self.n + self.alpha) / 2.0
        if self.family is Family.LOG_HLS:
            return float(self.n)
        return self.n / 2.0


@dataclass(frozen=True)
class GridShape:
    n: int
    half_width: float
    m: int


@dataclass(frozen=True)
class RadialShape:
    n: int
    radii: np.ndarray = field(default_factory=lambda: radial_radii(256))


def make_extremizer(spec: ExtremizerSpec, target):
    """Sample ``a (1 + |phi(x - x0)|^2)^(-p)`` and normalize it.

    ``target`` is a :class:`GridShape` or a :class:`RadialShape`. A radial
    target needs ``x0 = 0`` and ``phi`` a multiple of an orthogonal matrix.
    """
    phi = spec.phi_matrix
    p = spec.power
    if isinstance(target, GridShape):
        if target.n != spec.n:
            raise ValueError("target dimension does not match ExtremizerSpec.n")
        x0 = spec.shift

        def fn(x):
            y = (x - x0) @ phi.T
            return spec.amplitude * (1.0 + np.sum(y * y, axis=-1)) ** -p

        f = GridFunction.from_callable(fn, spec.n, target.half_width, target.m)
    elif isinstance(target, RadialShape):
        if target.n != spec.n:
            raise ValueError("target dimension does not match ExtremizerSpec.n")
        gram = phi.T @ phi
        lam2 = gram[0, 0]
        if not np.allclose(gram, lam2 * np.eye(spec.n), rtol=1e-12, atol=1e-14) or np.any(spec.shift != 0):
            raise ValueError("a radial target needs x0 = 0 and phi = lambda * orthogonal")
        r = np.asarray(target.radii, dtype=float)
        f = RadialProfile(spec.n, r, spec.amplitude * (1.0 + lam2 * r * r) ** -p, tail_exponent=2.0 * p)
    else:
        raise TypeError(f"unsupported target {type(target).__name__}")
    if spec.normalize is None:
        return f
    norm = lp_norm(f, 1.0 if spec.normalize == "l1" else 2.0)
    return f.scaled(1.0 / norm)


def apply_affine(f: GridFunction, phi, x0=None) -> GridFunction:
    """Resample ``x -> f(phi^-1 x - x0)`` on the grid of ``f``.

    ``f`` is read as its multilinear interpolant with zero outside the box. A
    warning is issued when more than 1% of the expected mass
    ``|det phi| int f`` is lost to the box.
    """
    phi = np.asarray(phi, dtype=float).reshape(f.n, f.n)
    det = np.linalg.det(phi)
    if abs(det) < 1e-12:
        raise ValueError("phi must be invertible")
    x0 = np.zeros(f.n) if x0 is None else np.asarray(x0, dtype=float).reshape(f.n)
    pts = f.points().reshape(-1, f.n)
    src = pts @ np.linalg.inv(phi).T - x0
    idx = (src + f.half_width) / f.h - 0.5
    vals = ndimage.map_coordinates(f.values, idx.T, order=1, mode="grid-constant", cval=0.0)
    out = f.with_values(np.maximum(vals, 0.0).reshape(f.values.shape))
    expected = abs(det) * f.integral()
    if expected > 0 and out.integral() < 0.99 * expected:
        warnings.warn(
            f"apply_affine: {100 * (1 - out.integral() / expected):.1f}% of the mass left the box",
            RuntimeWarning,
            stacklevel=2,
        )
    return out
