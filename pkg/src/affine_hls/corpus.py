"""The fixed test corpus.

Every entry builds a function at a requested resolution ``m`` (cells per
axis for grids, knots for radial profiles). Entries are deterministic; the
random-body helpers take an explicit seed. Bump ``CORPUS_VERSION`` whenever
an entry changes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bodies import StarBody, SphereQuadrature
from .grid import (
    ExtremizerSpec,
    Family,
    GridFunction,
    RadialShape,
    make_extremizer,
    radial_radii,
)

__all__ = ["CORPUS_VERSION", "CorpusEntry", "CORPUS", "get_entry", "random_star_body", "random_grid_function"]

CORPUS_VERSION = "1"


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    n: int
    kind: str  # "grid" or "radial"
    description: str
    tags: tuple
    builder: object

    def build(self, m: int):
        return self.builder(m)

    def supports(self, chain: str) -> bool:
        if chain == "affine_log_hls":
            return "l1" in self.tags
        if chain == "beckner":
            return self.n == 1 or self.kind == "grid"
        return True


def _grid(fn, n, R, supersample=1):
    return lambda m: GridFunction.from_callable(fn, n, R, m, supersample=supersample)


def _gauss(x, center=0.0, inv=None):
    y = x - center
    if inv is not None:
        y = y @ np.asarray(inv).T
    return np.exp(-np.pi * np.sum(y * y, axis=-1))


def _bump(x):
    r2 = np.sum(x * x, axis=-1)
    out = np.zeros_like(r2)
    inside = r2 < 1.0
    out[inside] = np.exp(-1.0 / (1.0 - r2[inside]))
    return out


def _radial(spec, r_max=1.0e3):
    return lambda m: make_extremizer(spec, RadialShape(spec.n, radial_radii(m, 1.0, r_max)))


_SHEAR = np.array([[1.0, 1.0], [0.0, 1.0]])
_ANISO = np.diag([2.0, 0.5])

_ENTRIES = [
    CorpusEntry("gauss1", 1, "grid", "exp(-pi x^2)", ("l1", "smooth"),
                _grid(_gauss, 1, 6.0)),
    CorpusEntry("box1", 1, "grid", "indicator of [0, 1]", ("l1", "indicator"),
                _grid(lambda x: ((x[..., 0] > 0) & (x[..., 0] < 1)).astype(float), 1, 2.0)),
    CorpusEntry("bump1", 1, "grid", "exp(-1/(1-x^2)) on (-1, 1)", ("l1", "smooth"),
                _grid(_bump, 1, 2.0)),
    CorpusEntry("twobump1", 1, "grid", "two Gaussians of unequal width at -1.5 and 1.5", ("l1", "smooth"),
                _grid(lambda x: _gauss(x, -1.5) + 0.5 * _gauss(2.0 * x, 1.5 * 2.0), 1, 6.0)),
    CorpusEntry("gauss2", 2, "grid", "exp(-pi |x|^2)", ("l1", "smooth", "radial-like"),
                _grid(_gauss, 2, 4.0)),
    CorpusEntry("aniso2", 2, "grid", "exp(-pi |A^-1 x|^2), A = diag(2, 1/2)", ("l1", "smooth"),
                _grid(lambda x: _gauss(x, inv=np.linalg.inv(_ANISO)), 2, 5.0)),
    CorpusEntry("sheared2", 2, "grid", "exp(-pi |S^-1 x|^2), S = [[1, 1], [0, 1]]", ("l1", "smooth"),
                _grid(lambda x: _gauss(x, inv=np.linalg.inv(_SHEAR)), 2, 5.0)),
    CorpusEntry("disk2", 2, "grid", "indicator of the unit disk (4x supersampled)", ("l1", "indicator", "radial-like"),
                _grid(lambda x: (np.sum(x * x, axis=-1) < 1.0).astype(float), 2, 2.0, supersample=4)),
    CorpusEntry("square2", 2, "grid", "indicator of [-1/2, 1/2]^2 (4x supersampled)", ("l1", "indicator"),
                _grid(lambda x: np.all(np.abs(x) < 0.5, axis=-1).astype(float), 2, 1.5, supersample=4)),
    CorpusEntry("bimodal2", 2, "grid", "two Gaussians at (-1, 0) and (1, 0.5)", ("l1", "smooth"),
                _grid(lambda x: _gauss(x, np.array([-1.0, 0.0])) + 0.7 * _gauss(x, np.array([1.0, 0.5])), 2, 4.0)),
    CorpusEntry("translated2", 2, "grid", "exp(-pi |x - (0.7, -0.4)|^2)", ("l1", "smooth"),
                _grid(lambda x: _gauss(x, np.array([0.7, -0.4])), 2, 4.0)),
    CorpusEntry("hls1_a05", 1, "radial", "(1 + x^2)^(-3/4), HLS extremizer n=1, alpha=1/2", ("l1", "radial", "extremizer:hls:0.5"),
                _radial(ExtremizerSpec(1, Family.HLS, 0.5, normalize=None))),
    CorpusEntry("hls2_a1", 2, "radial", "(1 + |x|^2)^(-3/2), HLS extremizer n=2, alpha=1", ("l1", "radial", "extremizer:hls:1"),
                _radial(ExtremizerSpec(2, Family.HLS, 1.0, normalize=None))),
    CorpusEntry("loghls2", 2, "radial", "(1 + |x|^2)^(-2), log-HLS extremizer n=2", ("l1", "radial", "extremizer:log_hls"),
                _radial(ExtremizerSpec(2, Family.LOG_HLS, normalize="l1"))),
    CorpusEntry("logsob1", 1, "radial", "(1 + x^2)^(-1/2), log-Sobolev extremizer n=1", ("radial", "extremizer:log_sob"),
                _radial(ExtremizerSpec(1, Family.LOG_SOB, normalize="l2"))),
    CorpusEntry("logsob2", 2, "radial", "(1 + |x|^2)^(-1), log-Sobolev extremizer n=2", ("radial", "extremizer:log_sob"),
                _radial(ExtremizerSpec(2, Family.LOG_SOB, normalize="l2"))),
]

CORPUS = {e.name: e for e in _ENTRIES}


def get_entry(name: str) -> CorpusEntry:
    try:
        return CORPUS[name]
    except KeyError:
        raise KeyError(f"unknown corpus entry {name!r}; known: {', '.join(CORPUS)}") from None


def random_star_body(quad: SphereQuadrature, seed: int, amplitude: float = 0.4, modes: int = 4) -> StarBody:
    """Smooth positive random body ``rho = exp(sum of low harmonics)`` (n = 2, 3)."""
    rng = np.random.default_rng(seed)
    U = quad.nodes
    if quad.n == 1:
        return StarBody(quad, np.exp(amplitude * rng.standard_normal(2)), f"random(seed={seed})")
    acc = np.zeros(quad.size)
    for k in range(1, modes + 1):
        v = rng.standard_normal(quad.n)
        v /= np.linalg.norm(v)
        phase = rng.uniform(0, 2 * np.pi)
        acc += amplitude / k * np.cos(k * np.arccos(np.clip(U @ v, -1.0, 1.0)) + phase)
    return StarBody(quad, np.exp(acc), f"random(seed={seed})")


def random_grid_function(n: int, m: int, seed: int, half_width: float = 3.0, blobs: int = 3) -> GridFunction:
    """Sum of randomly placed and shaped Gaussian blobs on a grid."""
    rng = np.random.default_rng(seed)
    centres = rng.uniform(-1.0, 1.0, size=(blobs, n))
    scales = rng.uniform(0.4, 1.0, size=(blobs, n))
    weights = rng.uniform(0.3, 1.0, size=blobs)

    def fn(x):
        out = np.zeros(x.shape[:-1])
        for c, s, w in zip(centres, scales, weights):
            y = (x - c) / s
            out += w * np.exp(-np.pi * np.sum(y * y, axis=-1))
        return out

    return GridFunction.from_callable(fn, n, half_width, m)
