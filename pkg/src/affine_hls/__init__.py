"""Numerics for the affine Hardy-Littlewood-Sobolev and logarithmic Sobolev inequalities.

Modules
-------
specfun      Gamma-family functions and sharp constants.
grid         Grid functions, radial profiles, norms, entropies, rearrangements, extremizers.
correlation  Directional autocorrelation and difference-correlation curves.
bodies       Sphere quadratures and star bodies built from correlation curves.
dualmix      Dual mixed volumes and their Holder/Jensen bounds.
kernels      Riesz, logarithmic and fractional energies, and Fourier-side moments.
harness      Chain verifications, limit sweeps and invariance checks.
corpus       The fixed, versioned test corpus.
cli          Batch driver.
"""

from .bodies import (
    SphereQuadrature,
    StarBody,
    ball_body,
    linear_image,
    polar_projection_body,
    r_zero_body,
    radial_mean_body,
    s_alpha_body,
    sphere_quadrature,
    star_volume,
)
from .correlation import autocorrelation, correlation_bundle, difference_correlation
from .corpus import CORPUS, CORPUS_VERSION
from .dualmix import dual_mixed_volume, dual_mixed_volume_log
from .grid import (
    ExtremizerSpec,
    Family,
    GridFunction,
    RadialProfile,
    apply_affine,
    entropy_l1,
    entropy_l2,
    lp_norm,
    make_extremizer,
    schwarz_symmetrize,
)
from .harness import (
    ChainReport,
    verify_affine_frac_l2,
    verify_affine_hls,
    verify_affine_log_hls,
    verify_affine_log_sobolev,
    verify_beckner,
)
from .kernels import fractional_seminorm, log_energy, riesz_energy
from .specfun import (
    hls_constant,
    log_hls_constant,
    log_sobolev_constant,
    sharp_constants,
    unit_ball_volume,
)

__version__ = "0.1.0"

__all__ = [
    "SphereQuadrature", "StarBody", "ball_body", "linear_image", "polar_projection_body", "r_zero_body",
    "radial_mean_body", "s_alpha_body", "sphere_quadrature", "star_volume",
    "autocorrelation", "correlation_bundle", "difference_correlation",
    "CORPUS", "CORPUS_VERSION",
    "dual_mixed_volume", "dual_mixed_volume_log",
    "ExtremizerSpec", "Family", "GridFunction", "RadialProfile", "apply_affine", "entropy_l1", "entropy_l2",
    "lp_norm", "make_extremizer", "schwarz_symmetrize",
    "ChainReport", "verify_affine_frac_l2", "verify_affine_hls", "verify_affine_log_hls",
    "verify_affine_log_sobolev", "verify_beckner",
    "fractional_seminorm", "log_energy", "riesz_energy",
    "hls_constant", "log_hls_constant", "log_sobolev_constant", "sharp_constants", "unit_ball_volume",
]
