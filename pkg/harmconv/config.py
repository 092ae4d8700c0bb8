import multiprocessing
import os
import warnings
from dataclasses import dataclass

# Coefficient trimming, relative to the largest coefficient modulus.
TRIM_RELATIVE = 1e-13

# Strictness margin of the |a_0| < |a_n| test, relative to the largest coefficient modulus.
DELTA_COHN = 1e-12

# Half-width of the band around |z| = 1 where a root counts as "on" the circle.
DELTA_ON = 1e-9

# Slack on grid maxima of |dilatation|.
DELTA_GRID = 1e-6

# Root oracle contract.
ROOT_RESIDUAL = 1e-10
ROOT_STEP_TOL = 1e-15
ROOT_MAX_ITERATION = 500
ROOT_METHOD = "aberth"

# Oracle roots closer than this (relative to the largest modulus) are one repeated root.
ROOT_CLUSTER_TOL = 1e-5

# Exactness check on the constant term removed by the Cohn division by z.
COHN_DIVISION_TOL = 1e-10

# Taylor truncation orders.
DEFAULT_TRUNCATION = 64
SERIES_ORACLE_ORDER = 400
SERIES_EVAL_TOL = 1e-13
MAX_EVAL_ORDER = 1 << 17

# Closed forms of the half-plane map refuse points this close to z = 1.
POLE_BAND = 1e-8

# The pointwise H'/G' form of the convolution dilatation refuses denominators below this.
EVAL_DENOMINATOR_TOL = 1e-14

# Crossing deadband of the horizontal-line sampler.
EPS_SIGN = 1e-12

# Algebraic identities of the closed-form dilatation, relative to the coefficient scale.
SELF_INVERSIVE_TOL = 1e-10
DEGENERATE_TOL = 1e-9

# Parameters this close to a special case of a proof transcript take the special branch.
SPECIAL_CASE_TOL = 1e-9


@dataclass(frozen=True)
class GridSpec:
    """Polar sample grid of the closed disk of radius ``max_radius``."""
    radii: int = 60
    angles: int = 120
    max_radius: float = 0.995


VERIFY_GRID = GridSpec()
SCAN_GRID = GridSpec(radii=24, angles=48)
WITNESS_GRID = GridSpec(radii=200, angles=720, max_radius=0.999)

# (beta, theta) grid of the scans: beta in [0.1, pi - 0.1], theta in [0, 2 pi).
BETA_SAMPLES = 24
THETA_SAMPLES = 24


def num_workers(max_workers=None):
    """
    Number of worker processes for data-parallel scans.

    An explicit ``max_workers`` wins; otherwise HARMCONV_THREADS is read, and
    all cores are used when it is unset.
    """
    if max_workers is not None:
        return max(1, int(max_workers))

    hint = os.environ.get("HARMCONV_THREADS")
    if hint:
        try:
            return max(1, int(hint))
        except ValueError:
            warnings.warn(f"HARMCONV_THREADS={hint!r} is not an integer, using all cores.")

    return multiprocessing.cpu_count()
