"""Dimension-free matrix tail bounds, sampled matrix products, and checks of both.

The flat namespace re-exports the calculators most scripts need; the
submodules (``specmat``, ``tailfn``, ``bounds``, ``applications``, ``rmm``,
``harness``) hold the rest.
"""

from . import applications, bounds, rmm, specmat, tailfn
from .bounds import (
    BernsteinParams,
    SubgaussianParams,
    TailCertificate,
    bernstein_deviation_at_confidence,
    bernstein_tail,
    intrinsic_dimension,
    params_from_moments,
    subgaussian_deviation_at_confidence,
    subgaussian_tail,
)
from .errors import *  # noqa: F401,F403
from .rmm import approx_product, build_plan, sample_size
from .tailfn import TailProbability, g, invert_phi, phi

__version__ = "0.1.0"
