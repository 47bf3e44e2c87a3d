"""Neural-network operators built from sigmoidal activations.

Kernels, discrete and continuous moments, the operators F_n and F~_n with
their derivatives, error bounds and convergence studies.
"""

from .analysis import (
    convergence_study,
    fit_order,
    modulus_of_continuity,
    scaled_residual,
    sup_error,
    theoretical_bound_simultaneous,
    theoretical_bound_voronovskaja,
    voronovskaja_hypotheses,
    voronovskaja_study,
)
from .config import RunConfig, load_config
from .density import DensityKernel, effective_support_radius, make_kernel, phi
from .errors import *  # noqa: F401,F403
from .moments import (
    MomentQuery,
    MomentReport,
    absolute_moment,
    algebraic_moment,
    fourier_moment,
    fourier_transform,
    m0_defect,
    telescoped_m0,
    truncated_moment,
    verify_strang_fix,
)
from .operators import (
    GridSample,
    nn_operator,
    nn_operator_derivative,
    nn_operator_simplified,
    sample_function,
)
from .sigmoids import Sigmoidal, catalog, eval_sigmoid, fit_decay_constants, get_sigmoid, verify_axioms
from .testfunctions import TestFunction, get_function

__version__ = "0.1.0"
