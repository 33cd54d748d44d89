"""Hardy spaces over ball quasi-Banach function spaces, on periodic grids.

Maximal-function and Riesz-transform characterizations evaluated
numerically on the torus ``[0, L)^n`` as a stand-in for ``R^n``.
"""

from .grid import (
    Grid,
    GridFunction,
    Spectrum,
    TLadder,
    discrete_lp_norm,
    forward_spectrum,
    geometric_ladder,
    inverse_spectrum,
    make_grid,
    sample,
    uniform_ladder,
)
from .operators import (
    HalfSpaceField,
    RieszPath,
    conjugate_poisson_extend,
    poisson_extend,
    poisson_kernel,
    riesz_compose,
    riesz_transform,
    riesz_truncated_oracle,
)
from .maximal import hl_maximal, nontangential_maximal, petree_maximal, poisson_maximal, radial_maximal
from .spaces import (
    Lebesgue,
    LocalHerz,
    Lorentz,
    MixedHerz,
    MixedLebesgue,
    Morrey,
    PowerLaw,
    Sampled,
    WeightedLebesgue,
    muckenhoupt_weight,
    quasi_norm,
    range_validator,
)
from .halfspace import harmonic_vector_from, tensor_field_from
from .hardy import (
    HardyConfig,
    equivalence_experiment,
    hardy_norm,
    hardy_norm_poisson,
    make_test_family,
    riesz_hardy_norm,
    vector_hardy_norm,
)

__version__ = "0.1.0"
