"""qgraphlab: spectral statistics of quantum graphs and coined quantum walks.

Build unitary propagators on directed graphs, map them to their classical
stochastic dynamics, and measure form factors, level spacings, spectral gaps
and walk spreading over reproducible seeded ensembles.
"""

from .classical import (
    GapReport,
    GapScalingFit,
    StochasticMatrix,
    diffusion_spectrum_prediction,
    diffusive_transition,
    gap_scaling_report,
    perron_check,
    spectral_gap,
    to_stochastic,
)
from .colouring import (
    EdgeColouring,
    GroupSpec,
    colour_from_group,
    cyclic_group,
    explicit_group,
    random_latin_colouring,
    ring_colouring,
    symmetric_group,
    verify_colouring,
)
from .ensembles import EnsembleSpec, FormFactorCurve, form_factor, nns_ensemble
from .graphs import (
    DegreeProfile,
    Digraph,
    adjacency_matrix,
    build_digraph,
    degree_profile,
    is_quantisable,
    line_digraph,
    make_complete,
    make_lattice,
    make_star,
)
from .propagator import (
    Coin,
    Propagator,
    block_diagonalise_cyclic,
    build_propagator,
    build_regular_propagator,
    build_star_propagator,
    fourier_coin,
    ks_vertex_scattering,
    star_scattering,
)
from .qwalk import (
    PositionDistribution,
    ShiftRule,
    WalkState,
    classical_walk_reference,
    disordered_rule,
    hadamard_coin,
    run_walk,
    walk_spread,
    walk_step,
)
from .spectral import (
    EigenphaseSet,
    SpacingHistogram,
    diagonal_term,
    eigenphases,
    nns,
    periodic_orbit_trace,
    rmt_reference,
    star_formfactor_reference,
    trace_power,
)

__version__ = "0.1.0"
