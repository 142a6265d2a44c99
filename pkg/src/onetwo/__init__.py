"""Exact and Monte Carlo computations for the 1-2 model on the toroidal
hexagonal lattice: partition functions and correlations through the
dimer/Pfaffian route, enumeration and spin-model cross-checks, a phase
classifier for the critical surface sqrt(a) = sqrt(b) + sqrt(c), and a
Metropolis sampler."""

from .errors import (ConstraintError, DegenerateCouplingError,
                     NearCriticalError, NumericalError, ResourceError,
                     SampleSizeError, SizeError, StateError)
from .lattice import (DecoratedGraph, DimerCover, TorusLattice,
                      build_decorated, build_half_edge, build_torus,
                      config_to_dimer, diagonal_path, signature_words)
from .model import (ModelParams, cluster_decompose, config_weight,
                    enumerate_count, enumerate_partition, exact_correlation,
                    exact_measure, is_valid, states_from_code)
from .pfaffian import (FiniteKernel, InfiniteKernel, KasteleynSystem,
                       block_y, correlation_limit, correlation_pf,
                       kasteleyn_orient, make_kernel, partition_via_pfaffian,
                       path_probability, pfaffian)
from .spectral import (classify_phase, critical_margin, eval_characteristic,
                       torus_intersection, verify_characteristic)
from .transforms import (derive_couplings, correlation_ising, ising_weight,
                         marginal_on_midpoints, marginal_on_vertices,
                         polygon_partition, polygon_twopoint)
from .mcmc import (Chain, cluster_stats, estimate_correlation, init_chain,
                   run_sweeps)

__version__ = "0.1.0"

__all__ = [
    "ConstraintError", "DegenerateCouplingError", "NearCriticalError",
    "NumericalError", "ResourceError", "SampleSizeError", "SizeError",
    "StateError",
    "TorusLattice", "DecoratedGraph", "DimerCover", "build_torus",
    "build_half_edge", "build_decorated", "config_to_dimer",
    "diagonal_path", "signature_words",
    "ModelParams", "cluster_decompose", "config_weight", "enumerate_count",
    "enumerate_partition", "exact_correlation", "exact_measure", "is_valid",
    "states_from_code",
    "KasteleynSystem", "FiniteKernel", "InfiniteKernel", "block_y",
    "correlation_limit", "correlation_pf", "kasteleyn_orient", "make_kernel",
    "partition_via_pfaffian", "path_probability", "pfaffian",
    "classify_phase", "critical_margin", "eval_characteristic",
    "torus_intersection", "verify_characteristic",
    "derive_couplings", "correlation_ising", "ising_weight",
    "marginal_on_midpoints", "marginal_on_vertices", "polygon_partition",
    "polygon_twopoint",
    "Chain", "cluster_stats", "estimate_correlation", "init_chain",
    "run_sweeps",
    "__version__",
]
