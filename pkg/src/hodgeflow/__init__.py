"""Weighted simplicial complexes, Hodge Laplacian flows, and optimal weights.

The package builds Vietoris-Rips and explicit simplicial complexes, assembles
weighted Hodge Laplacians, splits chain signals into gradient/harmonic/curl
parts, integrates the heat-type Laplacian flow in closed form, and finds
globally optimal simplex weights (minimum pseudoinverse trace or maximum
smallest nonzero eigenvalue) with an in-package semidefinite solver.
"""

from .complexes import (
    BoundaryMatrix,
    PointCloud,
    Simplex,
    SimplicialComplex,
    boundary_matrix,
    build_complex,
    build_vietoris_rips,
)
from .decomposition import (
    ChainSignal,
    DecompositionReport,
    HodgeComponents,
    hodge_decompose,
    verify_decomposition,
)
from .errors import SolverAccuracyError, ValidationError
from .flows import (
    FlowComponentTrace,
    FlowTrajectory,
    default_time_grid,
    flow_component_trace,
    rk4_flow,
    simulate_flow,
)
from .laplacians import (
    WEIGHT_FLOOR,
    HodgeLaplacian,
    KernelBasis,
    SpectralData,
    WeightAssignment,
    assemble_laplacian,
    kernel_basis,
    lambda_min_nonzero,
    spectrum,
    symmetrize,
    trace_pseudoinverse,
    weighted_inner_product,
)
from .optimize import (
    LAMBDA_OBJECTIVE,
    TRACE_OBJECTIVE,
    WeightOptimizationResult,
    build_lambda_sdp,
    build_trace_sdp,
    optimize_weights,
)
from .sdp import SdpProblem, SdpSolution, SolverOptions, solve_sdp

__all__ = [
    "LAMBDA_OBJECTIVE",
    "TRACE_OBJECTIVE",
    "WEIGHT_FLOOR",
    "BoundaryMatrix",
    "ChainSignal",
    "DecompositionReport",
    "FlowComponentTrace",
    "FlowTrajectory",
    "HodgeComponents",
    "HodgeLaplacian",
    "KernelBasis",
    "PointCloud",
    "SdpProblem",
    "SdpSolution",
    "Simplex",
    "SimplicialComplex",
    "SolverAccuracyError",
    "SolverOptions",
    "SpectralData",
    "ValidationError",
    "WeightAssignment",
    "WeightOptimizationResult",
    "assemble_laplacian",
    "boundary_matrix",
    "build_complex",
    "build_lambda_sdp",
    "build_trace_sdp",
    "build_vietoris_rips",
    "default_time_grid",
    "flow_component_trace",
    "hodge_decompose",
    "kernel_basis",
    "lambda_min_nonzero",
    "optimize_weights",
    "rk4_flow",
    "simulate_flow",
    "solve_sdp",
    "spectrum",
    "symmetrize",
    "trace_pseudoinverse",
    "verify_decomposition",
    "weighted_inner_product",
]

__version__ = "0.1.0"
