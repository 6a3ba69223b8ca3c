"""Weight optimization for Hodge Laplacians via semidefinite programming.

Two convex programs over simplex-normalized weights: minimizing the trace of
the Laplacian pseudoinverse (through a Schur-complement slack plus a kernel
shift that moves zero eigenvalues off the origin) and maximizing the smallest
nonzero eigenvalue (through an eigenvalue floor plus a free kernel shift).
Lower weights enter the Laplacian only through their reciprocals, so the
reciprocals are the decision variables and carry the simplex normalization;
upper weights enter linearly and are optimized directly. The level-k weights
stay at unity, which keeps the operator symmetric and its kernel independent
of the optimized weights.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .complexes import SimplicialComplex, boundary_matrix
from .errors import SolverAccuracyError, ValidationError
from .laplacians import (
    WEIGHT_FLOOR,
    WeightAssignment,
    assemble_laplacian,
    kernel_basis,
    lambda_min_nonzero,
    trace_pseudoinverse,
)
from .sdp import SdpProblem, SdpSolution, SolverOptions, solve_sdp

TRACE_OBJECTIVE = "trace_pinv"
LAMBDA_OBJECTIVE = "lambda_min"

LOWER_BLOCK = "lower_reciprocal"
UPPER_BLOCK = "upper_weight"
FLOOR_BLOCK = "eigenvalue_floor"
SHIFT_BLOCK = "kernel_shift"


@dataclass(frozen=True)
class WeightOptimizationResult:
    """Optimal weights with the solver certificate and improvement report.

    ``weights`` maps simplex order to the returned weight vector (actual
    weights, reciprocals already undone for the lower level). Objective
    values are direct spectral recomputations at the returned and uniform
    weights; ``sdp_objective`` is the solver's primal value, which for the
    trace program exceeds the direct value by the kernel dimension.
    """

    order: int
    objective: str
    weights: dict[int, np.ndarray]
    objective_at_optimum: float
    objective_at_uniform: float
    improvement_ratio: float
    sdp_objective: float
    floored_counts: dict[int, int]
    solution: SdpSolution


def _setup(
    complex_: SimplicialComplex, k: int, optimize_lower: bool, optimize_upper: bool
):
    if not isinstance(k, (int, np.integer)):
        raise ValidationError("order must be an integer")
    k = int(k)
    top = complex_.dimension
    if not 0 <= k <= top:
        raise ValidationError(f"order {k} outside the complex range 0..{top}")
    if not (optimize_lower or optimize_upper):
        raise ValidationError("select at least one weight level to optimize")
    if optimize_lower and k == 0:
        raise ValidationError("no lower weights exist at order 0")
    if optimize_upper and k == top:
        raise ValidationError(f"no upper weights exist at the top order {top}")
    dk = complex_.num_simplices(k)
    bk = boundary_matrix(complex_, k).toarray().astype(float) if k >= 1 else None
    bk1 = (
        boundary_matrix(complex_, k + 1).toarray().astype(float) if k < top else None
    )
    const = np.zeros((dk, dk))
    if bk is not None and not optimize_lower:
        const += bk.T @ bk
    if bk1 is not None and not optimize_upper:
        const += bk1 @ bk1.T
    kb = kernel_basis(complex_, k)
    shift = kb.matrix @ kb.matrix.T if kb.betti else None
    return k, dk, bk, bk1, const, shift


def _add_weight_blocks(prob, block, dk, bk, bk1, optimize_lower, optimize_upper, pad):
    # zero rows (simplices not touching any order-k simplex) carry no
    # coefficient; their weight cannot influence the operator
    def embed(vec):
        return np.concatenate([vec, np.zeros(pad)]) if pad else vec

    if optimize_lower:
        low = prob.add_variables(LOWER_BLOCK, bk.shape[0], nonneg=True)
        for i in range(bk.shape[0]):
            if np.any(bk[i]):
                prob.add_rank1_term(block, int(low[i]), embed(bk[i]))
        prob.add_equality(low, np.ones(low.size), 1.0)
    if optimize_upper:
        up = prob.add_variables(UPPER_BLOCK, bk1.shape[1], nonneg=True)
        for j in range(bk1.shape[1]):
            prob.add_rank1_term(block, int(up[j]), embed(bk1[:, j]))
        prob.add_equality(up, np.ones(up.size), 1.0)


def build_trace_sdp(
    complex_: SimplicialComplex,
    k: int,
    optimize_lower: bool = False,
    optimize_upper: bool = False,
) -> SdpProblem:
    """Program minimizing the pseudoinverse trace of the order-k Laplacian.

    The operator block is paired with a slack matrix through an identity
    coupling; at the optimum the slack trace equals the pseudoinverse trace
    plus the kernel dimension.
    """
    k, dk, bk, bk1, const, shift = _setup(
        complex_, k, optimize_lower, optimize_upper
    )
    size = 2 * dk
    big = np.zeros((size, size))
    big[:dk, :dk] = const + (shift if shift is not None else 0.0)
    big[:dk, dk:] = np.eye(dk)
    big[dk:, :dk] = np.eye(dk)
    prob = SdpProblem("min")
    block = prob.add_lmi_block(size, constant=big)
    _add_weight_blocks(prob, block, dk, bk, bk1, optimize_lower, optimize_upper, dk)
    prob.attach_matrix_slack(block, dk)
    return prob


def build_lambda_sdp(
    complex_: SimplicialComplex,
    k: int,
    optimize_lower: bool = False,
    optimize_upper: bool = False,
) -> SdpProblem:
    """Program maximizing the smallest nonzero eigenvalue at order k.

    A free kernel-shift multiplier lifts the zero eigenvalues above the
    floor variable, so the floor binds only on the nonzero spectrum. The
    shift is omitted when the kernel is trivial.
    """
    k, dk, bk, bk1, const, shift = _setup(
        complex_, k, optimize_lower, optimize_upper
    )
    prob = SdpProblem("max")
    block = prob.add_lmi_block(dk, constant=const)
    _add_weight_blocks(prob, block, dk, bk, bk1, optimize_lower, optimize_upper, 0)
    floor = prob.add_variables(FLOOR_BLOCK, 1, cost=1.0)
    prob.add_dense_term(block, int(floor[0]), -np.eye(dk))
    if shift is not None:
        beta = prob.add_variables(SHIFT_BLOCK, 1)
        prob.add_dense_term(block, int(beta[0]), shift)
    return prob


def _simplex_renormalize(values: np.ndarray) -> tuple[np.ndarray, int]:
    """Exact unit-sum renormalization with the reciprocal-safety floor.

    Entries are lifted slightly above the weight floor before the final
    rescale so they still clear the floor afterwards.
    """
    vec = np.maximum(np.asarray(values, dtype=float), 0.0)
    total = vec.sum()
    if total <= 0:
        raise SolverAccuracyError("optimizer returned a vanishing weight vector")
    vec = vec / total
    count = int(np.count_nonzero(vec < WEIGHT_FLOOR))
    if count:
        vec = np.maximum(vec, WEIGHT_FLOOR * 1.001)
        vec = vec / vec.sum()
    return vec, count


def _direct_value(complex_, k, level_weights, objective):
    assignment = WeightAssignment.for_complex(complex_, level_weights)
    lap = assemble_laplacian(complex_, assignment, k)
    if objective == TRACE_OBJECTIVE:
        return trace_pseudoinverse(lap)
    return lambda_min_nonzero(lap)


def optimize_weights(
    complex_: SimplicialComplex,
    k: int,
    objective: str,
    optimize_lower: bool = False,
    optimize_upper: bool = False,
    gap_tol: float = 1e-8,
    feas_tol: float = 1e-7,
    max_iter: int = 200,
) -> WeightOptimizationResult:
    """Solve a weight-design program and certify the result spectrally.

    Re-assembles the Laplacian at the returned weights and recomputes the
    objective directly; a relative disagreement beyond 1e-5 with the solver's
    objective raises SolverAccuracyError. Improvement is reported against the
    uniform feasible point (equal weights on each optimized level), signed so
    that positive means better for both objectives.

    The solver's feasibility tolerance is absolute, so it is scaled here by
    the uniform-weight objective magnitude: pseudoinverse traces reach 1e4
    on instances with near-floor weights and float64 residuals cannot clear
    an absolute 1e-8 at that scale. The duality gap the solver reports is
    already normalized by the objective size, so gap_tol needs no scaling;
    the spectral cross-check above is the binding accuracy certificate.
    """
    if objective not in (TRACE_OBJECTIVE, LAMBDA_OBJECTIVE):
        raise ValidationError(
            f"objective must be '{TRACE_OBJECTIVE}' or '{LAMBDA_OBJECTIVE}'"
        )
    builder = build_trace_sdp if objective == TRACE_OBJECTIVE else build_lambda_sdp
    problem = builder(
        complex_, k, optimize_lower=optimize_lower, optimize_upper=optimize_upper
    )

    uniform: dict[int, np.ndarray] = {}
    if optimize_lower:
        low_n = complex_.num_simplices(k - 1)
        uniform[k - 1] = np.full(low_n, float(low_n))
    if optimize_upper:
        up_n = complex_.num_simplices(k + 1)
        uniform[k + 1] = np.full(up_n, 1.0 / up_n)
    direct_uniform = _direct_value(complex_, k, uniform, objective)

    scaled_feas = feas_tol * max(1.0, abs(direct_uniform))
    options = SolverOptions(
        gap_tol=gap_tol, feas_tol=scaled_feas, max_iter=max_iter
    )
    solution = solve_sdp(problem, options)

    weights: dict[int, np.ndarray] = {}
    floored: dict[int, int] = {}
    if optimize_lower:
        rec, count = _simplex_renormalize(solution.variable_blocks[LOWER_BLOCK])
        weights[k - 1] = 1.0 / rec
        floored[k - 1] = count
    if optimize_upper:
        up, count = _simplex_renormalize(solution.variable_blocks[UPPER_BLOCK])
        weights[k + 1] = up
        floored[k + 1] = count

    direct_opt = _direct_value(complex_, k, weights, objective)
    scale = max(abs(direct_uniform), 1e-300)
    if objective == TRACE_OBJECTIVE:
        improvement = (direct_uniform - direct_opt) / scale
    else:
        improvement = (direct_opt - direct_uniform) / scale

    if solution.status == "optimal":
        target = direct_opt
        if objective == TRACE_OBJECTIVE:
            target = direct_opt + kernel_basis(complex_, k).betti
        denom = max(abs(solution.primal_objective), abs(target), 1e-12)
        if abs(solution.primal_objective - target) > 1e-5 * denom:
            raise SolverAccuracyError(
                "solver objective "
                f"{solution.primal_objective:.10g} disagrees with the direct "
                f"spectral value {target:.10g} beyond 1e-5 relative"
            )

    return WeightOptimizationResult(
        order=int(k),
        objective=objective,
        weights=weights,
        objective_at_optimum=float(direct_opt),
        objective_at_uniform=float(direct_uniform),
        improvement_ratio=float(improvement),
        sdp_objective=float(solution.primal_objective),
        floored_counts=floored,
        solution=solution,
    )
