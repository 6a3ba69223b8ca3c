import numpy as np
import pytest

from hodgeflow import ValidationError
from hodgeflow.sdp import SdpProblem, SolverOptions, solve_sdp
from sdp_reference import penalty_oracle_value, random_known_optimum


def scalar_lower_bound_problem(bound=4.0, sense="min"):
    prob = SdpProblem(sense=sense)
    cost = 1.0 if sense == "min" else -1.0
    y = prob.add_variables("y", 1, cost=cost)
    block = prob.add_lmi_block(1, constant=[[-bound]])
    prob.add_rank1_term(block, int(y[0]), [1.0])
    return prob


def test_scalar_lower_bound():
    sol = solve_sdp(scalar_lower_bound_problem())
    assert sol.status == "optimal"
    assert abs(sol.primal_objective - 4.0) <= 1e-6
    assert abs(sol.variables[0] - 4.0) <= 1e-5
    assert sol.duality_gap <= 1e-6
    assert sol.psd_violation >= -1e-8


def test_max_sense_flips_objective():
    sol = solve_sdp(scalar_lower_bound_problem(sense="max"))
    assert sol.status == "optimal"
    assert abs(sol.primal_objective + 4.0) <= 1e-6
    # for maximization the dual bounds the primal from above
    assert sol.dual_objective >= sol.primal_objective - 1e-8


def schur_trace_problem(a_mat):
    d = a_mat.shape[0]
    prob = SdpProblem()
    const = np.zeros((2 * d, 2 * d))
    const[:d, :d] = a_mat
    const[:d, d:] = np.eye(d)
    const[d:, :d] = np.eye(d)
    block = prob.add_lmi_block(2 * d, constant=const)
    prob.attach_matrix_slack(block, d)
    return prob


def test_schur_trace_closed_form_diag():
    sol = solve_sdp(schur_trace_problem(np.diag([1.0, 2.0])))
    assert sol.status == "optimal"
    assert abs(sol.primal_objective - 1.5) <= 1e-6
    assert np.allclose(sol.slack_matrix, np.diag([1.0, 0.5]), atol=1e-4)


def test_schur_trace_random_pd():
    rng = np.random.default_rng(21)
    for d in (3, 4, 6):
        raw = rng.standard_normal((d, d))
        a_mat = raw @ raw.T + d * np.eye(d)
        sol = solve_sdp(schur_trace_problem(a_mat))
        expected = float(np.trace(np.linalg.inv(a_mat)))
        assert sol.status == "optimal"
        assert abs(sol.primal_objective - expected) <= 1e-6 * (1 + expected)


def corner_entry(m, offset, a, b):
    mat = np.zeros((m, m))
    mat[offset + a, offset + b] = 1.0
    mat[offset + b, offset + a] = 1.0
    if a == b:
        mat[offset + a, offset + a] = 1.0
    return mat


def test_matrix_slack_agrees_with_scalarized_entries():
    # the slack-elimination path and the generic dense path must land on the
    # same optimum for the same mathematical problem
    d = 2
    a_mat = np.diag([1.0, 2.0])
    direct = solve_sdp(schur_trace_problem(a_mat))

    prob = SdpProblem()
    pairs = [(a, b) for a in range(d) for b in range(a, d)]
    costs = [1.0 if a == b else 0.0 for a, b in pairs]
    yv = prob.add_variables("entries", len(pairs), cost=costs)
    const = np.zeros((2 * d, 2 * d))
    const[:d, :d] = a_mat
    const[:d, d:] = np.eye(d)
    const[d:, :d] = np.eye(d)
    block = prob.add_lmi_block(2 * d, constant=const)
    for i, (a, b) in enumerate(pairs):
        prob.add_dense_term(block, int(yv[i]), corner_entry(2 * d, d, a, b))
    scalarized = solve_sdp(prob)

    assert direct.status == "optimal" and scalarized.status == "optimal"
    assert abs(direct.primal_objective - scalarized.primal_objective) <= 1e-6


def test_matrix_slack_with_scalar_variables_matches_scalarized():
    rng = np.random.default_rng(33)
    d = 3
    raw = rng.standard_normal((d, d))
    a0 = raw @ raw.T + d * np.eye(d)
    g = rng.standard_normal(d)
    const = np.zeros((2 * d, 2 * d))
    const[:d, :d] = a0
    const[:d, d:] = np.eye(d)
    const[d:, :d] = np.eye(d)
    g_emb = np.concatenate([g, np.zeros(d)])

    prob_a = SdpProblem()
    xv = prob_a.add_variables("x", 1, nonneg=True, cost=0.3)
    block = prob_a.add_lmi_block(2 * d, constant=const)
    prob_a.add_rank1_term(block, int(xv[0]), g_emb)
    prob_a.attach_matrix_slack(block, d)
    sol_a = solve_sdp(prob_a)

    prob_b = SdpProblem()
    xv = prob_b.add_variables("x", 1, nonneg=True, cost=0.3)
    pairs = [(a, b) for a in range(d) for b in range(a, d)]
    costs = [1.0 if a == b else 0.0 for a, b in pairs]
    yv = prob_b.add_variables("entries", len(pairs), cost=costs)
    block = prob_b.add_lmi_block(2 * d, constant=const)
    prob_b.add_rank1_term(block, int(xv[0]), g_emb)
    for i, (a, b) in enumerate(pairs):
        prob_b.add_dense_term(block, int(yv[i]), corner_entry(2 * d, d, a, b))
    sol_b = solve_sdp(prob_b)

    assert sol_a.status == "optimal" and sol_b.status == "optimal"
    scale = 1 + abs(sol_a.primal_objective)
    assert abs(sol_a.primal_objective - sol_b.primal_objective) <= 1e-5 * scale


def test_known_optimum_battery_small():
    rng = np.random.default_rng(5)
    cases = []
    for _ in range(3):
        cases.append(random_known_optimum(rng))
    cases.append(random_known_optimum(rng, sense="max"))
    for _ in range(3):
        cases.append(random_known_optimum(rng, with_equalities=True))
    for _ in range(2):
        cases.append(random_known_optimum(rng, n_bounded=2))
    for _ in range(2):
        cases.append(random_known_optimum(rng, n_bounded=3, n_active=2))
    cases.append(
        random_known_optimum(rng, with_equalities=True, n_bounded=2, n_active=1)
    )
    for inst in cases:
        sol = solve_sdp(inst.problem)
        assert sol.status == "optimal"
        assert sol.duality_gap <= 1e-6
        assert sol.psd_violation >= -1e-8
        tol = 1e-5 * (1 + abs(inst.optimum))
        assert abs(sol.primal_objective - inst.optimum) <= tol


def test_penalty_oracle_cross_check():
    rng = np.random.default_rng(7)
    cases = [
        random_known_optimum(rng, size=12, n_vars=4),
        random_known_optimum(rng, size=20, n_vars=6),
        random_known_optimum(rng, size=15, n_vars=5, with_equalities=True),
        random_known_optimum(rng, size=10, n_vars=4, n_bounded=2, n_active=1),
    ]
    for inst in cases:
        sol = solve_sdp(inst.problem)
        oracle = penalty_oracle_value(inst)
        scale = 1 + abs(inst.optimum)
        assert sol.status == "optimal"
        assert abs(oracle - inst.optimum) <= 1e-4 * scale
        assert abs(sol.primal_objective - oracle) <= 2e-4 * scale


def test_equality_pins_variable():
    prob = SdpProblem()
    y = prob.add_variables("y", 1, cost=1.0)
    block = prob.add_lmi_block(1)
    prob.add_rank1_term(block, int(y[0]), [1.0])
    prob.add_equality(y, [1.0], 7.0)
    sol = solve_sdp(prob)
    assert sol.status == "optimal"
    assert abs(sol.variables[0] - 7.0) <= 1e-6


def test_active_sign_constraint():
    # unconstrained optimum would be negative; the bound pins x at zero
    prob = SdpProblem()
    x = prob.add_variables("x", 1, nonneg=True, cost=1.0)
    block = prob.add_lmi_block(1, constant=[[5.0]])
    prob.add_dense_term(block, int(x[0]), [[-1.0]])
    sol = solve_sdp(prob)
    assert sol.status == "optimal"
    assert abs(sol.primal_objective) <= 1e-6
    assert sol.variables[0] >= -1e-10


def test_two_blocks_take_the_binding_one():
    prob = SdpProblem()
    y = prob.add_variables("y", 1, cost=1.0)
    b1 = prob.add_lmi_block(1, constant=[[-3.0]])
    b2 = prob.add_lmi_block(1, constant=[[-5.0]])
    prob.add_rank1_term(b1, int(y[0]), [1.0])
    prob.add_rank1_term(b2, int(y[0]), [1.0])
    sol = solve_sdp(prob)
    assert sol.status == "optimal"
    assert abs(sol.primal_objective - 5.0) <= 1e-6


def test_pure_linear_program_via_sign_blocks():
    prob = SdpProblem()
    x = prob.add_variables("x", 3, nonneg=True, cost=[3.0, 1.0, 2.0])
    prob.add_equality(x, np.ones(3), 1.0)
    sol = solve_sdp(prob, SolverOptions(gap_tol=1e-9))
    assert sol.status == "optimal"
    assert abs(sol.primal_objective - 1.0) <= 1e-6
    assert np.allclose(sol.variables, [0.0, 1.0, 0.0], atol=1e-5)


def test_iteration_cap_reports_honestly():
    rng = np.random.default_rng(9)
    inst = random_known_optimum(rng, size=15, n_vars=5)
    sol = solve_sdp(inst.problem, SolverOptions(max_iter=2))
    assert sol.status == "max_iter"
    assert sol.iterations == 2
    assert sol.duality_gap > 1e-6


def test_solution_reports_variable_blocks():
    rng = np.random.default_rng(11)
    inst = random_known_optimum(rng, n_vars=6, n_bounded=2)
    sol = solve_sdp(inst.problem)
    free = sol.variable_blocks["free"]
    pos = sol.variable_blocks["pos"]
    assert free.size + pos.size == sol.variables.size
    assert np.all(pos >= -1e-10)


def test_determinism_bitwise():
    rng1 = np.random.default_rng(13)
    rng2 = np.random.default_rng(13)
    inst1 = random_known_optimum(rng1, with_equalities=True, n_bounded=2)
    inst2 = random_known_optimum(rng2, with_equalities=True, n_bounded=2)
    sol1 = solve_sdp(inst1.problem)
    sol2 = solve_sdp(inst2.problem)
    assert sol1.iterations == sol2.iterations
    assert np.array_equal(sol1.variables, sol2.variables)


def test_builder_validation():
    prob = SdpProblem()
    with pytest.raises(ValidationError):
        prob.add_variables("x", 0)
    x = prob.add_variables("x", 2, cost=[1.0, 0.0])
    with pytest.raises(ValidationError):
        prob.add_variables("x", 1)
    block = prob.add_lmi_block(2)
    with pytest.raises(ValidationError):
        prob.add_lmi_block(2, constant=[[0.0, 1.0], [2.0, 0.0]])
    prob.add_rank1_term(block, 0, [1.0, 0.0])
    with pytest.raises(ValidationError):
        prob.add_rank1_term(block, 0, [0.0, 1.0])
    with pytest.raises(ValidationError):
        prob.add_dense_term(block, 0, np.eye(2))
    with pytest.raises(ValidationError):
        prob.add_rank1_term(block, 5, [1.0, 0.0])
    with pytest.raises(ValidationError):
        prob.add_rank1_term(block, 1, [1.0, 0.0, 0.0])
    with pytest.raises(ValidationError):
        prob.add_rank1_term(block, 1, [0.0, 0.0])
    prob.attach_matrix_slack(block, 1)
    with pytest.raises(ValidationError):
        prob.attach_matrix_slack(block, 1)
    with pytest.raises(ValidationError):
        prob.add_equality(x, [1.0], 1.0)
    with pytest.raises(ValidationError):
        SdpProblem(sense="argmin")


def test_solve_validation():
    # free variable without any cone coverage
    prob = SdpProblem()
    prob.add_variables("x", 1, cost=1.0)
    with pytest.raises(ValidationError):
        solve_sdp(prob)

    # dependent equality rows
    prob = SdpProblem()
    x = prob.add_variables("x", 2, nonneg=True, cost=[1.0, 1.0])
    prob.add_equality(x, [1.0, 1.0], 1.0)
    prob.add_equality(x, [2.0, 2.0], 2.0)
    with pytest.raises(ValidationError):
        solve_sdp(prob)

    # no variables at all
    with pytest.raises(ValidationError):
        solve_sdp(SdpProblem())

    with pytest.raises(ValidationError):
        solve_sdp(scalar_lower_bound_problem(), SolverOptions(max_iter=0))
