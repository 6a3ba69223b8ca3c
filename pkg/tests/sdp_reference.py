"""Shared reference constructions for exercising the semidefinite solver.

random_known_optimum builds an inequality-form problem whose exact optimum is
certified by construction: a complementary primal-dual pair is drawn first
(slack and multiplier supported on orthogonal eigenspaces) and the problem
data are back-solved from it, so strong duality pins the optimal value at
cost @ x_star. penalty_oracle_value solves the same data by an unrelated
quadratic-penalty descent for cross-checks.
"""

import numpy as np
import scipy.optimize

from hodgeflow.sdp import SdpProblem


class KnownInstance:
    def __init__(self, problem, optimum, coeffs, constant, cost, a_mat, b_vec, nonneg):
        self.problem = problem
        self.optimum = optimum
        self.coeffs = coeffs
        self.constant = constant
        self.cost = cost
        self.a_mat = a_mat
        self.b_vec = b_vec
        self.nonneg = nonneg


def random_known_optimum(
    rng,
    size=None,
    n_vars=None,
    with_equalities=False,
    n_bounded=0,
    n_active=0,
    sense="min",
):
    m = int(size if size is not None else rng.integers(5, 26))
    n = int(n_vars if n_vars is not None else rng.integers(2, 9))
    n_bounded = min(n_bounded, n)
    n_active = min(n_active, n_bounded)
    n_free = n - n_bounded

    q_full, _ = np.linalg.qr(rng.standard_normal((m, m)))
    rank = int(rng.integers(1, m))
    s_star = (q_full[:, :rank] * rng.uniform(0.5, 2.0, rank)) @ q_full[:, :rank].T
    z_star = (q_full[:, rank:] * rng.uniform(0.5, 2.0, m - rank)) @ q_full[:, rank:].T

    coeffs = []
    for i in range(n):
        if i == 0:
            # identity coefficient keeps the primal strictly feasible
            coeffs.append(("dense", np.eye(m)))
        elif rng.random() < 0.5:
            coeffs.append(("rank1", rng.standard_normal(m)))
        else:
            raw = rng.standard_normal((m, m))
            coeffs.append(("dense", 0.5 * (raw + raw.T)))

    x_star = rng.standard_normal(n)
    nonneg = np.zeros(n, dtype=bool)
    nonneg[n_free:] = True
    z_bnd_star = np.zeros(n)
    for j in range(n_free, n):
        if j - n_free < n_active:
            x_star[j] = 0.0
            z_bnd_star[j] = rng.uniform(0.1, 1.0)
        else:
            x_star[j] = abs(x_star[j]) + 0.5

    def coeff_matrix(spec):
        kind, payload = spec
        return np.outer(payload, payload) if kind == "rank1" else payload

    constant = s_star - sum(
        x_star[i] * coeff_matrix(coeffs[i]) for i in range(n)
    )

    if with_equalities:
        p = int(rng.integers(1, 3))
        a_mat = rng.standard_normal((p, n))
        b_vec = a_mat @ x_star
        y_star = rng.standard_normal(p)
    else:
        a_mat = np.zeros((0, n))
        b_vec = np.zeros(0)
        y_star = np.zeros(0)

    cost = np.array(
        [float(np.vdot(coeff_matrix(sp), z_star)) for sp in coeffs]
    )
    cost += a_mat.T @ y_star + z_bnd_star
    optimum = float(cost @ x_star)
    if sense == "max":
        cost = -cost
        optimum = -optimum

    problem = SdpProblem(sense=sense)
    if n_free:
        problem.add_variables("free", n_free, cost=cost[:n_free])
    if n_bounded:
        problem.add_variables("pos", n_bounded, nonneg=True, cost=cost[n_free:])
    block = problem.add_lmi_block(m, constant=constant)
    for i, (kind, payload) in enumerate(coeffs):
        if kind == "rank1":
            problem.add_rank1_term(block, i, payload)
        else:
            problem.add_dense_term(block, i, payload)
    for row in range(a_mat.shape[0]):
        problem.add_equality(np.arange(n), a_mat[row], float(b_vec[row]))

    return KnownInstance(
        problem, optimum, coeffs, constant, cost, a_mat, b_vec, nonneg
    )


def penalty_oracle_value(
    inst,
    rho_schedule=(1e1, 1e2, 1e3, 1e4, 1e5, 1e6, 1e7, 1e8, 1e9),
):
    """Objective value found by quadratic-penalty descent on the raw data.

    Only meaningful for sense='min' instances; returns cost @ x at the final
    penalty iterate (approaches the optimum from the infeasible side).
    """
    mats = [
        np.outer(p, p) if kind == "rank1" else p for kind, p in inst.coeffs
    ]
    n = len(mats)
    a_mat, b_vec = inst.a_mat, inst.b_vec

    def penalized(x, rho):
        lmi = inst.constant + sum(x[i] * mats[i] for i in range(n))
        vals, vecs = np.linalg.eigh(lmi)
        hinge = np.maximum(-vals, 0.0)
        value = float(inst.cost @ x) + rho * float(hinge @ hinge)
        grad = inst.cost.copy()
        active = hinge > 0
        for a in np.flatnonzero(active):
            v = vecs[:, a]
            quad = np.array([float(v @ mat @ v) for mat in mats])
            grad += rho * (-2.0 * hinge[a]) * quad
        if b_vec.size:
            res = a_mat @ x - b_vec
            value += rho * float(res @ res)
            grad += rho * 2.0 * (a_mat.T @ res)
        if inst.nonneg.any():
            viol = np.maximum(-x, 0.0) * inst.nonneg
            value += rho * float(viol @ viol)
            grad += rho * (-2.0) * viol
        return value, grad

    x = np.where(inst.nonneg, 1.0, 0.0)
    for rho in rho_schedule:
        res = scipy.optimize.minimize(
            penalized,
            x,
            args=(rho,),
            jac=True,
            method="L-BFGS-B",
            options={"maxiter": 5000, "ftol": 1e-18, "gtol": 1e-14},
        )
        x = res.x
    return float(inst.cost @ x)
