"""Dense semidefinite programming with a self-contained interior-point core.

Problems are stated in inequality form over a scalar decision vector and an
optional symmetric slack matrix occupying the trailing corner of one
constraint block:

    minimize    cost . x  +  <slack_cost, slack>
    subject to  constant_b + sum_i x_i coeff_ib  (+ corner slack)   PSD,
                A x = rhs,    x_j >= 0 on flagged entries.

The solver is an infeasible-start primal-dual path-following method with
Nesterov-Todd scaling and Mehrotra predictor-corrector steps over dense
factorizations. The slack matrix's Newton equations are eliminated in closed
form, so the Schur complement system keeps the dimension of the scalar
decision vector; rank-one constraint coefficients enter the Schur matrix
through Gram matrices rather than explicit congruences.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import ValidationError


@dataclass(frozen=True)
class SolverOptions:
    """Certificate tolerances and iteration limits for solve_sdp."""

    gap_tol: float = 1e-6
    feas_tol: float = 1e-8
    max_iter: int = 100
    step_fraction: float = 0.98

    def validate(self) -> None:
        if not (self.gap_tol > 0 and self.feas_tol > 0):
            raise ValidationError("tolerances must be positive")
        if self.max_iter < 1:
            raise ValidationError("max_iter must be at least 1")
        if not 0 < self.step_fraction < 1:
            raise ValidationError("step_fraction must lie in (0, 1)")


@dataclass(frozen=True)
class SdpSolution:
    """Solve result with its certificate.

    ``psd_violation`` is the most negative eigenvalue across all matrix and
    sign constraints evaluated at the returned point (nonnegative values mean
    every constraint holds). ``duality_gap`` is
    |primal - dual| / (1 + max(|primal|, |dual|)). Status ``optimal``
    guarantees duality_gap <= gap_tol and psd_violation >= -feas_tol;
    ``max_iter`` and ``stalled`` return the final iterate with honest
    statistics.
    """

    status: str
    variables: np.ndarray
    variable_blocks: dict[str, np.ndarray]
    slack_matrix: np.ndarray | None
    primal_objective: float
    dual_objective: float
    duality_gap: float
    psd_violation: float
    iterations: int


class _Lmi:
    """One affine matrix constraint under construction."""

    def __init__(self, size: int, constant: np.ndarray) -> None:
        self.size = size
        self.constant = constant
        self.rank1: dict[int, np.ndarray] = {}
        self.dense: dict[int, np.ndarray] = {}
        self.slack_dim = 0
        self.slack_cost: np.ndarray | None = None


def _check_finite(arr: np.ndarray, what: str) -> np.ndarray:
    arr = np.asarray(arr, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{what} must be finite")
    return arr


def _check_symmetric(mat: np.ndarray, size: int, what: str) -> np.ndarray:
    mat = _check_finite(mat, what)
    if mat.shape != (size, size):
        raise ValidationError(f"{what} must have shape ({size}, {size})")
    if not np.allclose(mat, mat.T, rtol=0.0, atol=1e-11):
        raise ValidationError(f"{what} must be symmetric")
    return 0.5 * (mat + mat.T)


class SdpProblem:
    """Builder for inequality-form semidefinite programs.

    Scalar variables are declared in named groups and attach symmetric
    coefficients to constraint blocks either as rank-one outer products
    (pass the vector) or as dense matrices. One block may carry a symmetric
    slack matrix in its trailing corner; the slack's linear cost defaults to
    the trace. Linear equalities range over the scalar variables only.
    """

    def __init__(self, sense: str = "min") -> None:
        if sense not in ("min", "max"):
            raise ValidationError("sense must be 'min' or 'max'")
        self.sense = sense
        self._cost: list[float] = []
        self._nonneg: list[bool] = []
        self._groups: dict[str, np.ndarray] = {}
        self._blocks: list[_Lmi] = []
        self._equalities: list[tuple[np.ndarray, np.ndarray, float]] = []
        self._slack_block: int | None = None

    @property
    def num_variables(self) -> int:
        return len(self._cost)

    @property
    def num_blocks(self) -> int:
        return len(self._blocks)

    def variable_indices(self, name: str) -> np.ndarray:
        if name not in self._groups:
            raise ValidationError(f"unknown variable group '{name}'")
        return self._groups[name].copy()

    def add_variables(
        self, name: str, size: int, nonneg: bool = False, cost: float | np.ndarray = 0.0
    ) -> np.ndarray:
        if not name:
            raise ValidationError("variable group needs a name")
        if name in self._groups:
            raise ValidationError(f"variable group '{name}' already exists")
        if size < 1:
            raise ValidationError("variable group must be nonempty")
        costs = np.broadcast_to(_check_finite(cost, "cost"), (size,))
        start = self.num_variables
        self._cost.extend(float(v) for v in costs)
        self._nonneg.extend([bool(nonneg)] * size)
        idx = np.arange(start, start + size)
        self._groups[name] = idx
        return idx.copy()

    def set_cost(self, variables, values) -> None:
        """Assign objective coefficients to existing variables."""
        idx = np.asarray(variables, dtype=int).ravel()
        vals = np.broadcast_to(_check_finite(values, "cost"), idx.shape)
        for i, v in zip(idx, vals):
            if not 0 <= i < self.num_variables:
                raise ValidationError(f"variable index {i} out of range")
            self._cost[i] = float(v)

    def add_lmi_block(self, size: int, constant: np.ndarray | None = None) -> int:
        if size < 1:
            raise ValidationError("constraint block must be nonempty")
        const = (
            np.zeros((size, size))
            if constant is None
            else _check_symmetric(constant, size, "block constant")
        )
        self._blocks.append(_Lmi(size, const))
        return len(self._blocks) - 1

    def _block(self, block: int) -> _Lmi:
        if not 0 <= block < len(self._blocks):
            raise ValidationError(f"unknown constraint block {block}")
        return self._blocks[block]

    def _claim_var(self, blk: _Lmi, var: int) -> None:
        if not 0 <= var < self.num_variables:
            raise ValidationError(f"variable index {var} out of range")
        if var in blk.rank1 or var in blk.dense:
            raise ValidationError(
                f"variable {var} already has a coefficient in this block"
            )

    def add_rank1_term(self, block: int, var: int, vector) -> None:
        """Attach the coefficient (vector vector^T) for one variable."""
        blk = self._block(block)
        self._claim_var(blk, int(var))
        vec = _check_finite(vector, "coefficient vector").ravel()
        if vec.size != blk.size:
            raise ValidationError("coefficient vector length must match the block")
        if not np.any(vec):
            raise ValidationError("coefficient vector must be nonzero")
        blk.rank1[int(var)] = vec

    def add_dense_term(self, block: int, var: int, matrix) -> None:
        """Attach a dense symmetric coefficient for one variable."""
        blk = self._block(block)
        self._claim_var(blk, int(var))
        mat = _check_symmetric(matrix, blk.size, "coefficient matrix")
        if not np.any(mat):
            raise ValidationError("coefficient matrix must be nonzero")
        blk.dense[int(var)] = mat

    def attach_matrix_slack(
        self, block: int, dim: int, cost: np.ndarray | None = None
    ) -> None:
        """Place a symmetric slack matrix in the block's trailing corner."""
        blk = self._block(block)
        if self._slack_block is not None:
            raise ValidationError("only one matrix slack is supported")
        if not 1 <= dim <= blk.size:
            raise ValidationError("slack dimension must fit inside the block")
        blk.slack_dim = dim
        blk.slack_cost = (
            np.eye(dim) if cost is None else _check_symmetric(cost, dim, "slack cost")
        )
        self._slack_block = block

    def add_equality(self, variables, coefficients, rhs: float) -> None:
        idx = np.asarray(variables, dtype=int).ravel()
        coef = _check_finite(coefficients, "equality coefficients").ravel()
        if idx.size == 0 or idx.size != coef.size:
            raise ValidationError("equality needs matching variables and coefficients")
        if np.any(idx < 0) or np.any(idx >= self.num_variables):
            raise ValidationError("equality references an unknown variable")
        rhs = float(_check_finite(rhs, "equality right-hand side"))
        self._equalities.append((idx, coef, rhs))

    def _compile(self) -> "_Compiled":
        n = self.num_variables
        if n == 0 and self._slack_block is None:
            raise ValidationError("problem has no decision variables")
        nonneg = np.array(self._nonneg, dtype=bool)
        covered = nonneg.copy()
        compiled_blocks = []
        for blk in self._blocks:
            r1_vars = np.array(sorted(blk.rank1), dtype=int)
            gmat = (
                np.column_stack([blk.rank1[v] for v in r1_vars])
                if r1_vars.size
                else np.zeros((blk.size, 0))
            )
            dense_vars = sorted(blk.dense)
            dense_mats = [blk.dense[v] for v in dense_vars]
            covered[r1_vars] = True
            covered[dense_vars] = True
            scale = 0.0
            if gmat.size:
                scale = float((np.abs(gmat).max()) ** 2)
            for mat in dense_mats:
                scale = max(scale, float(np.abs(mat).max()))
            compiled_blocks.append(
                _BlockData(
                    size=blk.size,
                    constant=blk.constant,
                    r1_vars=r1_vars,
                    gmat=gmat,
                    dense_vars=dense_vars,
                    dense_mats=dense_mats,
                    slack_dim=blk.slack_dim,
                    slack_cost=blk.slack_cost,
                    coeff_scale=scale,
                )
            )
        if n and not covered.all():
            missing = int(np.flatnonzero(~covered)[0])
            raise ValidationError(
                f"free variable {missing} appears in no matrix or sign constraint"
            )
        p = len(self._equalities)
        a_mat = np.zeros((p, n))
        b_vec = np.zeros(p)
        for row, (idx, coef, rhs) in enumerate(self._equalities):
            np.add.at(a_mat[row], idx, coef)
            b_vec[row] = rhs
        if p:
            if n == 0:
                raise ValidationError("equalities need scalar variables")
            if np.linalg.matrix_rank(a_mat) < p:
                raise ValidationError("equality constraints are linearly dependent")
        return _Compiled(
            n=n,
            cost=np.array(self._cost, dtype=float),
            nonneg=nonneg,
            blocks=compiled_blocks,
            a_mat=a_mat,
            b_vec=b_vec,
            slack_block=self._slack_block,
            groups=self._groups,
        )


@dataclass
class _BlockData:
    size: int
    constant: np.ndarray
    r1_vars: np.ndarray
    gmat: np.ndarray
    dense_vars: list
    dense_mats: list
    slack_dim: int
    slack_cost: np.ndarray | None
    coeff_scale: float


@dataclass
class _Compiled:
    n: int
    cost: np.ndarray
    nonneg: np.ndarray
    blocks: list
    a_mat: np.ndarray
    b_vec: np.ndarray
    slack_block: int | None
    groups: dict


def _sym(mat: np.ndarray) -> np.ndarray:
    return 0.5 * (mat + mat.T)


def _factor_psd(mat: np.ndarray):
    """Square-root factor (F, Finv) with F @ F.T = mat.

    Falls back to an eigenvalue-floored factorization when Cholesky fails,
    which can happen when an iterate touches the cone boundary to roundoff.
    """
    try:
        low = scipy.linalg.cholesky(mat, lower=True)
        inv = scipy.linalg.solve_triangular(low, np.eye(mat.shape[0]), lower=True)
        return low, inv
    except np.linalg.LinAlgError:
        vals, vecs = scipy.linalg.eigh(mat)
        floor = max(float(vals[-1]), 1.0) * 1e-14
        vals = np.maximum(vals, floor)
        root = np.sqrt(vals)
        return vecs * root[None, :], (vecs / root[None, :]).T


def _nt_scaling(s_mat: np.ndarray, z_mat: np.ndarray):
    """Nesterov-Todd scaling point for one cone block.

    Returns (r, r_inv, lam) with r_inv @ s_mat @ r_inv.T = r.T @ z_mat @ r
    = diag(lam), so both cone variables share the scaled point lam.
    """
    f_s, f_s_inv = _factor_psd(s_mat)
    f_z, _ = _factor_psd(z_mat)
    _, sig, vt = np.linalg.svd(f_z.T @ f_s)
    sig = np.maximum(sig, 1e-300)
    root = np.sqrt(sig)
    r = f_s @ (vt.T / root[None, :])
    r_inv = root[:, None] * (vt @ f_s_inv)
    return r, r_inv, sig


def _spd_solve(mat: np.ndarray):
    """Solver callable for a symmetric positive definite system, with a
    ridged retry and a pseudo-inverse fallback for the nearly singular
    late-iteration regime."""
    try:
        fac = scipy.linalg.cho_factor(mat)
        return lambda rhs: scipy.linalg.cho_solve(fac, rhs)
    except np.linalg.LinAlgError:
        pass
    size = mat.shape[0]
    ridge = 1e-13 * max(1.0, abs(float(np.trace(mat))) / max(size, 1))
    try:
        fac = scipy.linalg.cho_factor(mat + ridge * np.eye(size))
        return lambda rhs: scipy.linalg.cho_solve(fac, rhs)
    except np.linalg.LinAlgError:
        pinv = np.linalg.pinv(mat, hermitian=True)
        return lambda rhs: pinv @ rhs


def _lmi_value(bd: _BlockData, x: np.ndarray, slack: np.ndarray | None) -> np.ndarray:
    out = bd.constant.copy()
    if bd.r1_vars.size:
        out += (bd.gmat * x[bd.r1_vars][None, :]) @ bd.gmat.T
    for var, mat in zip(bd.dense_vars, bd.dense_mats):
        out += x[var] * mat
    if bd.slack_dim:
        d = bd.slack_dim
        out[-d:, -d:] += slack
    return _sym(out)


def solve_sdp(problem: SdpProblem, options: SolverOptions | None = None) -> SdpSolution:
    """Solve the problem to the requested certificate tolerances.

    Deterministic given identical inputs and options. Status ``optimal`` is
    declared only when the duality gap, the equality and dual residuals, and
    a direct eigenvalue check of every constraint all pass. Hitting the
    iteration cap yields ``max_iter``; a vanishing step yields ``stalled``;
    both report the final iterate with its honest statistics.
    """
    opt = options if options is not None else SolverOptions()
    opt.validate()
    data = problem._compile()
    n = data.n
    blocks = data.blocks
    a_mat, b_vec = data.a_mat, data.b_vec
    p = b_vec.size
    bnd = np.flatnonzero(data.nonneg)
    nb = bnd.size
    si = data.slack_block
    sign = 1.0 if problem.sense == "min" else -1.0
    c = sign * data.cost
    d = blocks[si].slack_dim if si is not None else 0
    c_slack = sign * blocks[si].slack_cost if si is not None else None

    nu = sum(bd.size for bd in blocks) + nb
    x = np.zeros(n)
    x[bnd] = 1.0
    slack = np.zeros((d, d)) if si is not None else None
    ybar = np.zeros(p)
    dual_scale = 1.0 + (float(np.abs(c).max()) if n else 0.0)
    if c_slack is not None:
        dual_scale = max(dual_scale, 1.0 + float(np.abs(c_slack).max()))
    s_list, z_list = [], []
    for bd in blocks:
        prim_scale = 1.0 + float(np.abs(bd.constant).max()) + bd.coeff_scale
        s_list.append(prim_scale * np.eye(bd.size))
        z_list.append(dual_scale * np.eye(bd.size))
    z_bnd = np.full(nb, dual_scale)

    def residuals():
        r_p = b_vec - a_mat @ x if p else np.zeros(0)
        r_feas = [_lmi_value(bd, x, slack) - s for bd, s in zip(blocks, s_list)]
        adj = np.zeros(n)
        for bd, z in zip(blocks, z_list):
            if bd.r1_vars.size:
                adj[bd.r1_vars] += np.einsum("ij,ij->j", bd.gmat, z @ bd.gmat)
            for var, mat in zip(bd.dense_vars, bd.dense_mats):
                adj[var] += float(np.vdot(mat, z))
        r_d = c - adj
        if p:
            r_d = r_d - a_mat.T @ ybar
        if nb:
            r_d[bnd] -= z_bnd
        r_dy = c_slack - z_list[si][-d:, -d:] if si is not None else None
        return r_p, r_feas, r_d, r_dy

    def current_stats(r_p, r_feas, r_d, r_dy):
        p_int = float(c @ x) + (float(np.vdot(c_slack, slack)) if si is not None else 0.0)
        d_int = (float(b_vec @ ybar) if p else 0.0) - sum(
            float(np.vdot(bd.constant, z)) for bd, z in zip(blocks, z_list)
        )
        gap = abs(p_int - d_int) / (1.0 + max(abs(p_int), abs(d_int)))
        pinf = max(
            [float(np.abs(r_p).max()) if p else 0.0]
            + [float(np.abs(r).max()) for r in r_feas]
        )
        dinf = max(
            [float(np.abs(r_d).max()) if n else 0.0]
            + ([float(np.abs(r_dy).max())] if si is not None else [])
        )
        mu = (
            sum(float(np.vdot(s, z)) for s, z in zip(s_list, z_list))
            + (float(x[bnd] @ z_bnd) if nb else 0.0)
        ) / nu
        return p_int, d_int, gap, pinf, dinf, mu

    def direct_violation():
        worst = np.inf
        for bd in blocks:
            vals = np.linalg.eigvalsh(_lmi_value(bd, x, slack))
            worst = min(worst, float(vals[0]))
        if nb:
            worst = min(worst, float(x[bnd].min()))
        return worst

    status = "max_iter"
    steps_taken = 0
    for _ in range(opt.max_iter):
        r_p, r_feas, r_d, r_dy = residuals()
        _, _, gap, pinf, dinf, mu = current_stats(r_p, r_feas, r_d, r_dy)
        if gap <= opt.gap_tol and pinf <= opt.feas_tol and dinf <= opt.feas_tol:
            if direct_violation() >= -opt.feas_tol:
                status = "optimal"
                break

        scal = []
        for bd, s, z, res in zip(blocks, s_list, z_list, r_feas):
            r, r_inv, lam = _nt_scaling(s, z)
            gt = r_inv @ bd.gmat
            ct = [_sym(r_inv @ mat @ r_inv.T) for mat in bd.dense_mats]
            res_t = _sym(r_inv @ res @ r_inv.T)
            scal.append((r, r_inv, lam, gt, ct, res_t))

        if si is not None:
            r_inv_s = scal[si][1]
            t_map = r_inv_s[:, -d:].T.copy()
            n_solve = _spd_solve(t_map @ t_map.T)
            q_mat = t_map @ scal[si][3]
            u_mat = n_solve(q_mat)
            phis = [t_map @ ct @ t_map.T for ct in scal[si][4]]
            psis = [_sym(n_solve(n_solve(ph).T)) for ph in phis]

        m_sc = np.zeros((n, n))
        for bd, sc in zip(blocks, scal):
            gt = sc[3]
            if gt.shape[1]:
                gram = gt.T @ gt
                m_sc[np.ix_(bd.r1_vars, bd.r1_vars)] += gram * gram
            for j, (var, ctm) in enumerate(zip(bd.dense_vars, sc[4])):
                if gt.shape[1]:
                    vals = np.einsum("ij,ij->j", gt, ctm @ gt)
                    m_sc[var, bd.r1_vars] += vals
                    m_sc[bd.r1_vars, var] += vals
                for var2, ctm2 in zip(bd.dense_vars[: j + 1], sc[4][: j + 1]):
                    val = float(np.vdot(ctm, ctm2))
                    m_sc[var, var2] += val
                    if var2 != var:
                        m_sc[var2, var] += val
        if si is not None:
            bd_s = blocks[si]
            if q_mat.shape[1]:
                bq = q_mat.T @ u_mat
                m_sc[np.ix_(bd_s.r1_vars, bd_s.r1_vars)] -= bq * bq
            for j, var in enumerate(bd_s.dense_vars):
                if q_mat.shape[1]:
                    vals = np.einsum("ij,ij->j", q_mat, psis[j] @ q_mat)
                    m_sc[var, bd_s.r1_vars] -= vals
                    m_sc[bd_s.r1_vars, var] -= vals
                for var2, ph2 in zip(bd_s.dense_vars[: j + 1], phis[: j + 1]):
                    val = float(np.vdot(psis[j], ph2))
                    m_sc[var, var2] -= val
                    if var2 != var:
                        m_sc[var2, var] -= val
        if nb:
            m_sc[bnd, bnd] += z_bnd / x[bnd]
        m_solve = _spd_solve(m_sc) if n else None
        if p:
            x1 = m_solve(a_mat.T)
            eq_solve = _spd_solve(a_mat @ x1)

        def direction(rt_list, rc_bnd):
            h = np.zeros(n)
            e_list = []
            for bd, sc, rt in zip(blocks, scal, rt_list):
                e_t = rt - sc[5]
                e_list.append(e_t)
                gt = sc[3]
                if gt.shape[1]:
                    h[bd.r1_vars] += np.einsum("ij,ij->j", gt, e_t @ gt)
                for var, ctm in zip(bd.dense_vars, sc[4]):
                    h[var] += float(np.vdot(ctm, e_t))
            gam = None
            if si is not None:
                theta = t_map @ e_list[si] @ t_map.T
                gam = _sym(n_solve(n_solve(theta - r_dy).T))
                bd_s = blocks[si]
                if q_mat.shape[1]:
                    h[bd_s.r1_vars] -= np.einsum("ij,ij->j", q_mat, gam @ q_mat)
                for var, ph in zip(bd_s.dense_vars, phis):
                    h[var] -= float(np.vdot(ph, gam))
            if nb:
                h[bnd] += rc_bnd / x[bnd]
            rhs = h - r_d
            v0 = m_solve(rhs) if n else np.zeros(0)
            if p:
                dyb = eq_solve(r_p - a_mat @ v0)
                dx = v0 + x1 @ dyb
            else:
                dyb = np.zeros(0)
                dx = v0
            d_slack = None
            if si is not None:
                bd_s = blocks[si]
                d_slack = gam.copy()
                if u_mat.shape[1]:
                    d_slack -= (u_mat * dx[bd_s.r1_vars][None, :]) @ u_mat.T
                for var, ps in zip(bd_s.dense_vars, psis):
                    d_slack -= dx[var] * ps
                d_slack = _sym(d_slack)
            ds_list, dst_list, dzt_list, dz_list = [], [], [], []
            for idx, (bd, sc, rt) in enumerate(zip(blocks, scal, rt_list)):
                ds = r_feas[idx].copy()
                if bd.r1_vars.size:
                    ds += (bd.gmat * dx[bd.r1_vars][None, :]) @ bd.gmat.T
                for var, mat in zip(bd.dense_vars, bd.dense_mats):
                    ds += dx[var] * mat
                if bd.slack_dim:
                    dd = bd.slack_dim
                    ds[-dd:, -dd:] += d_slack
                ds = _sym(ds)
                r_inv = sc[1]
                dst = _sym(r_inv @ ds @ r_inv.T)
                dzt = rt - dst
                dz = _sym(r_inv.T @ dzt @ r_inv)
                ds_list.append(ds)
                dst_list.append(dst)
                dzt_list.append(dzt)
                dz_list.append(dz)
            dz_b = (rc_bnd - z_bnd * dx[bnd]) / x[bnd] if nb else np.zeros(0)
            return dx, dyb, d_slack, ds_list, dz_list, dst_list, dzt_list, dz_b

        def max_step_blocks(scaled_dirs):
            alpha = np.inf
            for sc, dt in zip(scal, scaled_dirs):
                root = np.sqrt(sc[2])
                emin = float(np.linalg.eigvalsh(dt / root[:, None] / root[None, :])[0])
                if emin < -1e-14:
                    alpha = min(alpha, -1.0 / emin)
            return alpha

        def max_step_vec(vals, dvals):
            neg = dvals < 0
            if not np.any(neg):
                return np.inf
            return float(np.min(-vals[neg] / dvals[neg]))

        rt_aff = [np.diag(-sc[2]) for sc in scal]
        rc_aff = -(x[bnd] * z_bnd) if nb else np.zeros(0)
        aff = direction(rt_aff, rc_aff)
        dx_a, _, _, _, _, dst_a, dzt_a, dz_a = aff
        ap_a = min(
            1.0,
            max_step_blocks(dst_a),
            max_step_vec(x[bnd], dx_a[bnd]) if nb else np.inf,
        )
        ad_a = min(
            1.0,
            max_step_blocks(dzt_a),
            max_step_vec(z_bnd, dz_a) if nb else np.inf,
        )
        comp_after = 0.0
        for sc, dst, dzt in zip(scal, dst_a, dzt_a):
            lam = sc[2]
            comp_after += (
                float(lam @ lam)
                + ad_a * float(lam @ np.diag(dzt))
                + ap_a * float(lam @ np.diag(dst))
                + ap_a * ad_a * float(np.vdot(dst, dzt))
            )
        if nb:
            comp_after += float((x[bnd] + ap_a * dx_a[bnd]) @ (z_bnd + ad_a * dz_a))
        mu_aff = max(comp_after, 0.0) / nu
        sigma = min(1.0, max((mu_aff / mu) ** 3, 1e-10)) if mu > 0 else 0.1

        rt_corr = []
        for sc, dst, dzt in zip(scal, dst_a, dzt_a):
            lam = sc[2]
            cross = dst @ dzt
            centered = np.diag(sigma * mu / lam - lam)
            rt_corr.append(
                centered - (cross + cross.T) / (lam[:, None] + lam[None, :])
            )
        rc_corr = (
            sigma * mu - x[bnd] * z_bnd - dx_a[bnd] * dz_a if nb else np.zeros(0)
        )
        fin = direction(rt_corr, rc_corr)
        dx_f, dyb_f, dslack_f, ds_f, dz_f, dst_f, dzt_f, dzb_f = fin
        tau = opt.step_fraction
        ap = min(
            1.0,
            tau * max_step_blocks(dst_f),
            tau * (max_step_vec(x[bnd], dx_f[bnd]) if nb else np.inf),
        )
        ad = min(
            1.0,
            tau * max_step_blocks(dzt_f),
            tau * (max_step_vec(z_bnd, dzb_f) if nb else np.inf),
        )
        if ap <= 1e-10 and ad <= 1e-10:
            status = "stalled"
            break
        x = x + ap * dx_f
        if si is not None:
            slack = _sym(slack + ap * dslack_f)
        for idx in range(len(blocks)):
            s_list[idx] = _sym(s_list[idx] + ap * ds_f[idx])
            z_list[idx] = _sym(z_list[idx] + ad * dz_f[idx])
        if p:
            ybar = ybar + ad * dyb_f
        if nb:
            z_bnd = z_bnd + ad * dzb_f
        steps_taken += 1

    r_p, r_feas, r_d, r_dy = residuals()
    p_int, d_int, gap, _, _, _ = current_stats(r_p, r_feas, r_d, r_dy)
    return SdpSolution(
        status=status,
        variables=x.copy(),
        variable_blocks={name: x[idx].copy() for name, idx in data.groups.items()},
        slack_matrix=slack.copy() if si is not None else None,
        primal_objective=sign * p_int,
        dual_objective=sign * d_int,
        duality_gap=gap,
        psd_violation=direct_violation(),
        iterations=steps_taken,
    )
