"""Heat-type flows driven by weighted Hodge Laplacians.

The flow dx/dt = -L_k x is integrated in closed form through the
eigendecomposition of the symmetrized operator: with Ls = W^{1/2} L W^{-1/2}
= V diag(lam) V^T,

    x(t) = W^{-1/2} V exp(-lam t) V^T W^{1/2} x(0)

so every sample is exact up to the eigensolve. The state converges to the
weighted-orthogonal projection of x(0) onto the kernel (its harmonic part),
which is a fixed point of the dynamics. A fixed-step RK4 integrator is
included only as a cross-check oracle for tests.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .complexes import SimplicialComplex
from .decomposition import ChainSignal, hodge_decompose
from .errors import ValidationError
from .laplacians import (
    HodgeLaplacian,
    WeightAssignment,
    lambda_min_nonzero,
    symmetrize,
    zero_tolerance,
)


@dataclass(frozen=True)
class FlowTrajectory:
    """Sampled flow states, one row per requested time."""

    order: int
    times: np.ndarray
    states: np.ndarray
    harmonic_limit: np.ndarray


@dataclass(frozen=True)
class FlowComponentTrace:
    """Gradient/harmonic/curl parts of the state along a flow."""

    order: int
    times: np.ndarray
    states: np.ndarray
    gradient: np.ndarray
    harmonic: np.ndarray
    curl: np.ndarray
    weights_k: np.ndarray

    def component_norms(self) -> dict[str, np.ndarray]:
        """Weighted norms of each part at every sample."""
        w = self.weights_k

        def norms(block: np.ndarray) -> np.ndarray:
            return np.sqrt(np.maximum((block * block * w[None, :]).sum(axis=1), 0.0))

        return {
            "gradient": norms(self.gradient),
            "harmonic": norms(self.harmonic),
            "curl": norms(self.curl),
        }


def _validate_times(times: np.ndarray) -> np.ndarray:
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size == 0:
        raise ValidationError("times must be a nonempty 1-D array")
    if not np.all(np.isfinite(times)):
        raise ValidationError("times must be finite")
    if times[0] != 0.0:
        raise ValidationError("times must start at 0")
    if np.any(np.diff(times) <= 0) and times.size > 1:
        raise ValidationError("times must be strictly increasing")
    return times


def _validate_state(laplacian: HodgeLaplacian, x0: np.ndarray) -> np.ndarray:
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (laplacian.dim,):
        raise ValidationError(
            f"initial state has length {x0.size}, expected {laplacian.dim}"
        )
    if not np.all(np.isfinite(x0)):
        raise ValidationError("initial state must be finite")
    return x0


def simulate_flow(
    laplacian: HodgeLaplacian, x0: np.ndarray, times: np.ndarray
) -> FlowTrajectory:
    """Exact flow samples of dx/dt = -L x from x0 at the given times.

    ``times`` must start at 0 and increase strictly. The trajectory also
    carries the harmonic limit, the weighted projection of x0 onto the
    kernel, to which the state converges.
    """
    times = _validate_times(times)
    x0 = _validate_state(laplacian, x0)
    sym = symmetrize(laplacian)
    vals, vecs = scipy.linalg.eigh(sym)
    vals = np.maximum(vals, 0.0)
    sq = np.sqrt(laplacian.w_k)
    coeff = vecs.T @ (sq * x0)
    decay = np.exp(-np.outer(times, vals))
    states = (decay * coeff[None, :]) @ vecs.T / sq[None, :]
    tol = zero_tolerance(vals)
    zero_modes = vals < tol
    limit = (vecs[:, zero_modes] @ coeff[zero_modes]) / sq
    return FlowTrajectory(
        order=laplacian.order, times=times, states=states, harmonic_limit=limit
    )


def default_time_grid(
    laplacian: HodgeLaplacian, samples: int = 200, horizon: float | None = None
) -> np.ndarray:
    """Zero followed by log-spaced samples out to the horizon.

    The default horizon is 10 / (smallest nonzero eigenvalue), ten slowest
    decay constants.
    """
    if samples < 2:
        raise ValidationError("need at least 2 samples")
    if horizon is None:
        horizon = 10.0 / lambda_min_nonzero(laplacian)
    elif not (np.isfinite(horizon) and horizon > 0):
        raise ValidationError("horizon must be positive and finite")
    return np.concatenate([[0.0], np.geomspace(horizon * 1e-4, horizon, samples - 1)])


def flow_component_trace(
    complex_: SimplicialComplex,
    weights: WeightAssignment,
    laplacian: HodgeLaplacian,
    x0: np.ndarray,
    times: np.ndarray,
) -> FlowComponentTrace:
    """Flow samples together with their gradient/harmonic/curl parts.

    Along the flow the gradient and curl parts decay while the harmonic part
    stays constant; the parts at each sample reconstruct the state.
    """
    traj = simulate_flow(laplacian, x0, times)
    k = laplacian.order
    parts = [
        hodge_decompose(complex_, weights, ChainSignal(k, state))
        for state in traj.states
    ]
    return FlowComponentTrace(
        order=k,
        times=traj.times,
        states=traj.states,
        gradient=np.array([p.gradient_part for p in parts]),
        harmonic=np.array([p.harmonic_part for p in parts]),
        curl=np.array([p.curl_part for p in parts]),
        weights_k=laplacian.w_k,
    )


def rk4_flow(
    laplacian: HodgeLaplacian, x0: np.ndarray, times: np.ndarray, max_step: float | None = None
) -> np.ndarray:
    """Fixed-step classical RK4 reference integrator (cross-check oracle)."""
    times = _validate_times(times)
    x0 = _validate_state(laplacian, x0)
    mat = laplacian.full
    if max_step is None:
        lam_top = float(np.linalg.norm(mat, 2))
        max_step = 0.1 / max(lam_top, 1e-12)
    states = np.empty((times.size, x0.size))
    states[0] = x0
    x = x0.copy()
    for i in range(1, times.size):
        span = times[i] - times[i - 1]
        n_sub = max(1, int(np.ceil(span / max_step)))
        h = span / n_sub
        for _ in range(n_sub):
            k1 = -(mat @ x)
            k2 = -(mat @ (x + 0.5 * h * k1))
            k3 = -(mat @ (x + 0.5 * h * k2))
            k4 = -(mat @ (x + h * k3))
            x = x + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        states[i] = x
    return states
