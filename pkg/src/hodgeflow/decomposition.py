"""Three-part orthogonal splitting of chain signals.

Any order-k signal splits uniquely into a gradient part lifted from one order
below, a curl part pushed down from one order above, and a harmonic remainder
in the Laplacian kernel:

    s = B_k^T a  +  h  +  W_k^{-1} B_{k+1} W_{k+1} b

The three parts are mutually orthogonal in the order-k weighted inner
product. Potentials a and b solve the normal equations

    up_{k-1} a   = W_{k-1}^{-1} B_k W_k s
    down_{k+1} b = B_{k+1}^T s

by minimum-norm least squares, which tolerates the rank deficiency these
systems always have. An equivalent direct least-squares route (minimizing the
weighted misfit of each lift) is exposed for cross-checking; both give the
same gradient and curl parts.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .complexes import SimplicialComplex, boundary_matrix
from .errors import ValidationError
from .laplacians import WeightAssignment, assemble_laplacian, weighted_inner_product


@dataclass(frozen=True)
class ChainSignal:
    """A real-valued signal over the order-k simplices."""

    order: int
    values: np.ndarray

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 1:
            raise ValidationError("signal values must be one-dimensional")
        if not np.all(np.isfinite(vals)):
            raise ValidationError("signal values must be finite")
        object.__setattr__(self, "values", vals)


@dataclass(frozen=True)
class HodgeComponents:
    """Gradient/harmonic/curl split of one signal, with both potentials."""

    order: int
    gradient_part: np.ndarray
    harmonic_part: np.ndarray
    curl_part: np.ndarray
    lower_potential: np.ndarray
    upper_potential: np.ndarray

    def reconstruction(self) -> np.ndarray:
        return self.gradient_part + self.harmonic_part + self.curl_part


@dataclass(frozen=True)
class DecompositionReport:
    """Residuals of one decomposition against its defining properties."""

    reconstruction_error: float
    reconstruction_relative: float
    harmonic_residual: float
    harmonic_relative: float
    gradient_harmonic_inner: float
    gradient_curl_inner: float
    harmonic_curl_inner: float
    max_normalized_inner: float

    def as_dict(self) -> dict[str, float]:
        return asdict(self)


def _min_norm_solve(matrix: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    if matrix.shape[0] == 0 or matrix.shape[1] == 0:
        return np.zeros(matrix.shape[1])
    sol, *_ = np.linalg.lstsq(matrix, rhs, rcond=None)
    return sol


def hodge_decompose(
    complex_: SimplicialComplex,
    weights: WeightAssignment,
    signal: ChainSignal,
    method: str = "normal",
) -> HodgeComponents:
    """Split a chain signal into gradient, harmonic, and curl parts.

    Parameters
    ----------
    method : {"normal", "least_squares"}
        "normal" solves the normal-equation systems, "least_squares" the
        weighted misfit problems directly; the parts agree to roundoff.

    At order 0 the gradient part is zero with an empty lower potential, and
    at the top order the curl part is zero with an empty upper potential.
    """
    if method not in ("normal", "least_squares"):
        raise ValidationError(f"unknown method {method!r}")
    k = signal.order
    if not 0 <= k <= complex_.dimension:
        raise ValidationError(f"order {k} outside [0, {complex_.dimension}]")
    s = signal.values
    if s.shape[0] != complex_.num_simplices(k):
        raise ValidationError(
            f"signal length {s.shape[0]} does not match {complex_.num_simplices(k)} "
            f"simplices at order {k}"
        )
    w_k = weights.vector(k)

    if k >= 1:
        bk = boundary_matrix(complex_, k).toarray().astype(float)
        w_km1 = weights.vector(k - 1)
        if method == "normal":
            up_below = (bk * w_k[None, :]) @ bk.T / w_km1[:, None]
            alpha = _min_norm_solve(up_below, (bk @ (w_k * s)) / w_km1)
        else:
            sq = np.sqrt(w_k)
            alpha = _min_norm_solve(sq[:, None] * bk.T, sq * s)
        gradient = bk.T @ alpha
    else:
        alpha = np.zeros(0)
        gradient = np.zeros_like(s)

    if k < complex_.dimension:
        bk1 = boundary_matrix(complex_, k + 1).toarray().astype(float)
        w_kp1 = weights.vector(k + 1)
        lift = (bk1 * w_kp1[None, :]) / w_k[:, None]
        if method == "normal":
            down_above = bk1.T @ lift
            beta = _min_norm_solve(down_above, bk1.T @ s)
        else:
            sq = np.sqrt(w_k)
            beta = _min_norm_solve(sq[:, None] * lift, sq * s)
        curl = lift @ beta
    else:
        beta = np.zeros(0)
        curl = np.zeros_like(s)

    harmonic = s - gradient - curl
    return HodgeComponents(
        order=k,
        gradient_part=gradient,
        harmonic_part=harmonic,
        curl_part=curl,
        lower_potential=alpha,
        upper_potential=beta,
    )


def verify_decomposition(
    components: HodgeComponents,
    complex_: SimplicialComplex,
    weights: WeightAssignment,
    signal: ChainSignal,
) -> DecompositionReport:
    """Residual report: reconstruction, harmonicity, and W_k-orthogonality."""
    if components.order != signal.order:
        raise ValidationError("components and signal orders differ")
    s = signal.values
    w_k = weights.vector(signal.order)
    recon = components.reconstruction()
    err = float(np.linalg.norm(s - recon))
    rel = err / max(1e-300, float(np.linalg.norm(s)))

    # parts below roundoff scale relative to the signal count as exactly zero,
    # otherwise their residual ratios would compare noise against noise
    s_w_norm = np.sqrt(max(weighted_inner_product(s, s, w_k), 0.0))
    floor = 1e-12 * max(1.0, s_w_norm, float(np.linalg.norm(s)))

    lap = assemble_laplacian(complex_, weights, signal.order)
    h = components.harmonic_part
    h_norm = float(np.linalg.norm(h))
    h_res = float(np.linalg.norm(lap.full @ h))
    if h_norm <= floor:
        h_rel = 0.0
    else:
        h_rel = h_res / max(1e-300, float(np.linalg.norm(lap.full, 2)) * h_norm)

    def pair(a: np.ndarray, b: np.ndarray) -> tuple[float, float]:
        raw = weighted_inner_product(a, b, w_k)
        na = np.sqrt(max(weighted_inner_product(a, a, w_k), 0.0))
        nb = np.sqrt(max(weighted_inner_product(b, b, w_k), 0.0))
        if na <= floor or nb <= floor:
            return raw, 0.0
        return raw, abs(raw) / (na * nb)

    gh, gh_n = pair(components.gradient_part, h)
    gc, gc_n = pair(components.gradient_part, components.curl_part)
    hc, hc_n = pair(h, components.curl_part)
    return DecompositionReport(
        reconstruction_error=err,
        reconstruction_relative=rel,
        harmonic_residual=h_res,
        harmonic_relative=h_rel,
        gradient_harmonic_inner=gh,
        gradient_curl_inner=gc,
        harmonic_curl_inner=hc,
        max_normalized_inner=max(gh_n, gc_n, hc_n),
    )
