"""Weighted Hodge Laplacians and their spectral machinery.

Each order k carries a positive weight per simplex. With W_k the diagonal
weight matrix of order k and B_k the signed boundary matrix, the weighted
Laplacian splits into

    down_k = B_k^T W_{k-1}^{-1} B_k W_k
    up_k   = W_k^{-1} B_{k+1} W_{k+1} B_{k+1}^T

with the down part absent at k = 0 and the up part absent at the top order.
The sum is similar to a symmetric positive semidefinite matrix through
conjugation by W_k^{1/2}; every eigensolve in this module runs on that
symmetrized form and maps eigenvectors back, which makes the returned
eigenvector columns orthonormal in the W_k inner product.

Kernel detection uses the relative threshold 1e-9 * max(1, largest
eigenvalue). Weight vectors are validated with a floor of 1e-8: entries in
[0, 1e-8) are clamped up with a warning, negative entries are rejected.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np
import scipy.linalg

from .complexes import SimplicialComplex, boundary_matrix
from .errors import ValidationError

WEIGHT_FLOOR = 1e-8


def _readonly(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=float, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class WeightAssignment:
    """One positive weight vector per order, indexed like the complex."""

    vectors: tuple[np.ndarray, ...]

    @classmethod
    def unit(cls, complex_: SimplicialComplex) -> "WeightAssignment":
        return cls(tuple(_readonly(np.ones(n)) for n in complex_.counts))

    @classmethod
    def for_complex(
        cls,
        complex_: SimplicialComplex,
        vectors: Mapping[int, Sequence[float]] | Sequence[Sequence[float]],
    ) -> "WeightAssignment":
        """Validate, clamp, and attach weight vectors to a complex.

        Orders missing from ``vectors`` get unit weights. Entries below the
        1e-8 floor are clamped up (with a warning); negative or non-finite
        entries are rejected.
        """
        if isinstance(vectors, Mapping):
            items = {int(k): v for k, v in vectors.items()}
        else:
            items = dict(enumerate(vectors))
        out: list[np.ndarray] = []
        clamped = 0
        for k, count in enumerate(complex_.counts):
            if k in items:
                vec = np.asarray(items.pop(k), dtype=float)
                if vec.shape != (count,):
                    raise ValidationError(
                        f"order-{k} weight vector has length {vec.size}, expected {count}"
                    )
                if not np.all(np.isfinite(vec)):
                    raise ValidationError(f"order-{k} weights must be finite")
                if np.any(vec < 0):
                    raise ValidationError(f"order-{k} weights must be nonnegative")
                low = vec < WEIGHT_FLOOR
                clamped += int(low.sum())
                vec = np.where(low, WEIGHT_FLOOR, vec)
            else:
                vec = np.ones(count)
            out.append(_readonly(vec))
        if items:
            raise ValidationError(f"weights given for absent orders {sorted(items)}")
        if clamped:
            warnings.warn(
                f"clamped {clamped} weight entr{'y' if clamped == 1 else 'ies'} "
                f"below {WEIGHT_FLOOR:g} up to the floor",
                stacklevel=2,
            )
        return cls(tuple(out))

    def vector(self, k: int) -> np.ndarray:
        if not 0 <= k < len(self.vectors):
            raise ValidationError(f"no weights stored for order {k}")
        return self.vectors[k]


@dataclass(frozen=True)
class HodgeLaplacian:
    """Assembled weighted Laplacian of one order, with its up/down split."""

    order: int
    down: np.ndarray
    up: np.ndarray
    weights: WeightAssignment

    @property
    def full(self) -> np.ndarray:
        return self.down + self.up

    @property
    def w_k(self) -> np.ndarray:
        return self.weights.vector(self.order)

    @property
    def dim(self) -> int:
        return self.w_k.shape[0]


@dataclass(frozen=True)
class SpectralData:
    """Eigenvalues (ascending) and W_k-orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    kernel_dim: int

    @property
    def zero_tolerance(self) -> float:
        return zero_tolerance(self.eigenvalues)


@dataclass(frozen=True)
class KernelBasis:
    """Orthonormal basis of the unweighted harmonic space at one order."""

    order: int
    matrix: np.ndarray

    @property
    def betti(self) -> int:
        return self.matrix.shape[1]


def zero_tolerance(eigenvalues: np.ndarray) -> float:
    """Threshold separating numerical kernel from positive spectrum."""
    top = float(np.max(eigenvalues)) if np.size(eigenvalues) else 0.0
    return 1e-9 * max(1.0, top)


def weighted_inner_product(f: np.ndarray, g: np.ndarray, w: np.ndarray) -> float:
    """Diagonal-weight pairing sum_i w_i f_i g_i."""
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    w = np.asarray(w, dtype=float)
    if not (f.shape == g.shape == w.shape and f.ndim == 1):
        raise ValidationError("inner product needs three equal-length vectors")
    return float(np.sum(w * f * g))


def assemble_laplacian(
    complex_: SimplicialComplex, weights: WeightAssignment, k: int
) -> HodgeLaplacian:
    """Weighted Laplacian at order k with its down and up parts.

    The down part vanishes at k = 0 and the up part at the top order; for a
    complex of dimension 0 both parts are zero matrices.
    """
    if not 0 <= k <= complex_.dimension:
        raise ValidationError(f"order {k} outside [0, {complex_.dimension}]")
    dim_k = complex_.num_simplices(k)
    w_k = weights.vector(k)
    if w_k.shape[0] != dim_k:
        raise ValidationError("weight vector length mismatch")
    down = np.zeros((dim_k, dim_k))
    up = np.zeros((dim_k, dim_k))
    if k >= 1:
        bk = boundary_matrix(complex_, k).toarray().astype(float)
        w_km1 = weights.vector(k - 1)
        down = (bk.T @ (bk / w_km1[:, None])) * w_k[None, :]
    if k < complex_.dimension:
        bk1 = boundary_matrix(complex_, k + 1).toarray().astype(float)
        w_kp1 = weights.vector(k + 1)
        up = ((bk1 * w_kp1[None, :]) @ bk1.T) / w_k[:, None]
    return HodgeLaplacian(order=k, down=down, up=up, weights=weights)


def symmetrize(laplacian: HodgeLaplacian, part: str = "full") -> np.ndarray:
    """Similarity transform W_k^{1/2} L W_k^{-1/2} of the chosen part."""
    mats = {"full": laplacian.full, "down": laplacian.down, "up": laplacian.up}
    if part not in mats:
        raise ValidationError(f"unknown part {part!r}")
    sq = np.sqrt(laplacian.w_k)
    sym = (mats[part] * sq[:, None]) / sq[None, :]
    return (sym + sym.T) / 2.0


def spectrum(laplacian: HodgeLaplacian, part: str = "full") -> SpectralData:
    """Full eigendecomposition through the symmetrized form.

    Eigenvalues come back ascending and clipped of stray negative roundoff;
    eigenvector columns are mapped back to original coordinates, where they
    are orthonormal under the order-k weighted inner product.
    """
    sym = symmetrize(laplacian, part)
    if sym.shape[0] == 0:
        return SpectralData(np.zeros(0), np.zeros((0, 0)), 0)
    try:
        vals, vecs = scipy.linalg.eigh(sym)
    except scipy.linalg.LinAlgError as exc:  # pragma: no cover - defensive
        raise ValidationError(f"eigensolver failed to converge: {exc}") from exc
    tol = zero_tolerance(vals)
    kernel_dim = int(np.sum(vals < tol))
    back = vecs / np.sqrt(laplacian.w_k)[:, None]
    return SpectralData(eigenvalues=vals, eigenvectors=back, kernel_dim=kernel_dim)


def kernel_basis(complex_: SimplicialComplex, k: int) -> KernelBasis:
    """Orthonormal basis of ker(B_k) intersected with ker(B_{k+1}^T).

    Computed from the unweighted boundary operators; for unit order-k weights
    this is exactly the kernel of the assembled Laplacian, whatever the
    neighboring weights are.
    """
    if not 0 <= k <= complex_.dimension:
        raise ValidationError(f"order {k} outside [0, {complex_.dimension}]")
    dim_k = complex_.num_simplices(k)
    stack: list[np.ndarray] = []
    if k >= 1:
        stack.append(boundary_matrix(complex_, k).toarray().astype(float))
    if k < complex_.dimension:
        stack.append(boundary_matrix(complex_, k + 1).toarray().astype(float).T)
    if not stack:
        return KernelBasis(order=k, matrix=np.eye(dim_k))
    joint = np.vstack(stack)
    u, s, vt = np.linalg.svd(joint, full_matrices=True)
    tol = (np.max(s) if s.size else 0.0) * max(joint.shape) * np.finfo(float).eps
    rank = int(np.sum(s > tol))
    basis = vt[rank:].T
    return KernelBasis(order=k, matrix=basis)


def trace_pseudoinverse(laplacian: HodgeLaplacian) -> float:
    """Sum of reciprocal eigenvalues above the kernel threshold."""
    spec = spectrum(laplacian)
    vals = spec.eigenvalues
    positive = vals[vals >= spec.zero_tolerance]
    return float(np.sum(1.0 / positive)) if positive.size else 0.0


def lambda_min_nonzero(laplacian: HodgeLaplacian) -> float:
    """Smallest eigenvalue above the kernel threshold.

    Raises for the degenerate operator whose spectrum is entirely kernel.
    """
    spec = spectrum(laplacian)
    vals = spec.eigenvalues
    positive = vals[vals >= spec.zero_tolerance]
    if positive.size == 0:
        raise ValidationError(
            f"order-{laplacian.order} Laplacian has no nonzero eigenvalue"
        )
    return float(positive[0])
