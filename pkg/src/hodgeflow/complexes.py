"""Oriented simplicial complexes and their signed boundary operators.

A k-simplex is stored as a strictly ascending tuple of k+1 vertex ids; the
ascending order is the canonical orientation. Within each order, simplices are
kept in lexicographic order and the position of a simplex in that list is its
index everywhere (boundary matrix rows/columns, weight vectors, signals).

The boundary of an oriented simplex alternates signs over vertex deletions:
removing the vertex at position m contributes the face with sign (-1)^m. With
that convention the composite of two boundary maps vanishes identically, which
holds here in exact integer arithmetic.

Functions
---------
build_complex        closure of an explicit simplex list
build_vietoris_rips  clique complex of an epsilon-neighborhood graph
boundary_matrix      signed incidence matrix between consecutive orders
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import ValidationError


@dataclass(frozen=True, order=True)
class Simplex:
    """A simplex given by its ascending tuple of distinct vertex ids."""

    vertices: tuple[int, ...]

    def __post_init__(self) -> None:
        verts = tuple(int(v) for v in self.vertices)
        if len(verts) == 0:
            raise ValidationError("a simplex needs at least one vertex")
        if any(v < 0 for v in verts):
            raise ValidationError(f"negative vertex id in {verts}")
        if len(set(verts)) != len(verts):
            raise ValidationError(f"repeated vertex in {verts}")
        object.__setattr__(self, "vertices", tuple(sorted(verts)))

    @property
    def order(self) -> int:
        return len(self.vertices) - 1

    def faces(self) -> tuple["Simplex", ...]:
        """Codimension-one faces, ordered by deleted-vertex position."""
        if self.order == 0:
            return ()
        v = self.vertices
        return tuple(Simplex(v[:m] + v[m + 1:]) for m in range(len(v)))

    def __repr__(self) -> str:
        return f"Simplex{self.vertices}"


class SimplicialComplex:
    """A finite simplicial complex with lexicographic index maps per order.

    The constructor validates closure: every face of every member simplex must
    itself be a member. Instances are immutable after construction.
    """

    def __init__(self, simplices_by_order: Sequence[Iterable[Simplex]]):
        levels: list[tuple[Simplex, ...]] = []
        for k, group in enumerate(simplices_by_order):
            simplices = sorted(set(group))
            for s in simplices:
                if s.order != k:
                    raise ValidationError(f"{s} listed at order {k}")
            levels.append(tuple(simplices))
        while levels and not levels[-1]:
            levels.pop()
        self._levels = tuple(levels)
        self._index: tuple[dict[tuple[int, ...], int], ...] = tuple(
            {s.vertices: i for i, s in enumerate(level)} for level in self._levels
        )
        for level in self._levels[1:]:
            for s in level:
                for f in s.faces():
                    if f not in self:
                        raise ValidationError(f"closure violated: {f} missing (face of {s})")

    @property
    def dimension(self) -> int:
        """Largest order present; -1 for the empty complex."""
        return len(self._levels) - 1

    @property
    def counts(self) -> tuple[int, ...]:
        """Number of simplices per order, orders 0..dimension."""
        return tuple(len(level) for level in self._levels)

    def simplices(self, k: int) -> tuple[Simplex, ...]:
        """All k-simplices in lexicographic order."""
        if not 0 <= k <= self.dimension:
            raise ValidationError(f"order {k} outside [0, {self.dimension}]")
        return self._levels[k]

    def num_simplices(self, k: int) -> int:
        if not 0 <= k <= self.dimension:
            return 0
        return len(self._levels[k])

    def index_of(self, simplex: Simplex) -> int:
        """Lexicographic index of a simplex within its order."""
        k = simplex.order
        if k > self.dimension or simplex.vertices not in self._index[k]:
            raise ValidationError(f"{simplex} not in complex")
        return self._index[k][simplex.vertices]

    def __contains__(self, simplex: Simplex) -> bool:
        k = simplex.order
        return k <= self.dimension and simplex.vertices in self._index[k]

    def __eq__(self, other: object) -> bool:
        return isinstance(other, SimplicialComplex) and self._levels == other._levels

    def __repr__(self) -> str:
        return f"SimplicialComplex(counts={self.counts})"


@dataclass(frozen=True)
class PointCloud:
    """Points in R^d, one per row, with an optional pluggable metric.

    ``metric`` maps two coordinate vectors to a nonnegative distance; when
    omitted the Euclidean distance is used (vectorized).
    """

    points: np.ndarray
    metric: Callable[[np.ndarray, np.ndarray], float] | None = None

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2:
            if pts.size == 0:
                pts = pts.reshape(0, max(1, pts.shape[-1] if pts.ndim else 1))
            else:
                raise ValidationError("points must be a 2-D array, one point per row")
        if not np.all(np.isfinite(pts)):
            raise ValidationError("points must be finite")
        pts = pts.copy()
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return self.points.shape[0]

    def pairwise_distances(self) -> np.ndarray:
        """Full symmetric distance matrix with a zero diagonal."""
        pts = self.points
        n = len(self)
        if self.metric is None:
            diff = pts[:, None, :] - pts[None, :, :]
            d = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
        else:
            d = np.zeros((n, n))
            for i in range(n):
                for j in range(i + 1, n):
                    d[i, j] = d[j, i] = float(self.metric(pts[i], pts[j]))
        np.fill_diagonal(d, 0.0)
        return d


@dataclass(frozen=True)
class BoundaryMatrix:
    """Signed incidence of k-simplices onto their (k-1)-faces, as triplets.

    Entries live in {-1, 0, +1}; column j holds the k+1 signed faces of the
    j-th k-simplex. Dense conversion is on demand and integer-valued, so
    products of consecutive boundary matrices vanish exactly.
    """

    order: int
    num_rows: int
    num_cols: int
    rows: np.ndarray
    cols: np.ndarray
    signs: np.ndarray

    @property
    def shape(self) -> tuple[int, int]:
        return (self.num_rows, self.num_cols)

    def toarray(self) -> np.ndarray:
        dense = np.zeros((self.num_rows, self.num_cols), dtype=np.int64)
        dense[self.rows, self.cols] = self.signs
        return dense


def build_complex(simplex_list: Iterable[Iterable[int]], max_order: int) -> SimplicialComplex:
    """Close an explicit list of simplices under the face relation.

    Parameters
    ----------
    simplex_list : iterable of vertex collections
        Each entry names one simplex by its distinct vertex ids. Duplicates
        (in any vertex order) are deduplicated silently.
    max_order : int
        Largest simplex order accepted; an input above it is rejected.

    Returns
    -------
    SimplicialComplex containing every input simplex and all of its faces.
    """
    if max_order < 0:
        raise ValidationError("max_order must be >= 0")
    by_order: list[set[tuple[int, ...]]] = [set() for _ in range(max_order + 1)]
    for raw in simplex_list:
        s = Simplex(tuple(raw))
        if s.order > max_order:
            raise ValidationError(f"{s} has order {s.order} > max_order {max_order}")
        for r in range(1, len(s.vertices) + 1):
            for sub in combinations(s.vertices, r):
                by_order[r - 1].add(sub)
    return SimplicialComplex([[Simplex(v) for v in level] for level in by_order])


def build_vietoris_rips(cloud: PointCloud, epsilon: float, max_order: int = 2) -> SimplicialComplex:
    """Vietoris-Rips complex at scale epsilon, up to max_order.

    Vertices are all points; an edge joins two points at distance <= epsilon
    (boundary included); each k-simplex is a (k+1)-clique of the edge graph,
    found by incremental common-neighbor extension.

    Parameters
    ----------
    cloud : PointCloud
    epsilon : float, > 0
    max_order : int, >= 1; values above n-1 are clamped with a warning.
    """
    if epsilon <= 0:
        raise ValidationError("epsilon must be positive")
    if max_order < 1:
        raise ValidationError("max_order must be >= 1")
    n = len(cloud)
    if n == 0:
        return SimplicialComplex([])
    if max_order > n - 1:
        warnings.warn(
            f"max_order {max_order} exceeds n-1={n - 1}; clamping", stacklevel=2
        )
        max_order = max(1, n - 1)

    dist = cloud.pairwise_distances()
    adj = dist <= epsilon
    np.fill_diagonal(adj, False)
    neighbors = [set(np.flatnonzero(adj[i]).tolist()) for i in range(n)]

    levels: list[list[tuple[int, ...]]] = [[(i,) for i in range(n)]]
    # extend each clique by common neighbors above its largest vertex so every
    # clique is enumerated exactly once, in ascending vertex order
    common: list[tuple[tuple[int, ...], set[int]]] = [
        ((i,), neighbors[i]) for i in range(n)
    ]
    for _ in range(1, max_order + 1):
        nxt: list[tuple[tuple[int, ...], set[int]]] = []
        for clique, cands in common:
            top = clique[-1]
            for v in sorted(cands):
                if v > top:
                    nxt.append((clique + (v,), cands & neighbors[v]))
        if not nxt:
            break
        nxt.sort(key=lambda item: item[0])
        levels.append([clique for clique, _ in nxt])
        common = nxt

    return SimplicialComplex(
        [[Simplex(v) for v in level] for level in levels]
    )


def boundary_matrix(complex_: SimplicialComplex, k: int) -> BoundaryMatrix:
    """Signed boundary matrix from k-simplices to (k-1)-simplices.

    Shape is (count at order k-1) x (count at order k); the column of a
    k-simplex carries sign (-1)^m at the face obtained by deleting its m-th
    vertex. Identical inputs yield bit-identical matrices.
    """
    if not 1 <= k <= complex_.dimension:
        raise ValidationError(f"order {k} outside [1, {complex_.dimension}]")
    simplices = complex_.simplices(k)
    rows: list[int] = []
    cols: list[int] = []
    signs: list[int] = []
    for j, s in enumerate(simplices):
        for m, face in enumerate(s.faces()):
            rows.append(complex_.index_of(face))
            cols.append(j)
            signs.append(1 if m % 2 == 0 else -1)
    return BoundaryMatrix(
        order=k,
        num_rows=complex_.num_simplices(k - 1),
        num_cols=len(simplices),
        rows=np.asarray(rows, dtype=np.int64),
        cols=np.asarray(cols, dtype=np.int64),
        signs=np.asarray(signs, dtype=np.int64),
    )
