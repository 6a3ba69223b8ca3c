"""Matplotlib figure rendering for complexes, weights, and flow traces.

Uses the Agg backend so rendering works headless, and strips the Software
metadata chunk from PNGs so repeated runs produce byte-identical files.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
from matplotlib.collections import LineCollection, PolyCollection

from .complexes import SimplicialComplex
from .errors import ValidationError

PNG_METADATA = {"Software": None}


def save_figure(fig, path) -> None:
    fig.savefig(path, dpi=150, metadata=PNG_METADATA)
    plt.close(fig)


def complex_figure(
    complex_: SimplicialComplex,
    points: np.ndarray,
    face_weights: np.ndarray | None = None,
):
    """Scatter the vertices, draw the edges, and shade any triangles.

    Triangle shading is scaled by ``face_weights`` when given, so heavier
    faces read darker.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValidationError("complex figures need 2-D points, one per row")
    if pts.shape[0] != complex_.num_simplices(0):
        raise ValidationError("point count does not match the vertex count")
    fig, ax = plt.subplots(figsize=(6.0, 6.0))
    if complex_.dimension >= 2 and complex_.num_simplices(2) > 0:
        faces = [s.vertices for s in complex_.simplices(2)]
        if face_weights is None:
            alphas = np.full(len(faces), 0.3)
        else:
            w = np.asarray(face_weights, dtype=float)
            if w.shape != (len(faces),):
                raise ValidationError("face weight length does not match face count")
            top = w.max() if w.size and w.max() > 0 else 1.0
            alphas = 0.05 + 0.55 * (w / top)
        polys = PolyCollection(
            [pts[list(f)] for f in faces], facecolors="tab:orange", edgecolors="none"
        )
        polys.set_alpha(None)
        polys.set_facecolor(
            [(1.0, 0.5, 0.05, float(a)) for a in alphas]
        )
        ax.add_collection(polys)
    if complex_.dimension >= 1 and complex_.num_simplices(1) > 0:
        segs = [pts[list(s.vertices)] for s in complex_.simplices(1)]
        ax.add_collection(LineCollection(segs, colors="tab:gray", linewidths=0.8))
    ax.scatter(pts[:, 0], pts[:, 1], s=18.0, c="tab:blue", zorder=3)
    ax.set_aspect("equal")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    counts = ", ".join(str(n) for n in complex_.counts)
    ax.set_title(f"simplex counts: {counts}")
    fig.tight_layout()
    return fig


def weights_figure(weight_sets: dict[str, np.ndarray], order: int):
    """Side-by-side weight profiles, one line per labeled weight vector."""
    if not weight_sets:
        raise ValidationError("no weight vectors to plot")
    fig, ax = plt.subplots(figsize=(7.0, 4.0))
    for label, vec in weight_sets.items():
        vals = np.asarray(vec, dtype=float)
        ax.plot(np.arange(vals.size), vals, marker=".", linestyle="-", label=label)
    ax.set_xlabel(f"order-{order} simplex index")
    ax.set_ylabel("weight")
    ax.set_yscale("log")
    ax.legend()
    fig.tight_layout()
    return fig


def flow_comparison_figure(curves: dict[str, tuple[np.ndarray, np.ndarray]]):
    """Residual-norm decay curves on a log axis, one per labeled trajectory."""
    if not curves:
        raise ValidationError("no trajectories to plot")
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    for label, (times, norms) in curves.items():
        t = np.asarray(times, dtype=float)
        v = np.asarray(norms, dtype=float)
        if t.shape != v.shape:
            raise ValidationError(f"curve {label!r}: time and norm lengths differ")
        floor = np.finfo(float).tiny
        ax.semilogy(t, np.maximum(v, floor), label=label)
    ax.set_xlabel("time")
    ax.set_ylabel("non-harmonic norm")
    ax.legend()
    fig.tight_layout()
    return fig
