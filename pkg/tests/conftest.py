import numpy as np

from hodgeflow import PointCloud, build_vietoris_rips
from hodgeflow.laplacians import WeightAssignment


def random_rips(rng, n_lo=8, n_hi=16, eps_lo=0.35, eps_hi=0.7, max_order=2,
                require_order=None):
    # rejection-sample until the requested order is populated
    while True:
        n = int(rng.integers(n_lo, n_hi + 1))
        pts = PointCloud(rng.random((n, 2)))
        eps = float(rng.uniform(eps_lo, eps_hi))
        cx = build_vietoris_rips(pts, epsilon=eps, max_order=max_order)
        if require_order is None:
            return cx
        if cx.dimension >= require_order and cx.num_simplices(require_order) > 0:
            return cx


def random_weights(rng, cx, unit_orders=(), lo=0.2, hi=5.0):
    vecs = {}
    for k, n in enumerate(cx.counts):
        if k in unit_orders:
            vecs[k] = np.ones(n)
        else:
            vecs[k] = rng.uniform(lo, hi, size=n)
    return WeightAssignment.for_complex(cx, vecs)
