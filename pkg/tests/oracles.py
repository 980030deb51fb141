"""Reference computations written independently of the package internals.

They use only the forward depth-of-field formulas and brute force.
"""
from __future__ import annotations

import numpy as np

H, F = 10_000.0, 50.0


def near_far(s, H=H, F=F):
    s = np.asarray(s, dtype=np.float64)
    near = H * s / (H + s - F)
    denom = H - s + F
    with np.errstate(divide="ignore"):
        far = np.where(denom > 0, H * s / np.where(denom > 0, denom, 1.0), np.inf)
    return near, far


def dense_counts(depths, candidates, H=H, F=F):
    """In-DoF count of ``depths`` at every candidate focus distance."""
    d = np.sort(np.asarray(depths, dtype=np.float64))
    near, far = near_far(candidates, H, F)
    return np.searchsorted(d, far, side="right") - np.searchsorted(d, near, side="left")


def bisect_focus(depth, which, H=H, F=F, iters=200):
    """Focus distance whose near (``which='hi'``) or far (``'lo'``) limit equals ``depth``.

    Found by bisection on the forward formulas alone.
    """
    a, b = F * (1 + 1e-12), H + F
    for _ in range(iters):
        m = 0.5 * (a + b)
        near, far = near_far(m, H, F)
        limit = near if which == "hi" else far
        if limit < depth:
            a = m
        else:
            b = m
    return 0.5 * (a + b)


def exact_best_count(depths, H=H, F=F):
    """Interval stabbing by brute force: some optimum sits at a left endpoint."""
    cands = np.array([bisect_focus(d, "lo", H, F) for d in depths])
    cands = np.concatenate([cands, np.nextafter(cands, np.inf), cands * (1 + 1e-12)])
    return int(dense_counts(depths, cands, H, F).max())


def cost_for_focus(cache, camera, s, idx):
    """Per-sample cost for one camera at focus ``s``; inf where not visible."""
    vis = cache.visible[camera, idx]
    near, far = near_far(s, cache.hyperfocal[camera], cache.focal_length[camera])
    d = cache.depth[camera, idx]
    inside = (near <= d) & (d <= far)
    return np.where(vis, cache.static[camera, idx] + cache.params.w3 * ~inside, np.inf)


def candidate_grid(cache, camera, idx, n=100):
    """Geometric grid plus points just either side of every breakpoint."""
    F_, H_ = cache.focal_length[camera], cache.hyperfocal[camera]
    grid = np.geomspace(F_ * 1.001, 4 * H_, n)
    vis = idx[cache.visible[camera, idx]]
    bps = []
    for d in cache.depth[camera, vis]:
        bps.append(bisect_focus(d, "lo", H_, F_))
        if d < H_:
            bps.append(bisect_focus(d, "hi", H_, F_))
    bps = np.array(bps)
    refined = np.concatenate([bps * (1 - 1e-7), bps * (1 + 1e-7)])
    return np.unique(np.concatenate([grid, refined[refined > F_]]))


def dense_pair_sweep(cache, cams, idx, n=100):
    """Exhaustive best joint cost over two cameras' candidate grids.

    Each sample goes to whichever camera images it cheaper; samples neither
    camera sees cost 1. Returns (best cost, focus pair).
    """
    a, b = cams
    ga, gb = candidate_grid(cache, a, idx, n), candidate_grid(cache, b, idx, n)
    ca = np.array([cost_for_focus(cache, a, s, idx) for s in ga])
    cb = np.array([cost_for_focus(cache, b, s, idx) for s in gb])
    best, arg = np.inf, None
    for i in range(len(ga)):
        m = np.minimum(ca[i][None, :], cb)
        tot = np.where(np.isinf(m), 1.0, m).sum(axis=1)
        j = int(np.argmin(tot))
        if tot[j] < best:
            best, arg = float(tot[j]), (ga[i], gb[j])
    return best, arg


def argmin_assignment(cache, focus):
    """Per-sample cheapest camera by explicit loops; ties to the lower id, -1 if none."""
    out = np.full(cache.n_samples, -1)
    for p in range(cache.n_samples):
        best = np.inf
        for c in range(cache.n_cameras):
            if not cache.visible[c, p] or np.isnan(focus[c]):
                continue
            cost = cost_for_focus(cache, c, focus[c], np.array([p]))[0]
            if cost < best:
                best, out[p] = cost, c
    return out
