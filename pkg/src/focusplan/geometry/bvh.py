"""Bounding-volume hierarchy over triangles with any-hit segment queries.

The brute-force kernel shares the triangle primitive with the hierarchy
traversal, so the two differ only in culling and must agree bit for bit.
"""
from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

LEAF_SIZE = 4
_T_MIN = 1e-9  # segment parameter; ignore hits at the segment origin
_STACK = 128


@dataclass(frozen=True)
class BVH:
    node_lo: np.ndarray
    node_hi: np.ndarray
    left: np.ndarray  # -1 for leaves
    right: np.ndarray
    start: np.ndarray  # leaf range into the reordered triangle arrays
    count: np.ndarray
    v0: np.ndarray
    e1: np.ndarray
    e2: np.ndarray
    order: np.ndarray  # reordered position -> original triangle index

    @property
    def depth(self) -> int:
        depth = np.zeros(len(self.left), dtype=np.int64)
        for i in range(len(self.left)):
            if self.left[i] >= 0:
                depth[self.left[i]] = depth[self.right[i]] = depth[i] + 1
        return int(depth.max()) + 1


def build_bvh(vertices: np.ndarray, triangles: np.ndarray, leaf_size: int = LEAF_SIZE) -> BVH:
    """Median-split BVH along the widest centroid axis."""
    corners = vertices[triangles]  # (M, 3, 3)
    tri_lo = corners.min(axis=1)
    tri_hi = corners.max(axis=1)
    centroids = corners.mean(axis=1)
    scale = float(np.abs(vertices).max()) + 1.0
    pad = 1e-9 * scale

    order = np.arange(len(triangles))
    lo, hi, left, right, start, count = [], [], [], [], [], []

    def new_node(s, e):
        idx = order[s:e]
        lo.append(tri_lo[idx].min(axis=0) - pad)
        hi.append(tri_hi[idx].max(axis=0) + pad)
        left.append(-1)
        right.append(-1)
        start.append(s)
        count.append(e - s)
        return len(lo) - 1

    stack = [(new_node(0, len(order)), 0, len(order))]
    while stack:
        node, s, e = stack.pop()
        if e - s <= leaf_size:
            continue
        idx = order[s:e]
        c = centroids[idx]
        axis = int(np.argmax(c.max(axis=0) - c.min(axis=0)))
        mid = (e - s) // 2
        part = np.argpartition(c[:, axis], mid, kind="introselect")
        order[s:e] = idx[part]
        m = s + mid
        l_node, r_node = new_node(s, m), new_node(m, e)
        left[node], right[node] = l_node, r_node
        count[node] = 0
        stack.append((r_node, m, e))
        stack.append((l_node, s, m))

    tris = corners[order]
    return BVH(
        node_lo=np.asarray(lo), node_hi=np.asarray(hi),
        left=np.asarray(left, dtype=np.int64), right=np.asarray(right, dtype=np.int64),
        start=np.asarray(start, dtype=np.int64), count=np.asarray(count, dtype=np.int64),
        v0=np.ascontiguousarray(tris[:, 0]),
        e1=np.ascontiguousarray(tris[:, 1] - tris[:, 0]),
        e2=np.ascontiguousarray(tris[:, 2] - tris[:, 0]),
        order=order,
    )


@numba.njit(cache=True, inline="always")
def _tri_hit(ox, oy, oz, dx, dy, dz, v0, e1, e2, k):
    """Moller-Trumbore test of the segment o + t*d, t in (_T_MIN, 1)."""
    e1x, e1y, e1z = e1[k, 0], e1[k, 1], e1[k, 2]
    e2x, e2y, e2z = e2[k, 0], e2[k, 1], e2[k, 2]
    px = dy * e2z - dz * e2y
    py = dz * e2x - dx * e2z
    pz = dx * e2y - dy * e2x
    det = e1x * px + e1y * py + e1z * pz
    scale = (
        np.sqrt(e1x * e1x + e1y * e1y + e1z * e1z)
        * np.sqrt(e2x * e2x + e2y * e2y + e2z * e2z)
        * np.sqrt(dx * dx + dy * dy + dz * dz)
    )
    if abs(det) <= 1e-12 * scale:
        return False
    inv = 1.0 / det
    sx, sy, sz = ox - v0[k, 0], oy - v0[k, 1], oz - v0[k, 2]
    u = (sx * px + sy * py + sz * pz) * inv
    if u < 0.0 or u > 1.0:
        return False
    qx = sy * e1z - sz * e1y
    qy = sz * e1x - sx * e1z
    qz = sx * e1y - sy * e1x
    v = (dx * qx + dy * qy + dz * qz) * inv
    if v < 0.0 or u + v > 1.0:
        return False
    t = (e2x * qx + e2y * qy + e2z * qz) * inv
    return t > _T_MIN and t < 1.0


@numba.njit(cache=True, inline="always")
def _box_hit(ox, oy, oz, dx, dy, dz, lo, hi, n):
    tmin, tmax = 0.0, 1.0
    o = (ox, oy, oz)
    d = (dx, dy, dz)
    for a in range(3):
        if d[a] == 0.0:
            if o[a] < lo[n, a] or o[a] > hi[n, a]:
                return False
        else:
            t1 = (lo[n, a] - o[a]) / d[a]
            t2 = (hi[n, a] - o[a]) / d[a]
            if t1 > t2:
                t1, t2 = t2, t1
            if t1 > tmin:
                tmin = t1
            if t2 < tmax:
                tmax = t2
            if tmin > tmax:
                return False
    return True


@numba.njit(cache=True)
def _occluded_bvh(origins, ends, lo, hi, left, right, start, count, v0, e1, e2):
    out = np.zeros(origins.shape[0], dtype=np.bool_)
    stack = np.empty(_STACK, dtype=np.int64)
    for r in range(origins.shape[0]):
        ox, oy, oz = origins[r, 0], origins[r, 1], origins[r, 2]
        dx, dy, dz = ends[r, 0] - ox, ends[r, 1] - oy, ends[r, 2] - oz
        top = 0
        stack[0] = 0
        top = 1
        hit = False
        while top > 0 and not hit:
            top -= 1
            n = stack[top]
            if not _box_hit(ox, oy, oz, dx, dy, dz, lo, hi, n):
                continue
            if left[n] < 0:
                for k in range(start[n], start[n] + count[n]):
                    if _tri_hit(ox, oy, oz, dx, dy, dz, v0, e1, e2, k):
                        hit = True
                        break
            else:
                stack[top] = right[n]
                stack[top + 1] = left[n]
                top += 2
        out[r] = hit
    return out


@numba.njit(cache=True)
def _occluded_brute(origins, ends, v0, e1, e2):
    out = np.zeros(origins.shape[0], dtype=np.bool_)
    for r in range(origins.shape[0]):
        ox, oy, oz = origins[r, 0], origins[r, 1], origins[r, 2]
        dx, dy, dz = ends[r, 0] - ox, ends[r, 1] - oy, ends[r, 2] - oz
        for k in range(v0.shape[0]):
            if _tri_hit(ox, oy, oz, dx, dy, dz, v0, e1, e2, k):
                out[r] = True
                break
    return out


def segments_occluded(bvh: BVH, origins: np.ndarray, ends: np.ndarray, brute_force: bool = False) -> np.ndarray:
    """True where the open segment origin->end crosses any triangle."""
    origins = np.ascontiguousarray(np.broadcast_to(origins, ends.shape), dtype=np.float64)
    ends = np.ascontiguousarray(ends, dtype=np.float64)
    if len(ends) == 0:
        return np.zeros(0, dtype=bool)
    if brute_force:
        return _occluded_brute(origins, ends, bvh.v0, bvh.e1, bvh.e2)
    return _occluded_bvh(origins, ends, bvh.node_lo, bvh.node_hi, bvh.left, bvh.right,
                         bvh.start, bvh.count, bvh.v0, bvh.e1, bvh.e2)
