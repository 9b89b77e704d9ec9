"""Exact polygon/disk intersection areas and a polygon simplicity test."""

from __future__ import annotations

import numpy as np


def polygon_disk_area(vertices: np.ndarray, center, radius: float) -> float:
    """Area of a simple polygon intersected with a disk, exact up to rounding.

    The polygon is split into the triangles (c, p_i, p_{i+1}).  Each edge is cut
    at its intersections with the circle; sub-segments inside the disk
    contribute a triangle, those outside a circular sector.  Signed sums make
    the result valid for nonconvex polygons and any disk center.
    """
    a = np.asarray(vertices, dtype=float) - np.asarray(center, dtype=float)
    b = np.roll(a, -1, axis=0)
    d = b - a
    dd = np.einsum("ij,ij->i", d, d)
    ad = np.einsum("ij,ij->i", a, d)
    aa = np.einsum("ij,ij->i", a, a)
    R2 = radius * radius
    disc = ad * ad - dd * (aa - R2)
    root = np.sqrt(np.maximum(disc, 0.0))
    t1 = np.clip((-ad - root) / dd, 0.0, 1.0)
    t2 = np.clip((-ad + root) / dd, 0.0, 1.0)
    miss = disc <= 0.0
    t1 = np.where(miss, 0.0, t1)
    t2 = np.where(miss, 0.0, t2)
    p1 = a + t1[:, None] * d
    p2 = a + t2[:, None] * d
    tri = 0.5 * _cross(p1, p2)
    sector = 0.5 * R2 * (_angle(a, p1) + _angle(p2, b))
    return float(np.sum(tri + sector))


def _cross(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    return u[:, 0] * v[:, 1] - u[:, 1] * v[:, 0]


def _angle(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    return np.arctan2(_cross(u, v), np.einsum("ij,ij->i", u, v))


def polygon_is_simple(vertices: np.ndarray, chunk: int = 512) -> bool:
    """True when no two non-adjacent edges intersect (O(m^2), chunked)."""
    v = np.asarray(vertices, dtype=float)
    m = len(v)
    if m == 3:
        return True
    p = v
    q = np.roll(v, -1, axis=0)
    if np.any(np.all(p == q, axis=1)):
        return False
    idx = np.arange(m)
    for start in range(0, m, chunk):
        i = idx[start : start + chunk]
        P, Q = p[i, None, :], q[i, None, :]
        R, S = p[None, :, :], q[None, :, :]
        d1 = _orient(R, S, P)
        d2 = _orient(R, S, Q)
        d3 = _orient(P, Q, R)
        d4 = _orient(P, Q, S)
        hit = (d1 * d2 <= 0) & (d3 * d4 <= 0)
        # collinear-disjoint segments satisfy the sign test; require bbox overlap
        lo = np.minimum(P, Q)
        hi = np.maximum(P, Q)
        lo2 = np.minimum(R, S)
        hi2 = np.maximum(R, S)
        hit &= np.all((lo <= hi2) & (lo2 <= hi), axis=-1)
        gap = (idx[None, :] - i[:, None]) % m
        adjacent = (gap == 0) | (gap == 1) | (gap == m - 1)
        if np.any(hit & ~adjacent):
            return False
    return True


def _orient(a, b, c):
    return (b[..., 0] - a[..., 0]) * (c[..., 1] - a[..., 1]) - (b[..., 1] - a[..., 1]) * (c[..., 0] - a[..., 0])
