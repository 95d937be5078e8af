"""Marching squares for zero-level sets on a rectilinear grid."""

from __future__ import annotations

import numpy as np

# cell corners: 0=(i,j) 1=(i+1,j) 2=(i+1,j+1) 3=(i,j+1); edges join consecutive corners
_EDGE_CORNERS = ((0, 1), (1, 2), (3, 2), (0, 3))
# saddle resolution: which corner each edge pair cuts off
_CORNER_EDGES = {0: (0, 3), 1: (0, 1), 2: (1, 2), 3: (3, 2)}


def _edge_key(i, j, edge):
    # shared edges get the same key from both neighbouring cells
    if edge == 0:
        return ("h", i, j)
    if edge == 1:
        return ("v", i + 1, j)
    if edge == 2:
        return ("h", i, j + 1)
    return ("v", i, j)


def zero_contours(values, xs, ys, skip_cells=None):
    """Extract polylines where ``values`` crosses zero.

    ``values[i, j]`` is sampled at ``(xs[i], ys[j])``.  Cells flagged in
    ``skip_cells`` (shape ``(nx - 1, ny - 1)``) or touching a NaN corner emit
    nothing, so curves break there.  Returns a list of ``(n, 2)`` arrays plus,
    for every vertex, the pair of grid indices of the edge it lies on.
    """
    v = np.asarray(values, dtype=float)
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    nx, ny = v.shape
    if nx < 2 or ny < 2:
        return [], []
    above = v > 0
    corners = np.stack([above[:-1, :-1], above[1:, :-1], above[1:, 1:], above[:-1, 1:]])
    mixed = corners.any(axis=0) & ~corners.all(axis=0)
    nan_cell = np.isnan(v)
    nan_cell = nan_cell[:-1, :-1] | nan_cell[1:, :-1] | nan_cell[1:, 1:] | nan_cell[:-1, 1:]
    active = mixed & ~nan_cell
    if skip_cells is not None:
        active &= ~np.asarray(skip_cells, dtype=bool)

    points = {}
    links = {}

    def vertex(i, j, edge):
        key = _edge_key(i, j, edge)
        if key not in points:
            a, b = _EDGE_CORNERS[edge]
            ia, ja = _corner_index(i, j, a)
            ib, jb = _corner_index(i, j, b)
            va, vb = v[ia, ja], v[ib, jb]
            t = va / (va - vb)
            t = min(max(t, 0.0), 1.0)
            points[key] = (
                (xs[ia] + t * (xs[ib] - xs[ia]), ys[ja] + t * (ys[jb] - ys[ja])),
                ((ia, ja), (ib, jb)),
            )
        return key

    def link(k1, k2):
        links.setdefault(k1, []).append(k2)
        links.setdefault(k2, []).append(k1)

    for i, j in zip(*np.nonzero(active)):
        i, j = int(i), int(j)
        cls = [bool(c) for c in corners[:, i, j]]
        crossed = [e for e, (a, b) in enumerate(_EDGE_CORNERS) if cls[a] != cls[b]]
        if len(crossed) == 2:
            link(vertex(i, j, crossed[0]), vertex(i, j, crossed[1]))
            continue
        centre = 0.25 * (v[i, j] + v[i + 1, j] + v[i + 1, j + 1] + v[i, j + 1]) > 0
        for corner in range(4):
            if cls[corner] != centre:
                e1, e2 = _CORNER_EDGES[corner]
                link(vertex(i, j, e1), vertex(i, j, e2))

    polylines, edges = [], []
    seen = set()
    starts = sorted(k for k, nb in links.items() if len(nb) == 1) + sorted(links)
    for start in starts:
        if start in seen:
            continue
        chain = [start]
        seen.add(start)
        prev, cur = None, start
        while True:
            nxt = [k for k in links[cur] if k != prev and k not in seen]
            if not nxt:
                # close cycles back onto their start
                if prev is not None and start in links[cur] and len(chain) > 2:
                    chain.append(start)
                break
            prev, cur = cur, nxt[0]
            seen.add(cur)
            chain.append(cur)
        polylines.append(np.array([points[k][0] for k in chain]))
        edges.append([points[k][1] for k in chain])
    return polylines, edges


def _corner_index(i, j, corner):
    return ((i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1))[corner]


def point_to_polyline_distance(point, polyline, period=None):
    """Euclidean distance from ``point`` to a polyline, optionally on a periodic square."""
    point = np.asarray(point, dtype=float)
    pts = np.asarray(polyline, dtype=float)
    shifts = [np.zeros(2)]
    if period is not None:
        shifts = [np.array([dx, dy]) * period for dx in (-1, 0, 1) for dy in (-1, 0, 1)]
    best = np.inf
    for shift in shifts:
        q = point + shift
        if len(pts) == 1:
            best = min(best, float(np.linalg.norm(pts[0] - q)))
            continue
        a, b = pts[:-1], pts[1:]
        ab = b - a
        denom = np.einsum("ij,ij->i", ab, ab)
        t = np.where(denom > 0, np.einsum("ij,ij->i", q - a, ab) / np.where(denom > 0, denom, 1.0), 0.0)
        t = np.clip(t, 0.0, 1.0)
        proj = a + t[:, None] * ab
        best = min(best, float(np.min(np.linalg.norm(proj - q, axis=1))))
    return best
