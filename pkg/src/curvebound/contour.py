"""Boundary contours: disjoint closed polylines in R^3 with exact measures.

Closest-point distances between components use exact segment-segment
distances (clamped closest-point parameterization), not vertex sampling:
the separation criteria compare distances against lengths at fine margins.
"""

import json

import numpy as np

MIN_SEPARATION = 1e-9


class ContourError(Exception):
    """Invalid contour data."""


class Contour:
    """Disjoint union of closed polylines.

    Parameters
    ----------
    components : sequence of array_like, each (m_i, 3)
        Vertex lists of the closed polylines; closure is implicit (the last
        vertex connects back to the first).
    """

    def __init__(self, components):
        comps = []
        for i, c in enumerate(components):
            a = np.asarray(c, dtype=float)
            if a.ndim != 2 or a.shape[1] != 3:
                raise ContourError(f"component {i} must be (m, 3), got {a.shape}")
            if len(a) < 3:
                raise ContourError(f"component {i} has fewer than 3 points")
            closed_pairs = np.vstack([a, a[:1]])
            seg = np.linalg.norm(np.diff(closed_pairs, axis=0), axis=1)
            if np.any(seg == 0.0):
                raise ContourError(f"component {i} has consecutive duplicate points")
            a.setflags(write=False)
            comps.append(a)
        self.components = comps
        self.dimension = 3

    def __len__(self):
        return len(self.components)

    @property
    def n_components(self):
        return len(self.components)

    def all_points(self):
        return np.vstack(self.components)

    def segment_arrays(self, i):
        """Start points and edge vectors of component i, closure included."""
        a = self.components[i]
        nxt = np.roll(a, -1, axis=0)
        return a, nxt - a

    def check_disjoint(self, tol=MIN_SEPARATION):
        if self.n_components < 2:
            return True
        d = component_distance_matrix(self)
        off = d[np.triu_indices(self.n_components, k=1)]
        return bool(np.all(off > tol))


def contour_length(c: Contour) -> float:
    """Sum of the closed polyline lengths."""
    total = 0.0
    for a in c.components:
        closed = np.vstack([a, a[:1]])
        total += float(np.linalg.norm(np.diff(closed, axis=0), axis=1).sum())
    return total


def contour_diameter(c: Contour) -> float:
    """Extrinsic diameter over all component points.

    For polylines the farthest pair is attained at vertices, so this is exact.
    """
    from .mesh import extrinsic_diameter

    return extrinsic_diameter(c.all_points())


def component_distance_matrix(c: Contour) -> np.ndarray:
    """Symmetric matrix of min segment-segment distances between components.

    Each row is computed against every later component's segments in one
    vectorized pass, so thousand-component contours stay tractable; entries
    remain the exact pairwise segment minima.
    """
    n = c.n_components
    if n < 2:
        raise ContourError("need at least 2 components for a distance matrix")
    starts = []
    dirs = []
    offsets = np.empty(n + 1, dtype=np.int64)
    offsets[0] = 0
    for i in range(n):
        p, dvec = c.segment_arrays(i)
        starts.append(p)
        dirs.append(dvec)
        offsets[i + 1] = offsets[i] + len(p)
    all_p = np.vstack(starts)
    all_d = np.vstack(dirs)

    d = np.zeros((n, n))
    for i in range(n - 1):
        lo = offsets[i + 1]
        tail_p = all_p[lo:]
        tail_d = all_d[lo:]
        pi = starts[i]
        di = dirs[i]
        per_seg = np.full(len(tail_p), np.inf)
        rows_per_block = max(1, 400000 // max(1, len(tail_p)))
        for r0 in range(0, len(pi), rows_per_block):
            s = slice(r0, r0 + rows_per_block)
            dist = segment_segment_distance(
                pi[s, None, :], di[s, None, :], tail_p[None, :, :], tail_d[None, :, :]
            )
            np.minimum(per_seg, dist.min(axis=0), out=per_seg)
        row = np.minimum.reduceat(per_seg, offsets[i + 1 :-1] - lo)
        d[i, i + 1 :] = row
        d[i + 1 :, i] = row
    return d


def min_cross_distance(c: Contour, group_a, group_b) -> float:
    """Min segment-segment distance between two groups of component indices."""
    best = np.inf
    for i in group_a:
        pi, di = c.segment_arrays(i)
        for j in group_b:
            pj, dj = c.segment_arrays(j)
            best = min(best, _min_segment_set_distance(pi, di, pj, dj))
    return float(best)


def _min_segment_set_distance(p1, d1, p2, d2, chunk=200000):
    """Min distance between two segment sets, all pairs, vectorized in blocks."""
    m = len(p1)
    rows_per_block = max(1, chunk // max(1, len(p2)))
    best = np.inf
    for i0 in range(0, m, rows_per_block):
        s = slice(i0, i0 + rows_per_block)
        d = segment_segment_distance(
            p1[s, None, :], d1[s, None, :], p2[None, :, :], d2[None, :, :]
        )
        best = min(best, float(d.min()))
    return best


def segment_segment_distance(p1, d1, p2, d2):
    """Distance between segments [p1, p1+d1] and [p2, p2+d2], broadcasting.

    Clamped closest-point parameterization (Ericson): minimize
    |p1 + s*d1 - p2 - t*d2| over s, t in [0, 1], handling the degenerate and
    parallel cases by clamping one parameter and re-solving for the other.
    """
    p1 = np.asarray(p1, dtype=float)
    p2 = np.asarray(p2, dtype=float)
    d1 = np.asarray(d1, dtype=float)
    d2 = np.asarray(d2, dtype=float)
    r = p1 - p2
    a = np.sum(d1 * d1, axis=-1)
    e = np.sum(d2 * d2, axis=-1)
    b = np.sum(d1 * d2, axis=-1)
    cc = np.sum(d1 * r, axis=-1)
    f = np.sum(d2 * r, axis=-1)

    denom = a * e - b * b
    # Parallel (or degenerate) pairs: any s works, pick s = 0 and clamp below.
    safe = denom > 1e-14 * np.maximum(a * e, 1e-300)
    s = np.where(safe, (b * f - cc * e) / np.where(safe, denom, 1.0), 0.0)
    s = np.clip(s, 0.0, 1.0)
    t = np.where(e > 0.0, (b * s + f) / np.where(e > 0.0, e, 1.0), 0.0)
    # If t left [0, 1], clamp it and recompute the best s for that t.
    t_cl = np.clip(t, 0.0, 1.0)
    s = np.where(t != t_cl,
                 np.clip(np.where(a > 0.0, (t_cl * b - cc) / np.where(a > 0.0, a, 1.0), 0.0),
                         0.0, 1.0),
                 s)
    diff = r + s[..., None] * d1 - t_cl[..., None] * d2
    return np.sqrt(np.sum(diff * diff, axis=-1))


# -- file format ---------------------------------------------------------------


def save_contour(c: Contour, path):
    doc = {
        "dimension": 3,
        "components": [{"vertices": a.tolist()} for a in c.components],
    }
    with open(path, "w") as fh:
        json.dump(doc, fh)


def load_contour(path) -> Contour:
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("dimension") != 3:
        raise ContourError("contour documents are 3-dimensional")
    comps = [np.array(entry["vertices"], dtype=float) for entry in doc["components"]]
    return Contour(comps)
