"""Teardrop curves: planar closed-up curves with a cusp at the origin.

The curve of index k runs from the origin out along a flat graph, around a
half-circle of radius 1/k, and back, so that both endpoint tangents are
horizontal and the total absolute curvature tends to pi as k grows. It is the
profile swept along boundary loops to glue two surface copies together.
"""

from dataclasses import dataclass

import numpy as np

from .curvature import total_abs_curvature

# Transition-function profile: the derivative is a plateau with tanh shoulders,
# so the graph pieces stay flat through the probe points 0.05 / 0.95 while the
# maximum slope stays near the theoretical floor (1/plateau-width ~ 1.13);
# steeper transitions would push the measured turning of the curve above its
# convergence band at moderate k.
_SHOULDER_SHARPNESS = 2000.0
_RISE_CENTER = 0.0575
_FALL_CENTER = 1.0 - _RISE_CENTER

_GRID_N = 32768  # fixed grid for the graph arclength quadrature


def _log_cosh(y):
    y = np.abs(y)
    return y + np.log1p(np.exp(-2.0 * y)) - np.log(2.0)


def _antiderivative(x):
    a = _SHOULDER_SHARPNESS
    return (_log_cosh(a * (x - _RISE_CENTER)) - _log_cosh(a * (x - _FALL_CENTER))) / (2.0 * a)


_F0 = _antiderivative(np.array(0.0))
_F1 = _antiderivative(np.array(1.0))


def transition_function(x):
    """Smooth monotone bridge from 0 to 1 on [0, 1], flat near the ends.

    f is numerically 0 on [0, 0.05] and 1 on [0.95, 1] (below 1e-13), strictly
    monotone, C-infinity, with f(x) + f(1-x) = 1, and max slope ~= 1.13.
    Accepts scalars or arrays; raises for arguments outside [0, 1].
    """
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0.0) or np.any(arr > 1.0):
        raise ValueError("transition_function is defined on [0, 1]")
    val = (_antiderivative(arr) - _F0) / (_F1 - _F0)
    return float(val) if np.isscalar(x) else val


def transition_slope(x):
    """Derivative of the transition function."""
    arr = np.asarray(x, dtype=float)
    a = _SHOULDER_SHARPNESS
    val = (np.tanh(a * (arr - _RISE_CENTER)) - np.tanh(a * (arr - _FALL_CENTER))) / (
        2.0 * (_F1 - _F0)
    )
    return float(val) if np.isscalar(x) else val


# Transition values and slope-squared samples on a fixed grid; graph pieces of
# dense curves are interpolated from here (piecewise linear between knots, so
# the turning-angle telescoping is exact between knots).
_XGRID = np.linspace(0.0, 1.0, _GRID_N + 1)
_FGRID = transition_function(_XGRID)
_SLOPE2_GRID = transition_slope(_XGRID) ** 2


def _graph_arclength_grid(k):
    """Cumulative arclength of x -> (x, f(x)/k) on the fixed x grid."""
    speed = np.sqrt(1.0 + _SLOPE2_GRID / (k * k))
    ds = 0.5 * (speed[1:] + speed[:-1]) * np.diff(_XGRID)
    return np.concatenate([[0.0], np.cumsum(ds)])


@dataclass
class TeardropCurve:
    """Sampled teardrop curve with arclength parametrization.

    ``s`` is the cumulative chord length of the sample polyline (so the data
    is unit-speed by construction), ``points`` the (x, y) samples. Both
    endpoints sit at the origin with opposite horizontal tangents; the cusp
    circle has radius 1/k.
    """

    k: int
    s: np.ndarray
    points: np.ndarray

    @property
    def total_length(self):
        return float(self.s[-1])

    def max_radius(self):
        return float(np.linalg.norm(self.points, axis=1).max())

    def turning(self):
        """Total absolute curvature (the cusp angle at the origin not included)."""
        return total_abs_curvature(self.points, closed=False)

    def to_rows(self):
        """Rows of 's x y' for the two-column text export."""
        return np.column_stack([self.s, self.points])


def _assemble(k, upper_half):
    """Mirror the upper half across y = 0 and glue; snap endpoints to the origin."""
    lower = upper_half[-2::-1] * np.array([1.0, -1.0])
    pts = np.vstack([upper_half, lower])
    pts[0] = (0.0, 0.0)
    pts[-1] = (0.0, 0.0)
    d = np.diff(pts, axis=0)
    chords = np.sqrt(d[:, 0] ** 2 + d[:, 1] ** 2)
    s = np.concatenate([[0.0], np.cumsum(chords)])
    return TeardropCurve(k=int(k), s=s, points=pts)


def build_teardrop(k, samples_per_unit=100, min_circle_samples=4096,
                   auto_refine=True) -> TeardropCurve:
    """Build the index-k teardrop, resampled at uniform arclength.

    The sampling density is raised automatically so the half-circle (length
    pi/k) carries at least ``min_circle_samples`` samples; that tight arc
    dominates the turning-angle measurement. With ``auto_refine=False`` the
    requested density is used as-is and fewer than 32 samples on the circle is
    an error.

    Parameters
    ----------
    k : int
        Cusp circle radius is 1/k. Must be >= 1.
    samples_per_unit : int
        Base resampling density (>= 100).
    """
    if k < 1:
        raise ValueError("k must be a positive integer")
    if samples_per_unit < 100:
        raise ValueError("samples_per_unit must be at least 100")
    if auto_refine:
        density = max(samples_per_unit, int(np.ceil(min_circle_samples * k / np.pi)))
    else:
        density = samples_per_unit
        if density * np.pi / k < 32:
            raise ValueError(
                f"samples_per_unit={samples_per_unit} puts fewer than 32 samples "
                f"on the radius-1/{k} half-circle; raise it or use auto_refine"
            )

    s_graph = _graph_arclength_grid(k)
    graph_len = s_graph[-1]
    half_len = graph_len + (np.pi / 2.0) / k
    m = max(16, int(np.ceil(half_len * density))) + 1

    targets = np.linspace(0.0, half_len, m)
    on_graph = targets <= graph_len
    xs = np.interp(targets[on_graph], s_graph, _XGRID)
    ys = np.interp(targets[on_graph], s_graph, _FGRID) / k
    upper_graph = np.column_stack([xs, ys])
    arc = targets[~on_graph] - graph_len
    theta = np.pi / 2.0 - arc * k
    upper_circle = np.column_stack([1.0 + np.cos(theta) / k, np.sin(theta) / k])
    upper = np.vstack([upper_graph, upper_circle])
    if abs(upper[-1, 1]) > 0:  # force the apex (the symmetry midpoint) exactly
        upper[-1] = (1.0 + 1.0 / k, 0.0)
    return _assemble(k, upper)


def build_sweep_profile(k, graph_samples=64, circle_samples=48) -> TeardropCurve:
    """Coarse teardrop sampling for tube sweeping.

    Turning-angle telescoping makes swept curvature insensitive to the profile
    density, so tubes stay small; at least 32 samples must land on the circle.
    """
    if k < 1:
        raise ValueError("k must be a positive integer")
    if circle_samples < 32:
        raise ValueError("need at least 32 samples on the half-circle")
    if graph_samples < 8:
        raise ValueError("need at least 8 samples per graph piece")
    xs = np.linspace(0.0, 1.0, graph_samples + 1)
    upper_graph = np.column_stack([xs, transition_function(xs) / k])
    # Quarter circle from the graph junction down to the apex, junction excluded.
    theta = np.linspace(np.pi / 2.0, 0.0, circle_samples // 2 + 1)[1:]
    upper_circle = np.column_stack([1.0 + np.cos(theta) / k, np.sin(theta) / k])
    upper = np.vstack([upper_graph, upper_circle])
    return _assemble(k, upper)


def save_teardrop(curve: TeardropCurve, path):
    """Two-column-per-point text export: 's x y' rows."""
    with open(path, "w") as fh:
        fh.write(f"# teardrop k={curve.k} length={curve.total_length:.12g}\n")
        for s, x, y in curve.to_rows():
            fh.write("%.12g %.12g %.12g\n" % (s, x, y))


def load_teardrop(path, k=0) -> TeardropCurve:
    rows = []
    with open(path) as fh:
        header = fh.readline()
        if header.startswith("#") and "k=" in header:
            k = int(header.split("k=")[1].split()[0])
        else:
            rows.append([float(tok) for tok in header.split()])
        for line in fh:
            if line.strip():
                rows.append([float(tok) for tok in line.split()])
    arr = np.array(rows)
    return TeardropCurve(k=k, s=arr[:, 0], points=arr[:, 1:3])
