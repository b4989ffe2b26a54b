"""Independent oracles the tests check library results against.

Everything here is deliberately primitive (truncated series, polygon
area formulas, exact per-edge integrals) and shares no code with the
library's own evaluation paths.
"""

import numpy as np


def taylor_expm(m, terms: int = 20) -> np.ndarray:
    """Matrix exponential by scaling, truncated Taylor series, squaring."""
    m = np.asarray(m, dtype=complex)
    norm = float(np.linalg.norm(m))
    s = max(0, int(np.ceil(np.log2(max(norm, 1e-30) / 0.5))))
    x = m / 2.0**s
    out = np.eye(m.shape[0], dtype=complex)
    term = np.eye(m.shape[0], dtype=complex)
    for k in range(1, terms + 1):
        term = term @ x / k
        out = out + term
    for _ in range(s):
        out = out @ out
    return out


def shoelace_area(vertices) -> float:
    """Signed area of a closed polygon (positive = counterclockwise)."""
    v = np.asarray(vertices, dtype=float)
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def polyline_ydx_integral(vertices) -> float:
    """Exact integral of y dx along a polyline.

    Along a straight edge y is linear in x, so the trapezoid value per
    edge is exact; for a closed polygon this equals minus the shoelace
    area (Green's theorem).
    """
    v = np.asarray(vertices, dtype=float)
    total = 0.0
    for a, b in zip(v[:-1], v[1:]):
        total += 0.5 * (a[1] + b[1]) * (b[0] - a[0])
    return total


def polyline_vertices(path_or_loop) -> np.ndarray:
    """Vertex chain of a piecewise-line path."""
    path = getattr(path_or_loop, "path", path_or_loop)
    pts = [path.segments[0].points[0]]
    for s in path.segments:
        assert s.kind == "line", "oracle only handles piecewise-line paths"
        pts.append(s.points[-1])
    return np.asarray(pts)
