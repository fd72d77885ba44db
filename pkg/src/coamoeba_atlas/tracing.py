"""Implicit-curve tracing on a square grid.

Marching squares over a vectorized scalar field f(p) (p complex), with every
emitted vertex refined by bisection along its grid edge, and the crossing
segments stitched into ordered components.  Components are closed polygons
or open polylines whose endpoints sit on the box boundary.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class OpenCurve(RuntimeError):
    """A traced component failed to close when it was expected to."""


@dataclass
class TracedCurve:
    points: np.ndarray  # ordered complex vertices
    closed: bool

    def __len__(self):
        return len(self.points)


def _refine_edges(f, p0, p1, f0, f1, iters=45):
    """Vectorized bisection of f along the segments [p0, p1] (sign change)."""
    lo = np.zeros(p0.shape)
    hi = np.ones(p0.shape)
    flo = f0.copy()
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        fm = f(p0 + mid * (p1 - p0))
        left = (flo * fm) <= 0.0
        hi = np.where(left, mid, hi)
        lo = np.where(left, lo, mid)
        flo = np.where(left, flo, fm)
    mid = 0.5 * (lo + hi)
    return p0 + mid * (p1 - p0)


def trace_zero_set(f, center=0.0, radius=1.0, grid=801, refine_iters=45):
    """Trace {f = 0} inside the square box of the given center and radius.

    ``f`` must accept a complex ndarray and return a real ndarray of the
    same shape.  Returns a list of TracedCurve with vertices refined to the
    bisection limit along their grid edges.
    """
    center = complex(center)
    xs = np.linspace(center.real - radius, center.real + radius, grid)
    ys = np.linspace(center.imag - radius, center.imag + radius, grid)
    X, Y = np.meshgrid(xs, ys, indexing="xy")
    P = X + 1j * Y
    F = np.asarray(f(P), dtype=float)
    if F.shape != P.shape:
        raise ValueError("field function changed the grid shape")
    # treat exact zeros as positive side (measure-zero tie-break)
    S = F >= 0.0

    # horizontal edges: node (iy, ix) -- (iy, ix+1); vertical: (iy, ix) -- (iy+1, ix)
    Hcross = S[:, :-1] != S[:, 1:]
    Vcross = S[:-1, :] != S[1:, :]

    h_idx = np.argwhere(Hcross)
    v_idx = np.argwhere(Vcross)
    h_pts = {}
    if len(h_idx):
        p0 = P[h_idx[:, 0], h_idx[:, 1]]
        p1 = P[h_idx[:, 0], h_idx[:, 1] + 1]
        f0 = F[h_idx[:, 0], h_idx[:, 1]]
        f1 = F[h_idx[:, 0], h_idx[:, 1] + 1]
        ref = _refine_edges(f, p0, p1, f0, f1, refine_iters)
        for (iy, ix), z in zip(map(tuple, h_idx), ref):
            h_pts[(iy, ix)] = complex(z)
    v_pts = {}
    if len(v_idx):
        p0 = P[v_idx[:, 0], v_idx[:, 1]]
        p1 = P[v_idx[:, 0] + 1, v_idx[:, 1]]
        f0 = F[v_idx[:, 0], v_idx[:, 1]]
        f1 = F[v_idx[:, 0] + 1, v_idx[:, 1]]
        ref = _refine_edges(f, p0, p1, f0, f1, refine_iters)
        for (iy, ix), z in zip(map(tuple, v_idx), ref):
            v_pts[(iy, ix)] = complex(z)

    def edge_key(kind, iy, ix):
        return (kind, iy, ix)

    # cell (iy, ix) has corners (iy,ix) (iy,ix+1) (iy+1,ix+1) (iy+1,ix)
    # and edges bottom=('h',iy,ix) top=('h',iy+1,ix)
    #           left=('v',iy,ix)  right=('v',iy,ix+1)
    links = {}  # edge_key -> list of partner edge_keys

    def add_link(a, b):
        links.setdefault(a, []).append(b)
        links.setdefault(b, []).append(a)

    cells = set()
    for iy, ix in map(tuple, h_idx):
        if iy > 0:
            cells.add((iy - 1, ix))
        if iy < grid - 1:
            cells.add((iy, ix))
    for iy, ix in map(tuple, v_idx):
        if ix > 0:
            cells.add((iy, ix - 1))
        if ix < grid - 1:
            cells.add((iy, ix))

    half = 0.5 * (xs[1] - xs[0])
    for iy, ix in cells:
        e = []
        if (iy, ix) in h_pts:
            e.append(edge_key("h", iy, ix))          # bottom
        if (iy, ix + 1) in v_pts:
            e.append(edge_key("v", iy, ix + 1))      # right
        if (iy + 1, ix) in h_pts:
            e.append(edge_key("h", iy + 1, ix))      # top
        if (iy, ix) in v_pts:
            e.append(edge_key("v", iy, ix))          # left
        if len(e) == 2:
            add_link(e[0], e[1])
        elif len(e) == 4:
            # saddle cell: the center sample decides the pairing
            czx = xs[ix] + half
            czy = ys[iy] + half
            fc = float(np.asarray(f(np.array([czx + 1j * czy])))[0])
            c00 = S[iy, ix]
            if (fc >= 0.0) == c00:
                # bottom-left corner connects through the center:
                # pair (left, top) and (bottom, right)
                add_link(edge_key("v", iy, ix), edge_key("h", iy + 1, ix))
                add_link(edge_key("h", iy, ix), edge_key("v", iy, ix + 1))
            else:
                add_link(edge_key("v", iy, ix), edge_key("h", iy, ix))
                add_link(edge_key("h", iy + 1, ix), edge_key("v", iy, ix + 1))
        elif len(e) != 0:
            # odd counts can only happen on the box boundary rim; leave the
            # dangling edge as a component endpoint
            pass

    def point_of(key):
        kind, iy, ix = key
        return h_pts[(iy, ix)] if kind == "h" else v_pts[(iy, ix)]

    visited = set()
    curves = []
    # open components first: start from degree-1 edges
    keys = list(links.keys())
    for start in keys:
        if start in visited or len(links[start]) != 1:
            continue
        chain = [start]
        visited.add(start)
        cur = start
        while True:
            nxts = [k for k in links[cur] if k not in visited]
            if not nxts:
                break
            cur = nxts[0]
            visited.add(cur)
            chain.append(cur)
        pts = np.array([point_of(k) for k in chain])
        curves.append(TracedCurve(points=pts, closed=False))
    # remaining are closed loops
    for start in keys:
        if start in visited:
            continue
        chain = [start]
        visited.add(start)
        cur = start
        while True:
            nxts = [k for k in links[cur] if k not in visited]
            if not nxts:
                break
            cur = nxts[0]
            visited.add(cur)
            chain.append(cur)
        pts = np.array([point_of(k) for k in chain])
        curves.append(TracedCurve(points=pts, closed=True))
    curves.sort(key=lambda c: -len(c.points))
    return curves


def exits_antipodally(curve: TracedCurve, tol=5e-2) -> bool:
    """True if an open curve's two ends leave along opposite directions.

    Used to recognize the affine trace of a projective line: one open
    polyline whose ends run off the box in antipodal directions closes up
    through the line at infinity into a single component.
    """
    if curve.closed or len(curve.points) < 8:
        return False
    d0 = curve.points[0] - curve.points[3]
    d1 = curve.points[-1] - curve.points[-4]
    d0 /= abs(d0)
    d1 /= abs(d1)
    # antipodal exit directions: d0 ~ -d1 as vectors pointing outward
    return abs(np.imag(d0 * np.conj(d1))) < tol and np.real(d0 * np.conj(d1)) < 0.0


def newton_refine_2d(f2, seeds, iters=30, h=1e-7, tol=1e-10):
    """Newton-refine seeds p (complex) against a 2-vector field f2(p).

    ``f2`` maps a complex ndarray to a pair of real ndarrays.  The Jacobian
    is taken by central finite differences.  Returns refined points with
    ``max|f2| < tol``, deduplicated.
    """
    out = []
    for p in seeds:
        p = complex(p)
        ok = False
        for _ in range(iters):
            f = np.array([np.asarray(v).ravel()[0] for v in f2(np.array([p]))])
            if np.max(np.abs(f)) < tol:
                ok = True
                break
            fx = np.array([np.asarray(v).ravel()[0] for v in f2(np.array([p + h]))])
            fy = np.array([np.asarray(v).ravel()[0] for v in f2(np.array([p + 1j * h]))])
            J = np.column_stack([(fx - f) / h, (fy - f) / h])
            try:
                step = np.linalg.solve(J, -f)
            except np.linalg.LinAlgError:
                break
            p = p + complex(step[0], step[1])
            if not np.isfinite(p.real) or not np.isfinite(p.imag):
                break
        if ok:
            if all(abs(p - q) > 1e-8 for q in out):
                out.append(p)
    return out
