"""Deterministic SVG renderings of the verification geometry.

Every figure is produced from seeded sampling and fixed-precision
coordinate formatting, so repeated renders of the same kind under the same
config are byte-identical.  No external plotting library is used; the
documents are assembled directly.
"""

from __future__ import annotations

import numpy as np

from .plane import (
    DEFAULT_CONFIG, PlaneConfig, arg_tuple, maps, sample_critical_points,
)
from .critical import (
    point_d_direct, conic_for_l, d_circles_check, _affine_value_raw,
)
from .projective import RP1Dir, circle_center_radius
from .fibers import fiber_model, fiber_arcs

FIGURE_KINDS = (
    "pencil",
    "coincidence",
    "cyclic-diagram",
    "coamoeba-projection",
    "amoeba-projection",
)

_F = "{:.6f}".format

# a fixed qualitative palette (Okabe-Ito, reordered)
_PALETTE = (
    "#0072b2", "#d55e00", "#009e73", "#cc79a7", "#e69f00",
    "#56b4e9", "#f0e442", "#000000",
)


class _Canvas:
    """World-to-pixel mapping plus an element buffer."""

    def __init__(self, xlim, ylim, size=640, margin=48):
        self.xmin, self.xmax = xlim
        self.ymin, self.ymax = ylim
        self.size = size
        self.margin = margin
        span = max(self.xmax - self.xmin, self.ymax - self.ymin)
        self.scale = (size - 2 * margin) / span
        self.parts: list[str] = []

    def px(self, x, y):
        u = self.margin + (x - self.xmin) * self.scale
        v = self.size - self.margin - (y - self.ymin) * self.scale
        return _F(u), _F(v)

    def polyline(self, xs, ys, color, width=1.2, dash=None, closed=False):
        pts = " ".join(
            f"{u},{v}" for u, v in (self.px(x, y) for x, y in zip(xs, ys))
        )
        tag = "polygon" if closed else "polyline"
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        self.parts.append(
            f'<{tag} points="{pts}" fill="none" stroke="{color}"'
            f' stroke-width="{_F(width)}"{dash_attr}/>'
        )

    def circle_world(self, cx, cy, r_world, color, width=1.2, dash=None):
        u, v = self.px(cx, cy)
        rr = _F(r_world * self.scale)
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        self.parts.append(
            f'<circle cx="{u}" cy="{v}" r="{rr}" fill="none"'
            f' stroke="{color}" stroke-width="{_F(width)}"{dash_attr}/>'
        )

    def dot(self, x, y, color, r=3.5):
        u, v = self.px(x, y)
        self.parts.append(
            f'<circle cx="{u}" cy="{v}" r="{_F(r)}" fill="{color}"/>'
        )

    def cross(self, x, y, color, r=4.0):
        u, v = self.px(x, y)
        uf, vf = float(u), float(v)
        for dx, dy in ((-r, -r), (-r, r)):
            self.parts.append(
                f'<line x1="{_F(uf + dx)}" y1="{_F(vf + dy)}"'
                f' x2="{_F(uf - dx)}" y2="{_F(vf - dy)}"'
                f' stroke="{color}" stroke-width="1.600000"/>'
            )

    def text(self, x, y, s, color="#333333", size=12, anchor="start",
             pixel=False):
        if pixel:
            u, v = _F(x), _F(y)
        else:
            u, v = self.px(x, y)
        self.parts.append(
            f'<text x="{u}" y="{v}" font-family="monospace"'
            f' font-size="{size}" fill="{color}"'
            f' text-anchor="{anchor}">{s}</text>'
        )

    def frame(self, color="#999999", dash="6 4"):
        m = self.margin
        s = self.size - 2 * m
        self.parts.append(
            f'<rect x="{_F(m)}" y="{_F(m)}" width="{_F(s)}" height="{_F(s)}"'
            f' fill="none" stroke="{color}" stroke-width="1.000000"'
            f' stroke-dasharray="{dash}"/>'
        )

    def tobytes(self, title: str) -> bytes:
        head = (
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.size}"'
            f' height="{self.size}" viewBox="0 0 {self.size} {self.size}">'
            f'<rect width="{self.size}" height="{self.size}" fill="#ffffff"/>'
            f'<text x="{self.size // 2}" y="28" font-family="monospace"'
            f' font-size="15" fill="#111111" text-anchor="middle">{title}'
            f"</text>"
        )
        return (head + "".join(self.parts) + "</svg>\n").encode("ascii")


def _conic_branches(conic, clip_r, n=721):
    """Points of a conic as polyline branches via the line pencil at 0.

    Lines through the origin hit the conic in at most two points; sweeping
    the line angle over [0, pi) and splitting on jumps gives drawable
    branches regardless of the conic's type.
    """
    A, B, C, D, E, F = conic.vec
    branches = [[], []]
    for t in np.linspace(0.0, np.pi, n, endpoint=False):
        c, s = np.cos(t), np.sin(t)
        qa = A * c * c + B * c * s + C * s * s
        qb = D * c + E * s
        qc = F
        roots = []
        if abs(qa) > 1e-13:
            disc = qb * qb - 4.0 * qa * qc
            if disc >= 0.0:
                sq = np.sqrt(disc)
                roots = [(-qb + sq) / (2 * qa), (-qb - sq) / (2 * qa)]
        elif abs(qb) > 1e-13:
            roots = [-qc / qb, np.nan]
        else:
            roots = [np.nan, np.nan]
        while len(roots) < 2:
            roots.append(np.nan)
        for bi, r in enumerate(roots):
            if np.isfinite(r) and abs(r) <= clip_r:
                branches[bi].append((r * c, r * s))
            else:
                branches[bi].append(None)
    # split on None or large jumps
    segs = []
    for br in branches:
        cur = []
        prev = None
        for item in br:
            jump = (
                item is None
                or (prev is not None
                    and np.hypot(item[0] - prev[0], item[1] - prev[1]) > 0.5)
            )
            if jump:
                if len(cur) >= 2:
                    segs.append(cur)
                cur = [] if item is None else [item]
            else:
                cur.append(item)
            prev = item
        if len(cur) >= 2:
            segs.append(cur)
    return segs


def _view_from_points(zs, pad=1.2):
    xs = [z.real for z in zs]
    ys = [z.imag for z in zs]
    cx = 0.5 * (min(xs) + max(xs))
    cy = 0.5 * (min(ys) + max(ys))
    half = 0.5 * max(max(xs) - min(xs), max(ys) - min(ys)) + pad
    return (cx - half, cx + half), (cy - half, cy + half)


def _figure_pencil(cfg: PlaneConfig) -> bytes:
    d = point_d_direct(cfg)
    anchors = [0.0 + 0.0j, 1.0 + 0.0j, cfg.a, d, cfg.k]
    xlim, ylim = _view_from_points(anchors, pad=1.6)
    cv = _Canvas(xlim, ylim)
    clip_r = 2.5 * max(abs(complex(xlim[1], ylim[1])), 4.0)
    n_dirs = 9
    for j in range(n_dirs):
        l = RP1Dir.from_pair(np.cos(j * np.pi / n_dirs),
                             np.sin(j * np.pi / n_dirs))
        conic, _ = conic_for_l(l, cfg)
        color = _PALETTE[j % len(_PALETTE)]
        for seg in _conic_branches(conic, clip_r):
            cv.polyline([p[0] for p in seg], [p[1] for p in seg],
                        color, width=1.0)
    for circ in d_circles_check(cfg)["circles"]:
        center, radius = circle_center_radius(circ)
        cv.circle_world(center.real, center.imag, radius, "#888888",
                        width=0.8, dash="3 3")
    labels = ("0", "1", "a", "d")
    for z, lab in zip(anchors[:4], labels):
        cv.dot(z.real, z.imag, "#000000", r=4.0)
        cv.text(z.real + 0.08, z.imag + 0.08, lab)
    cv.frame()
    return cv.tobytes("fiber conic pencil and its base points")


def _figure_coincidence(cfg: PlaneConfig) -> bytes:
    from . import topology

    loci = topology.trace_coincidence_loci(cfg)
    d = point_d_direct(cfg)
    anchors = [0.0 + 0.0j, 1.0 + 0.0j, cfg.a, d, cfg.k]
    xlim, ylim = _view_from_points(anchors, pad=2.2)
    cv = _Canvas(xlim, ylim)
    ci = 0
    for pair in sorted(loci):
        loc = loci[pair]
        if loc.kind != "affine_trace":
            continue
        color = _PALETTE[ci % len(_PALETTE)]
        ci += 1
        for curve in loc.curves:
            pts = curve.points
            cv.polyline(pts.real, pts.imag, color, width=1.4,
                        closed=curve.closed)
        rep = loc.curves[0].points[0]
        cv.text(rep.real + 0.1, rep.imag + 0.1,
                "{" + ",".join(pair) + "}", color=color, size=11)
    marker_pts = [0.0 + 0.0j, 1.0 + 0.0j, cfg.a, d]
    for z, lab in zip(marker_pts, ("0", "1", "a", "d")):
        cv.cross(z.real, z.imag, "#000000")
        cv.text(z.real + 0.12, z.imag - 0.12, lab)
    cv.frame()
    cv.text(cv.margin + 4, cv.size - 14,
            "dashed frame: line at infinity; crosses: blow-up points",
            size=11, pixel=True)
    return cv.tobytes("marked-point coincidence loci")


def _figure_cyclic(cfg: PlaneConfig) -> bytes:
    p0 = complex(-1.5, -1.0)
    c = _affine_value_raw(p0, cfg)
    model = fiber_model(c, cfg)
    marked = model.marked_points()
    arcs = fiber_arcs(c, cfg)
    cv = _Canvas((-1.6, 1.6), (-1.6, 1.6))
    cv.circle_world(0.0, 0.0, 1.0, "#bbbbbb", width=1.0)
    for i, arc in enumerate(arcs):
        lo = 2.0 * arc.angle_lo
        span = 2.0 * arc.length
        ts = np.linspace(lo + 0.03, lo + span - 0.03, 64)
        cv.polyline(1.08 * np.cos(ts), 1.08 * np.sin(ts),
                    _PALETTE[i % len(_PALETTE)], width=3.0)
    for name, direction in sorted(marked.items()):
        th = 2.0 * direction.theta
        x, y = np.cos(th), np.sin(th)
        cv.dot(x, y, "#000000", r=4.0)
        cv.text(1.22 * x, 1.22 * y, name, anchor="middle")
    cv.text(0.0, -1.45,
            f"arcs: {len(arcs)}", anchor="middle")
    return cv.tobytes("fiber circle: marked points and attained arcs")


def _critical_samples(cfg: PlaneConfig, n=400):
    return sample_critical_points(n, cfg, seed=cfg.seed + 601)


def _figure_scatter(cfg: PlaneConfig, which: str) -> bytes:
    pts = _critical_samples(cfg)
    if which == "coamoeba":
        coords = [(t[0], t[1]) for t in (arg_tuple(p, cfg) for p in pts)]
        lim = (0.0, 2.0 * np.pi)
        xlim = ylim = lim
        title = "coamoeba projection: (arg x, arg y) over the critical locus"
    else:
        coords = []
        for p in pts:
            amo, _, _ = maps(p, cfg)
            coords.append((amo[0], amo[1]))
        m = max(max(abs(u), abs(v)) for u, v in coords) + 0.5
        xlim = ylim = (-m, m)
        title = "amoeba projection: (log|x|, log|y|) over the critical locus"
    cv = _Canvas(xlim, ylim)
    for u, v in coords:
        cv.dot(u, v, "#0072b2", r=1.6)
    cv.frame()
    cv.text(cv.margin + 4, cv.size - 14,
            f"{len(coords)} seeded samples", size=11, pixel=True)
    return cv.tobytes(title)


def render_figure(cfg: PlaneConfig = DEFAULT_CONFIG,
                  kind: str = "pencil") -> bytes:
    """Render one figure kind to SVG bytes (deterministic per config)."""
    if kind == "pencil":
        return _figure_pencil(cfg)
    if kind == "coincidence":
        return _figure_coincidence(cfg)
    if kind == "cyclic-diagram":
        return _figure_cyclic(cfg)
    if kind == "coamoeba-projection":
        return _figure_scatter(cfg, "coamoeba")
    if kind == "amoeba-projection":
        return _figure_scatter(cfg, "amoeba")
    raise ValueError(f"unknown figure kind {kind!r}; choose from {FIGURE_KINDS}")
