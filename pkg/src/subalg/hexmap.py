"""Hexagon coordinates for real sign sectors of (z1, z2, z3) and pole paths.

A real triple with exactly one component of opposite sign lies in one of
three sectors, numbered by that component.  The ratios of magnitudes map
every sector onto the same hexagon in the plane:

    t1 = 1/(1 + |z2/z3|),  t2 = 1/(1 + |z3/z1|),  t3 = 1/(1 + |z1/z2|)
    s_i = 3 t_i − (t1 + t2 + t3)
    x = s1,  y = (s1 + 2 s2)/√3

Poles of a scalar three-phase Z are followed along slices where the two
same-sign variables are fixed and positive and the third varies over the
negative axis.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from html import escape

import numpy as np
from numpy.polynomial import polynomial as npoly

from .collections import ZCollection
from .errors import HexPreconditionError, KindMismatch, NotScalarU, NotThreePhase, ZeroComponent
from .fileio import atomic_write_text
from .numcore import DEFAULT_TOL, Tolerance
from .ratfunc.extract import extract_pq
from .ratfunc.poly import MultiPoly, MultiRational

__all__ = [
    "HexPoint",
    "GridSpec",
    "hex_coords",
    "hex_t",
    "hexagon_of",
    "hexagon_vertices",
    "normalized_value",
    "slice_roots",
    "pole_trajectory",
    "pole_counts",
    "estimate_q2",
    "CSV_COLUMNS",
    "trajectory_csv",
    "write_csv",
    "trajectory_svg",
    "write_svg",
]

CSV_COLUMNS = ("hexagon_id", "branch_id", "grid_param", "x", "y")
_SQRT3 = math.sqrt(3.0)


@dataclass(frozen=True)
class HexPoint:
    """A point of hexagon ``hexagon_id`` (the index of the odd-signed variable).

    Points on a pole path also carry the branch number and the grid value
    of the slice they came from.
    """

    hexagon_id: int
    x: float
    y: float
    z: tuple
    branch_id: int = 0
    grid_param: float = math.nan


@dataclass(frozen=True)
class GridSpec:
    """Geometric grid for the ratio r of the two fixed positive variables."""

    lo: float = 1e-2
    hi: float = 1e2
    count: int = 41

    def __post_init__(self):
        if not (0 < self.lo <= self.hi) or self.count < 1:
            raise HexPreconditionError("grid needs 0 < lo ≤ hi and count ≥ 1")

    def values(self) -> np.ndarray:
        if self.count == 1:
            return np.array([self.lo])
        return np.geomspace(self.lo, self.hi, self.count)


def _real_triple(z) -> tuple[float, float, float]:
    vals = np.asarray(z).reshape(-1)
    if vals.size != 3:
        raise NotThreePhase(f"hexagon coordinates need 3 values, got {vals.size}")
    if np.iscomplexobj(vals) and np.any(vals.imag != 0):
        raise HexPreconditionError("hexagon coordinates need real values")
    out = tuple(float(v) for v in vals.real)
    if any(v == 0 for v in out):
        raise ZeroComponent(f"z = {out} has a zero component")
    return out


def hexagon_of(z) -> int:
    """1, 2 or 3: the variable whose sign differs from the other two."""
    zs = _real_triple(z)
    neg = [i for i, v in enumerate(zs) if v < 0]
    if len(neg) == 1:
        return neg[0] + 1
    if len(neg) == 2:
        return ({0, 1, 2} - set(neg)).pop() + 1
    raise HexPreconditionError(f"z = {zs} has no component of opposite sign")


def hex_t(z) -> tuple[float, float, float]:
    """(t1, t2, t3) of a real triple; one component may be infinite."""
    z1, z2, z3 = (abs(v) for v in _real_triple(z))
    return 1 / (1 + z2 / z3), 1 / (1 + z3 / z1), 1 / (1 + z1 / z2)


def _xy(t) -> tuple[float, float]:
    t1, t2, t3 = t
    s1 = 2 * t1 - t2 - t3
    s2 = 2 * t2 - t3 - t1
    return s1, (s1 + 2 * s2) / _SQRT3


def hex_coords(z) -> HexPoint:
    """Plane position of a real triple with exactly one sign differing."""
    zs = _real_triple(z)
    x, y = _xy(hex_t(zs))
    return HexPoint(hexagon_of(zs), x, y, zs)


def hexagon_vertices() -> list[tuple[float, float]]:
    """Corners of the image hexagon, in boundary order."""
    corners = [(1, 0, 0), (1, 0, 1), (0, 0, 1), (0, 1, 1), (0, 1, 0), (1, 1, 0)]
    return [_xy(t) for t in corners]


def normalized_value(r: MultiRational, z) -> complex:
    """Z(z)/√(z_b z_c), with z_b and z_c the two same-sign variables.

    This is the scale-free quantity plotted on each hexagon.  The factor is
    nonzero off the hexagon edges, so it moves no poles.
    """
    zs = _real_triple(z)
    a = hexagon_of(zs) - 1
    b, c = (i for i in range(3) if i != a)
    return r(np.array(zs, dtype=complex)) / math.sqrt(zs[b] * zs[c])


def _slice(q: MultiPoly, a: int, fixed: dict) -> np.ndarray:
    """Coefficients in z_a of q with the other variables fixed."""
    coef = np.zeros(max(q.degree_in(a), 0) + 1, dtype=complex)
    for e, c in q.terms.items():
        coef[e[a]] += c * np.prod([fixed[i] ** e[i] for i in fixed])
    return coef


def slice_roots(q: MultiPoly, a: int, fixed: dict, bound: int,
                tol: float = 1e-7) -> tuple[list[float], bool]:
    """Real negative roots in z_a of q, and whether a root sits at infinity.

    Roots come from the eigenvalues of the companion matrix.  A root at
    infinity is reported when the z_a-degree of the slice falls below
    ``bound``.
    """
    coef = _slice(q, a, fixed)
    scale = np.abs(coef).max(initial=0.0)
    if scale == 0:
        raise HexPreconditionError("denominator vanishes on the whole slice")
    while coef.size > 1 and abs(coef[-1]) <= 1e-10 * scale:
        coef = coef[:-1]
    degree = coef.size - 1
    at_infinity = degree < bound
    if degree == 0:
        return [], at_infinity
    roots = np.linalg.eigvals(npoly.polycompanion(coef))
    keep = []
    for root in roots:
        if abs(root.imag) > tol * (1 + abs(root)) or root.real >= 0:
            continue
        x = root.real
        size = np.sum(np.abs(coef) * abs(x) ** np.arange(coef.size))
        if abs(npoly.polyval(x, coef)) > 1e-8 * size:
            raise HexPreconditionError(f"root {x:.6g} fails the residual check")
        keep.append(float(x))
    return sorted(keep, reverse=True), at_infinity


def _require_hexplot(c: ZCollection) -> None:
    if not isinstance(c, ZCollection) or c.kind != "Z":
        raise KindMismatch("pole paths need a Z collection")
    if c.n != 3:
        raise NotThreePhase(f"pole paths need 3 phases, got {c.n}")
    if c.m != 1:
        raise NotScalarU(f"pole paths need dim U = 1, got {c.m}")


def pole_trajectory(c: ZCollection, grid: GridSpec | None = None,
                    tol: Tolerance | None = None) -> list[HexPoint]:
    """Pole paths of Z on the three hexagons.

    On hexagon a the other two variables are fixed to (r, 1), in index
    order, for each grid value r.  Branch ids count poles outward from the
    origin of the negative z_a axis; the pole at z_a = −∞ comes last.
    """
    _require_hexplot(c)
    grid = grid or GridSpec()
    r = extract_pq(c, tol or c.tol or DEFAULT_TOL)
    dims = [ph.dim for ph in c.phases]
    points = []
    for a in range(3):
        b, cc = (i for i in range(3) if i != a)
        for g in grid.values():
            fixed = {b: float(g), cc: 1.0}
            roots, at_inf = slice_roots(r.q, a, fixed, dims[a])
            values = roots + ([-math.inf] if at_inf else [])
            for branch, root in enumerate(values):
                z = [0.0] * 3
                z[a], z[b], z[cc] = root, float(g), 1.0
                x, y = _xy(hex_t(z))
                points.append(HexPoint(a + 1, x, y, tuple(z), branch, float(g)))
    return points


def pole_counts(points) -> dict[int, int]:
    """Number of pole branches on each hexagon (the most poles on any slice)."""
    counts = {1: 0, 2: 0, 3: 0}
    for p in points:
        counts[p.hexagon_id] = max(counts[p.hexagon_id], p.branch_id + 1)
    return counts


def estimate_q2(c: ZCollection, grid: GridSpec | None = None) -> int | None:
    """Generic estimate of dim J from poles crossing the z2 = 0 edge of hexagon 1.

    With z2 → 0 and z3 = 1 the number of crossing pole paths, when below
    p1, equals 1 + q2 − p2.  Returns None when the count is p1, where the
    rule cannot decide.  This is a heuristic and is not guaranteed.
    """
    _require_hexplot(c)
    r = extract_pq(c)
    p1, p2 = c.phases[0].dim, c.phases[1].dim
    roots, at_inf = slice_roots(r.q, 0, {1: 0.0, 2: 1.0}, p1)
    crossing = len(roots) + int(at_inf)
    if crossing >= p1:
        return None
    return crossing + p2 - 1


# --- writers --------------------------------------------------------------

def _fmt(x: float) -> str:
    return repr(float(x))


def trajectory_csv(points) -> str:
    """CSV text with columns hexagon_id, branch_id, grid_param, x, y."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for p in sorted(points, key=lambda p: (p.hexagon_id, p.branch_id, p.grid_param)):
        w.writerow((p.hexagon_id, p.branch_id, _fmt(p.grid_param), _fmt(p.x), _fmt(p.y)))
    return buf.getvalue()


def write_csv(points, path):
    return atomic_write_text(path, trajectory_csv(points))


_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf")


def trajectory_svg(points, size: int = 240, title: str = "") -> str:
    """Static SVG with the three hexagons side by side and one polyline per branch."""
    pad = 0.1 * size
    half = size / 2 - pad
    extent = max(max(abs(x), abs(y)) for x, y in hexagon_vertices())

    def to_px(panel: int, x: float, y: float) -> tuple[float, float]:
        cx = panel * size + size / 2
        cy = size / 2 + 20
        return cx + x / extent * half, cy - y / extent * half

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{3 * size}" height="{size + 20}" '
           f'viewBox="0 0 {3 * size} {size + 20}">']
    if title:
        out.append(f'<title>{escape(title)}</title>')
    for panel in range(3):
        verts = " ".join(f"{px:.3f},{py:.3f}" for px, py in
                         (to_px(panel, x, y) for x, y in hexagon_vertices()))
        out.append(f'<polygon points="{verts}" fill="none" stroke="#444" stroke-width="1"/>')
        out.append(f'<text x="{panel * size + size / 2:.1f}" y="14" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="12">hexagon {panel + 1}</text>')
    branches: dict = {}
    for p in points:
        branches.setdefault((p.hexagon_id, p.branch_id), []).append(p)
    for (hid, bid), pts in sorted(branches.items()):
        pts.sort(key=lambda p: p.grid_param)
        coords = [to_px(hid - 1, p.x, p.y) for p in pts]
        color = _COLORS[bid % len(_COLORS)]
        if len(coords) > 1:
            path = " ".join(f"{px:.3f},{py:.3f}" for px, py in coords)
            out.append(f'<polyline points="{path}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        for px, py in coords:
            out.append(f'<circle cx="{px:.3f}" cy="{py:.3f}" r="1.5" fill="{color}"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_svg(points, path, title: str = ""):
    return atomic_write_text(path, trajectory_svg(points, title=title))
