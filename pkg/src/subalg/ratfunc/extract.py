"""Numerator and denominator of a scalar Z-function from its collection.

In a basis (u, E-basis, J-basis) of H the operator L(z) = Σ z_i Λ_i has
a leading (U ⊕ E) block A(z) = Σ z_i A_i.  The Z-problem fixes the u
component of the field to 1 and asks the E component of the current to
vanish, so by Cramer's rule

    Z = det A(z) / det A_EE(z).

Both determinants are homogeneous polynomials; they are recovered
exactly by a discrete Fourier transform on a grid of roots of unity with
z_n = 1, using the bound deg_{z_i} ≤ p_i = dim P_i.
"""

from __future__ import annotations

import numpy as np

from ..collections import ZCollection
from ..errors import KindMismatch, NotPruned, UNotScalar
from ..numcore import DEFAULT_TOL, Tolerance, column_basis
from .poly import MultiPoly, MultiRational

__all__ = [
    "interpolate_homogeneous",
    "det_polynomial",
    "field_blocks",
    "extract_pq",
    "denominator_from_j",
]

_CHOP = 1e-11


def interpolate_homogeneous(f, n_vars: int, degree: int, bounds) -> MultiPoly:
    """Homogeneous polynomial of total ``degree`` from samples of ``f``.

    ``bounds[i]`` caps the power of z_i for i < n_vars − 1; the last
    variable is the homogenizer and is set to 1 on the grid.  Coefficients
    below 1e-11 of the largest are dropped as rounding noise.
    """
    if degree < 0:
        return MultiPoly(n_vars, {})
    free = [min(int(b), degree) for b in bounds[: n_vars - 1]]
    shape = tuple(b + 1 for b in free)
    values = np.empty(shape, dtype=complex)
    roots = [np.exp(2j * np.pi * np.arange(s) / s) for s in shape]
    for idx in np.ndindex(*shape):
        z = [roots[i][k] for i, k in enumerate(idx)] + [1.0]
        values[idx] = f(np.array(z, dtype=complex))
    coef = np.fft.fftn(values) / values.size if shape else values
    scale = np.abs(coef).max(initial=0.0)
    terms = {}
    for idx in np.ndindex(*shape):
        c = coef[idx]
        if abs(c) <= _CHOP * scale:
            continue
        if abs(c.imag) <= _CHOP * scale:
            c = complex(c.real, 0.0)
        elif abs(c.real) <= _CHOP * scale:
            c = complex(0.0, c.imag)
        last = degree - sum(idx)
        if last < 0:
            raise ValueError(f"monomial {idx} exceeds total degree {degree}")
        terms[tuple(idx) + (last,)] = c
    return MultiPoly(n_vars, terms)


def det_polynomial(mats, bounds=None) -> MultiPoly:
    """det Σ z_i M_i as a homogeneous polynomial (rank caps the powers by default)."""
    mats = [np.asarray(m, dtype=complex) for m in mats]
    size = mats[0].shape[0]
    if bounds is None:
        bounds = [np.linalg.matrix_rank(m) for m in mats]

    def f(z):
        return np.linalg.det(sum(zi * m for zi, m in zip(z, mats))) if size else 1.0

    return interpolate_homogeneous(f, len(mats), size, bounds)


def _require_pruned(c: ZCollection, tol: Tolerance):
    if c.kind != "Z":
        raise KindMismatch("extraction needs a Z collection")
    if c.m != 1:
        raise UNotScalar(f"dim U = {c.m}, extraction needs dim U = 1", "dim U = 1")
    g1 = c.gammas()[1]
    basis = column_basis(c.u.frame, tol)
    ops = [g1, *c.lambdas()]
    while True:
        grown = column_basis(np.hstack([basis] + [op @ basis for op in ops]), tol)
        if grown.shape[1] == basis.shape[1]:
            break
        basis = grown
    if basis.shape[1] != c.ambient_dim:
        raise NotPruned(f"closure of U has dim {basis.shape[1]} < {c.ambient_dim}",
                        "H is the closure of U")


def field_blocks(c: ZCollection) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """Per-phase matrices A_i on U ⊕ E and B_i on U ⊕ J (u first)."""
    b = np.hstack([c.u.frame, c.e.ortho, c.j.ortho])
    binv = np.linalg.inv(b)
    q1 = c.e.dim
    ue = np.r_[0 : 1 + q1]
    uj = np.r_[0, 1 + q1 : c.ambient_dim]
    lam = [binv @ li @ b for li in c.lambdas()]
    return [l[np.ix_(ue, ue)] for l in lam], [l[np.ix_(uj, uj)] for l in lam]


def extract_pq(c: ZCollection, tol: Tolerance | None = None) -> MultiRational:
    """Z = p/q with deg p = 1 + dim E and deg q = dim E, normalized at (1, …, 1)."""
    tol = tol or c.tol or DEFAULT_TOL
    _require_pruned(c, tol)
    a_mats, _ = field_blocks(c)
    n = c.n
    q1 = c.e.dim
    bounds = [ph.dim for ph in c.phases]

    def p_at(z):
        return np.linalg.det(sum(zi * a for zi, a in zip(z, a_mats)))

    def q_at(z):
        return np.linalg.det(sum(zi * a[1:, 1:] for zi, a in zip(z, a_mats))) if q1 else 1.0

    p = interpolate_homogeneous(p_at, n, 1 + q1, bounds)
    q = interpolate_homogeneous(q_at, n, q1, bounds)
    return MultiRational.from_polys(p, q)


def denominator_from_j(c: ZCollection, tol: Tolerance | None = None) -> MultiPoly:
    """Denominator of Z built from the U ⊕ J blocks: Π z_i^{p_i} · det Σ B_i / z_i.

    It equals the denominator of :func:`extract_pq` up to a constant factor
    and serves as an independent check of it.
    """
    tol = tol or c.tol or DEFAULT_TOL
    _require_pruned(c, tol)
    _, b_mats = field_blocks(c)
    p = [ph.dim for ph in c.phases]
    degree = sum(p) - b_mats[0].shape[0]

    def f(z):
        inner = sum(b / zi for zi, b in zip(z, b_mats))
        return np.prod(z ** np.array(p)) * np.linalg.det(inner)

    # the power of z_i is p_i minus the (nonnegative) power of 1/z_i
    poly = interpolate_homogeneous(f, c.n, degree, p)
    return poly * (1 / poly(np.ones(c.n)))
