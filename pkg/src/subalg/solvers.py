"""Associated functions Z(z), Y(z) and F(z) of subspace collections.

Two closed-form evaluations are provided for Z and Y:

* ``direct``: inverts L and then a compressed operator on a subspace,
* ``shifted``: a resolvent around a reference value ``z0``; it needs no
  inverse of L, so it also works when some ``z_i`` vanish.

:func:`solve_z_system` and :func:`solve_y_system` solve the defining linear
problems as one stacked system; tests use them as an independent oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .collections import Superfunction, YCollection, ZCollection
from .errors import (
    Divergent,
    Singular,
    SingularCoupling,
    SingularFEJ,
    SingularL,
    SingularOnJ,
    SingularOnSubspace,
    SingularResolvent,
)
from .numcore import DEFAULT_TOL, Tolerance, restricted_inverse

__all__ = [
    "AssociatedEval",
    "solve_z",
    "solve_y",
    "solve_superfunction",
    "f_from_y",
    "y_from_f",
    "series_expand",
    "SeriesResult",
    "solve_z_system",
    "solve_y_system",
    "Z0_LADDER",
]

# reference values tried in order when the shifted bracket is singular
Z0_LADDER: tuple[complex, ...] = (1.0, 1.0 + 0.3j, 1.0 - 0.3j, 2.0)


@dataclass(frozen=True)
class AssociatedEval:
    value: np.ndarray
    z: tuple[complex, ...]
    method: str

    def __array__(self, dtype=None, copy=None):
        return self.value if dtype is None else self.value.astype(dtype)


def _as_z(c, z) -> np.ndarray:
    z = np.asarray(z, dtype=complex).reshape(-1)
    if z.size != c.n:
        raise ValueError(f"expected {c.n} variables, got {z.size}")
    if not np.all(np.isfinite(z)):
        raise ValueError("z must be finite")
    return z


def _is_singular(a: np.ndarray, tol: Tolerance) -> bool:
    if a.size == 0:
        return False
    s = np.linalg.svd(a, compute_uv=False)
    return s[0] == 0.0 or s[-1] <= tol.rank_rel * s[0]


def _inverse_l(c, z: np.ndarray, tol: Tolerance) -> np.ndarray:
    scale = max(1.0, float(np.max(np.abs(z)))) if z.size else 1.0
    if np.any(np.abs(z) <= tol.rank_rel * scale):
        raise SingularL("L is singular: some z_i is zero")
    out = np.zeros((c.ambient_dim, c.ambient_dim), complex)
    for zi, lam in zip(z, c.lambdas()):
        out += lam / zi
    return out


def _ladder(z0):
    return Z0_LADDER if z0 is None else (complex(z0),)


# --- Z ------------------------------------------------------------------

def _z_direct(c: ZCollection, z: np.ndarray, tol: Tolerance) -> np.ndarray:
    g0, _, g2 = c.gammas()
    linv = _inverse_l(c, z, tol)
    s = g0 + g2
    uj = np.hstack([c.u.ortho, c.j.ortho])
    try:
        r = restricted_inverse(s @ linv @ s, uj, tol)
    except SingularOnSubspace as exc:
        raise SingularOnSubspace("operator is singular on U ⊕ J") from exc
    return c.u.coords(g0 @ r @ c.u.frame)


def _z_shifted(c: ZCollection, z: np.ndarray, z0: complex, tol: Tolerance) -> np.ndarray:
    if z0 == 0:
        raise ValueError("z0 must be nonzero")
    g0, g1, _ = c.gammas()
    lop = c.l_operator(z)
    eye = np.eye(c.ambient_dim, dtype=complex)
    bracket = z0 * eye + g1 @ (lop - z0 * eye)
    if _is_singular(bracket, tol):
        raise SingularResolvent(f"shifted bracket singular at z0={z0}")
    x = np.linalg.solve(bracket, g0 @ c.u.frame)
    return c.u.coords(z0 * (g0 @ (lop @ x)))


def solve_z(c: ZCollection, z, method: str = "shifted", z0=None, tol: Tolerance | None = None) -> AssociatedEval:
    """Matrix of Z(z) in the frame of U.

    ``method="shifted"`` with ``z0=None`` walks :data:`Z0_LADDER` until the
    bracket is nonsingular.
    """
    tol = tol or c.tol
    zz = _as_z(c, z)
    if method == "direct":
        return AssociatedEval(_z_direct(c, zz, tol), tuple(zz), "direct")
    if method != "shifted":
        raise ValueError(f"unknown method {method!r}")
    last = None
    for w in _ladder(z0):
        try:
            return AssociatedEval(_z_shifted(c, zz, w, tol), tuple(zz), f"shifted({w})")
        except SingularResolvent as exc:
            last = exc
    raise last


# --- Y ------------------------------------------------------------------

def _y_direct(c: YCollection, z: np.ndarray, tol: Tolerance) -> np.ndarray:
    m = c.m
    if c.j.dim == 0:
        return np.zeros((m, m), complex)
    _, g2 = c.gammas()
    pi1 = c.pi1()
    pi2 = np.eye(c.ambient_dim, dtype=complex) - pi1
    linv = _inverse_l(c, z, tol)
    try:
        r = restricted_inverse(g2 @ linv @ pi2 @ g2, c.j.ortho, tol)
    except SingularOnSubspace as exc:
        raise SingularOnJ("operator is singular on J") from exc
    return c.v_coords(pi1 @ g2 @ r @ g2 @ c.v.frame)


def _y_shifted(c: YCollection, z: np.ndarray, z0: complex, tol: Tolerance) -> np.ndarray:
    if z0 == 0:
        raise ValueError("z0 must be nonzero")
    g1, _ = c.gammas()
    pi1 = c.pi1()
    pi2 = np.eye(c.ambient_dim, dtype=complex) - pi1
    scale = max(1.0, abs(z0))
    if np.any(np.abs(z - z0) <= tol.rank_rel * scale):
        raise SingularResolvent(f"z0={z0} coincides with a variable")
    resolvent = np.zeros((c.ambient_dim, c.ambient_dim), complex)
    for zi, lam in zip(z, c.lambdas()):
        resolvent += lam / (zi - z0)
    bracket = g1 + z0 * resolvent @ pi2
    if _is_singular(bracket, tol):
        raise SingularResolvent(f"shifted bracket singular at z0={z0}")
    x = np.linalg.solve(bracket, c.v.frame)
    return c.v_coords(z0 * (pi1 @ x)) - z0 * np.eye(c.m)


def solve_y(c: YCollection, z, method: str = "shifted", z0=None, tol: Tolerance | None = None) -> AssociatedEval:
    """Matrix of Y(z) in the frame of V, with J_1 = −Y E_1."""
    tol = tol or c.tol
    zz = _as_z(c, z)
    if c.m == 0:
        return AssociatedEval(np.zeros((0, 0), complex), tuple(zz), method)
    if method == "direct":
        return AssociatedEval(_y_direct(c, zz, tol), tuple(zz), "direct")
    if method != "shifted":
        raise ValueError(f"unknown method {method!r}")
    if c.j.dim == 0:
        return AssociatedEval(np.zeros((c.m, c.m), complex), tuple(zz), "shifted")
    last = None
    for w in _ladder(z0):
        try:
            return AssociatedEval(_y_shifted(c, zz, w, tol), tuple(zz), f"shifted({w})")
        except SingularResolvent as exc:
            last = exc
    raise last


# --- superfunctions -------------------------------------------------------

def f_from_y(y: np.ndarray, port_dim: int, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Port-transfer matrix F from the blocks of Y (input first, then output)."""
    k = port_dim
    yii, yio = y[:k, :k], y[:k, k:]
    yoi, yoo = y[k:, :k], y[k:, k:]
    if _is_singular(yio, tol):
        raise SingularCoupling("Y^IO is singular")
    inv = np.linalg.inv(yio)
    fee = -inv @ yii
    fej = -inv
    fje = yoo @ inv @ yii - yoi
    fjj = yoo @ inv
    return np.block([[fee, fej], [fje, fjj]])


def y_from_f(f, port_dim: int | None = None, tol: Tolerance = DEFAULT_TOL):
    """Inverse of :func:`f_from_y`; accepts a matrix or an AssociatedEval."""
    val = f.value if isinstance(f, AssociatedEval) else np.asarray(f, dtype=complex)
    k = port_dim if port_dim is not None else val.shape[0] // 2
    fee, fej = val[:k, :k], val[:k, k:]
    fje, fjj = val[k:, :k], val[k:, k:]
    if _is_singular(fej, tol):
        raise SingularFEJ("F^EJ is singular")
    inv = np.linalg.inv(fej)
    y = np.block([[inv @ fee, -inv], [fjj @ inv @ fee - fje, -fjj @ inv]])
    if isinstance(f, AssociatedEval):
        return AssociatedEval(y, f.z, f.method)
    return y


def _f_ports(s: Superfunction, z: np.ndarray, tol: Tolerance) -> np.ndarray:
    """F from the port problem: unknown E and J coefficients, fixed input pair."""
    b = s.base
    m = s.port_dim
    ps = s._port_sum
    lop = b.l_operator(z)
    pi2 = np.eye(b.ambient_dim) - ps.projectors()[0] - ps.projectors()[1]
    be, bj = b.e.frame, b.j.frame
    q1, q2 = be.shape[1], bj.shape[1]
    rows = np.block([
        [ps.component_coords(0, be), np.zeros((m, q2))],
        [np.zeros((m, q1)), ps.component_coords(0, bj)],
        [-lop @ pi2 @ be, pi2 @ bj],
    ])
    rhs = np.vstack([np.eye(2 * m), np.zeros((b.ambient_dim, 2 * m))])
    sol, *_ = np.linalg.lstsq(rows, rhs, rcond=None)
    sv = np.linalg.svd(rows, compute_uv=False)
    unique = sv.size == q1 + q2 and sv[-1] > tol.rank_rel * max(sv[0], 1.0)
    if not unique or np.linalg.norm(rows @ sol - rhs) > tol.residual_abs * max(1.0, np.linalg.norm(rhs)):
        raise SingularCoupling("port problem has no unique solution")
    eo = ps.component_coords(1, be @ sol[:q1])
    jo = ps.component_coords(1, bj @ sol[q1:])
    return np.vstack([eo, jo])


def solve_superfunction(s: Superfunction, z, method: str = "shifted", z0=None,
                        tol: Tolerance | None = None) -> AssociatedEval:
    """F(z) mapping input port pairs (E^I, J^I) to output pairs (E^O, J^O).

    ``method="ports"`` solves the port problem directly.  The other methods
    assemble F from the blocks of Y and fall back to the port problem when Y
    does not exist or Y^IO is singular.
    """
    tol = tol or s.base.tol
    zz = _as_z(s.base, z)
    if method != "ports":
        try:
            y = solve_y(s.base, zz, method=method, z0=z0, tol=tol)
            return AssociatedEval(f_from_y(y.value, s.port_dim, tol), y.z, y.method)
        except Singular:
            pass
    return AssociatedEval(_f_ports(s, zz, tol), tuple(zz), "ports")


# --- series ---------------------------------------------------------------

@dataclass(frozen=True)
class SeriesResult:
    z_partial: list[np.ndarray]   # partial sums of Z, orders 0..order
    e_terms: list[np.ndarray]     # field terms X^j e (columns: U frame), j ≥ 1
    term_norms: list[float]


def series_expand(c: ZCollection, z, z0: complex = 1.0, order: int = 20, window: int = 8) -> SeriesResult:
    """Neumann expansion of the shifted formula around ``z0``.

    With X = Γ1 (z0 − L) / z0 the fields are E = Σ_{j≥1} X^j e and
    Z = z0 Γ0 + Σ_{j≥0} Γ0 (L − z0) X^j Γ0.  Raises :class:`Divergent`
    if the term norms fail to decrease over ``window`` consecutive orders.
    """
    zz = _as_z(c, z)
    g0, g1, _ = c.gammas()
    eye = np.eye(c.ambient_dim, dtype=complex)
    shift = c.l_operator(zz) - z0 * eye
    x_op = -g1 @ shift / z0
    field = g0 @ c.u.frame
    total = z0 * c.u.coords(field)
    partial = []
    e_terms = []
    norms = []
    for j in range(order + 1):
        if j:
            field = x_op @ field
            e_terms.append(field)
        term = c.u.coords(g0 @ (shift @ field))
        total = total + term
        partial.append(total.copy())
        norms.append(float(np.linalg.norm(term)))
        if j >= window and norms[-1] > 1e-300:
            recent = norms[-window:]
            if all(b >= a for a, b in zip(recent, recent[1:])):
                raise Divergent("series term norms are not decreasing")
    return SeriesResult(partial, e_terms, norms)


# --- stacked linear systems (oracle) --------------------------------------

def solve_z_system(c: ZCollection, z) -> np.ndarray:
    """Solve j + J = L(e + E) for each frame vector e as one linear system."""
    zz = _as_z(c, z)
    lop = c.l_operator(zz)
    bu, be, bj = c.u.frame, c.e.frame, c.j.frame
    # unknowns: coefficients of E, J and j
    a = np.hstack([-lop @ be, bj, bu])
    rhs = lop @ bu
    sol = np.linalg.lstsq(a, rhs, rcond=None)[0]
    if np.linalg.norm(a @ sol - rhs) > 1e-8 * max(1.0, np.linalg.norm(rhs)):
        raise Singular("Z-problem has no solution")
    return sol[be.shape[1] + bj.shape[1]:]


def solve_y_system(c: YCollection, z) -> np.ndarray:
    """Solve for E ∈ E, J ∈ J with Π1 E = E_1 and Π2 J = L Π2 E; returns Y."""
    zz = _as_z(c, z)
    if c.m == 0:
        return np.zeros((0, 0), complex)
    lop = c.l_operator(zz)
    pi1 = c.pi1()
    pi2 = np.eye(c.ambient_dim, dtype=complex) - pi1
    be, bj = c.e.frame, c.j.frame
    top = np.hstack([pi1 @ be, np.zeros((c.ambient_dim, bj.shape[1]), complex)])
    bottom = np.hstack([-lop @ pi2 @ be, pi2 @ bj])
    a = np.vstack([top, bottom])
    rhs = np.vstack([c.v.frame, np.zeros((c.ambient_dim, c.m), complex)])
    sol = np.linalg.lstsq(a, rhs, rcond=None)[0]
    if np.linalg.norm(a @ sol - rhs) > 1e-8 * max(1.0, np.linalg.norm(rhs)):
        raise Singular("Y-problem has no solution")
    j1 = pi1 @ bj @ sol[be.shape[1]:]
    return -c.v_coords(j1)
