"""Small explicit collections with closed-form associated functions.

These are the building blocks of the realization compiler and the golden
values of the test suite.
"""

from __future__ import annotations

import numpy as np

from .collections import Superfunction, YCollection, ZCollection
from .errors import ConditionViolated
from .numcore import null_space
from .spaces import Subspace

__all__ = [
    "single_phase_z",
    "projected_z",
    "two_phase_z",
    "square_z",
    "product_z",
    "affine_z",
    "weighted_average_z",
    "linear_y",
    "matrix_linear_y",
    "two_port_superfunction",
]


def single_phase_z(m: int = 1) -> ZCollection:
    """U = H, one phase: Z(z1) = z1·I."""
    full = Subspace.full(m)
    zero = Subspace.zero(m)
    return ZCollection(full, zero, zero, (full,))


def projected_z(n: int, k: int) -> ZCollection:
    """Z(z) = z_k on n phases (the other phases are empty)."""
    full = Subspace.full(1)
    zero = Subspace.zero(1)
    phases = tuple(full if i == k else zero for i in range(n))
    return ZCollection(full, zero, zero, phases)


def two_phase_z(p, w) -> ZCollection:
    """Three-dimensional Z(2) collection in the basis (U0, E0, J0).

    ``p`` spans phase 2, and phase 1 is the plane {Q : w·Q = 0}.  Then
    Z = z1 + (z2 − z1) w_U p_U / (w·p + w_E p_E (z2 − z1)/z1).
    """
    p = np.asarray(p, dtype=complex)
    w = np.asarray(w, dtype=complex)
    if abs(w @ p) < 1e-14:
        raise ConditionViolated("phase 2 lies in phase 1", "w·p ≠ 0")
    eye = np.eye(3, dtype=complex)
    u = Subspace(eye[:, [0]])
    e = Subspace(eye[:, [1]])
    j = Subspace(eye[:, [2]])
    plane = Subspace(null_space(w.reshape(1, 3)))
    return ZCollection(u, e, j, (plane, Subspace(p.reshape(3, 1))))


def square_z() -> ZCollection:
    """Z(z1, z2) = z1²/z2."""
    # w·p = w_E p_E = −w_U p_U = 1
    return two_phase_z([-1.0, 1.0, 1.0], [1.0, 1.0, 1.0])


def product_z() -> ZCollection:
    """Z(z1, z2, z3) = z1·z2/z3 with one-dimensional phases.

    Basis (u, e, j); the phases are spanned by (1, 1, 0), (1, 0, 1) and
    (1, 1, 1).  By Cramer's rule the numerator is z3(z1 + z2 − z3) +
    (z1 − z3)(z2 − z3) = z1·z2 and the denominator is z3.
    """
    eye = np.eye(3, dtype=complex)
    phases = tuple(Subspace(np.array([v], dtype=complex).T)
                   for v in ([1, 1, 0], [1, 0, 1], [1, 1, 1]))
    return ZCollection(Subspace(eye[:, [0]]), Subspace(eye[:, [1]]), Subspace(eye[:, [2]]), phases)


def weighted_average_z(c: complex) -> ZCollection:
    """Z = c·z1 + (1 − c)·z2 from the three-dimensional collection (w_E = 0)."""
    return two_phase_z([1.0 - c, 1.0, c], [1.0, 0.0, 1.0])


def affine_z(c: complex) -> ZCollection:
    """Z = c·z1 + (1 − c)·z2 on a two-dimensional space (one-dimensional phases).

    Basis (u, Λ1 u): Λ1 u = v2, Γ0 v2 = c·u, E = 0.
    """
    c = complex(c)
    u = Subspace(np.array([[1.0], [0.0]], complex))
    e = Subspace.zero(2)
    j = Subspace(np.array([[-c], [1.0]], complex))
    p1 = Subspace(np.array([[0.0], [1.0]], complex))
    p2 = Subspace(np.array([[1.0], [-1.0]], complex))
    return ZCollection(u, e, j, (p1, p2))


def linear_y(alphas) -> YCollection:
    """One-dimensional V with Y(z) = Σ α_i z_i.

    Basis p_0 ∈ V, p_i ∈ P_i; E = span(p_0 + Σ α_i p_i) and
    J = {Σ_i J_i = 0}.  Needs Σ α_i ≠ −1.
    """
    a = np.asarray(alphas, dtype=complex).reshape(-1)
    n = a.size
    if abs(1.0 + a.sum()) < 1e-12:
        raise ConditionViolated("E would lie in J", "Σ α_i ≠ −1")
    k = n + 1
    eye = np.eye(k, dtype=complex)
    e_vec = np.concatenate([[1.0], a]).reshape(k, 1)
    j_frame = eye[:, 1:] - eye[:, [0]]
    phases = tuple(Subspace(eye[:, [i]]) for i in range(1, k))
    return YCollection(Subspace(e_vec), Subspace(j_frame), Subspace(eye[:, [0]]), phases)


def matrix_linear_y(b) -> YCollection:
    """Y(z1) = z1·B on K = V ⊕ P1 with dim V = dim P1 = m.

    E = span[I; I] and J = span[−B; I]; needs det(I + B) ≠ 0.
    """
    b = np.atleast_2d(np.asarray(b, dtype=complex))
    m = b.shape[0]
    eye = np.eye(m, dtype=complex)
    if abs(np.linalg.det(eye + b)) < 1e-12:
        raise ConditionViolated("E would meet J", "det(I + B) ≠ 0")
    e = Subspace(np.vstack([eye, eye]))
    j = Subspace(np.vstack([-b, eye]))
    v = Subspace(np.vstack([eye, np.zeros((m, m))]))
    p = Subspace(np.vstack([np.zeros((m, m)), eye]))
    return YCollection(e, j, v, (p,))


def two_port_superfunction(e_coef, j_coef) -> Superfunction:
    """Two-dimensional V = span(p1) ⊕ span(p2) with one phase P1 = span(p3, p4).

    E is spanned by p_i + Σ_k e_coef[i, k] p_{3+k}, and J by
    p_{3+k} + Σ_i j_coef[k, i] p_i.  Then Y(z1) = −z1·(e_coef @ j_coef)^T
    in the frame (p1, p2), and V_in = span(p1), V_out = span(p2).
    """
    ec = np.asarray(e_coef, dtype=complex).reshape(2, 2)
    jc = np.asarray(j_coef, dtype=complex).reshape(2, 2)
    eye = np.eye(4, dtype=complex)
    e_frame = np.vstack([np.eye(2), ec.T])
    j_frame = np.vstack([jc.T, np.eye(2)])
    e = Subspace(e_frame)
    j = Subspace(j_frame)
    return Superfunction.from_ports(e, j, Subspace(eye[:, [0]]), Subspace(eye[:, [1]]),
                                    (Subspace(eye[:, 2:]),))
