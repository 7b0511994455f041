"""Coefficient counts for three-phase scalar Z-functions, and a pair of
different collections sharing one function.
"""

from __future__ import annotations

import cmath
from itertools import product

import numpy as np

from ..collections import ZCollection
from ..errors import DegenerateQuadratic, DimensionConstraintViolated
from ..spaces import Subspace
from .poly import MultiPoly, MultiRational

__all__ = [
    "coefficient_count",
    "count_exponents",
    "nonuniqueness_collection",
    "nonuniqueness_z",
    "nonuniqueness_demo",
    "partner_gamma3",
]


def count_exponents(p, total: int) -> int:
    """Number of exponent tuples a with Σ a_i = total and 0 ≤ a_i ≤ p_i."""
    return sum(1 for a in product(*(range(x + 1) for x in p)) if sum(a) == total)


def coefficient_count(p1: int, p2: int, p3: int, q1: int, q2: int) -> tuple[int, int]:
    """Independent coefficients (k1, k2) of the numerator and denominator.

    k1 + 1 monomials z^a with Σa = 1 + q1 and a_i ≤ p_i are allowed in the
    numerator, and k2 + 1 in the J-side form of the denominator; one
    coefficient of each is fixed by normalization.  The closed form needs a
    pruned dimension pattern: h = 1 + q1 + q2 = Σ p and p_i ≤ 1 + min(q1, q2).
    """
    p = (p1, p2, p3)
    h = 1 + q1 + q2
    if min(p + (q1, q2)) < 0:
        raise DimensionConstraintViolated("dimensions must be nonnegative", "dims ≥ 0")
    if sum(p) != h:
        raise DimensionConstraintViolated(
            f"1 + q1 + q2 = {h} but p1 + p2 + p3 = {sum(p)}", "1 + q1 + q2 = p1 + p2 + p3")
    if max(p) > 1 + min(q1, q2) or q1 > 2 * (1 + q2) or q2 > 2 * (1 + q1):
        raise DimensionConstraintViolated(
            f"p = {p}, q = ({q1}, {q2}) is not a pruned pattern",
            "p_i ≤ 1 + q_j and q_j ≤ 2(1 + q_k)")
    sq = p1 * p1 + p2 * p2 + p3 * p3
    k1 = (2 * (1 + q1) * q2 - sq + h) // 2
    k2 = (2 * (1 + q2) * q1 - sq + h) // 2
    return k1, k2


def nonuniqueness_collection(gamma1, gamma2, gamma3, gamma4, delta1, delta2) -> ZCollection:
    """Five-dimensional three-phase collection with p = (1, 1, 3), q1 = q2 = 2.

    Basis v0 = u, v1 = Λ1u, v2 = Λ2u, v3 = Γ1v1, v4 = Γ1v2, closed by
    Λ1v3 = γ1v1, Λ2v3 = γ2v2, Λ1v4 = γ3v1, Λ2v4 = γ4v2 and Γ0v_i = δ_i v0.
    """
    eye = np.eye(5, dtype=complex)
    v = [eye[:, i] for i in range(5)]
    col = lambda *vs: Subspace(np.column_stack(vs))  # noqa: E731
    u = col(v[0])
    e = col(v[3], v[4])
    j = col(v[1] - delta1 * v[0] - v[3], v[2] - delta2 * v[0] - v[4])
    p3 = col(v[0] - v[1] - v[2],
             v[3] - gamma1 * v[1] - gamma2 * v[2],
             v[4] - gamma3 * v[1] - gamma4 * v[2])
    return ZCollection(u, e, j, (col(v[1]), col(v[2]), p3))


def nonuniqueness_z(gamma2, gamma3, delta1, delta2) -> MultiRational:
    """Z(z1, z2, z3) of the collection above with γ1 = γ4 = 0, homogenized by z3."""
    z1, z2, z3 = (MultiPoly.variable(3, i) for i in range(3))
    x, y = z1 - z3, z2 - z3
    den = z3 * z3 - x * y * (gamma2 * gamma3)
    num = den + x * z3 * delta1 + y * z3 * delta2 - x * y * (gamma3 * delta1 + gamma2 * delta2)
    return MultiRational.from_polys(num * z3, den)


def partner_gamma3(gamma2, t2, delta1, delta2) -> complex:
    """γ3 matching a root γ2 through t2 = γ3δ1 + γ2δ2."""
    return (t2 - gamma2 * delta2) / delta1


def nonuniqueness_demo(gamma2, gamma3, delta1, delta2, tol: float = 1e-12):
    """Z and the two values of γ2 that produce it.

    Z fixes δ1, δ2, t1 = γ2γ3 and t2 = γ3δ1 + γ2δ2.  Eliminating γ3 leaves
    δ2γ2² − t2γ2 + t1δ1 = 0, whose roots are the original γ2 and γ3δ1/δ2.
    """
    if delta2 == 0:
        raise DimensionConstraintViolated("δ2 must be nonzero", "δ2 ≠ 0")
    t1 = gamma2 * gamma3
    t2 = gamma3 * delta1 + gamma2 * delta2
    disc = t2 * t2 - 4 * t1 * delta1 * delta2
    root = cmath.sqrt(disc)
    roots = ((t2 + root) / (2 * delta2), (t2 - root) / (2 * delta2))
    if abs(disc) <= tol * max(abs(t2) ** 2, abs(4 * t1 * delta1 * delta2), 1e-300):
        err = DegenerateQuadratic(f"discriminant {disc:.3g} vanishes: double root {roots[0]:.12g}")
        err.root = roots[0]
        raise err
    return nonuniqueness_z(gamma2, gamma3, delta1, delta2), roots
