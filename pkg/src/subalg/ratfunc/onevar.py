"""Two-phase scalar collections and rational functions of one variable.

With z2 = 1 and w = 1 − z1 a pruned two-phase collection with dim U = 1
has one of two canonical shapes, fixed by parameters γ and δ:

    even, h = 2d:     Z = 1 − Σ_{j=0}^{d−1} t_j w^{j+1} / (1 − Σ_{j=1}^{d−1} s_j w^j)
    odd,  h = 2d − 1: Z = 1 − Σ_{j=1}^{d−1} t_j w^j     / (1 − Σ_{j=1}^{d−1} s_j w^j)

with s_j = γ_{d−j} and t a triangular transform of δ.  This module builds
the canonical collection from (γ, δ) and recovers (γ, δ) from Z.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly

from ..collections import ZCollection
from ..errors import DegreeMismatch, DimensionMismatch, NotExpressible
from ..spaces import Subspace
from .poly import MultiRational

__all__ = [
    "OneVarParams",
    "canonical_collection",
    "onevar_z",
    "st_coefficients",
    "recover_1var",
]

_SMALL = 1e-10


@dataclass(frozen=True)
class OneVarParams:
    """γ_1..γ_{d−1} and δ_1..δ_d (even) or δ_1..δ_{d−1} (odd)."""

    parity: str
    gammas: tuple
    deltas: tuple

    def __post_init__(self):
        if self.parity not in ("even", "odd"):
            raise ValueError("parity must be 'even' or 'odd'")
        g = tuple(complex(x) for x in self.gammas)
        dl = tuple(complex(x) for x in self.deltas)
        object.__setattr__(self, "gammas", g)
        object.__setattr__(self, "deltas", dl)
        d = len(g) + 1
        want = d if self.parity == "even" else d - 1
        if len(dl) != want:
            raise DimensionMismatch(
                f"{self.parity} case with {len(g)} gammas needs {want} deltas, got {len(dl)}")
        if self.parity == "odd" and d < 2:
            raise DimensionMismatch("the odd case needs d ≥ 2")

    @property
    def d(self) -> int:
        return len(self.gammas) + 1

    @property
    def h(self) -> int:
        return 2 * self.d if self.parity == "even" else 2 * self.d - 1


def canonical_collection(params: OneVarParams) -> ZCollection:
    """The canonical collection in the basis v_1..v_h (v_1 = u).

    Odd-indexed vectors v_1, v_3, … are u and E; even-indexed ones span P1.
    Λ1 maps v_{2j−1} to v_{2j}, Γ1 maps v_{2j} to v_{2j+1}, Γ0 maps v_{2j}
    to δ_j u.  The last step of the chain wraps back with the γ's: through
    Γ1 in the even case, through Λ1 in the odd case.
    """
    d, h = params.d, params.h
    g, dl = np.array(params.gammas), np.array(params.deltas)
    eye = np.eye(h, dtype=complex)

    def v(k):  # v_k with 1-based k
        return eye[:, k - 1]

    evens = [v(2 * j) for j in range(1, (h // 2) + 1)]
    u = Subspace(v(1).reshape(h, 1))
    e_vecs = [v(2 * j + 1) for j in range(1, d)]
    e = Subspace(np.column_stack(e_vecs)) if e_vecs else Subspace.zero(h)

    j_vecs = []
    for j in range(1, len(evens) + 1):
        if params.parity == "even" and j == d:
            g1 = sum((g[i - 1] * v(2 * i + 1) for i in range(1, d)), np.zeros(h, complex))
        else:
            g1 = v(2 * j + 1)
        j_vecs.append(v(2 * j) - dl[j - 1] * v(1) - g1)
    j_space = Subspace(np.column_stack(j_vecs))

    p1 = Subspace(np.column_stack(evens))
    p2_vecs = [v(2 * j - 1) - v(2 * j) for j in range(1, len(evens) + 1)]
    if params.parity == "odd":
        tail = sum((g[i - 1] * v(2 * i) for i in range(1, d)), np.zeros(h, complex))
        p2_vecs.append(v(2 * d - 1) - tail)
    p2 = Subspace(np.column_stack(p2_vecs))
    return ZCollection(u, e, j_space, (p1, p2))


def _a_coefficients(params: OneVarParams, z1: complex) -> np.ndarray:
    """a_1..a_d of the field expansion, normalized with a_d = (1 − z1)^{d−1}."""
    d, g = params.d, params.gammas
    w = 1 - z1
    return np.array([w ** (i - 1) - sum(g[d - 2 + i - j] * w ** j for j in range(i, d))
                     for i in range(1, d + 1)])


def onevar_z(params: OneVarParams, z1: complex) -> complex:
    """Z(z1, 1) of the canonical collection in closed form."""
    a = _a_coefficients(params, z1)
    dl = np.array(params.deltas)
    if params.parity == "even":
        return 1 + (z1 - 1) * (dl @ a) / a[0]
    return 1 - (dl @ a[1:]) / a[0]


def _compose_one_minus_w(coef: np.ndarray) -> np.ndarray:
    out = np.zeros(1, dtype=complex)
    base = np.array([1.0, -1.0], dtype=complex)
    power = np.ones(1, dtype=complex)
    for c in coef:
        out = npoly.polyadd(out, c * power)
        power = npoly.polymul(power, base)
    return out


def _trim(c: np.ndarray, scale: float) -> np.ndarray:
    c = np.array(c, dtype=complex)
    while c.size > 1 and abs(c[-1]) <= _SMALL * scale:
        c = c[:-1]
    return c


def st_coefficients(r: MultiRational, parity: str, d: int | None = None):
    """The (s, t) coefficients of the canonical one-variable form of Z(z1, 1).

    Returns s_1..s_{d−1} and t_0..t_{d−1} (even) or t_1..t_{d−1} (odd).
    """
    if r.n_vars != 2:
        raise DimensionMismatch("one-variable recovery needs Z(z1, z2) with z2 = 1")
    d = r.degree if d is None else d
    num = r.scale * _compose_one_minus_w(_poly_z1(r.p))
    den = _compose_one_minus_w(_poly_z1(r.q))
    scale = max(np.abs(num).max(), np.abs(den).max())
    if abs(den[0]) <= _SMALL * scale:
        raise NotExpressible("q(1, 1) = 0", "q(1, 1) ≠ 0")
    num, den = num / den[0], den / den[0]
    if abs(num[0] - 1) > 1e-8:
        raise NotExpressible(f"Z(1, 1) = {num[0]:.6g}, not 1", "Z(1, 1) = 1")
    den = _trim(den, scale)
    diff = _trim(npoly.polysub(den, num), scale)
    top = d if parity == "even" else d - 1
    if den.size - 1 > d - 1 or diff.size - 1 > top:
        raise DegreeMismatch(
            f"degrees ({diff.size - 1}, {den.size - 1}) exceed the caps ({top}, {d - 1}) for d = {d}",
            "numerator and denominator degree caps")
    den = np.pad(den, (0, d - den.size))
    diff = np.pad(diff, (0, top + 1 - diff.size))
    s = -den[1:d]
    t = diff[1 : top + 1]
    return s, t


def _poly_z1(poly) -> np.ndarray:
    coef = np.zeros(max(poly.degree, 0) + 1, dtype=complex)
    for (a, _), c in poly.terms.items():
        coef[a] += c
    return coef


def recover_1var(r: MultiRational, parity: str, d: int | None = None) -> OneVarParams:
    """γ and δ of the canonical collection whose Z(z1, 1) equals ``r``.

    γ_j = s_{d−j}.  Even: δ_1 = t_0 and δ_{j+1} = t_j + Σ_{i≤j} δ_i s_{1+j−i}.
    Odd: δ_1 = t_1 and δ_j = t_j + Σ_{i<j} δ_i s_{j−i}.
    """
    if parity not in ("even", "odd"):
        raise ValueError("parity must be 'even' or 'odd'")
    d = r.degree if d is None else d
    s, t = st_coefficients(r, parity, d)
    gammas = [s[d - j - 1] for j in range(1, d)]

    def s_at(k):  # s_k with 1-based k
        return s[k - 1]

    deltas = []
    if parity == "even":
        deltas.append(t[0])
        for j in range(1, d):
            deltas.append(t[j] + sum(deltas[i - 1] * s_at(1 + j - i) for i in range(1, j + 1)))
    else:
        if d < 2:
            raise DegreeMismatch("the odd form needs d ≥ 2")
        deltas.append(t[0])
        for j in range(2, d):
            deltas.append(t[j - 1] + sum(deltas[i - 1] * s_at(j - i) for i in range(1, j)))
    return OneVarParams(parity, tuple(gammas), tuple(deltas))
