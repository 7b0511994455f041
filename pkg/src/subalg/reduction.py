"""Pruning, normalization (Y → Z), reduction (Z → Y) and continued fractions.

A continued fraction alternates reduction and normalization:

    Z      = Γ0LΓ0 − Γ0LΠ1 (Y + Π1LΠ1)⁻¹ Π1LΓ0     (reduction, parameters w)
    Y      = M · Z⁽¹⁾ · K                            (normalization)
    Z⁽¹⁾   = …

All matrices in the reduction step are fixed by the tensor w, so the
expansion can be evaluated from the recorded levels alone.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .collections import Check, YCollection, ZCollection
from .errors import AssumptionViolated, KindMismatch, Singular, SubalgError
from .numcore import DEFAULT_TOL, Tolerance, column_basis, rank
from .solvers import solve_y, solve_y_system, solve_z
from .spaces import DirectSum, Subspace, intersect, subspace_sum

__all__ = [
    "PruneReport",
    "CFLevel",
    "CFExpansion",
    "prune_z",
    "prune_y",
    "prune_inequalities",
    "normalize_y",
    "reduce_z",
    "reconstruct_z",
    "first_order_z",
    "continued_fraction",
    "evaluate_expansion",
]


# --- pruning --------------------------------------------------------------

@dataclass(frozen=True)
class PruneReport:
    old_dims: dict
    new_dims: dict
    iterations: int
    inequalities: tuple[Check, ...]

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.inequalities)


def _dims(c) -> dict:
    d = {"ambient": c.ambient_dim, "m": c.m, "q1": c.e.dim, "q2": c.j.dim,
         "p": [p.dim for p in c.phases]}
    return d


def _closure(start: np.ndarray, ops: list[np.ndarray], tol: Tolerance) -> tuple[np.ndarray, int]:
    """Smallest subspace containing ``start`` and closed under ``ops``."""
    basis = column_basis(start, tol)
    it = 0
    while True:
        it += 1
        grown = column_basis(np.hstack([basis] + [op @ basis for op in ops]), tol)
        if grown.shape[1] == basis.shape[1]:
            return basis, it
        basis = grown


def _restrict(q: np.ndarray, op: np.ndarray, tol: Tolerance) -> Subspace:
    """Image of op on span(q), in the coordinates of the orthonormal q."""
    n = q.shape[1]
    # op restricted to an invariant subspace is a projector: zero, or of norm ≥ 1
    u, s, _ = np.linalg.svd(q.conj().T @ op @ q)
    r = int(np.count_nonzero(s > max(tol.rank_rel, 1e-12)))
    return Subspace(u[:, :r], ambient_dim=n) if r else Subspace.zero(n)


def prune_inequalities(c) -> tuple[Check, ...]:
    """Dimension constraints satisfied by every pruned collection."""
    q1, q2, n = c.e.dim, c.j.dim, c.n
    p = [ph.dim for ph in c.phases]
    checks = []
    if c.kind == "Z":
        m = c.m
        checks.append(Check("p_j ≤ m + q1", all(x <= m + q1 for x in p), f"p={p}, m={m}, q1={q1}"))
        checks.append(Check("p_j ≤ m + q2", all(x <= m + q2 for x in p), f"p={p}, m={m}, q2={q2}"))
        checks.append(Check("q2 ≤ (n−1)(m + q1)", q2 <= (n - 1) * (m + q1), f"{q2} vs {(n - 1) * (m + q1)}"))
        checks.append(Check("q1 ≤ (n−1)(m + q2)", q1 <= (n - 1) * (m + q2), f"{q1} vs {(n - 1) * (m + q2)}"))
        if n == 2:
            checks.append(Check("|q1 − q2| ≤ m", abs(q1 - q2) <= m, f"q1={q1}, q2={q2}"))
            checks.append(Check("p_j ≥ max(q1, q2)", all(x >= max(q1, q2) for x in p), f"p={p}"))
    else:
        v = c.m
        checks.append(Check("p_j ≤ q1", all(x <= q1 for x in p), f"p={p}, q1={q1}"))
        checks.append(Check("p_j ≤ q2", all(x <= q2 for x in p), f"p={p}, q2={q2}"))
        checks.append(Check("q2 ≤ v + (n−1)q1", q2 <= v + (n - 1) * q1, f"{q2} vs {v + (n - 1) * q1}"))
        checks.append(Check("q1 ≤ v + (n−1)q2", q1 <= v + (n - 1) * q2, f"{q1} vs {v + (n - 1) * q2}"))
        if n == 2:
            checks.append(Check("|q1 − q2| ≤ v", abs(q1 - q2) <= v, f"q1={q1}, q2={q2}"))
            checks.append(Check("p_j ≥ max(q1, q2) − v", all(x >= max(q1, q2) - v for x in p), f"p={p}"))
    return tuple(checks)


def prune_z(c: ZCollection, tol: Tolerance | None = None) -> tuple[ZCollection, PruneReport]:
    """Restrict H to the closure of U under Γ1 and the phase projectors.

    The U frame is kept, so Z matrices are unchanged.
    """
    if c.kind != "Z":
        raise KindMismatch("prune_z needs a Z collection")
    tol = tol or c.tol
    g0, g1, g2 = c.gammas()
    lam = c.lambdas()
    q, it = _closure(c.u.frame, [g1, *lam], tol)
    n = q.shape[1]
    u = Subspace(q.conj().T @ c.u.frame, ambient_dim=n)
    new = ZCollection(u, _restrict(q, g1, tol), _restrict(q, g2, tol),
                      tuple(_restrict(q, li, tol) for li in lam), c.tol)
    return new, PruneReport(_dims(c), _dims(new), it, prune_inequalities(new))


def prune_y(c: YCollection, tol: Tolerance | None = None) -> tuple[YCollection, PruneReport]:
    """Restrict K to the closure of V under Γ1 and the phase projectors."""
    if c.kind != "Y":
        raise KindMismatch("prune_y needs a Y collection")
    tol = tol or c.tol
    g1, g2 = c.gammas()
    lam = c.lambdas()
    q, it = _closure(c.v.frame, [g1, *lam], tol)
    n = q.shape[1]
    v = Subspace(q.conj().T @ c.v.frame, ambient_dim=n)
    new = YCollection(_restrict(q, g1, tol), _restrict(q, g2, tol), v,
                      tuple(_restrict(q, li, tol) for li in lam), c.tol)
    return new, PruneReport(_dims(c), _dims(new), it, prune_inequalities(new))


# --- normalization --------------------------------------------------------

def _col_space(frame: np.ndarray, n: int, tol: Tolerance) -> Subspace:
    b = column_basis(frame, tol) if frame.shape[1] else frame
    return Subspace(b, ambient_dim=n) if b.shape[1] else Subspace.zero(n)


def _split(frame: np.ndarray, x: np.ndarray, tol: Tolerance) -> np.ndarray:
    """Coefficients of x in the columns of a full-rank frame; x must lie in its span."""
    coef, *_ = np.linalg.lstsq(frame, x, rcond=None)
    if np.linalg.norm(frame @ coef - x) > tol.residual_abs * max(1.0, np.linalg.norm(x)):
        raise AssumptionViolated("vector outside the expected span", "W = V ⊕ U")
    return coef


def _assume_trivial(a: Subspace, b: Subspace, name: str, tol: Tolerance):
    d = intersect(a, b, tol).dim
    if d:
        raise AssumptionViolated(f"{name} fails: intersection has dim {d}", name)


def normalize_y(c: YCollection, tol: Tolerance | None = None) -> tuple[ZCollection, np.ndarray, np.ndarray]:
    """Z collection on H = P_1 ⊕ … ⊕ P_n with Y(z) = M · Z(z) · K.

    The U frame of the result is K applied to the V frame, so K = I and
    M = Y(1, …, 1).  Coordinates on H are those of the phase frames.
    """
    if c.kind != "Y":
        raise KindMismatch("normalize_y needs a Y collection")
    tol = tol or c.tol
    k, m = c.k, c.m
    g1, g2 = c.gammas()
    h_frame = np.hstack([p.frame for p in c.phases]) if c.phases else np.zeros((k, 0), complex)
    h_space = Subspace(h_frame, ambient_dim=k)
    e_t = _col_space(g1 @ c.v.frame, k, tol)
    j_t = _col_space(g2 @ c.v.frame, k, tol)
    if m and (e_t.dim < m or j_t.dim < m):
        raise AssumptionViolated("V meets E or J", "V ∩ J = 0 and V ∩ E = 0")
    _assume_trivial(h_space, e_t, "H ∩ Γ1V = 0", tol)
    _assume_trivial(c.v, c.j, "V ∩ J = 0", tol)
    _assume_trivial(h_space, j_t, "H ∩ Γ2V = 0", tol)
    _assume_trivial(c.v, c.e, "V ∩ E = 0", tol)

    pi2 = c.pi2()
    u_space = _col_space(pi2 @ g1 @ c.v.frame, k, tol)
    if u_space.dim != m:
        raise AssumptionViolated(f"dim U = {u_space.dim} ≠ dim V = {m}", "dim Π2Γ1V = dim V")
    # K: v ↦ −(U-component of v in W = U ⊕ Γ1V)
    coef = _split(np.hstack([u_space.frame, e_t.frame]), c.v.frame, tol)
    u_frame = -u_space.frame @ coef[:m]
    # M: j ↦ V-component of j in W = V ⊕ Γ2V
    m_mat = _split(np.hstack([c.v.frame, j_t.frame]), u_frame, tol)[:m]

    to_h = np.linalg.pinv(h_frame)

    def on_h(s: Subspace) -> Subspace:
        n = h_frame.shape[1]
        if s.dim == 0:
            return Subspace.zero(n)
        return Subspace(to_h @ s.frame, ambient_dim=n)

    e_h = intersect(c.e, h_space, tol)
    j_h = intersect(c.j, h_space, tol)
    n = h_frame.shape[1]
    phases, start = [], 0
    for p in c.phases:
        phases.append(Subspace.coordinate(n, range(start, start + p.dim)))
        start += p.dim
    z = ZCollection(Subspace(to_h @ u_frame, ambient_dim=n) if m else Subspace.zero(n),
                    on_h(e_h), on_h(j_h), tuple(phases), c.tol)
    return z, m_mat, np.eye(m, dtype=complex)


# --- reduction ------------------------------------------------------------

def reduce_z(c: ZCollection, tol: Tolerance | None = None) -> tuple[YCollection, np.ndarray]:
    """Y collection on K = E ⊕ J with V spanned by v_ij = (I − Γ0)Λ_i u_j, i < n.

    Returns the collection and w[i, j, k], the coefficient of u_k in
    Γ0Λ_i u_j.  The V frame is ordered with i major.
    """
    if c.kind != "Z":
        raise KindMismatch("reduce_z needs a Z collection")
    tol = tol or c.tol
    h, m, n = c.h, c.m, c.n
    g0 = c.gammas()[0]
    lam = c.lambdas()
    k_space = subspace_sum(c.e, c.j, tol=tol)
    for jx, p in enumerate(c.phases):
        others = [q for i, q in enumerate(c.phases) if i != jx]
        rest = subspace_sum(*others, tol=tol) if others else Subspace.zero(h)
        d = intersect(c.u, rest, tol).dim
        if d:
            raise AssumptionViolated(f"U meets the phases other than {jx} (dim {d})",
                                     "U ∩ (⊕_{l≠j} P_l) = 0")
        tilde = _col_space(lam[jx] @ c.u.frame, h, tol)
        if tilde.dim < m:
            raise AssumptionViolated(f"Λ_{jx} annihilates part of U", "Λ_j u = 0 only for u = 0")
        d = intersect(tilde, k_space, tol).dim
        if d:
            raise AssumptionViolated(f"Λ_{jx}U meets E ⊕ J (dim {d})", "Λ_j U ∩ K = 0")

    w = np.zeros((max(n - 1, 0), m, m), complex)
    cols = []
    for i in range(n - 1):
        img = lam[i] @ c.u.frame
        w[i] = c.u.coords(g0 @ img).T
        cols.append(img - g0 @ img)
    v_frame_h = np.hstack(cols) if cols else np.zeros((h, 0), complex)

    q = k_space.ortho
    kd = q.shape[1]
    to_k = q.conj().T

    def on_k(frame) -> Subspace:
        if frame.shape[1] == 0:
            return Subspace.zero(kd)
        return Subspace(to_k @ frame, ambient_dim=kd)

    phases = [on_k(intersect(p, k_space, tol).frame) for p in c.phases]
    y = YCollection(on_k(c.e.frame), on_k(c.j.frame), on_k(v_frame_h), tuple(phases), c.tol)
    if y.k > y.m:
        d = intersect(y.v, y.j, tol).dim
        if d:
            raise AssumptionViolated(f"reduced V meets J (dim {d}); its Y-problem has no solution",
                                     "V ∩ J = 0 after reduction")
    return y, w


def _w_operators(w: np.ndarray, z: np.ndarray):
    """Blocks Γ0LΓ0, Γ0LΠ1, Π1LΓ0, Π1LΠ1 in the bases u_j and v_ij."""
    nm1, m, _ = w.shape
    zn = z[-1]
    d = z[:-1] - zn
    wm = [w[i].T for i in range(nm1)]  # wm[i][k, j] = w[i, j, k]
    vdim = nm1 * m
    a_uu = zn * np.eye(m, dtype=complex) + sum((d[i] * wm[i] for i in range(nm1)), np.zeros((m, m), complex))
    a_vu = np.zeros((vdim, m), complex)
    for i in range(nm1):
        a_vu[i * m:(i + 1) * m, :] += d[i] * np.eye(m)
    # column (i, j): Λ_p v_ij = Σ_k c_k Λ_p u_k with c_k = δ_pi δ_kj − w_ijk
    a_uv = np.zeros((m, vdim), complex)
    a_vv = zn * np.eye(vdim, dtype=complex)
    for p in range(nm1):
        for i in range(nm1):
            coef = -w[i].copy()              # coef[j, k]
            if p == i:
                coef += np.eye(m)
            # Γ0Λ_p u_k = Σ_q w[p, k, q] u_q
            a_uv[:, i * m:(i + 1) * m] += d[p] * (wm[p] @ coef.T)
            a_vv[p * m:(p + 1) * m, i * m:(i + 1) * m] += d[p] * coef.T
    return a_uu, a_uv, a_vu, a_vv


def reconstruct_z(w: np.ndarray, y_v: np.ndarray | None, z) -> np.ndarray:
    """Z from the reduction parameters w and the reduced Y (in the v_ij basis).

    ``y_v=None`` stands for an infinite Y, which removes the correction term.
    """
    z = np.asarray(z, dtype=complex).reshape(-1)
    m = w.shape[1] if w.ndim == 3 and w.shape[0] else None
    if m is None:
        raise ValueError("w must have shape (n−1, m, m) with n ≥ 2")
    a_uu, a_uv, a_vu, a_vv = _w_operators(w, z)
    if a_vv.shape[0] == 0 or y_v is None:
        return a_uu
    try:
        return a_uu - a_uv @ np.linalg.solve(y_v + a_vv, a_vu)
    except np.linalg.LinAlgError as exc:
        raise Singular("Y + Π1LΠ1 is singular on V") from exc


def first_order_z(w: np.ndarray, z) -> np.ndarray:
    """Z ≈ z_n I + Σ_i (z_i − z_n) W_i, exact to first order about z = (1, …, 1)."""
    z = np.asarray(z, dtype=complex).reshape(-1)
    return _w_operators(w, z)[0]


# --- continued fractions --------------------------------------------------

@dataclass(frozen=True)
class CFLevel:
    index: int
    w: np.ndarray
    m_mat: np.ndarray | None
    k_mat: np.ndarray | None
    dims: dict


@dataclass(frozen=True)
class CFExpansion:
    levels: tuple[CFLevel, ...]
    terminal: object             # ZCollection or YCollection
    stop_reason: str
    n: int = field(default=0)

    @property
    def depth(self) -> int:
        return len(self.levels)


def continued_fraction(c: ZCollection, max_depth: int = 20,
                       y_hook: Callable[[int, YCollection], YCollection] | None = None,
                       tol: Tolerance | None = None) -> CFExpansion:
    """Alternate reduction and normalization until nothing is left.

    Stops when E = J = 0, when the depth limit is reached, or when an
    assumption fails; the stop reason is recorded.  ``y_hook`` may replace
    the intermediate Y collection at each level.
    """
    if c.kind != "Z":
        raise KindMismatch("continued_fraction needs a Z collection")
    tol = tol or c.tol
    levels: list[CFLevel] = []
    cur = c
    n = c.n
    for depth in range(max_depth):
        if cur.e.dim + cur.j.dim == 0:
            return CFExpansion(tuple(levels), cur, "exhausted", n)
        if n < 2:
            return CFExpansion(tuple(levels), cur, "single phase", n)
        try:
            y, w = reduce_z(cur, tol)
        except AssumptionViolated as exc:
            return CFExpansion(tuple(levels), cur, f"reduction assumption: {exc.condition}", n)
        if y_hook is not None:
            y = y_hook(depth, y)
        dims = {"h": cur.h, "m": cur.m, "k": y.k, "v": y.m}
        if y.k == y.m:
            levels.append(CFLevel(depth, w, None, None, dims))
            return CFExpansion(tuple(levels), y, "exhausted", n)
        try:
            z_next, m_mat, k_mat = normalize_y(y, tol)
        except AssumptionViolated as exc:
            levels.append(CFLevel(depth, w, None, None, dims))
            return CFExpansion(tuple(levels), y, f"normalization assumption: {exc.condition}", n)
        levels.append(CFLevel(depth, w, m_mat, k_mat, dims))
        cur = z_next
    return CFExpansion(tuple(levels), cur, "max depth", n)


def evaluate_expansion(cf: CFExpansion, z, depth: int | None = None) -> np.ndarray:
    """Z(z) from the recorded levels, back-substituting from the bottom.

    With ``depth`` smaller than the full depth the level-``depth`` Z is
    replaced by its first-order approximant.
    """
    z = np.asarray(z, dtype=complex).reshape(-1)
    levels = cf.levels
    full = len(levels)
    d = full if depth is None else min(depth, full)
    if d < full:
        cur_z = first_order_z(levels[d].w, z)
        return _back_substitute(levels[:d], cur_z, z)
    term = cf.terminal
    if term.kind == "Y":
        last = levels[-1]
        top = reconstruct_z(last.w, _terminal_y(term, z), z)
        return _back_substitute(levels[:-1], top, z)
    cur_z = solve_z(term, z).value if term.m else np.zeros((0, 0), complex)
    return _back_substitute(levels, cur_z, z)


def _terminal_y(term: YCollection, z: np.ndarray) -> np.ndarray | None:
    if term.m == 0:
        return np.zeros((0, 0), complex)
    if term.k == term.m:
        # nothing beyond V: Y is 0 when E = K and infinite when J = K
        if term.j.dim == 0:
            return np.zeros((term.m, term.m), complex)
        if term.e.dim == 0:
            return None
    try:
        return solve_y(term, z).value
    except Singular:
        return solve_y_system(term, z)


def _back_substitute(levels, z_bottom: np.ndarray, z: np.ndarray) -> np.ndarray:
    cur = z_bottom
    for lv in reversed(levels):
        y_v = lv.m_mat @ cur @ lv.k_mat
        cur = reconstruct_z(lv.w, y_v, z)
    return cur
