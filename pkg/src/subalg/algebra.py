"""Operations that build new collections from old ones.

Every construction works in explicit coordinates: the result's ambient space
is a coordinate direct sum of the operands' spaces, and the new E and J are
null spaces of the linking constraints.  Each operation's docstring states
the law relating the associated functions.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import zip_longest
from typing import Sequence

import numpy as np

from .collections import Superfunction, YCollection, ZCollection
from .errors import (
    CouplingSingular,
    DegeneratePorts,
    DimensionMismatch,
    KindMismatch,
    NoInverse,
    NotSubspaceOfU,
    PlugNotScalar,
    PortMismatch,
    SingularG,
    SingularMap,
    SingularT,
    SlotOutOfRange,
    ConditionViolated,
)
from .numcore import DEFAULT_TOL, Tolerance, null_space, rank
from .spaces import DirectSum, Subspace, intersect, span

__all__ = [
    "PortMaps",
    "ScalingVector",
    "add_y",
    "additive_zero",
    "embed",
    "multiply_superfunctions",
    "identity_superfunction",
    "multiplicative_inverse",
    "substitute_into_y",
    "substitute_into_z",
    "duality",
    "merge_phases",
    "project_u",
    "extension",
    "reference_transform",
    "additive_inverse",
    "basis_change",
    "permute_phases",
]


@dataclass(frozen=True)
class PortMaps:
    """Maps M^E, M^J from the output port of the first factor to the input of the second.

    Matrices act on frame coordinates of the port spaces.
    """

    m_e: np.ndarray
    m_j: np.ndarray

    def __post_init__(self):
        me = np.atleast_2d(np.asarray(self.m_e, dtype=complex))
        mj = np.atleast_2d(np.asarray(self.m_j, dtype=complex))
        if me.shape != mj.shape or me.shape[0] != me.shape[1]:
            raise PortMismatch("port maps must be square and of equal size", "M^E, M^J square")
        for name, mat in (("M^E", me), ("M^J", mj)):
            if rank(mat) < mat.shape[0]:
                raise SingularMap(f"{name} is singular", f"{name} nonsingular")
        object.__setattr__(self, "m_e", me)
        object.__setattr__(self, "m_j", mj)

    @classmethod
    def default(cls, m: int, base=None) -> "PortMaps":
        """M^E = M, M^J = −M with M the identity unless given."""
        mat = np.eye(m, dtype=complex) if base is None else np.asarray(base, dtype=complex)
        return cls(mat, -mat)

    @property
    def dim(self) -> int:
        return self.m_e.shape[0]


@dataclass(frozen=True)
class ScalingVector:
    """Per-phase scalars c^E_i and c^J_i; the function variables scale by c^E_i / c^J_i."""

    c_e: tuple[complex, ...]
    c_j: tuple[complex, ...]

    def __post_init__(self):
        ce = tuple(complex(x) for x in self.c_e)
        cj = tuple(complex(x) for x in self.c_j)
        if len(ce) != len(cj):
            raise DimensionMismatch("c_e and c_j differ in length", "len(c_e) = len(c_j)")
        if any(x == 0 for x in ce + cj):
            raise ConditionViolated("scaling factors must be nonzero", "c_i ≠ 0")
        object.__setattr__(self, "c_e", ce)
        object.__setattr__(self, "c_j", cj)

    @property
    def ratios(self) -> np.ndarray:
        return np.array(self.c_e) / np.array(self.c_j)


# --- helpers --------------------------------------------------------------

_EMPTY = slice(0, 0)


def _require(c, kind: str, op: str):
    if getattr(c, "kind", None) != kind:
        raise KindMismatch(f"{op} needs a {kind} collection, got {getattr(c, 'kind', type(c).__name__)}")


def _square_map(s, m: int, name: str) -> np.ndarray:
    if s is None:
        return np.eye(m, dtype=complex)
    s = np.atleast_2d(np.asarray(s, dtype=complex))
    if s.shape != (m, m):
        raise DimensionMismatch(f"{name} has shape {s.shape}, expected {(m, m)}", f"{name} is {m}×{m}")
    if rank(s) < m:
        raise SingularMap(f"{name} is singular", f"{name} nonsingular")
    return s


def _frame_inverse(c: YCollection) -> tuple[np.ndarray, list[slice]]:
    """Inverse of G = [V frame | phase frames] and the row slice of each phase."""
    g = np.hstack([c.v.frame, *[p.frame for p in c.phases]])
    slices, start = [], c.m
    for p in c.phases:
        slices.append(slice(start, start + p.dim))
        start += p.dim
    return np.linalg.inv(g), slices


def _sub(frame: np.ndarray, n: int, tol: Tolerance) -> Subspace:
    """Span of possibly dependent columns."""
    if frame.shape[1] == 0:
        return Subspace.zero(n)
    return span(frame, n, tol)


def _block(n: int, start: int, rows: np.ndarray) -> np.ndarray:
    out = np.zeros((n, rows.shape[1]), complex)
    out[start:start + rows.shape[0]] = rows
    return out


def _coord_space(n: int, start: int, size: int) -> Subspace:
    return Subspace.coordinate(n, range(start, start + size))


def _check_field_sum(e: Subspace, j: Subspace, tol: Tolerance, exc, condition: str):
    if e.dim + j.dim != e.ambient_dim or intersect(e, j, tol).dim:
        raise exc(f"E and J do not form a direct sum (dims {e.dim}+{j.dim} in {e.ambient_dim})", condition)


# --- addition -------------------------------------------------------------

def additive_zero(m: int) -> YCollection:
    """K = V = E, J = 0 and no phases: Y ≡ 0."""
    full = Subspace.full(m)
    return YCollection(full, Subspace.zero(m), full, ())


def add_y(c1: YCollection, c2: YCollection, s1=None, s2=None) -> YCollection:
    """Y = S1·Y1·S1⁻¹ + S2·Y2·S2⁻¹, in the standard frame of the new V.

    Phase i of the result is the sum of the operands' phase i; an operand
    with fewer phases contributes nothing to the extra ones.  ``s1`` and ``s2`` map each operand's
    V frame coordinates into the new V (default identity).
    """
    _require(c1, "Y", "add_y")
    _require(c2, "Y", "add_y")
    if c1.m != c2.m:
        raise DimensionMismatch(f"dim V differs: {c1.m} vs {c2.m}", "dim V' = dim V''")
    m, tol = c1.m, c1.tol
    s1 = _square_map(s1, m, "s1")
    s2 = _square_map(s2, m, "s2")
    g1, sl1 = _frame_inverse(c1)
    g2, sl2 = _frame_inverse(c2)
    h1, h2 = c1.k - m, c2.k - m
    n = m + h1 + h2

    e1, e2 = g1 @ c1.e.frame, g2 @ c2.e.frame
    ker = null_space(np.hstack([s1 @ e1[:m], -(s2 @ e2[:m])]), tol)
    x1, x2 = ker[: e1.shape[1]], ker[e1.shape[1]:]
    e_frame = np.vstack([s1 @ e1[:m] @ x1, e1[m:] @ x1, e2[m:] @ x2])

    j1, j2 = g1 @ c1.j.frame, g2 @ c2.j.frame
    j_frame = np.hstack([
        np.vstack([s1 @ j1[:m], j1[m:], np.zeros((h2, j1.shape[1]))]),
        np.vstack([s2 @ j2[:m], np.zeros((h1, j2.shape[1])), j2[m:]]),
    ])
    e, j = _sub(e_frame, n, tol), _sub(j_frame, n, tol)
    _check_field_sum(e, j, tol, ConditionViolated, "E ⊕ J = K for the sum")
    phases = []
    for a, b in zip_longest(sl1, sl2, fillvalue=_EMPTY):
        # the second operand's hidden block starts at m + h1
        idx = list(range(a.start, a.stop)) + list(range(h1 + b.start, h1 + b.stop))
        phases.append(Subspace.coordinate(n, idx))
    return YCollection(e, j, _coord_space(n, 0, m), tuple(phases), tol)


def embed(c: YCollection, target_dim: int) -> YCollection:
    """Enlarge V by a complement W placed in E: Y becomes [[Y, 0], [0, 0]]."""
    _require(c, "Y", "embed")
    w = target_dim - c.m
    if w < 0:
        raise DimensionMismatch(f"target {target_dim} < dim V = {c.m}", "target_dim ≥ dim V")
    if w == 0:
        return c
    n = c.k + w

    def pad(frame, extra=False):
        out = np.zeros((n, frame.shape[1] + (w if extra else 0)), complex)
        out[: c.k, : frame.shape[1]] = frame
        if extra:
            out[c.k:, frame.shape[1]:] = np.eye(w)
        return Subspace(out, ambient_dim=n)

    return YCollection(pad(c.e.frame, True), pad(c.j.frame), pad(c.v.frame, True),
                       tuple(pad(p.frame) for p in c.phases), c.tol)


def additive_inverse(c: YCollection) -> YCollection:
    """Y ↦ −Y via the reference transform c^E = −1, c^J = 1."""
    _require(c, "Y", "additive_inverse")
    return reference_transform(c, ScalingVector((-1.0,) * c.n, (1.0,) * c.n))


# --- multiplication -------------------------------------------------------

def _sf_coords(s: Superfunction):
    """Coordinates relative to [V_in | V_out | phases] and the hidden dimension."""
    g, _ = _frame_inverse(s.base)
    return g, s.base.k - 2 * s.port_dim


def _coupling_operator(first: Superfunction, second: Superfunction, ports: PortMaps) -> np.ndarray:
    """A = M^E Π^O'Γ1' − Π^I''Γ1''[M^E Π^O'Γ1' + M^J Π^O'Γ2'] on the first factor's output port."""
    g1f, g2f = first.base.gammas()
    g1s = second.base.gammas()[0]
    ps_f, ps_s = first._port_sum, second._port_sum
    out_f = first.v_out.frame
    a_e = ports.m_e @ ps_f.component_coords(1, g1f @ out_f)
    a_j = ports.m_j @ ps_f.component_coords(1, g2f @ out_f)
    back = ps_s.component_coords(0, g1s @ second.v_in.frame @ (a_e + a_j))
    return a_e - back


def multiply_superfunctions(s1: Superfunction, s2: Superfunction, ports: PortMaps | None = None) -> Superfunction:
    """F = F1 · diag(M^E, M^J) · F2.

    ``s2`` is applied first: its output port is wired to the input port of
    ``s1`` through M^E (fields) and M^J (fluxes).  The result's input is the
    input of ``s2`` and its output the output of ``s1``.  Phases combine as
    in :func:`add_y`.
    """
    _require(s1, "super", "multiply_superfunctions")
    _require(s2, "super", "multiply_superfunctions")
    m = s1.port_dim
    if s2.port_dim != m or s1.v_out.dim != m or s2.v_out.dim != m:
        raise PortMismatch("port dimensions differ", "equal port dims")
    ports = ports or PortMaps.default(m)
    if ports.dim != m:
        raise PortMismatch(f"port maps are {ports.dim}×{ports.dim}, ports have dim {m}", "M^E, M^J match ports")
    first, second = s2, s1
    tol = first.base.tol
    a = _coupling_operator(first, second, ports)
    if rank(a, tol) < m:
        raise CouplingSingular("coupling operator A is singular", "A nonsingular")

    gf, hf = _sf_coords(first)
    gs, hs = _sf_coords(second)
    n = 2 * m + hf + hs

    def assemble(fb, sb, mat):
        cf, cs = gf @ fb, gs @ sb
        # first's output, mapped, equals second's input
        ker = null_space(np.hstack([mat @ cf[m:2 * m], -cs[:m]]), tol)
        xf, xs = ker[: cf.shape[1]], ker[cf.shape[1]:]
        return np.vstack([cf[:m] @ xf, cs[m:2 * m] @ xs, cf[2 * m:] @ xf, cs[2 * m:] @ xs])

    e = _sub(assemble(first.base.e.frame, second.base.e.frame, ports.m_e), n, tol)
    j = _sub(assemble(first.base.j.frame, second.base.j.frame, ports.m_j), n, tol)
    _check_field_sum(e, j, tol, CouplingSingular, "A nonsingular")
    phases = []
    _, slf = _frame_inverse(first.base)
    _, sls = _frame_inverse(second.base)
    for a_, b_ in zip_longest(slf, sls, fillvalue=_EMPTY):
        idx = list(range(a_.start, a_.stop)) + list(range(hf + b_.start, hf + b_.stop))
        phases.append(Subspace.coordinate(n, idx))
    return Superfunction.from_ports(e, j, _coord_space(n, 0, m), _coord_space(n, m, m), phases, tol)


def identity_superfunction(ports: PortMaps) -> Superfunction:
    """No phases; F = diag((M^E)⁻¹, (M^J)⁻¹)."""
    m = ports.dim
    if rank(ports.m_j - ports.m_e) < m:
        raise DegeneratePorts("M^J − M^E is singular", "M^J − M^E nonsingular")
    eye = np.eye(m, dtype=complex)
    e = Subspace(np.vstack([eye, np.linalg.inv(ports.m_e)]))
    j = Subspace(np.vstack([eye, np.linalg.inv(ports.m_j)]))
    return Superfunction.from_ports(e, j, _coord_space(2 * m, 0, m), _coord_space(2 * m, m, m), ())


def multiplicative_inverse(s: Superfunction) -> Superfunction:
    """Inverse under multiplication with port maps M^E = I, M^J = −I (frame coordinates).

    Ports swap roles and E is reflected through V: E'' = (Π1 − Π2)E', J'' = J'.
    Both products with ``s`` then have F = diag(I, −I).
    """
    _require(s, "super", "multiplicative_inverse")
    b = s.base
    pi1 = b.pi1()
    psi = 2 * pi1 - np.eye(b.k)
    e = _sub(psi @ b.e.frame, b.k, b.tol)
    _check_field_sum(e, b.j, b.tol, NoInverse, "ψ(E) ∩ J = 0")
    return Superfunction.from_ports(e, b.j, s.v_out, s.v_in, b.phases, b.tol)


# --- substitution ---------------------------------------------------------

def _substitute(host, plug: ZCollection, slot: int, host_fields: Sequence[Subspace]):
    """Shared construction for Y and Z hosts.

    Ambient: host coordinates x (dim N) then P_slot ⊗ (E' ⊕ J') with
    coefficients Y in C^{p × (h'−1)} stored row-major.  Returns the mapped
    host fields (E, J, and U or V), and the new phases with the plug's phases
    first.
    """
    _require(plug, "Z", "substitution plug")
    if plug.m != 1:
        raise PlugNotScalar(f"plug has dim U' = {plug.m}", "dim U' = 1")
    if not 0 <= slot < host.n:
        raise SlotOutOfRange(f"slot {slot} not in [0, {host.n})", "0 ≤ slot < n")
    tol = host.tol
    big_n = host.ambient_dim
    ps = host.phases[slot]
    p = ps.dim
    hp = plug.h
    r = hp - 1
    q1 = plug.e.dim
    n = big_n + p * r
    gp = np.hstack([plug.u.frame, plug.e.frame, plug.j.frame])
    gp_inv = np.linalg.inv(gp)

    def lift(frame):
        return _block(n, 0, frame)

    def tensor_cols(cols):
        # P_slot ⊗ span(G' e_{1+c}) for plug-coordinate columns c
        out = np.zeros((n, p * len(cols)), complex)
        k = 0
        for s_ in range(p):
            for c in cols:
                out[big_n + s_ * r + c, k] = 1.0
                k += 1
        return out

    fields = [lift(f.frame) for f in host_fields]
    e_extra = tensor_cols(range(q1))
    j_extra = tensor_cols(range(q1, r))

    new_phases = []
    for pp in plug.phases:
        cols = []
        gam = gp_inv @ pp.frame
        for s_ in range(p):
            for t in range(pp.dim):
                v = np.zeros(n, complex)
                v[:big_n] = gam[0, t] * ps.frame[:, s_]
                v[big_n + s_ * r: big_n + (s_ + 1) * r] = gam[1:, t]
                cols.append(v)
        frame = np.array(cols).T if cols else np.zeros((n, 0), complex)
        new_phases.append(Subspace(frame, ambient_dim=n))
    for i, ph in enumerate(host.phases):
        if i != slot:
            new_phases.append(Subspace(lift(ph.frame), ambient_dim=n))
    return n, fields, e_extra, j_extra, new_phases


def substitute_into_y(host: YCollection, plug: ZCollection, slot: int = 0) -> YCollection:
    """Y''(z', z_rest) = Y(Z'(z'), z_rest).

    Variables of the result: the plug's variables, then the host's other
    variables in order.
    """
    _require(host, "Y", "substitute_into_y")
    n, (e, j, v), ee, je, phases = _substitute(host, plug, slot, [host.e, host.j, host.v])
    tol = host.tol
    return YCollection(Subspace(np.hstack([e, ee]), ambient_dim=n),
                       Subspace(np.hstack([j, je]), ambient_dim=n),
                       Subspace(v, ambient_dim=n), tuple(phases), tol)


def substitute_into_z(host: ZCollection, plug: ZCollection, slot: int = 0) -> ZCollection:
    """Z''(z', z_rest) = Z(Z'(z'), z_rest), variables ordered as in :func:`substitute_into_y`."""
    _require(host, "Z", "substitute_into_z")
    n, (u, e, j), ee, je, phases = _substitute(host, plug, slot, [host.u, host.e, host.j])
    tol = host.tol
    return ZCollection(Subspace(u, ambient_dim=n),
                       Subspace(np.hstack([e, ee]), ambient_dim=n),
                       Subspace(np.hstack([j, je]), ambient_dim=n), tuple(phases), tol)


# --- structural transforms ------------------------------------------------

def duality(c):
    """Swap E and J.

    The associated function becomes [Z(1/z)]⁻¹ (or [Y(1/z)]⁻¹).
    """
    if isinstance(c, ZCollection):
        return c.replace(e=c.j, j=c.e)
    if isinstance(c, YCollection):
        return c.replace(e=c.j, j=c.e)
    if isinstance(c, Superfunction):
        return Superfunction(c.base.replace(e=c.base.j, j=c.base.e), c.v_in, c.v_out)
    raise KindMismatch(f"duality is not defined for {type(c).__name__}")


def _with_phases(c, phases):
    if isinstance(c, Superfunction):
        return Superfunction(c.base.replace(phases=tuple(phases)), c.v_in, c.v_out)
    return c.replace(phases=tuple(phases))


def merge_phases(c, i: int, j: int):
    """Replace phases i and j by their sum, placed at position min(i, j)."""
    n = c.n
    if i == j:
        raise ConditionViolated("cannot merge a phase with itself", "i ≠ j")
    if not (0 <= i < n and 0 <= j < n):
        raise SlotOutOfRange(f"phase indices {i}, {j} not in [0, {n})", "valid phase indices")
    phases = list(c.base.phases if isinstance(c, Superfunction) else c.phases)
    a, b = sorted((i, j))
    merged = Subspace(np.hstack([phases[a].frame, phases[b].frame]), ambient_dim=phases[a].ambient_dim)
    phases[a] = merged
    del phases[b]
    return _with_phases(c, phases)


def permute_phases(c, order: Sequence[int]):
    """New phase k is old phase order[k]."""
    phases = c.base.phases if isinstance(c, Superfunction) else c.phases
    if sorted(order) != list(range(len(phases))):
        raise ConditionViolated(f"{list(order)} is not a permutation", "permutation of phases")
    return _with_phases(c, [phases[k] for k in order])


def project_u(c: ZCollection, u_sub: Subspace, w: Subspace | None = None) -> ZCollection:
    """Shrink U to ``u_sub`` and move a complement W (within U) into J.

    Z' = Φ·Z restricted to u_sub, Φ the projection onto u_sub along W.  The
    default W is spanned by the U-frame vectors that complete u_sub.
    """
    _require(c, "Z", "project_u")
    tol = c.tol
    if u_sub.dim and not c.u.contains(u_sub.frame, tol):
        raise NotSubspaceOfU("u_sub is not contained in U", "u_sub ⊂ U")
    if w is None:
        coords = c.u.coords(u_sub.frame) if u_sub.dim else np.zeros((c.m, 0), complex)
        chosen = []
        cur = coords
        for k in range(c.m):
            if cur.shape[1] == c.m:
                break
            trial = np.hstack([cur, np.eye(c.m, dtype=complex)[:, [k]]])
            if rank(trial, tol) == trial.shape[1]:
                cur = trial
                chosen.append(k)
        w_frame = c.u.frame[:, chosen]
    else:
        w_frame = w.frame
        if w.dim and not c.u.contains(w_frame, tol):
            raise NotSubspaceOfU("W is not contained in U", "W ⊂ U")
        if u_sub.dim + w.dim != c.m or intersect(u_sub, w, tol).dim:
            raise ConditionViolated("u_sub ⊕ W must equal U", "U = u_sub ⊕ W")
    j = Subspace(np.hstack([c.j.frame, w_frame]), ambient_dim=c.h)
    return c.replace(u=u_sub, j=j)


def extension(c: ZCollection, t) -> YCollection:
    """Y collection on V ⊕ H with Y = T·Z·T⁻¹ in the standard frame of V.

    The stored V frame is T itself, so in that frame solve_y equals solve_z.
    """
    _require(c, "Z", "extension")
    m, h = c.m, c.h
    t = np.atleast_2d(np.asarray(t, dtype=complex))
    if t.shape != (m, m):
        raise DimensionMismatch(f"T has shape {t.shape}, expected {(m, m)}", "T is dim U square")
    if rank(t, c.tol) < m:
        raise SingularT("T is singular", "T nonsingular")
    n = m + h
    ext_e = np.vstack([t, c.u.frame])
    ext_j = np.vstack([-t, c.u.frame])
    e = Subspace(np.hstack([ext_e, _block(n, m, c.e.frame)]), ambient_dim=n)
    j = Subspace(np.hstack([ext_j, _block(n, m, c.j.frame)]), ambient_dim=n)
    v = Subspace(_block(n, 0, t), ambient_dim=n)
    phases = tuple(Subspace(_block(n, m, p.frame), ambient_dim=n) for p in c.phases)
    return YCollection(e, j, v, phases, c.tol)


def reference_transform(c: YCollection, s: ScalingVector) -> YCollection:
    """E' = ψ^E(E), J' = ψ^J(J) with ψ = Π1 + Σ c_i Λ_i: Y'(z) = Y(d∘z), d = c^E/c^J."""
    _require(c, "Y", "reference_transform")
    if len(s.c_e) != c.n:
        raise DimensionMismatch(f"{len(s.c_e)} scalars for {c.n} phases", "one scalar per phase")
    pi1 = c.pi1()
    lam = c.lambdas()
    psi_e = pi1 + sum(ci * li for ci, li in zip(s.c_e, lam))
    psi_j = pi1 + sum(ci * li for ci, li in zip(s.c_j, lam))
    e = _sub(psi_e @ c.e.frame, c.k, c.tol)
    j = _sub(psi_j @ c.j.frame, c.k, c.tol)
    _check_field_sum(e, j, c.tol, ConditionViolated, "ψ^E(E) ∩ ψ^J(J) = 0")
    return c.replace(e=e, j=j)


def basis_change(c, g):
    """Map every subspace through the nonsingular ambient map g."""
    g = np.atleast_2d(np.asarray(g, dtype=complex))
    n = c.ambient_dim
    if g.shape != (n, n):
        raise DimensionMismatch(f"g has shape {g.shape}, expected {(n, n)}", "g square on the ambient")
    tol = c.base.tol if isinstance(c, Superfunction) else c.tol
    if rank(g, tol) < n:
        raise SingularG("g is singular", "g nonsingular")

    def mp(s: Subspace) -> Subspace:
        return Subspace(g @ s.frame, ambient_dim=n)

    if isinstance(c, ZCollection):
        return ZCollection(mp(c.u), mp(c.e), mp(c.j), tuple(mp(p) for p in c.phases), tol)
    if isinstance(c, YCollection):
        return YCollection(mp(c.e), mp(c.j), mp(c.v), tuple(mp(p) for p in c.phases), tol)
    if isinstance(c, Superfunction):
        b = c.base
        return Superfunction.from_ports(mp(b.e), mp(b.j), mp(c.v_in), mp(c.v_out),
                                        tuple(mp(p) for p in b.phases), tol)
    raise KindMismatch(f"basis_change is not defined for {type(c).__name__}")
