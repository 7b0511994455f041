"""Dense complex linear algebra with an explicit tolerance policy.

Every rank decision in the package goes through :func:`rank` (singular values
with a relative cutoff) so that one knob, ``Tolerance.rank_rel``, controls all
of them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import Singular, SingularOnSubspace

try:  # compiled elimination kernel, optional
    from ._rref import rref_rows as _rref_rows_compiled
except ImportError:  # pragma: no cover - exercised when the extension is absent
    _rref_rows_compiled = None

__all__ = [
    "Tolerance",
    "DEFAULT_TOL",
    "as_matrix",
    "rank",
    "null_space",
    "column_basis",
    "solve_linear",
    "restricted_inverse",
    "left_inverse",
    "canonical_columns",
    "rref_backend",
]


@dataclass(frozen=True)
class Tolerance:
    """Rank cutoff relative to the largest singular value, and residual bound."""

    rank_rel: float = 1e-10
    residual_abs: float = 1e-9

    def __post_init__(self):
        if not (0.0 < self.rank_rel < 1.0):
            raise ValueError("rank_rel must lie in (0, 1)")
        if not self.residual_abs > 0.0:
            raise ValueError("residual_abs must be positive")


DEFAULT_TOL = Tolerance()


def as_matrix(m) -> np.ndarray:
    """Return ``m`` as a 2-D complex array; a 1-D input becomes one column."""
    a = np.asarray(m, dtype=complex)
    if a.ndim == 1:
        a = a.reshape(-1, 1)
    if a.ndim != 2:
        raise ValueError(f"expected a matrix, got shape {a.shape}")
    return a


def _svd_rank(s: np.ndarray, tol: Tolerance) -> int:
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > tol.rank_rel * s[0]))


def rank(m, tol: Tolerance = DEFAULT_TOL) -> int:
    """Numerical rank; invariant under rescaling of ``m``."""
    a = as_matrix(m)
    if a.size == 0:
        return 0
    return _svd_rank(np.linalg.svd(a, compute_uv=False), tol)


def null_space(m, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Columns spanning the kernel of ``m`` (``cols − rank`` of them)."""
    a = as_matrix(m)
    n = a.shape[1]
    if a.shape[0] == 0:
        return np.eye(n, dtype=complex)
    _, s, vh = np.linalg.svd(a)
    r = _svd_rank(s, tol)
    return vh[r:].conj().T.copy()


def column_basis(m, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Well-conditioned basis for the column span of ``m``."""
    a = as_matrix(m)
    if a.size == 0:
        return np.zeros((a.shape[0], 0), complex)
    u, s, _ = np.linalg.svd(a, full_matrices=False)
    return u[:, : _svd_rank(s, tol)].copy()


def _residual_ok(a, x, b, tol: Tolerance) -> bool:
    res = np.linalg.norm(a @ x - b)
    scale = max(1.0, np.linalg.norm(b), np.linalg.norm(a) * np.linalg.norm(x))
    return res <= tol.residual_abs * scale


def solve_linear(a, b, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Solve ``a x = b`` for square or consistent overdetermined ``a``.

    Raises :class:`Singular` when no solution reproduces ``b`` to within the
    residual bound.
    """
    a = as_matrix(a)
    b_in = np.asarray(b, dtype=complex)
    vec = b_in.ndim == 1
    b = b_in.reshape(-1, 1) if vec else b_in
    if a.shape[0] != b.shape[0]:
        raise ValueError("row counts of a and b differ")
    x = None
    if a.shape[0] == a.shape[1] and a.size:
        s = np.linalg.svd(a, compute_uv=False)
        if _svd_rank(s, tol) == a.shape[0]:
            x = np.linalg.solve(a, b)
    if x is None:
        x = np.linalg.lstsq(a, b, rcond=None)[0]
        if not _residual_ok(a, x, b, tol):
            raise Singular("linear system is singular and the right-hand side is inconsistent")
    return x[:, 0] if vec else x


def left_inverse(basis) -> np.ndarray:
    """A matrix ``C`` with ``C @ basis = I`` (coordinates for vectors in the span)."""
    b = as_matrix(basis)
    if b.shape[1] == 0:
        return np.zeros((0, b.shape[0]), complex)
    return np.linalg.pinv(b)


def restricted_inverse(a, s_basis, tol: Tolerance = DEFAULT_TOL, coords=None) -> np.ndarray:
    """Inverse of ``a`` compressed to the span of ``s_basis``.

    With ``B = s_basis`` and ``C`` a left inverse of ``B`` (``coords`` if
    given) the result is ``B (C a B)^{-1} C``.  It maps into span(B) and
    inverts ``a`` there whenever ``a`` leaves span(B) invariant.
    """
    a = as_matrix(a)
    b = as_matrix(s_basis)
    n = a.shape[0]
    d = b.shape[1]
    if d == 0:
        return np.zeros((n, n), complex)
    c = left_inverse(b) if coords is None else as_matrix(coords)
    compressed = c @ a @ b
    s = np.linalg.svd(compressed, compute_uv=False)
    if _svd_rank(s, tol) < d or s[0] == 0.0:
        raise SingularOnSubspace("compressed operator is singular on the subspace")
    return b @ np.linalg.solve(compressed, c)


# --- canonical (reduced column echelon) form ------------------------------

def _rref_rows_python(r: np.ndarray, cutoff: float) -> int:
    """In-place reduced row echelon form of ``r`` with partial pivoting.

    Pivots smaller than ``cutoff`` count as zero.  Returns the number of
    pivot rows.
    """
    rows, cols = r.shape
    pivot_row = 0
    for c in range(cols):
        if pivot_row == rows:
            break
        col = np.abs(r[pivot_row:, c])
        k = int(np.argmax(col))
        if col[k] <= cutoff:
            r[pivot_row:, c] = 0.0
            continue
        k += pivot_row
        if k != pivot_row:
            r[[pivot_row, k]] = r[[k, pivot_row]]
        r[pivot_row] /= r[pivot_row, c]
        factors = r[:, c].copy()
        factors[pivot_row] = 0.0
        r -= np.outer(factors, r[pivot_row])
        r[:, c] = 0.0
        r[pivot_row, c] = 1.0
        pivot_row += 1
    return pivot_row


def rref_backend() -> str:
    """Name of the active elimination kernel: ``"compiled"`` or ``"python"``."""
    return "compiled" if _rref_rows_compiled is not None else "python"


def canonical_columns(m, tol: Tolerance = DEFAULT_TOL, backend: str | None = None) -> np.ndarray:
    """Reduced column echelon basis of the column span of ``m``.

    Leading entries are 1 and every other entry in a pivot row is 0, so two
    spanning sets of one subspace give the same result up to rounding.
    """
    a = as_matrix(m)
    n, d = a.shape
    if d == 0 or n == 0:
        return np.zeros((n, 0), complex)
    # orthonormalize first: removes dependent columns and fixes the scale
    q = column_basis(a, tol)
    if q.shape[1] == 0:
        return np.zeros((n, 0), complex)
    r = np.ascontiguousarray(q.T)
    cutoff = np.sqrt(tol.rank_rel)
    use = backend or rref_backend()
    if use == "compiled" and _rref_rows_compiled is not None:
        k = _rref_rows_compiled(r, cutoff)
    else:
        k = _rref_rows_python(r, cutoff)
    return r[:k].T.copy()
