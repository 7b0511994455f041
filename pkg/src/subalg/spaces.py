"""Subspaces of C^N, direct sums and the oblique projectors they induce.

A :class:`Subspace` remembers three bases of the same span:

* ``frame``: the basis the caller supplied; operator matrices such as Z(z)
  are reported in it,
* ``ortho``: an orthonormal basis used only for numerically stable rank work,
* ``basis``: the canonical reduced column echelon form, used for equality
  and serialization.

No inner product enters the mathematics; ``ortho`` is a numerical device.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .errors import NotDirectSum
from .numcore import (
    DEFAULT_TOL,
    Tolerance,
    as_matrix,
    canonical_columns,
    column_basis,
    left_inverse,
    null_space,
    rank,
)

__all__ = [
    "Subspace",
    "DirectSum",
    "projectors_of",
    "intersect",
    "subspace_sum",
    "tensor_product",
    "image",
    "span",
]


class Subspace:
    """A subspace of C^N given by a full-column-rank frame."""

    __slots__ = ("_frame", "_ortho", "_basis", "_tol")

    def __init__(self, frame, ambient_dim: int | None = None, tol: Tolerance = DEFAULT_TOL):
        f = as_matrix(frame)
        if ambient_dim is not None and f.size == 0:
            f = np.zeros((ambient_dim, 0), complex)
        if ambient_dim is not None and f.shape[0] != ambient_dim:
            raise ValueError(f"frame has {f.shape[0]} rows, expected {ambient_dim}")
        if not np.all(np.isfinite(f)):
            raise ValueError("frame has non-finite entries")
        if f.shape[1] and rank(f, tol) != f.shape[1]:
            raise ValueError("frame columns are linearly dependent")
        f.setflags(write=False)
        self._frame = f
        self._ortho = None
        self._basis = None
        self._tol = tol

    # --- constructors ---------------------------------------------------

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls(np.zeros((n, 0), complex))

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls(np.eye(n, dtype=complex))

    @classmethod
    def coordinate(cls, n: int, indices: Sequence[int]) -> "Subspace":
        """Span of the standard basis vectors with the given indices."""
        return cls(np.eye(n, dtype=complex)[:, list(indices)], ambient_dim=n)

    # --- views ----------------------------------------------------------

    @property
    def ambient_dim(self) -> int:
        return self._frame.shape[0]

    @property
    def dim(self) -> int:
        return self._frame.shape[1]

    @property
    def frame(self) -> np.ndarray:
        return self._frame

    @property
    def ortho(self) -> np.ndarray:
        if self._ortho is None:
            o = column_basis(self._frame, self._tol) if self.dim else self._frame
            o.setflags(write=False)
            self._ortho = o
        return self._ortho

    @property
    def basis(self) -> np.ndarray:
        """Canonical reduced column echelon basis."""
        if self._basis is None:
            b = canonical_columns(self._frame, self._tol)
            b.setflags(write=False)
            self._basis = b
        return self._basis

    def canonical(self) -> "Subspace":
        """Same span with the canonical basis as frame."""
        return Subspace(self.basis, ambient_dim=self.ambient_dim)

    def with_frame(self, frame) -> "Subspace":
        """Same span, different frame; the new frame must span the same space."""
        s = Subspace(frame, ambient_dim=self.ambient_dim, tol=self._tol)
        if not s.same_span(self):
            raise ValueError("new frame spans a different subspace")
        return s

    # --- queries --------------------------------------------------------

    def coords(self, vectors) -> np.ndarray:
        """Frame coordinates of vectors assumed to lie in the span."""
        return left_inverse(self._frame) @ as_matrix(vectors)

    def contains(self, vectors, tol: Tolerance | None = None) -> bool:
        v = as_matrix(vectors)
        if v.shape[1] == 0:
            return True
        tol = tol or self._tol
        return rank(np.hstack([self.ortho, v]), tol) == self.dim

    def same_span(self, other: "Subspace") -> bool:
        if self.ambient_dim != other.ambient_dim or self.dim != other.dim:
            return False
        return self.contains(other.ortho)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.same_span(other)

    __hash__ = None

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim}, ambient_dim={self.ambient_dim})"

    def map(self, op) -> "Subspace":
        """Image under an invertible map, carrying the frame along."""
        return Subspace(as_matrix(op) @ self._frame, tol=self._tol)

    def embed(self, n: int, offset: int) -> "Subspace":
        """Place this subspace in a block of coordinates of C^n."""
        f = np.zeros((n, self.dim), complex)
        f[offset: offset + self.ambient_dim] = self._frame
        return Subspace(f, tol=self._tol)


def span(vectors, n: int | None = None, tol: Tolerance = DEFAULT_TOL) -> Subspace:
    """Subspace spanned by possibly dependent columns; the frame is canonical."""
    v = as_matrix(vectors)
    if n is not None and v.size == 0:
        v = np.zeros((n, 0), complex)
    return Subspace(canonical_columns(v, tol), ambient_dim=v.shape[0], tol=tol)


def _ortho_span(vectors, n: int, tol: Tolerance) -> Subspace:
    v = as_matrix(vectors)
    if v.size == 0:
        return Subspace.zero(n)
    return Subspace(column_basis(v, tol), ambient_dim=n, tol=tol)


class DirectSum:
    """Ordered parts whose concatenated bases form an invertible matrix."""

    def __init__(self, parts: Sequence[Subspace], tol: Tolerance = DEFAULT_TOL):
        parts = list(parts)
        if not parts:
            raise NotDirectSum("a direct sum needs at least one part")
        n = parts[0].ambient_dim
        if any(p.ambient_dim != n for p in parts):
            raise NotDirectSum("parts live in different ambient spaces")
        total = sum(p.dim for p in parts)
        if total != n:
            raise NotDirectSum(f"part dimensions sum to {total}, ambient is {n}")
        self.parts = parts
        self.ambient_dim = n
        b = np.hstack([p.ortho for p in parts]) if n else np.zeros((0, 0), complex)
        if n and rank(b, tol) != n:
            raise NotDirectSum("parts are not independent")
        self._b = b
        self._binv = np.linalg.inv(b) if n else b
        offs = np.cumsum([0] + [p.dim for p in parts])
        self._slices = [slice(int(offs[i]), int(offs[i + 1])) for i in range(len(parts))]
        self._projectors = None

    @staticmethod
    def check(parts: Sequence[Subspace], tol: Tolerance = DEFAULT_TOL) -> bool:
        try:
            DirectSum(parts, tol)
        except NotDirectSum:
            return False
        return True

    def projector(self, i: int) -> np.ndarray:
        return self.projectors()[i]

    def projectors(self) -> list[np.ndarray]:
        if self._projectors is None:
            ps = []
            for sl in self._slices:
                p = self._b[:, sl] @ self._binv[sl, :]
                p.setflags(write=False)
                ps.append(p)
            self._projectors = ps
        return self._projectors

    def component_coords(self, i: int, x) -> np.ndarray:
        """Frame coordinates of the i-th component of ``x``."""
        part = self.parts[i]
        sl = self._slices[i]
        return part.coords(self._b[:, sl] @ (self._binv[sl, :] @ as_matrix(x)))


def projectors_of(d: DirectSum) -> list[np.ndarray]:
    """Oblique projectors onto each part along the others."""
    return d.projectors()


def intersect(s1: Subspace, s2: Subspace, tol: Tolerance = DEFAULT_TOL) -> Subspace:
    """Intersection via the null space of ``[B1 | -B2]``."""
    if s1.ambient_dim != s2.ambient_dim:
        raise ValueError("ambient dimensions differ")
    n = s1.ambient_dim
    if s1.dim == 0 or s2.dim == 0:
        return Subspace.zero(n)
    b1 = s1.ortho
    ker = null_space(np.hstack([b1, -s2.ortho]), tol)
    if ker.shape[1] == 0:
        return Subspace.zero(n)
    return _ortho_span(b1 @ ker[: s1.dim], n, tol)


def subspace_sum(*subspaces: Subspace, tol: Tolerance = DEFAULT_TOL) -> Subspace:
    """Smallest subspace containing all arguments."""
    n = subspaces[0].ambient_dim
    cols = [s.ortho for s in subspaces if s.dim]
    if not cols:
        return Subspace.zero(n)
    return _ortho_span(np.hstack(cols), n, tol)


def tensor_product(s1: Subspace, s2: Subspace) -> Subspace:
    """Span of Kronecker products of frame vectors (frame = Kronecker frame)."""
    f1, f2 = s1.frame, s2.frame
    n = s1.ambient_dim * s2.ambient_dim
    if s1.dim == 0 or s2.dim == 0:
        return Subspace.zero(n)
    cols = [np.kron(f1[:, a], f2[:, b]) for a in range(s1.dim) for b in range(s2.dim)]
    return Subspace(np.column_stack(cols), ambient_dim=n)


def image(op, s: Subspace, tol: Tolerance = DEFAULT_TOL) -> Subspace:
    """Span of ``op`` applied to the subspace."""
    a = as_matrix(op)
    if a.shape[1] != s.ambient_dim:
        raise ValueError("operator and subspace dimensions disagree")
    if s.dim == 0:
        return Subspace.zero(a.shape[0])
    return _ortho_span(a @ s.ortho, a.shape[0], tol)
