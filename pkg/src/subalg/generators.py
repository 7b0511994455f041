"""Seeded random collections for tests and the CLI."""

from __future__ import annotations

import numpy as np

from .collections import Superfunction, YCollection, ZCollection
from .ratfunc.poly import MultiPoly, MultiRational
from .spaces import Subspace

__all__ = [
    "random_matrix",
    "random_split",
    "random_z_collection",
    "random_orthogonal_z_collection",
    "random_y_collection",
    "random_superfunction",
    "random_multirational",
]


def random_matrix(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))


def random_split(rng: np.random.Generator, total: int, parts: int, minimum: int = 1) -> list[int]:
    """Random positive integers (each ≥ ``minimum``) summing to ``total``."""
    if parts * minimum > total:
        raise ValueError("cannot split")
    sizes = [minimum] * parts
    for _ in range(total - parts * minimum):
        sizes[int(rng.integers(parts))] += 1
    return sizes


def _subspaces(rng, n, dims):
    return [Subspace(random_matrix(rng, n, d), ambient_dim=n) for d in dims]


def random_z_collection(rng: np.random.Generator, h: int, m: int = 1, n: int = 2,
                        q1: int | None = None) -> ZCollection:
    """Generic Z collection: every subspace has random orientation."""
    if q1 is None:
        q1 = int(rng.integers(0, h - m + 1))
    q2 = h - m - q1
    u, e, j = _subspaces(rng, h, [m, q1, q2])
    phases = _subspaces(rng, h, random_split(rng, h, n))
    return ZCollection(u, e, j, tuple(phases))


def _orthogonal_blocks(rng, n, dims):
    q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    out, start = [], 0
    for d in dims:
        out.append(Subspace(q[:, start : start + d].astype(complex), ambient_dim=n))
        start += d
    return out


def random_orthogonal_z_collection(rng: np.random.Generator, h: int, m: int = 1, n: int = 3,
                                   q1: int | None = None) -> ZCollection:
    """Real collection with U, E, J mutually orthogonal and orthogonal phases.

    For such collections Z is a Herglotz function, so for positive fixed
    variables its poles in the remaining one are real and negative.
    """
    if q1 is None:
        q1 = int(rng.integers(0, h - m + 1))
    u, e, j = _orthogonal_blocks(rng, h, [m, q1, h - m - q1])
    phases = _orthogonal_blocks(rng, h, random_split(rng, h, n))
    return ZCollection(u, e, j, tuple(phases))


def random_y_collection(rng: np.random.Generator, k: int, m: int = 1, n: int = 2,
                        q1: int | None = None) -> YCollection:
    # V ∩ E = V ∩ J = 0 needs m ≤ q1 ≤ k − m
    if q1 is None:
        q1 = int(rng.integers(m, k - m + 1))
    e, j = _subspaces(rng, k, [q1, k - q1])
    v = Subspace(random_matrix(rng, k, m), ambient_dim=k)
    phases = _subspaces(rng, k, random_split(rng, k - m, n))
    return YCollection(e, j, v, tuple(phases))


def random_superfunction(rng: np.random.Generator, port_dim: int = 1, hidden: int = 2,
                         n: int = 1) -> Superfunction:
    """Superfunction with dim E = dim J = port_dim + hidden/2 (rounded)."""
    m = 2 * port_dim
    k = m + hidden
    q1 = k // 2
    e, j = _subspaces(rng, k, [q1, k - q1])
    v_in, v_out = _subspaces(rng, k, [port_dim, port_dim])
    phases = _subspaces(rng, k, random_split(rng, hidden, n)) if hidden else []
    return Superfunction.from_ports(e, j, v_in, v_out, phases)


def _homogeneous_exponents(n: int, degree: int):
    if n == 1:
        yield (degree,)
        return
    for a in range(degree, -1, -1):
        for rest in _homogeneous_exponents(n - 1, degree - a):
            yield (a,) + rest


def _random_poly(rng, n: int, degree: int, density: float) -> MultiPoly:
    exps = list(_homogeneous_exponents(n, degree))
    keep = [e for e in exps if rng.random() < density] or [exps[int(rng.integers(len(exps)))]]
    return MultiPoly(n, {e: complex(*rng.standard_normal(2)) for e in keep})


def random_multirational(rng: np.random.Generator, n_vars: int, degree: int,
                         density: float = 1.0) -> MultiRational:
    """Normalized p/q with homogeneous deg p = ``degree`` and deg q = degree − 1.

    Each monomial is present with probability ``density``.
    """
    while True:
        p = _random_poly(rng, n_vars, degree, density)
        q = _random_poly(rng, n_vars, degree - 1, density)
        ones = np.ones(n_vars)
        if abs(p(ones)) > 0.1 and abs(q(ones)) > 0.1:
            return MultiRational.from_polys(p, q).unit()
