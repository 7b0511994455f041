"""Realization compiler: a collection whose Z-function is a given p/q.

Every intermediate object is a homogeneous degree-one function of the
variables, represented by a Z collection whose phases carry variable
labels.  The last variable w = z_n is the homogenizer.  Starting from
single variables, the compiler composes four atoms by substitution:

    affine(c, f, g)  = c·f + (1 − c)·g
    square(f, g)     = f²/g
    product(f, g)    = f·g/w     (three-dimensional atom)
    reciprocal(f)    = w²/f = square(w, f)

The product can also be formed from squares alone,
f·g/w = 9/8·square(2f/3 + g/3, w) − 1/8·square(2f − g, w), but the two
squares nearly cancel, so the compiler uses the direct atom.  Monomials are
built by square-and-divide chains, which avoid the product entirely.

A monomial z^a of degree k becomes z^a/w^{k−1}, a normalized polynomial p
of degree k becomes P = p/w^{k−1} through nested affine combinations, and
p/q = P·w/Q = product(P, reciprocal(Q)).  Phases with equal labels are
merged and the collection is pruned from both sides after every step.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..algebra import (
    add_y,
    additive_zero,
    embed,
    merge_phases,
    permute_phases,
    substitute_into_y,
    substitute_into_z,
)
from ..atoms import affine_z, linear_y, matrix_linear_y, product_z, single_phase_z, square_z
from ..collections import YCollection, ZCollection
from ..errors import ConditionViolated, PoleHit, RealizationFailed, Singular
from ..reduction import prune_y, prune_z
from ..solvers import solve_y, solve_z
from ..spaces import Subspace
from .poly import MultiPoly, MultiRational

__all__ = [
    "Labeled",
    "RealizationCertificate",
    "variable",
    "affine",
    "square",
    "product",
    "product_by_squares",
    "reciprocal",
    "monomial",
    "polynomial_part",
    "compile_rational",
    "two_sided_prune",
    "realize_scalar",
    "realize_y_matrix",
    "sample_points",
    "CERTIFICATE_POINTS",
    "CERTIFICATE_TOL",
    "Y_CERTIFICATE_TOL",
]

CERTIFICATE_POINTS = 25
CERTIFICATE_TOL = 1e-7
Y_CERTIFICATE_TOL = 1e-6


@dataclass(frozen=True)
class Labeled:
    """A Z collection whose phase i belongs to variable ``labels[i]``.

    Labels are variable indices, or ``("slot", k)`` placeholders inside an
    atom that is being composed.
    """

    collection: ZCollection
    labels: tuple

    @property
    def h(self) -> int:
        return self.collection.ambient_dim

    def bare_variable(self):
        """The variable index if this is the plain function z_i, else None."""
        if self.h == 1 and len(self.labels) == 1:
            return self.labels[0]
        return None


@lru_cache(maxsize=None)
def _affine_atom(c: complex) -> ZCollection:
    return affine_z(c)


@lru_cache(maxsize=None)
def _square_atom() -> ZCollection:
    return square_z()


@lru_cache(maxsize=None)
def _product_atom() -> ZCollection:
    return product_z()


def _adjoint(c: ZCollection) -> ZCollection:
    """Collection of the adjoint projectors; its scalar function is conj(Z(conj z))."""
    n = c.ambient_dim

    def rng(op):
        # a nonzero projector has norm ≥ 1, so the cutoff is absolute
        u, sv, _ = np.linalg.svd(op.conj().T)
        return Subspace(u[:, : int(np.count_nonzero(sv > 1e-10))], ambient_dim=n)

    g0, g1, g2 = c.gammas()
    return ZCollection(rng(g0), rng(g1), rng(g2), tuple(rng(li) for li in c.lambdas()), c.tol)


def two_sided_prune(c: ZCollection) -> ZCollection:
    """Prune, then prune the adjoint collection and map back (dim U = 1).

    Plain pruning keeps only what U reaches; the adjoint pass also drops
    what the U component of the current cannot see.  Both keep Z.
    """
    c, _ = prune_z(c)
    if c.m != 1:
        return c
    a, _ = prune_z(_adjoint(c))
    if a.ambient_dim == c.ambient_dim:
        return c
    c, _ = prune_z(_adjoint(a))
    return c


def _tidy(lab: Labeled) -> Labeled:
    """Merge phases sharing a label, then prune and drop emptied phases."""
    c, labels = lab.collection, list(lab.labels)
    seen: dict = {}
    i = 0
    while i < len(labels):
        first = seen.setdefault(labels[i], i)
        if first != i:
            c = merge_phases(c, first, i)
            del labels[i]
        else:
            i += 1
    c = two_sided_prune(c)
    keep = [k for k, ph in enumerate(c.phases) if ph.dim]
    if len(keep) < len(labels):
        c = c.replace(phases=tuple(c.phases[k] for k in keep))
        labels = [labels[k] for k in keep]
    return Labeled(c, tuple(labels))


def _apply(atom: ZCollection, args) -> Labeled:
    """Substitute ``args[k]`` into phase k of ``atom``."""
    cur = Labeled(atom, tuple(("slot", k) for k in range(atom.n)))
    for k, arg in enumerate(args):
        pos = cur.labels.index(("slot", k))
        var = arg.bare_variable()
        if var is not None:
            labels = list(cur.labels)
            labels[pos] = var
            cur = Labeled(cur.collection, tuple(labels))
            continue
        c = substitute_into_z(cur.collection, arg.collection, pos)
        rest = cur.labels[:pos] + cur.labels[pos + 1:]
        cur = Labeled(c, arg.labels + rest)
    return _tidy(cur)


def variable(i: int) -> Labeled:
    return Labeled(single_phase_z(1), (i,))


def affine(c: complex, f: Labeled, g: Labeled) -> Labeled:
    """c·f + (1 − c)·g."""
    c = complex(c)
    if c == 1:
        return f
    if c == 0:
        return g
    return _apply(_affine_atom(c), [f, g])


def square(f: Labeled, g: Labeled) -> Labeled:
    """f²/g."""
    return _apply(_square_atom(), [f, g])


def product(f: Labeled, g: Labeled, w: int) -> Labeled:
    """f·g/z_w through the three-dimensional product atom."""
    if f.bare_variable() == w:
        return g
    if g.bare_variable() == w:
        return f
    return _apply(_product_atom(), [f, g, variable(w)])


def product_by_squares(f: Labeled, g: Labeled, w: int) -> Labeled:
    """f·g/z_w = 9/8·square(2f/3 + g/3, z_w) − 1/8·square(2f − g, z_w).

    Uses only the square and affine atoms.  The two squares nearly cancel
    when |f| and |g| differ a lot, so :func:`product` is preferred.
    """
    hom = variable(w)
    s1 = square(affine(2 / 3, f, g), hom)
    s2 = square(affine(2.0, f, g), hom)
    return affine(9 / 8, s1, s2)


def reciprocal(f: Labeled, w: int) -> Labeled:
    """z_w²/f."""
    return square(variable(w), f)


def _laurent(exps, w: int) -> tuple:
    """Exponents of z^a / z_w^{k−1}: total degree one, only z_w may be negative."""
    e = list(exps)
    e[w] -= sum(exps) - 1
    return tuple(e)


def _monomial_laurent(e: tuple, w: int, cache: dict) -> Labeled:
    """Degree-one Laurent monomial z^e by square-and-divide.

    With c the parity residue of e (a variable, z_w, or z_i·z_j/z_w) and
    b = (e + c)/2, z^e = square(z^b, z^c).  The exponents halve at each
    step and no step subtracts large terms.
    """
    if e in cache:
        return cache[e]
    n = len(e)
    odd = [i for i in range(n) if i != w and e[i] % 2]
    if sum(abs(x) for i, x in enumerate(e) if i != w) == 0:
        out = variable(w)
    elif e.count(0) == n - 1 and max(e) == 1:
        out = variable(e.index(1))
    elif len(odd) == 2 and sum(e[i] for i in range(n) if i != w) == 2:
        out = product(variable(odd[0]), variable(odd[1]), w)
    else:
        c = [0] * n
        for i in odd:
            c[i] = 1
        c[w] = 1 - len(odd)
        b = tuple((x + y) // 2 for x, y in zip(e, c))
        out = square(_monomial_laurent(b, w, cache), _monomial_laurent(tuple(c), w, cache))
    cache[e] = out
    return out


def monomial(exps, w: int, cache: dict | None = None) -> Labeled:
    """z^a / z_w^{k−1} where k = Σ a (the power of z_w is implied)."""
    return _monomial_laurent(_laurent(exps, w), w, {} if cache is None else cache)


def polynomial_part(p: MultiPoly, w: int) -> Labeled:
    """p / z_w^{k−1} for homogeneous p of degree k ≥ 1 with p(1, …, 1) = 1."""
    terms = sorted(p.terms.items(), key=lambda t: (sum(a for i, a in enumerate(t[0]) if i != w), t[0]))
    cache: dict = {}

    def combine(items) -> Labeled:
        if len(items) == 1:
            exps, c = items[0]
            if abs(c - 1) > 1e-9:
                raise RealizationFailed(f"single term with coefficient {c} ≠ 1")
            return monomial(exps, w, cache)
        # peel the first term whose coefficient is not 1; the rest sums to 1 − c ≠ 0
        k = next(i for i, (_, c) in enumerate(items) if abs(c - 1) > 1e-9)
        exps, c = items[k]
        rest = [(e, x / (1 - c)) for i, (e, x) in enumerate(items) if i != k]
        return affine(c, monomial(exps, w, cache), combine(rest))

    return combine(terms)


def compile_rational(r: MultiRational) -> Labeled:
    """Labeled collection with Z = p/q (the scale of ``r`` must be 1)."""
    if not r.normalized:
        raise ConditionViolated(f"Z(1, …, 1) = {r.scale}, a Z-function needs 1", "Z(1, …, 1) = 1")
    w = r.n_vars - 1
    top = polynomial_part(r.p, w)
    if r.q.degree == 0:
        return top
    return product(top, reciprocal(polynomial_part(r.q, w), w), w)


def _full_phases(lab: Labeled, n: int) -> ZCollection:
    """Phases in variable order 0..n−1, empty for unused variables."""
    c = lab.collection
    zero = Subspace.zero(c.ambient_dim)
    phases = []
    for v in range(n):
        phases.append(c.phases[lab.labels.index(v)] if v in lab.labels else zero)
    return c.replace(phases=tuple(phases))


# --- certificates ---------------------------------------------------------

@dataclass(frozen=True)
class RealizationCertificate:
    """A collection, its target, and the sampled residuals.

    A residual is |Z_solve − Z_target| / max(1, |Z_target|) at one point.
    """

    collection: object
    target: object
    samples: tuple
    tol: float

    @property
    def max_residual(self) -> float:
        return max((r for _, r in self.samples), default=0.0)

    @property
    def passed(self) -> bool:
        return bool(self.samples) and self.max_residual < self.tol


def sample_points(rng: np.random.Generator, n_vars: int, count: int):
    """Points with |z_i| in [1/2, 2] and uniform phase."""
    for _ in range(count):
        mod = np.exp(rng.uniform(np.log(0.5), np.log(2.0), n_vars))
        yield mod * np.exp(1j * rng.uniform(-np.pi, np.pi, n_vars))


def _certify(collection, target_fn, solve_fn, n_vars, seed, tol, count=CERTIFICATE_POINTS):
    rng = np.random.default_rng(seed)
    samples = []
    attempts = 0
    while len(samples) < count and attempts < 20 * count:
        attempts += 1
        z = next(sample_points(rng, n_vars, 1))
        try:
            want = np.atleast_2d(target_fn(z))
            got = np.asarray(solve_fn(z))
        except (PoleHit, Singular):
            continue
        res = float(np.abs(got - want).max() / max(1.0, np.abs(want).max()))
        samples.append((tuple(complex(x) for x in z), res))
    return tuple(samples)


def realize_scalar(r: MultiRational, seed: int = 0,
                   tol: float = CERTIFICATE_TOL) -> RealizationCertificate:
    """Pruned collection with dim U = 1 and Z = r, with a sampled certificate."""
    n = r.n_vars
    lab = compile_rational(r)
    c = two_sided_prune(_full_phases(lab, n))
    samples = _certify(c, r, lambda z: solve_z(c, z), n, seed, tol)
    cert = RealizationCertificate(c, r, samples, tol)
    if not cert.passed:
        raise RealizationFailed(f"certificate residual {cert.max_residual:.3g} ≥ {tol}")
    return cert


# --- Y matrices -----------------------------------------------------------

def _entry_terms(p: MultiPoly, q: MultiPoly, shift: complex = 0.0):
    """Write p/q as a sum of (value at ones, normalized function) pairs.

    A Y-atom with coefficient c needs c ≠ 0; the diagonal one also needs
    c ≠ −1.  With a nonzero shift s the entry becomes (p/q + s·w) − s·w,
    where w is the homogenizing variable.
    """
    n = p.n_vars
    w_poly = MultiPoly.variable(n, n - 1)
    ones = np.ones(n)
    value = p(ones) / q(ones)
    if shift == 0:
        return [(value, MultiRational.from_polys(p, q).unit())]
    shifted = p + w_poly * q * shift
    return [(value + shift, MultiRational.from_polys(shifted, q).unit()),
            (-shift, MultiRational.from_polys(w_poly, MultiPoly.constant(n)).unit())]


def _plan_is_safe(plan, m: int) -> bool:
    """Every atom and every partial sum keeps −1 out of the spectrum of Y(1, …, 1)."""
    acc = np.eye(m, dtype=complex)
    for a, b, coef, _ in plan:
        if abs(coef) < 1e-9 or (a == b and abs(coef + 1) < 1e-9):
            return False
        acc[a, b] += coef
        if abs(np.linalg.det(acc)) < 1e-8:
            return False
    return True


def _entry_y(a: int, b: int, coef: complex, f: MultiRational, m: int) -> YCollection:
    """Y collection whose function is coef·f placed at (a, b) of an m × m matrix."""
    n = f.n_vars
    lab = compile_rational(f)
    if a == b:
        atom = linear_y([coef])
        targets = [a]
    else:
        bmat = np.zeros((2, 2), complex)
        bmat[0, 1] = coef
        atom = matrix_linear_y(bmat)
        targets = [a, b]
    labels = lab.labels
    c = atom if lab.bare_variable() is not None else substitute_into_y(atom, lab.collection, 0)
    zero = Subspace.zero(c.ambient_dim)
    phases = tuple(c.phases[labels.index(v)] if v in labels else zero for v in range(n))
    c = c.replace(phases=phases)
    c = embed(c, m)
    # V coordinates after embedding: the atom's coordinates first, then the rest
    order = targets + [i for i in range(m) if i not in targets]
    perm = np.zeros((m, m), complex)
    for src, dst in enumerate(order):
        perm[dst, src] = 1.0
    return add_y(c, additive_zero(m), perm, None)


def realize_y_matrix(targets, seed: int = 0,
                     tol: float = Y_CERTIFICATE_TOL) -> RealizationCertificate:
    """Y collection whose function is the given m × m matrix of rational functions.

    Entries are MultiRational (with their scale), a (p, q) polynomial pair,
    or None/0 for a zero entry.
    """
    rows = [list(row) for row in targets]
    m = len(rows)
    if any(len(row) != m for row in rows):
        raise ConditionViolated("target must be square", "m × m")
    n = None
    fns = [[None] * m for _ in range(m)]
    for a in range(m):
        for b in range(m):
            entry = rows[a][b]
            if entry is None or (not isinstance(entry, (MultiRational, tuple)) and entry == 0):
                continue
            if isinstance(entry, MultiRational):
                p, q = entry.p * entry.scale, entry.q
            else:
                p, q = entry
            if p.is_zero:
                continue
            n = p.n_vars
            fns[a][b] = (p, q)
    cells = [(a, b) for a in range(m) for b in range(m) if fns[a][b] is not None]
    if cells:
        ones = np.ones(n)
        at_ones = np.eye(m, dtype=complex)
        for a, b in cells:
            p, q = fns[a][b]
            at_ones[a, b] += p(ones) / q(ones)
        if abs(np.linalg.det(at_ones)) < 1e-8:
            raise ConditionViolated("Y(1, …, 1) has eigenvalue −1", "det(I + Y(1, …, 1)) ≠ 0")
        rng = np.random.default_rng(seed)
        # zero-valued entries cannot be normalized and need a shift up front
        shifts = {(a, b): 0.0 if abs(at_ones[a, b] - (a == b)) > 1e-9 else 2.0 for a, b in cells}
        for _ in range(20):
            plan = [(a, b, coef, f) for a, b in cells
                    for coef, f in _entry_terms(*fns[a][b], shifts[(a, b)])]
            if _plan_is_safe(plan, m):
                break
            shifts = {cell: complex(*rng.uniform(1, 3, 2)) for cell in cells}
        else:
            raise RealizationFailed("no safe order of Y-atoms found")
        total = additive_zero(m)
        for a, b, coef, f in plan:
            total = add_y(total, _entry_y(a, b, coef, f, m))
    if n is None:
        c = additive_zero(m)
        target_fn = lambda z: np.zeros((m, m), complex)  # noqa: E731
        n_vars = 0
    else:
        c, _ = prune_y(total)
        n_vars = n

        def target_fn(z):
            out = np.zeros((m, m), complex)
            for a in range(m):
                for b in range(m):
                    if fns[a][b] is not None:
                        p, q = fns[a][b]
                        qz = q(z)
                        if abs(qz) < 1e-13 * max(1.0, abs(p(z))):
                            raise PoleHit("target entry has a pole")
                        out[a, b] = p(z) / qz
            return out

    samples = _certify(c, target_fn, lambda z: solve_y(c, z), n_vars, seed, tol)
    cert = RealizationCertificate(c, targets, samples, tol)
    if not cert.passed:
        raise RealizationFailed(f"certificate residual {cert.max_residual:.3g} ≥ {tol}")
    return cert
