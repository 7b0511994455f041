"""Sparse multivariate polynomials and degree-one rational functions.

A polynomial is a map from exponent tuples to complex coefficients.  The
rational functions of interest are Z = scale·p/q with p and q homogeneous,
deg p = deg q + 1 and p(1, …, 1) = q(1, …, 1) = 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product as cartesian

import numpy as np

from ..errors import DimensionMismatch, NotHomogenizable, NotNormalizable, PoleHit

__all__ = ["MultiPoly", "MultiRational", "format_complex", "functions_agree"]

_ZERO_COEF = 1e-300


def format_complex(c: complex) -> str:
    """Shortest round-tripping text for a coefficient: ``2``, ``-0.5``, ``(1+2i)``."""
    c = complex(c)
    re, im = c.real, c.imag

    def num(x: float) -> str:
        if x == int(x) and abs(x) < 1e15:
            return str(int(x))
        return repr(x)

    if im == 0:
        return num(re)
    sign = "-" if im < 0 else "+"
    if re == 0:
        return f"({num(im)}i)"
    return f"({num(re)}{sign}{num(abs(im))}i)"


@dataclass(frozen=True)
class MultiPoly:
    n_vars: int
    terms: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for exp, c in self.terms.items():
            exp = tuple(int(a) for a in exp)
            if len(exp) != self.n_vars or min(exp, default=0) < 0:
                raise DimensionMismatch(f"bad exponent {exp} for {self.n_vars} variables")
            c = complex(c)
            if abs(c) > _ZERO_COEF:
                clean[exp] = clean.get(exp, 0) + c
        object.__setattr__(self, "terms", {e: c for e, c in clean.items() if abs(c) > _ZERO_COEF})

    # --- constructors ----------------------------------------------------

    @classmethod
    def constant(cls, n_vars: int, c: complex = 1.0) -> "MultiPoly":
        return cls(n_vars, {(0,) * n_vars: c})

    @classmethod
    def variable(cls, n_vars: int, i: int) -> "MultiPoly":
        exp = [0] * n_vars
        exp[i] = 1
        return cls(n_vars, {tuple(exp): 1.0})

    # --- structure -------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    @property
    def homogeneous(self) -> bool:
        return len({sum(e) for e in self.terms}) <= 1

    def degree_in(self, i: int) -> int:
        return max((e[i] for e in self.terms), default=-1)

    def mentions(self, i: int) -> bool:
        return any(e[i] for e in self.terms)

    def coefficient_sum(self) -> complex:
        return complex(sum(self.terms.values()))

    # --- arithmetic ------------------------------------------------------

    def _check(self, other: "MultiPoly"):
        if other.n_vars != self.n_vars:
            raise DimensionMismatch("polynomials in different numbers of variables")

    def __add__(self, other: "MultiPoly") -> "MultiPoly":
        self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return MultiPoly(self.n_vars, out)

    def __neg__(self) -> "MultiPoly":
        return MultiPoly(self.n_vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: "MultiPoly") -> "MultiPoly":
        return self + (-other)

    def __mul__(self, other) -> "MultiPoly":
        if not isinstance(other, MultiPoly):
            return MultiPoly(self.n_vars, {e: c * complex(other) for e, c in self.terms.items()})
        self._check(other)
        out: dict = {}
        for (e1, c1), (e2, c2) in cartesian(self.terms.items(), other.terms.items()):
            e = tuple(a + b for a, b in zip(e1, e2))
            out[e] = out.get(e, 0) + c1 * c2
        return MultiPoly(self.n_vars, out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "MultiPoly":
        out = MultiPoly.constant(self.n_vars)
        for _ in range(int(k)):
            out = out * self
        return out

    def scale_variable(self, i: int, power: int) -> "MultiPoly":
        """Multiply by z_i**power."""
        out = {}
        for e, c in self.terms.items():
            e = list(e)
            e[i] += power
            out[tuple(e)] = c
        return MultiPoly(self.n_vars, out)

    def homogenize(self, i: int, degree: int | None = None) -> "MultiPoly":
        """Pad every term with powers of z_i up to ``degree`` (default: own degree)."""
        d = self.degree if degree is None else degree
        out = {}
        for e, c in self.terms.items():
            e = list(e)
            e[i] += d - sum(e)
            out[tuple(e)] = c
        return MultiPoly(self.n_vars, out)

    def __call__(self, z) -> complex:
        z = np.asarray(z, dtype=complex).reshape(-1)
        if z.size != self.n_vars:
            raise DimensionMismatch(f"expected {self.n_vars} values, got {z.size}")
        return complex(sum(c * np.prod(z ** np.array(e)) for e, c in self.terms.items()))

    # --- text ------------------------------------------------------------

    def render(self) -> str:
        """Text readable by :func:`subalg.ratfunc.parse`, terms in sorted order."""
        if not self.terms:
            return "0"
        out = ""
        for e in sorted(self.terms, reverse=True):
            c = self.terms[e]
            negative = c.imag == 0 and c.real < 0
            if negative:
                c = -c
            factors = [f"z{i + 1}" + (f"^{a}" if a > 1 else "") for i, a in enumerate(e) if a]
            text = "*".join(factors if c == 1 and factors else [format_complex(c)] + factors)
            if not out:
                out = f"-{text}" if negative else text
            else:
                out += f" - {text}" if negative else f" + {text}"
        return out

    def __str__(self) -> str:
        return self.render()


@dataclass(frozen=True)
class MultiRational:
    """Z = scale·p/q with homogeneous p, q and deg p = deg q + 1.

    Built through :meth:`from_polys`, which enforces the degree pattern and
    scales p and q to value 1 at the all-ones point.
    """

    p: MultiPoly
    q: MultiPoly
    scale: complex = 1.0

    @classmethod
    def from_polys(cls, p: MultiPoly, q: MultiPoly) -> "MultiRational":
        if p.n_vars != q.n_vars:
            raise DimensionMismatch("numerator and denominator variable counts differ")
        if not (p.homogeneous and q.homogeneous) or p.degree != q.degree + 1:
            raise NotHomogenizable(
                f"need homogeneous p, q with deg p = deg q + 1, got {p.degree} and {q.degree}")
        ones = np.ones(p.n_vars)
        p1, q1 = p(ones), q(ones)
        if abs(p1) < 1e-12 or abs(q1) < 1e-12:
            raise NotNormalizable("p or q vanishes at (1, …, 1)")
        # already normalized up to rounding: keep the coefficients bit-exact
        p_n = p if abs(p1 - 1) < 1e-13 else p * (1 / p1)
        q_n = q if abs(q1 - 1) < 1e-13 else q * (1 / q1)
        return cls(p_n, q_n, p1 / q1)

    @property
    def n_vars(self) -> int:
        return self.p.n_vars

    @property
    def degree(self) -> int:
        """Degree of the numerator."""
        return self.p.degree

    @property
    def normalized(self) -> bool:
        return abs(self.scale - 1) < 1e-12

    def unit(self) -> "MultiRational":
        """The same p/q with scale 1."""
        return MultiRational(self.p, self.q, 1.0)

    def __call__(self, z, tol: float = 1e-13) -> complex:
        z = np.asarray(z, dtype=complex).reshape(-1)
        qz = self.q(z)
        size = sum(abs(c) * np.prod(np.abs(z) ** np.array(e)) for e, c in self.q.terms.items())
        if abs(qz) <= tol * max(size, 1e-300):
            raise PoleHit(f"denominator vanishes at {tuple(z)}")
        return self.scale * self.p(z) / qz

    def eval(self, z) -> complex:
        return self(z)

    def render(self) -> str:
        num = f"({self.p.render()})"
        if not self.normalized:
            num = f"{format_complex(self.scale)}*{num}"
        if self.q.degree == 0 and self.q.terms == {(0,) * self.n_vars: 1}:
            return num
        return f"{num}/({self.q.render()})"

    def __str__(self) -> str:
        return self.render()


def functions_agree(f, g, n_vars: int, rng=None, points: int = 40, tol: float = 1e-8) -> bool:
    """Sample-based equality of two functions of n_vars complex variables.

    Points where either side hits a pole are skipped.  This is a probabilistic
    test: distinct rational functions agree on a random point with
    probability zero.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    checked = 0
    while checked < points:
        z = np.exp(rng.uniform(-0.5, 0.5, n_vars) + 1j * rng.uniform(-np.pi, np.pi, n_vars))
        try:
            a, b = f(z), g(z)
        except PoleHit:
            continue
        if abs(a - b) > tol * max(1.0, abs(a)):
            return False
        checked += 1
    return True
