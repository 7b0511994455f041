"""Subspace collections of every kind.

Phases are ordered: variable ``z[i]`` multiplies the projector onto
``phases[i]``.  Operator matrices are reported in the frame of ``u`` (Z
collections) or ``v`` (Y collections).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import NotDirectSum
from .numcore import DEFAULT_TOL, Tolerance, rank
from .spaces import DirectSum, Subspace, intersect

__all__ = [
    "ZCollection",
    "YCollection",
    "Superfunction",
    "Check",
    "ValidationReport",
    "validate",
    "l_operator",
]


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""
    required: bool = True


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple[Check, ...]

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks if c.required)

    def failed(self) -> list[Check]:
        return [c for c in self.checks if c.required and not c.passed]

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def __str__(self) -> str:
        lines = []
        for c in self.checks:
            mark = "pass" if c.passed else ("FAIL" if c.required else "note")
            lines.append(f"[{mark}] {c.name}" + (f" ({c.detail})" if c.detail else ""))
        return "\n".join(lines)


def _check_sum(name: str, parts: Sequence[Subspace], tol: Tolerance) -> Check:
    dims = "+".join(str(p.dim) for p in parts)
    n = parts[0].ambient_dim
    try:
        DirectSum(parts, tol)
    except NotDirectSum as exc:
        return Check(name, False, f"dims {dims} in {n}: {exc}")
    return Check(name, True, f"dims {dims} = {n}")


def _check_trivial(name: str, a: Subspace, b: Subspace, tol: Tolerance, required: bool = True) -> Check:
    d = intersect(a, b, tol).dim
    return Check(name, d == 0, f"intersection dim {d}", required)


class _Phased:
    phases: tuple[Subspace, ...]
    tol: Tolerance

    @property
    def n(self) -> int:
        return len(self.phases)

    @property
    def phase_dims(self) -> tuple[int, ...]:
        return tuple(p.dim for p in self.phases)

    def lambdas(self) -> list[np.ndarray]:
        """Projectors onto the phases (along the other phases, and V for Y)."""
        raise NotImplementedError

    def l_operator(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex).reshape(-1)
        if z.size != self.n:
            raise ValueError(f"expected {self.n} variables, got {z.size}")
        lam = self.lambdas()
        out = np.zeros((self.ambient_dim, self.ambient_dim), complex)
        for zi, li in zip(z, lam):
            out += zi * li
        return out


@dataclass(frozen=True, eq=False)
class ZCollection(_Phased):
    """H = U ⊕ E ⊕ J = P_1 ⊕ … ⊕ P_n."""

    u: Subspace
    e: Subspace
    j: Subspace
    phases: tuple[Subspace, ...]
    tol: Tolerance = field(default=DEFAULT_TOL)

    def __post_init__(self):
        object.__setattr__(self, "phases", tuple(self.phases))
        n = self.u.ambient_dim
        for s in (self.e, self.j, *self.phases):
            if s.ambient_dim != n:
                raise ValueError("all spaces must share one ambient dimension")

    kind = "Z"

    @property
    def ambient_dim(self) -> int:
        return self.u.ambient_dim

    h = ambient_dim

    @property
    def m(self) -> int:
        return self.u.dim

    @cached_property
    def _field_sum(self) -> DirectSum:
        return DirectSum([self.u, self.e, self.j], self.tol)

    @cached_property
    def _phase_sum(self) -> DirectSum:
        return DirectSum(list(self.phases), self.tol)

    def gammas(self) -> list[np.ndarray]:
        """Projectors Γ0, Γ1, Γ2 onto U, E, J."""
        return self._field_sum.projectors()

    def lambdas(self) -> list[np.ndarray]:
        return self._phase_sum.projectors()

    def u_coords(self, x) -> np.ndarray:
        return self.u.coords(x)

    def replace(self, **kw) -> "ZCollection":
        d = dict(u=self.u, e=self.e, j=self.j, phases=self.phases, tol=self.tol)
        d.update(kw)
        return ZCollection(**d)

    def validate(self) -> ValidationReport:
        checks = [
            _check_sum("U ⊕ E ⊕ J spans H", [self.u, self.e, self.j], self.tol),
            _check_sum("P_1 ⊕ … ⊕ P_n spans H", list(self.phases), self.tol)
            if self.phases
            else Check("P_1 ⊕ … ⊕ P_n spans H", self.ambient_dim == 0, "no phases"),
            Check("U nonzero", self.u.dim > 0, f"dim U = {self.u.dim}"),
        ]
        return ValidationReport(tuple(checks))


@dataclass(frozen=True, eq=False)
class YCollection(_Phased):
    """K = E ⊕ J = V ⊕ P_1 ⊕ … ⊕ P_n."""

    e: Subspace
    j: Subspace
    v: Subspace
    phases: tuple[Subspace, ...]
    tol: Tolerance = field(default=DEFAULT_TOL)

    def __post_init__(self):
        object.__setattr__(self, "phases", tuple(self.phases))
        n = self.v.ambient_dim
        for s in (self.e, self.j, *self.phases):
            if s.ambient_dim != n:
                raise ValueError("all spaces must share one ambient dimension")

    kind = "Y"

    @property
    def ambient_dim(self) -> int:
        return self.v.ambient_dim

    k = ambient_dim

    @property
    def m(self) -> int:
        return self.v.dim

    @cached_property
    def _field_sum(self) -> DirectSum:
        return DirectSum([self.e, self.j], self.tol)

    @cached_property
    def _phase_sum(self) -> DirectSum:
        return DirectSum([self.v, *self.phases], self.tol)

    def gammas(self) -> list[np.ndarray]:
        """Projectors Γ1, Γ2 onto E and J."""
        return self._field_sum.projectors()

    def lambdas(self) -> list[np.ndarray]:
        return self._phase_sum.projectors()[1:]

    def pi1(self) -> np.ndarray:
        """Projector onto V along the phases."""
        return self._phase_sum.projectors()[0]

    def pi2(self) -> np.ndarray:
        return np.eye(self.ambient_dim, dtype=complex) - self.pi1()

    def v_coords(self, x) -> np.ndarray:
        return self._phase_sum.component_coords(0, x)

    def replace(self, **kw) -> "YCollection":
        d = dict(e=self.e, j=self.j, v=self.v, phases=self.phases, tol=self.tol)
        d.update(kw)
        return YCollection(**d)

    def validate(self) -> ValidationReport:
        checks = [
            _check_sum("E ⊕ J spans K", [self.e, self.j], self.tol),
            _check_sum("V ⊕ P_1 ⊕ … ⊕ P_n spans K", [self.v, *self.phases], self.tol),
            _check_trivial("V ∩ J = 0", self.v, self.j, self.tol),
            # only the inverse problem needs it; a singular Y violates it
            _check_trivial("V ∩ E = 0", self.v, self.e, self.tol, required=False),
        ]
        return ValidationReport(tuple(checks))


@dataclass(frozen=True, eq=False)
class Superfunction:
    """A Y collection whose V splits into input and output port spaces.

    The frame of ``base.v`` is ``[v_in.frame | v_out.frame]``.
    """

    base: YCollection
    v_in: Subspace
    v_out: Subspace

    kind = "super"

    @classmethod
    def from_ports(cls, e, j, v_in: Subspace, v_out: Subspace, phases, tol=DEFAULT_TOL):
        v = Subspace(np.hstack([v_in.frame, v_out.frame]), ambient_dim=v_in.ambient_dim)
        return cls(YCollection(e, j, v, tuple(phases), tol), v_in, v_out)

    @property
    def port_dim(self) -> int:
        return self.v_in.dim

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def ambient_dim(self) -> int:
        return self.base.ambient_dim

    @cached_property
    def _port_sum(self) -> DirectSum:
        return DirectSum([self.v_in, self.v_out, *self.base.phases], self.base.tol)

    def pi_in(self) -> np.ndarray:
        return self._port_sum.projectors()[0]

    def pi_out(self) -> np.ndarray:
        return self._port_sum.projectors()[1]

    def validate(self) -> ValidationReport:
        tol = self.base.tol
        # with no phases (the identity element) K = V, so these cannot hold
        strict = bool(self.base.phases)
        checks = [c if c.name != "V ∩ J = 0" else replace(c, required=strict)
                  for c in self.base.validate().checks]
        same = self.v_in.dim == self.v_out.dim
        checks.append(Check("dim V_in = dim V_out", same, f"{self.v_in.dim} vs {self.v_out.dim}"))
        frame_ok = np.allclose(self.base.v.frame, np.hstack([self.v_in.frame, self.v_out.frame]))
        checks.append(Check("V = V_in ⊕ V_out", frame_ok, ""))
        port_ok = False
        detail = ""
        try:
            stack = np.vstack([self.pi_in(), self.pi_out()])
            need = 2 * self.v_in.dim
            re = rank(stack @ self.base.e.ortho, tol) if self.base.e.dim else 0
            rj = rank(stack @ self.base.j.ortho, tol) if self.base.j.dim else 0
            port_ok = re == need and rj == need
            detail = f"ranks on E, J = {re}, {rj}; need {need}"
        except NotDirectSum as exc:
            detail = str(exc)
        checks.append(Check("port surjectivity", port_ok, detail, required=strict))
        return ValidationReport(tuple(checks))


def validate(c) -> ValidationReport:
    """Report on every structural condition; never raises."""
    return c.validate()


def l_operator(c, z) -> np.ndarray:
    """L = Σ z_i Λ_i for the collection's phases."""
    return c.l_operator(z)
