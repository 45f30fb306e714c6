"""Dark initial states: zero transport efficiency with and without stationarity."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import Complete, CompleteBipartite, FamilySpec, Star
from .krylov import KrylovBasis

DEFAULT_NULL_TOL = 1e-10
REAL_EIGENVALUE_TOL = 1e-10


@dataclass(frozen=True)
class NullCondition:
    """Linear constraints <c|psi> = 0 that together force zero efficiency."""

    family: str
    constraints: tuple[np.ndarray, ...]
    labels: tuple[str, ...]

    def residuals(self, psi: np.ndarray) -> list[float]:
        psi = np.asarray(psi, dtype=complex)
        return [float(abs(np.vdot(c, psi))) for c in self.constraints]

    def satisfied(self, psi: np.ndarray, tol: float = DEFAULT_NULL_TOL) -> bool:
        return max(self.residuals(psi)) <= tol


def _indicator(n: int, vertices) -> np.ndarray:
    c = np.zeros(n, dtype=complex)
    c[list(vertices)] = 1.0
    return c


def family_null_conditions(family: FamilySpec, w: int) -> NullCondition:
    if not isinstance(family, (Complete, CompleteBipartite, Star)):
        raise ValueError(f"unsupported family {family!r}")
    n = family.size
    if not 0 <= w < n:
        raise ValueError(f"trap {w} out of range for n={n}")
    groups: list[tuple[str, set[int]]] = [("trap", {w})]
    if isinstance(family, Complete):
        tag = "complete"
        groups.append(("others", set(range(n)) - {w}))
    elif isinstance(family, CompleteBipartite):
        tag = "cbg"
        same, other = (set(family.v1), set(family.v2)) if w in family.v1 else (set(family.v2), set(family.v1))
        groups.append(("same-side", same - {w}))
        groups.append(("other-side", other))
    else:
        if w == family.center:
            tag = "star-central"
            groups.append(("leaves", set(range(n)) - {w}))
        else:
            tag = "star-outer"
            groups.append(("center", {family.center}))
            groups.append(("leaves", set(range(n)) - {w, family.center}))
    groups = [(name, vs) for name, vs in groups if vs]
    return NullCondition(
        family=tag,
        constraints=tuple(_indicator(n, vs) for _, vs in groups),
        labels=tuple(name for name, _ in groups),
    )


def is_null_state(basis: KrylovBasis, psi: np.ndarray, tol: float = DEFAULT_NULL_TOL) -> bool:
    """True when ``psi`` is orthogonal to every Krylov vector of the trap."""
    psi = np.asarray(psi, dtype=complex)
    if abs(np.linalg.norm(psi) - 1.0) > 1e-9:
        raise ValueError("state must be normalized")
    return float(np.abs(basis.coefficients(psi)).max()) <= tol


def is_stationary(h: np.ndarray, psi: np.ndarray, tol: float = DEFAULT_NULL_TOL) -> tuple[bool, complex]:
    """(||H psi - eps psi|| <= tol, eps) with eps the Rayleigh quotient."""
    psi = np.asarray(psi, dtype=complex)
    if abs(np.linalg.norm(psi) - 1.0) > 1e-9:
        raise ValueError("state must be normalized")
    r = np.asarray(h, dtype=complex) @ psi
    eps = complex(np.vdot(psi, r))
    return bool(np.linalg.norm(r - eps * psi) <= tol), eps


def has_real_eigenvalue(eps: complex, tol: float = REAL_EIGENVALUE_TOL) -> bool:
    return abs(eps.imag) <= tol
