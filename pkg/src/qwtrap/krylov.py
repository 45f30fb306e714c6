"""Krylov subspace of the trap vertex and the transport efficiency by overlap."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import expm_apply, orthonormalize, projector, projector_distance

DEFAULT_TOL = 1e-10


@dataclass(frozen=True)
class KrylovBasis:
    vectors: np.ndarray  # (m, n), row k is e_{k+1}
    reduced: np.ndarray  # (m, m), <e_i|H|e_j>
    residual_log: list[float] = field(default_factory=list)

    @property
    def m(self) -> int:
        return self.vectors.shape[0]

    @property
    def n(self) -> int:
        return self.vectors.shape[1]

    def projector(self) -> np.ndarray:
        return projector(self.vectors)

    def coefficients(self, psi: np.ndarray) -> np.ndarray:
        return self.vectors.conj() @ np.asarray(psi, dtype=complex)

    def off_tridiagonal(self) -> float:
        """Largest |R_ij| with |i - j| >= 2."""
        m = self.m
        if m < 3:
            return 0.0
        i, j = np.indices((m, m))
        return float(np.abs(self.reduced[np.abs(i - j) >= 2]).max())


def krylov_basis(h: np.ndarray, w: int, tol: float = DEFAULT_TOL) -> KrylovBasis:
    """Orthonormal basis of span{H^k |w>} with full re-orthogonalization.

    Each new vector is H applied to the latest basis vector, orthogonalized
    against every previous one. The iteration stops once that residual drops
    below ``tol * ||H||_F``.
    """
    h = np.asarray(h, dtype=complex)
    n = h.shape[0]
    if h.shape != (n, n):
        raise ValueError("Hamiltonian must be square")
    if not 0 <= w < n:
        raise ValueError(f"trap {w} out of range for n={n}")
    scale = max(float(np.linalg.norm(h)), 1e-300)
    e1 = np.zeros(n, dtype=complex)
    e1[w] = 1.0
    basis = [e1]
    residuals: list[float] = []
    while True:
        nxt, res = orthonormalize(h @ basis[-1], basis, tol=tol, scale=scale)
        residuals.append(res)
        if nxt is None or len(basis) == n:
            break
        basis.append(nxt)
    v = np.array(basis)
    reduced = v.conj() @ h @ v.T
    return KrylovBasis(vectors=v, reduced=reduced, residual_log=residuals)


def _check_normalized(psi: np.ndarray, n: int) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (n,):
        raise ValueError(f"state has shape {psi.shape}, expected ({n},)")
    norm = float(np.linalg.norm(psi))
    if abs(norm - 1.0) > 1e-9:
        raise ValueError(f"initial state must be normalized, |psi| = {norm!r}")
    return psi


def efficiency_overlap(basis: KrylovBasis, psi0: np.ndarray) -> float:
    """eta = sum_k |<e_k|psi0>|^2."""
    psi0 = _check_normalized(psi0, basis.n)
    eta = float(np.sum(np.abs(basis.coefficients(psi0)) ** 2))
    if eta > 1.0 + 1e-9:
        raise ArithmeticError(f"overlap {eta} exceeds 1; basis is not orthonormal")
    return min(max(eta, 0.0), 1.0)


def reduced_amplitude(basis: KrylovBasis, psi0: np.ndarray, t: float) -> complex:
    """<w| exp(-i H_red t) |psi0_red>, evolved entirely inside the subspace."""
    c = basis.coefficients(psi0)
    return complex(expm_apply(basis.reduced, c, t)[0])


def same_span(a, b, tol: float = 1e-8) -> bool:
    a = np.asarray(a)
    b = np.asarray(b)
    return a.shape == b.shape and projector_distance(a, b) <= tol
