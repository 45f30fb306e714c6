"""Dense complex kernels: inner products, Gram-Schmidt, exponential action."""

from __future__ import annotations

import math

import numpy as np

DEFAULT_ORTH_TOL = 1e-10

# Taylor sub-steps are taken with ||A dt||_1 <= 1; beyond this many sub-steps
# the exponential is formed by scaling and squaring instead.
_MAX_SUBSTEPS = 64
_TAYLOR_MAX_TERMS = 60


def inner(u: np.ndarray, v: np.ndarray) -> complex:
    """<u|v>, conjugate-linear in ``u``."""
    u = np.asarray(u)
    v = np.asarray(v)
    if u.shape != v.shape:
        raise ValueError(f"length mismatch: {u.shape} vs {v.shape}")
    return complex(np.vdot(u, v))


def is_hermitian(m: np.ndarray, atol: float = 1e-12) -> bool:
    m = np.asarray(m)
    return m.ndim == 2 and m.shape[0] == m.shape[1] and bool(np.allclose(m, m.conj().T, rtol=0, atol=atol))


def orthonormalize(
    v: np.ndarray,
    basis,
    tol: float = DEFAULT_ORTH_TOL,
    scale: float | None = None,
) -> tuple[np.ndarray | None, float]:
    """Normalized component of ``v`` orthogonal to ``basis``.

    Classical Gram-Schmidt applied twice. Returns ``(None, residual)`` when the
    residual norm is at most ``tol * scale`` (default ``scale = max(1, |v|)``).
    """
    r = np.array(v, dtype=complex)
    if scale is None:
        scale = max(1.0, float(np.linalg.norm(r)))
    b = np.asarray(basis, dtype=complex).reshape(-1, r.shape[0]) if len(basis) else None
    if b is not None:
        for _ in range(2):
            r = r - b.T @ (b.conj() @ r)
    res = float(np.linalg.norm(r))
    if res <= tol * scale:
        return None, res
    return r / res, res


def _taylor_expm_action(a: np.ndarray, v: np.ndarray, steps: int) -> np.ndarray:
    """exp(a * steps) v by ``steps`` truncated Taylor sub-steps."""
    out = v
    for _ in range(steps):
        term = out
        acc = out.copy()
        ref = max(np.abs(out).max(), 1e-300)
        for k in range(1, _TAYLOR_MAX_TERMS):
            term = (a @ term) / k
            acc = acc + term
            if np.abs(term).max() <= 1e-18 * max(ref, np.abs(acc).max()):
                break
        out = acc
    return out


def expm_generator(a: np.ndarray, v: np.ndarray) -> np.ndarray:
    """exp(a) v for a general square matrix ``a`` (``v`` a vector or matrix).

    Short arguments use sub-stepped Taylor action with ||a/s||_1 <= 1. Long
    ones build exp(a / 2**j) by Taylor and square it ``j`` times.
    """
    a = np.asarray(a, dtype=complex)
    v = np.asarray(v, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("matrix must be square")
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(v))):
        raise ValueError("non-finite entries")
    norm = float(np.abs(a).sum(axis=0).max()) if a.size else 0.0
    if norm == 0.0:
        return v.copy()
    steps = max(1, math.ceil(norm))
    if steps <= _MAX_SUBSTEPS:
        return _taylor_expm_action(a / steps, v, steps)
    j = math.ceil(math.log2(norm))
    e = _taylor_expm_action(a / 2.0**j, np.eye(a.shape[0], dtype=complex), 1)
    for _ in range(j):
        e = e @ e
    return e @ v


def expm_apply(m: np.ndarray, v: np.ndarray, t: float) -> np.ndarray:
    """exp(-i m t) v."""
    if t < 0:
        raise ValueError(f"t must be non-negative, got {t}")
    m = np.asarray(m, dtype=complex)
    if t == 0:
        if not np.all(np.isfinite(m)):
            raise ValueError("non-finite entries")
        return np.array(v, dtype=complex)
    return expm_generator(-1j * t * m, v)


def propagator(m: np.ndarray, t: float) -> np.ndarray:
    """The matrix exp(-i m t)."""
    m = np.asarray(m)
    return expm_apply(m, np.eye(m.shape[0], dtype=complex), t)


def projector(vectors) -> np.ndarray:
    """Sum of |e_k><e_k| over the rows of ``vectors``."""
    v = np.asarray(vectors, dtype=complex)
    return v.T @ v.conj()


def projector_distance(a, b) -> float:
    """Frobenius distance between the projectors built from two row-bases."""
    return float(np.linalg.norm(projector(a) - projector(b)))
