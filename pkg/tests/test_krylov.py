import math

import numpy as np
import pytest

from qwtrap.graph import Complete, CompleteBipartite, Star, from_edges
from qwtrap.hamiltonian import Localized, Superposition, TransportProblem
from qwtrap.krylov import (
    efficiency_overlap,
    krylov_basis,
    reduced_amplitude,
    same_span,
)
from qwtrap.linalg import expm_apply

from _support import make_problem


def test_unperturbed_complete_basis():
    p = make_problem(Complete(7), Localized(1))
    kb = krylov_basis(p.hamiltonian(), 0)
    assert kb.m == 2
    expected = np.array([[1, 0, 0, 0, 0, 0, 0], [0] + [1 / math.sqrt(6)] * 6])
    assert same_span(kb.vectors, expected)


def test_basis_is_orthonormal(rng):
    n = 8
    edges = [(r, s) for r in range(n) for s in range(r + 1, n) if rng.random() < 0.5] + [(i, i + 1) for i in range(n - 1)]
    g = from_edges(n, edges)
    h = TransportProblem(g, 3, 1.0, Localized(0)).hamiltonian()
    kb = krylov_basis(h, 3)
    np.testing.assert_allclose(kb.vectors.conj() @ kb.vectors.T, np.eye(kb.m), atol=1e-12)


def test_first_vector_is_trap():
    kb = krylov_basis(make_problem(Star(5), Localized(1)).hamiltonian(), 0)
    np.testing.assert_allclose(kb.vectors[0], [1, 0, 0, 0, 0])


def test_reduced_matrix_is_tridiagonal():
    p = make_problem(CompleteBipartite(4, 3), Localized(1), perturbations=[(4, 1, 0.7, 1.1)])
    kb = krylov_basis(p.hamiltonian(), 0)
    assert kb.m == 5
    assert kb.off_tridiagonal() < 5e-9


def test_bipartite_dimension_is_three():
    kb = krylov_basis(make_problem(CompleteBipartite(4, 3), Localized(1)).hamiltonian(), 0)
    assert kb.m == 3


def test_overlap_values():
    p = make_problem(Complete(7), Localized(1))
    assert efficiency_overlap(krylov_basis(p.hamiltonian(), 0), p.psi0()) == pytest.approx(1 / 6, abs=1e-12)
    p = make_problem(CompleteBipartite(4, 3), Superposition(1, 5, 0.4))
    assert efficiency_overlap(krylov_basis(p.hamiltonian(), 0), p.psi0()) == pytest.approx(1 / 3, abs=1e-12)


def test_overlap_rejects_unnormalized():
    p = make_problem(Complete(4), Localized(1))
    kb = krylov_basis(p.hamiltonian(), 0)
    with pytest.raises(ValueError):
        efficiency_overlap(kb, 2 * p.psi0())


def test_overlap_independent_of_kappa():
    etas = []
    for kappa in (0.1, 1.0, 7.0):
        p = make_problem(Star(6), Superposition(2, 4, 1.0), kappa=kappa, perturbations=[(0, 2, 1.5, 0.0), (0, 4, 1.5, 2.0)])
        etas.append(efficiency_overlap(krylov_basis(p.hamiltonian(), 0), p.psi0()))
    assert max(etas) - min(etas) < 1e-12


def test_reduced_amplitude_matches_full():
    p = make_problem(CompleteBipartite(3, 3), Localized(4), perturbations=[(0, 4, 0.6, 0.9)])
    h, psi = p.hamiltonian(), p.psi0()
    kb = krylov_basis(h, 0)
    for t in (0.5, 3.0):
        assert abs(expm_apply(h, psi, t)[0] - reduced_amplitude(kb, psi, t)) < 1e-10


def test_full_dimension_stops_at_n():
    g = from_edges(4, [(0, 1), (1, 2), (2, 3)])
    kb = krylov_basis(TransportProblem(g, 0, 1.0, Localized(3)).hamiltonian(), 0)
    assert kb.m == 4


def test_bad_inputs():
    with pytest.raises(ValueError):
        krylov_basis(np.ones((2, 3)), 0)
    with pytest.raises(ValueError):
        krylov_basis(np.eye(3), 5)


def test_same_span_detects_difference():
    a = np.eye(3)[:2]
    b = np.eye(3)[1:]
    assert not same_span(a, b)
    assert same_span(a, a[::-1] * 1j)
