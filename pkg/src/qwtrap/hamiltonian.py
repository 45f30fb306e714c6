"""Transport and perturbed Hamiltonians, initial states, problem assembly."""

from __future__ import annotations

import math
import numbers
from dataclasses import dataclass
from typing import Union

import numpy as np

from .graph import Graph, canonical_phase, laplacian


@dataclass(frozen=True)
class Localized:
    l: int

    @property
    def vertices(self) -> tuple[int, ...]:
        return (self.l,)


@dataclass(frozen=True)
class Superposition:
    """(|l> + exp(i gamma)|k>) / sqrt(2)."""

    l: int
    k: int
    gamma: float = 0.0

    def __post_init__(self) -> None:
        if self.l == self.k:
            raise ValueError("superposition needs two distinct vertices")
        object.__setattr__(self, "gamma", canonical_phase(self.gamma))

    @property
    def vertices(self) -> tuple[int, ...]:
        return (self.l, self.k)


InitialStateSpec = Union[Localized, Superposition]


def _check_trap(g: Graph, w) -> int:
    if not isinstance(w, numbers.Integral):
        raise ValueError(f"exactly one trap vertex is supported, got {w!r}")
    if not 0 <= w < g.n:
        raise ValueError(f"trap {w} out of range for n={g.n}")
    return int(w)


def transport_hamiltonian(g: Graph, w: int, kappa: float) -> np.ndarray:
    """L - i kappa |w><w|, ignoring any perturbations on ``g``."""
    w = _check_trap(g, w)
    h = laplacian(g).astype(complex)
    h[w, w] -= 1j * kappa
    return h


def complete_hamiltonian(g: Graph, w: int, kappa: float) -> np.ndarray:
    """Transport Hamiltonian plus the recorded edge perturbations."""
    h = transport_hamiltonian(g, w, kappa)
    for (r, s), (lam, theta) in g.perturbations.items():
        z = lam * np.exp(1j * theta)
        h[r, s] += z
        h[s, r] += np.conj(z)
    return h


def initial_state(spec: InitialStateSpec, n: int) -> np.ndarray:
    for v in spec.vertices:
        if not 0 <= v < n:
            raise ValueError(f"vertex {v} out of range for n={n}")
    psi = np.zeros(n, dtype=complex)
    if isinstance(spec, Localized):
        psi[spec.l] = 1.0
    else:
        psi[spec.l] = 1.0 / math.sqrt(2.0)
        psi[spec.k] = np.exp(1j * spec.gamma) / math.sqrt(2.0)
    return psi


@dataclass(frozen=True)
class TransportProblem:
    graph: Graph
    trap: int
    kappa: float
    initial: InitialStateSpec

    def __post_init__(self) -> None:
        _check_trap(self.graph, self.trap)
        if not self.kappa > 0:
            raise ValueError(f"trapping rate must be positive, got {self.kappa}")
        if self.trap in self.initial.vertices:
            raise ValueError("the initial state must not involve the trap vertex")
        for v in self.initial.vertices:
            if not 0 <= v < self.graph.n:
                raise ValueError(f"vertex {v} out of range for n={self.graph.n}")

    def hamiltonian(self) -> np.ndarray:
        return complete_hamiltonian(self.graph, self.trap, self.kappa)

    def psi0(self) -> np.ndarray:
        return initial_state(self.initial, self.graph.n)
