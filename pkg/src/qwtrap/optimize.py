"""Numerical search for the edge weight and phase that maximize efficiency.

The objective is the Krylov overlap, which does not depend on the trapping
rate. A log-spaced magnitude grid times a uniform phase grid is scanned
first; the best point is then polished by alternating bounded scalar
searches along each coordinate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .analytic import apply_recipe, recipe_edges
from .graph import TWO_PI, canonical_phase
from .hamiltonian import TransportProblem
from .krylov import efficiency_overlap, krylov_basis

_TIE = 1e-12
_BOUNDARY_GAIN = 1e-6


@dataclass(frozen=True)
class SearchSpace:
    lam_min: float = 0.05
    lam_max: float = 50.0
    n_lam: int = 40
    n_theta: int = 64
    iterations: int = 20
    xatol: float = 1e-10

    def __post_init__(self) -> None:
        if not 0 < self.lam_min <= self.lam_max:
            raise ValueError("need 0 < lam_min <= lam_max")
        if self.n_lam < 1 or self.n_theta < 1:
            raise ValueError("grids must be non-empty")
        if self.iterations < 0:
            raise ValueError("iterations must be non-negative")

    def lam_grid(self) -> np.ndarray:
        if self.n_lam == 1:
            return np.array([self.lam_min])
        return np.geomspace(self.lam_min, self.lam_max, self.n_lam)

    def theta_grid(self) -> np.ndarray:
        # k * 2pi / n keeps 0 and (for even n) pi exactly on the grid
        return np.array([k * TWO_PI / self.n_theta for k in range(self.n_theta)])


@dataclass(frozen=True)
class OptimizationResult:
    lam: float
    theta: float
    eta: float
    asymptotic: bool
    edges: tuple[tuple[int, int, str], ...]
    evaluations: int


def recommend_perturbation(problem: TransportProblem) -> list[tuple[tuple[int, int], str]]:
    """Edges to perturb, each with its phase role ``"zero"`` or ``"theta"``."""
    return [((hub, leaf), role) for hub, leaf, role in recipe_edges(problem)]


class _Objective:
    def __init__(self, problem: TransportProblem):
        self.problem = problem
        self.calls = 0

    def __call__(self, lam: float, theta: float) -> float:
        self.calls += 1
        p = apply_recipe(self.problem, float(lam), canonical_phase(theta))
        return efficiency_overlap(krylov_basis(p.hamiltonian(), p.trap), p.psi0())


def optimize_perturbation(problem: TransportProblem, space: SearchSpace | None = None) -> OptimizationResult:
    space = space or SearchSpace()
    edges = tuple(recipe_edges(problem))
    f = _Objective(problem)
    if not edges:
        eta = efficiency_overlap(krylov_basis(problem.hamiltonian(), problem.trap), problem.psi0())
        return OptimizationResult(0.0, 0.0, eta, False, edges, 0)

    lams, thetas = space.lam_grid(), space.theta_grid()
    surface = np.array([[f(lam, th) for th in thetas] for lam in lams])
    best_lam, best_theta, best = float(lams[0]), float(thetas[0]), float(surface[0, 0])
    for i, lam in enumerate(lams):
        for j, th in enumerate(thetas):
            if surface[i, j] > best + _TIE:
                best_lam, best_theta, best = float(lam), float(th), float(surface[i, j])

    log_lo, log_hi = math.log(space.lam_min), math.log(space.lam_max)
    log_step = (log_hi - log_lo) / max(space.n_lam - 1, 1)
    th_step = TWO_PI / space.n_theta
    opts = {"xatol": space.xatol}
    for _ in range(space.iterations):
        improved = False
        lo, hi = best_theta - th_step, best_theta + th_step
        r = minimize_scalar(lambda t: -f(best_lam, t), bounds=(lo, hi), method="bounded", options=opts)
        if -r.fun > best + _TIE:
            best_theta, best, improved = canonical_phase(r.x), float(-r.fun), True
        x0 = math.log(best_lam)
        lo, hi = max(log_lo, x0 - log_step), min(log_hi, x0 + log_step)
        if hi > lo:
            r = minimize_scalar(lambda x: -f(math.exp(x), best_theta), bounds=(lo, hi), method="bounded", options=opts)
            if -r.fun > best + _TIE:
                best_lam, best, improved = float(math.exp(r.x)), float(-r.fun), True
        if not improved:
            break

    top = max(f(space.lam_max, th) for th in thetas)
    half = max(f(0.5 * space.lam_max, th) for th in thetas)
    return OptimizationResult(
        lam=best_lam,
        theta=best_theta,
        eta=min(best, 1.0),
        asymptotic=bool(top - half > _BOUNDARY_GAIN),
        edges=edges,
        evaluations=f.calls,
    )
