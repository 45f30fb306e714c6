"""Transport efficiency of continuous-time quantum walks with a trap vertex."""

from .analytic import ClosedForm, Scenario, UncatalogedScenario, analytic_efficiency, optimal_phase
from .dynamics import HorizonError, efficiency_numeric
from .graph import Complete, CompleteBipartite, Graph, Star, build_family, perturb_edge
from .hamiltonian import Localized, Superposition, TransportProblem
from .krylov import efficiency_overlap, krylov_basis

__all__ = [
    "ClosedForm",
    "Complete",
    "CompleteBipartite",
    "Graph",
    "HorizonError",
    "Localized",
    "Scenario",
    "Star",
    "Superposition",
    "TransportProblem",
    "UncatalogedScenario",
    "analytic_efficiency",
    "build_family",
    "efficiency_numeric",
    "efficiency_overlap",
    "krylov_basis",
    "optimal_phase",
    "perturb_edge",
]
