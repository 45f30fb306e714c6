"""Graph families, explicit edge lists and edge perturbations.

Vertex layouts used throughout the package:

* ``Complete(n)``: vertices ``0..n-1``.
* ``CompleteBipartite(n1, n2)``: ``V1 = 0..n1-1``, ``V2 = n1..n1+n2-1``.
* ``Star(n)``: the central vertex is ``0``, outer vertices ``1..n-1``.

Perturbations are stored on the graph and only enter at Hamiltonian assembly,
so :func:`laplacian` always returns the plain graph Laplacian.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Literal, Union

import numpy as np

TWO_PI = 2.0 * math.pi


class GraphSizeError(ValueError):
    pass


class TopologyError(ValueError):
    pass


@dataclass(frozen=True)
class Complete:
    n: int

    def __post_init__(self) -> None:
        if self.n < 2:
            raise GraphSizeError(f"complete graph needs n >= 2, got {self.n}")

    @property
    def size(self) -> int:
        return self.n


@dataclass(frozen=True)
class CompleteBipartite:
    n1: int
    n2: int

    def __post_init__(self) -> None:
        if self.n1 < 1 or self.n2 < 1:
            raise GraphSizeError(f"bipartite sides must be >= 1, got ({self.n1}, {self.n2})")

    @property
    def size(self) -> int:
        return self.n1 + self.n2

    @property
    def v1(self) -> range:
        return range(self.n1)

    @property
    def v2(self) -> range:
        return range(self.n1, self.n1 + self.n2)


@dataclass(frozen=True)
class Star:
    n: int
    trap_position: Literal["central", "outer"] = "central"

    def __post_init__(self) -> None:
        if self.n < 2:
            raise GraphSizeError(f"star graph needs n >= 2, got {self.n}")
        if self.trap_position not in ("central", "outer"):
            raise ValueError(f"trap_position must be 'central' or 'outer', got {self.trap_position!r}")

    @property
    def size(self) -> int:
        return self.n

    center = 0


FamilySpec = Union[Complete, CompleteBipartite, Star]


def canonical_phase(theta: float) -> float:
    """Map a phase into [0, 2*pi)."""
    t = math.fmod(float(theta), TWO_PI)
    if t < 0:
        t += TWO_PI
    # fmod of values just below a multiple of 2pi can round up to 2pi
    if t >= TWO_PI:
        t = 0.0
    return t


def _edge_key(r: int, s: int) -> tuple[int, int]:
    return (r, s) if r < s else (s, r)


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph with optional complex edge perturbations.

    ``perturbations`` maps an ordered pair ``(r, s)`` to ``(lam, theta)``; the
    Hamiltonian element ``(r, s)`` receives ``lam * exp(1j * theta)`` and the
    element ``(s, r)`` its conjugate.
    """

    n: int
    edges: frozenset[tuple[int, int]]
    perturbations: dict[tuple[int, int], tuple[float, float]] = field(default_factory=dict)
    family: FamilySpec | None = None

    def __post_init__(self) -> None:
        if self.n < 2:
            raise GraphSizeError(f"graph needs at least 2 vertices, got {self.n}")
        for r, s in self.edges:
            if r == s:
                raise TopologyError(f"self-loop at vertex {r}")
            if not (0 <= r < self.n and 0 <= s < self.n):
                raise TopologyError(f"edge ({r}, {s}) out of range for n={self.n}")
            if r > s:
                raise TopologyError(f"edge ({r}, {s}) not stored in canonical order")
        for (r, s), (lam, _theta) in self.perturbations.items():
            if _edge_key(r, s) not in self.edges:
                raise TopologyError(f"perturbed pair ({r}, {s}) is not an edge")
            if not lam > 0:
                raise ValueError(f"perturbation magnitude must be positive, got {lam}")

    def has_edge(self, r: int, s: int) -> bool:
        return _edge_key(r, s) in self.edges

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n, dtype=int)
        for r, s in self.edges:
            deg[r] += 1
            deg[s] += 1
        return deg

    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.n, self.n))
        for r, s in self.edges:
            a[r, s] = a[s, r] = 1.0
        return a

    @property
    def is_perturbed(self) -> bool:
        return bool(self.perturbations)


def build_family(spec: FamilySpec) -> Graph:
    if isinstance(spec, Complete):
        edges = {(r, s) for r in range(spec.n) for s in range(r + 1, spec.n)}
        n = spec.n
    elif isinstance(spec, CompleteBipartite):
        edges = {(r, s) for r in spec.v1 for s in spec.v2}
        n = spec.size
    elif isinstance(spec, Star):
        edges = {(0, s) for s in range(1, spec.n)}
        n = spec.n
    else:
        raise TypeError(f"unknown family spec {spec!r}")
    return Graph(n=n, edges=frozenset(edges), family=spec)


def from_edges(n: int, edges, perturbations=None) -> Graph:
    """Build a graph from an iterable of vertex pairs (any orientation)."""
    keys = set()
    for r, s in edges:
        r, s = int(r), int(s)
        if r == s:
            raise TopologyError(f"self-loop at vertex {r}")
        keys.add(_edge_key(r, s))
    g = Graph(n=int(n), edges=frozenset(keys))
    for (r, s), (lam, theta) in (perturbations or {}).items():
        g = perturb_edge(g, r, s, lam, theta)
    return g


def laplacian(g: Graph) -> np.ndarray:
    a = g.adjacency()
    return np.diag(a.sum(axis=1)) - a


def perturb_edge(g: Graph, r: int, s: int, lam: float, theta: float) -> Graph:
    """Return a copy of ``g`` with ``lam * exp(1j*theta)`` recorded on ``(r, s)``.

    Re-perturbing an edge (in either orientation) replaces the old record;
    ``lam == 0`` removes it.
    """
    if not g.has_edge(r, s):
        raise TopologyError(f"({r}, {s}) is not an edge; only existing edges can be perturbed")
    if lam < 0 or not math.isfinite(lam):
        raise ValueError(f"perturbation magnitude must be a positive real, got {lam}")
    pert = {k: v for k, v in g.perturbations.items() if _edge_key(*k) != _edge_key(r, s)}
    if lam > 0:
        pert[(int(r), int(s))] = (float(lam), canonical_phase(theta))
    return replace(g, perturbations=pert)


def clear_perturbations(g: Graph) -> Graph:
    return replace(g, perturbations={})


_FAMILY_RE = re.compile(
    r"^(?:(complete):(\d+)|(cbg):(\d+),(\d+)|(star):(\d+)(?::(central|outer))?)$"
)


def parse_family(text: str) -> FamilySpec:
    """Parse ``complete:N``, ``cbg:N1,N2``, ``star:N`` or ``star:N:outer``."""
    m = _FAMILY_RE.match(text.strip().lower())
    if m is None:
        raise ValueError(f"unrecognized graph spec {text!r}")
    if m.group(1):
        return Complete(int(m.group(2)))
    if m.group(3):
        return CompleteBipartite(int(m.group(4)), int(m.group(5)))
    return Star(int(m.group(7)), m.group(8) or "central")


def format_family(spec: FamilySpec) -> str:
    if isinstance(spec, Complete):
        return f"complete:{spec.n}"
    if isinstance(spec, CompleteBipartite):
        return f"cbg:{spec.n1},{spec.n2}"
    suffix = ":outer" if spec.trap_position == "outer" else ""
    return f"star:{spec.n}{suffix}"


def read_edge_list(path: str | Path, parse_number=float) -> Graph:
    """Read ``r s [lam theta]`` lines; ``#`` starts a comment line.

    The vertex count is one more than the largest index seen.
    """
    edges: list[tuple[int, int]] = []
    perts: dict[tuple[int, int], tuple[float, float]] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) not in (2, 4):
            raise ValueError(f"{path}:{lineno}: expected 'r s' or 'r s lam theta', got {raw!r}")
        r, s = int(parts[0]), int(parts[1])
        edges.append((r, s))
        if len(parts) == 4:
            perts[(r, s)] = (parse_number(parts[2]), parse_number(parts[3]))
    if not edges:
        raise ValueError(f"{path}: no edges")
    n = 1 + max(max(e) for e in edges)
    return from_edges(n, edges, perts)
