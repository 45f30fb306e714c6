"""Closed-form efficiencies and explicit Krylov bases for the cataloged graphs.

A :class:`Scenario` is a graph family, a trap, an initial state and up to two
edge perturbations. The catalog recognises the configurations below
(``w`` is the trap; for bipartite graphs ``A`` is the side holding ``w`` and
``B`` the other side; ``c`` is the star centre):

* no perturbation, any localized or two-vertex initial state;
* one edge ``(w, l)`` on the complete graph, ``(w, l in B)`` and
  ``(m in B, l in A)`` on the bipartite graph, ``(w, l)`` on the star with
  central trap, ``(c, l)`` on the star with outer trap;
* two edges from a common hub to ``l`` and ``k``, with equal magnitudes and
  phases ``0`` and ``theta``, together with the superposition of ``l`` and
  ``k``. The hub is ``w`` (complete, bipartite ``l, k in B``, central star),
  ``m in B`` (bipartite ``l, k in A``) or ``c`` (outer star).

Phases follow the orientation hub -> leaf: the Hamiltonian element
``(hub, k)`` carries ``lam * exp(1j * theta)``. A perturbation stored the
other way round is read with the phase negated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import (
    TWO_PI,
    Complete,
    CompleteBipartite,
    FamilySpec,
    Graph,
    Star,
    build_family,
    canonical_phase,
    perturb_edge,
)
from .hamiltonian import InitialStateSpec, Localized, Superposition, TransportProblem, initial_state

_PHASE_EPS = 1e-12
_EXCEPTIONAL_TOL = 1e-10


class UncatalogedScenario(ValueError):
    pass


@dataclass(frozen=True)
class Scenario:
    family: FamilySpec
    initial: InitialStateSpec
    perturbations: tuple[tuple[int, int, float, float], ...] = ()
    trap: int | None = None

    def __post_init__(self) -> None:
        if self.trap is None:
            object.__setattr__(self, "trap", default_trap(self.family))

    def graph(self) -> Graph:
        g = build_family(self.family)
        for r, s, lam, theta in self.perturbations:
            g = perturb_edge(g, r, s, lam, theta)
        return g

    def problem(self, kappa: float = 1.0) -> TransportProblem:
        return TransportProblem(self.graph(), self.trap, kappa, self.initial)

    @classmethod
    def from_graph(cls, g: Graph, trap: int, initial: InitialStateSpec) -> "Scenario":
        if g.family is None:
            raise UncatalogedScenario("graph carries no family information")
        perts = tuple((r, s, lam, th) for (r, s), (lam, th) in sorted(g.perturbations.items()))
        return cls(g.family, initial, perts, trap)


@dataclass(frozen=True)
class ClosedForm:
    eta: float
    label: str
    asymptotic: bool = False
    optimal_theta: float | None = None


def default_trap(family: FamilySpec) -> int:
    if isinstance(family, Star) and family.trap_position == "outer":
        return 1
    return 0


def optimal_phase(gamma: float) -> float:
    """Edge phase that makes (gamma + theta)/2 a multiple of pi."""
    return canonical_phase(TWO_PI - canonical_phase(gamma))


# ---------------------------------------------------------------------------
# scenario classification


@dataclass(frozen=True)
class _Layout:
    """Vertex roles relative to the trap."""

    kind: str  # complete | cbg | star-central | star-outer
    n: int
    w: int
    side_a: frozenset[int] = frozenset()  # bipartite side holding the trap
    side_b: frozenset[int] = frozenset()
    center: int | None = None


@dataclass(frozen=True)
class _Case:
    kind: str  # none | edge | pair
    hub: int | None = None
    l: int | None = None
    k: int | None = None
    lam: float = 0.0
    theta: float = 0.0


def _layout(s: Scenario) -> _Layout:
    fam, w = s.family, s.trap
    if isinstance(fam, Complete):
        if not 0 <= w < fam.n:
            raise UncatalogedScenario(f"trap {w} out of range")
        return _Layout("complete", fam.n, w)
    if isinstance(fam, CompleteBipartite):
        v1, v2 = frozenset(fam.v1), frozenset(fam.v2)
        if w in v1:
            return _Layout("cbg", fam.size, w, v1, v2)
        if w in v2:
            return _Layout("cbg", fam.size, w, v2, v1)
        raise UncatalogedScenario(f"trap {w} out of range")
    if isinstance(fam, Star):
        if fam.trap_position == "central":
            if w != 0:
                raise UncatalogedScenario("central-trap star needs the trap at vertex 0")
            return _Layout("star-central", fam.n, w, center=0)
        if not 1 <= w < fam.n:
            raise UncatalogedScenario("outer-trap star needs the trap on an outer vertex")
        return _Layout("star-outer", fam.n, w, center=0)
    raise UncatalogedScenario(f"unknown family {fam!r}")


def _orient(r: int, s: int, lam: float, theta: float, hub: int):
    if r == hub:
        return s, lam, canonical_phase(theta)
    if s == hub:
        return r, lam, canonical_phase(-theta)
    raise UncatalogedScenario(f"edge ({r}, {s}) does not touch vertex {hub}")


def _is_zero_phase(theta: float) -> bool:
    return theta < _PHASE_EPS or theta > TWO_PI - _PHASE_EPS


def _edge_hub(lay: _Layout, r: int, s: int) -> int:
    if lay.kind in ("complete", "star-central"):
        return lay.w
    if lay.kind == "star-outer":
        return lay.center
    # bipartite: the trap when it is an endpoint, else the endpoint on side B
    if lay.w in (r, s):
        return lay.w
    return r if r in lay.side_b else s


def _classify(s: Scenario, lay: _Layout) -> _Case:
    perts = s.perturbations
    if not perts:
        return _Case("none")
    if len(perts) > 2:
        raise UncatalogedScenario("at most two perturbed edges are cataloged")
    hub = _edge_hub(lay, perts[0][0], perts[0][1])
    legs = [_orient(r, t, lam, th, hub) for r, t, lam, th in perts]
    if len(legs) == 1:
        leaf, lam, theta = legs[0]
        case = _Case("edge", hub=hub, l=leaf, lam=lam, theta=theta)
        _check_edge_roles(lay, case)
        return case
    (a, lam_a, th_a), (b, lam_b, th_b) = legs
    if not math.isclose(lam_a, lam_b, rel_tol=1e-12, abs_tol=0.0):
        raise UncatalogedScenario("paired perturbations must share the same magnitude")
    if _is_zero_phase(th_a):
        l, k, theta = a, b, th_b
    elif _is_zero_phase(th_b):
        l, k, theta = b, a, th_a
    else:
        raise UncatalogedScenario("one of the paired perturbations must carry zero phase")
    case = _Case("pair", hub=hub, l=l, k=k, lam=lam_a, theta=theta)
    _check_pair_roles(lay, case)
    return case


def _check_edge_roles(lay: _Layout, c: _Case) -> None:
    ok = False
    if lay.kind in ("complete", "star-central"):
        ok = c.hub == lay.w and c.l != lay.w
    elif lay.kind == "star-outer":
        ok = c.hub == lay.center and c.l != lay.w
    elif lay.kind == "cbg":
        if c.hub == lay.w:
            ok = c.l in lay.side_b
        else:
            ok = c.hub in lay.side_b and c.l in lay.side_a and c.l != lay.w
    if not ok:
        raise UncatalogedScenario("perturbed edge is not one of the cataloged placements")


def _check_pair_roles(lay: _Layout, c: _Case) -> None:
    leaves = {c.l, c.k}
    ok = False
    if lay.kind in ("complete", "star-central"):
        ok = c.hub == lay.w and lay.w not in leaves
    elif lay.kind == "star-outer":
        ok = c.hub == lay.center and lay.w not in leaves
    elif lay.kind == "cbg":
        if c.hub == lay.w:
            ok = leaves <= lay.side_b
        else:
            ok = c.hub in lay.side_b and leaves <= lay.side_a and lay.w not in leaves
    if not ok:
        raise UncatalogedScenario("perturbed edge pair is not one of the cataloged placements")


# ---------------------------------------------------------------------------
# closed forms


def phase_matched_efficiency(n_rest: int, theta: float, gamma: float) -> float:
    """cos^2((g+t)/2) + 2 sin^2(t/2) sin^2((g+t)/2) / (n_rest + 2 sin^2(t/2))."""
    half = 0.5 * (gamma + theta)
    s2 = math.sin(0.5 * theta) ** 2
    extra = 0.0
    if s2 > 0.0:
        extra = 2.0 * s2 * math.sin(half) ** 2 / (n_rest + 2.0 * s2)
    return math.cos(half) ** 2 + extra


def star_pair_efficiency(n_rest: int, lam: float, theta: float, gamma: float, phase_sign: int = 1) -> float:
    """Two-edge star efficiency; ``n_rest`` counts the unperturbed leaves.

    ``phase_sign=+1`` is the form consistent with the hub->leaf orientation.
    ``-1`` is kept only so the alternative sign can be evaluated.
    """
    al = lam - 1.0
    ak = lam * np.exp(-1j * theta) - 1.0
    num = abs(al + np.exp(1j * gamma) * (lam * np.exp(1j * phase_sign * theta) - 1.0)) ** 2
    den = 2.0 * (n_rest + al * al + abs(ak) ** 2)
    return float(num / den) if den > 0 else 0.0


def edge_weight_gap(lam: float, theta: float) -> float:
    """|lam exp(-i theta) - 1|^2 = lam^2 - 2 lam cos(theta) + 1."""
    return lam * lam - 2.0 * lam * math.cos(theta) + 1.0


def _ratio(num: float, den: float) -> float:
    return num / den if den > 0 else 0.0


def _unperturbed(lay: _Layout, ini: InitialStateSpec) -> ClosedForm:
    n = lay.n
    if lay.kind in ("complete", "star-central"):
        if isinstance(ini, Localized):
            return ClosedForm(1.0 / (n - 1), f"{lay.kind}/localized")
        return ClosedForm((1.0 + math.cos(ini.gamma)) / (n - 1), f"{lay.kind}/superposition")
    if lay.kind == "star-outer":
        c = lay.center
        if isinstance(ini, Localized):
            if ini.l == c:
                return ClosedForm(1.0, "star-outer/localized-center")
            return ClosedForm(1.0 / (n - 2), "star-outer/localized-leaf")
        if c in ini.vertices:
            return ClosedForm((n - 1) / (2.0 * (n - 2)), "star-outer/superposition-center")
        return ClosedForm((1.0 + math.cos(ini.gamma)) / (n - 2), "star-outer/superposition-leaves")
    na, nb = len(lay.side_a), len(lay.side_b)
    if isinstance(ini, Localized):
        if ini.l in lay.side_a:
            return ClosedForm(1.0 / (na - 1), "cbg/localized-same-side")
        return ClosedForm(1.0 / nb, "cbg/localized-other-side")
    sides = {ini.l in lay.side_a, ini.k in lay.side_a}
    if sides == {True}:
        return ClosedForm((1.0 + math.cos(ini.gamma)) / (na - 1), "cbg/superposition-same-side")
    if sides == {False}:
        return ClosedForm((1.0 + math.cos(ini.gamma)) / nb, "cbg/superposition-other-side")
    return ClosedForm((na + nb - 1) / (2.0 * (na - 1) * nb), "cbg/superposition-mixed")


def _edge(lay: _Layout, c: _Case, ini: InitialStateSpec) -> ClosedForm:
    if not isinstance(ini, Localized):
        if lay.kind == "cbg" and c.hub != lay.w and set(ini.vertices) == {c.l, c.hub}:
            return ClosedForm(1.0, "cbg/edge-cross/superposition-mixed")
        raise UncatalogedScenario("single-edge perturbation is cataloged for localized states only")
    x, n = ini.l, lay.n
    q = edge_weight_gap(c.lam, c.theta)
    if lay.kind == "complete":
        if x == c.l:
            return ClosedForm(1.0, "complete/edge/localized-endpoint")
        return ClosedForm(1.0 / (n - 2), "complete/edge/localized-other")
    if lay.kind == "star-central":
        if x == c.l:
            eta = _ratio(q, n - 2 + q)
            return ClosedForm(eta, "star-central/edge/localized-endpoint", asymptotic=eta < 1.0, optimal_theta=math.pi)
        return ClosedForm(_ratio(1.0, n - 2 + q), "star-central/edge/localized-other")
    if lay.kind == "star-outer":
        if x == lay.center:
            return ClosedForm(1.0, "star-outer/edge/localized-center")
        if x == c.l:
            eta = _ratio(q, n - 3 + q)
            return ClosedForm(eta, "star-outer/edge/localized-endpoint", asymptotic=eta < 1.0, optimal_theta=math.pi)
        return ClosedForm(_ratio(1.0, n - 3 + q), "star-outer/edge/localized-other")
    na, nb = len(lay.side_a), len(lay.side_b)
    if c.hub == lay.w:
        if x == c.l:
            return ClosedForm(1.0, "cbg/edge-trap/localized-endpoint")
        if x in lay.side_b:
            return ClosedForm(1.0 / (nb - 1), "cbg/edge-trap/localized-other-side")
        return ClosedForm(1.0 / (na - 1), "cbg/edge-trap/localized-same-side")
    if x in (c.l, c.hub):
        return ClosedForm(1.0, "cbg/edge-cross/localized-endpoint")
    if x in lay.side_b:
        return ClosedForm(1.0 / (nb - 1), "cbg/edge-cross/localized-other-side")
    return ClosedForm(1.0 / (na - 2), "cbg/edge-cross/localized-same-side")


def _pair(lay: _Layout, c: _Case, ini: InitialStateSpec) -> ClosedForm:
    if not isinstance(ini, Superposition) or set(ini.vertices) != {c.l, c.k}:
        raise UncatalogedScenario("paired perturbation is cataloged for the matching superposition only")
    # bring the state to (|l> + e^{i g}|k>)/sqrt 2 up to a global phase
    gamma = ini.gamma if ini.l == c.l else canonical_phase(-ini.gamma)
    n = lay.n
    if lay.kind in ("star-central", "star-outer"):
        n_rest = n - 3 if lay.kind == "star-central" else n - 4
        eta = star_pair_efficiency(n_rest, c.lam, c.theta, gamma)
        return ClosedForm(eta, f"{lay.kind}/pair/superposition", asymptotic=eta < 1.0 - 1e-12)
    if lay.kind == "complete":
        n_rest = n - 3
    elif c.hub == lay.w:
        n_rest = len(lay.side_b) - 2
    else:
        n_rest = len(lay.side_a) - 3
    tag = "complete" if lay.kind == "complete" else ("cbg/pair-trap" if c.hub == lay.w else "cbg/pair-cross")
    return ClosedForm(
        phase_matched_efficiency(n_rest, c.theta, gamma),
        f"{tag}/superposition",
        optimal_theta=optimal_phase(gamma),
    )


def _exceptional_length(lay: _Layout, case: _Case) -> int | None:
    """Basis length when a real perturbation of one special size closes the chain early.

    The leaf amplitudes of the new Krylov vector then sum to zero over the
    unperturbed part of the graph, so it is an eigenvector of the remaining
    block. This happens only for theta = 0 at the magnitudes below.
    """
    if case.kind == "none" or lay.kind.startswith("star"):
        return None
    e = np.exp(-1j * case.theta)
    lead = case.lam * e if case.kind == "edge" else case.lam * (1.0 + e)
    if lay.kind == "complete":
        target, cut = lay.n - 1.0, 2
    elif case.hub == lay.w:
        target, cut = float(len(lay.side_b)), 2
    else:
        nb = float(len(lay.side_b))
        target, cut = (nb if case.kind == "edge" else 2.0 * nb), 3
    if abs(lead - target) <= _EXCEPTIONAL_TOL * max(1.0, target):
        return cut
    return None


def analytic_efficiency(s: Scenario) -> ClosedForm:
    lay = _layout(s)
    ini = s.initial
    for v in ini.vertices:
        if not 0 <= v < lay.n or v == lay.w:
            raise UncatalogedScenario(f"initial vertex {v} is out of range or the trap")
    case = _classify(s, lay)
    if case.kind == "none":
        return _unperturbed(lay, ini)
    cf = _edge(lay, case, ini) if case.kind == "edge" else _pair(lay, case, ini)
    cut = _exceptional_length(lay, case)
    if cut is None:
        return cf
    basis = _normalized(_raw_basis(lay, case)[:cut])
    eta = float(np.sum(np.abs(basis.conj() @ initial_state(ini, lay.n)) ** 2))
    return ClosedForm(min(eta, 1.0), cf.label + "/exceptional")


def classify(s: Scenario) -> str:
    """Short case tag: none, edge or pair."""
    return _classify(s, _layout(s)).kind


# ---------------------------------------------------------------------------
# explicit bases


def _vec(n: int, entries) -> np.ndarray:
    v = np.zeros(n, dtype=complex)
    for idx, coef in entries:
        if isinstance(idx, (int, np.integer)):
            v[idx] += coef
        else:
            for i in idx:
                v[i] += coef
    return v


def _normalized(vectors) -> np.ndarray:
    rows = []
    for v in vectors:
        norm = np.linalg.norm(v)
        # role sets can be empty on the smallest graphs
        if norm > 1e-13:
            rows.append(v / norm)
    return np.array(rows)


def _alphas(n_eff: float, lam: float, theta: float):
    """Coefficients of the third Krylov vector for the two-edge complete case.

    The bipartite variants reuse them with ``n_eff`` replaced by the
    effective size of the perturbed side and ``lam`` rescaled.
    """
    e = np.exp(-1j * theta)
    p = np.exp(1j * theta)
    a1 = e + 1.0 - 2.0 * lam
    a2 = e + lam * (p - 1.0) + 2.0 - n_eff
    a3 = e * (2.0 + lam - n_eff) + 1.0 - lam
    return a1, a2, a3


def _raw_basis(lay: _Layout, case: _Case) -> list[np.ndarray]:
    n, w = lay.n, lay.w
    lam, theta = case.lam, case.theta
    e, p = np.exp(-1j * theta), np.exp(1j * theta)
    ew = _vec(n, [(w, 1.0)])
    everyone = set(range(n))

    if lay.kind in ("complete", "star-central"):
        if case.kind == "none":
            return [ew, _vec(n, [(everyone - {w}, 1.0)])]
        if case.kind == "edge":
            l = case.l
            rest = tuple(everyone - {w, l})
            e2 = _vec(n, [(rest, -1.0), (l, lam * e - 1.0)])
            if lay.kind == "star-central":
                return [ew, e2]
            e3 = _vec(n, [(rest, lam * p - 1.0), (l, n - 2.0)])
            return [ew, e2, e3]
        l, k = case.l, case.k
        rest = tuple(everyone - {w, l, k})
        e2 = _vec(n, [(rest, -1.0), (l, lam - 1.0), (k, lam * e - 1.0)])
        if lay.kind == "star-central":
            return [ew, e2]
        a1, a2, a3 = _alphas(n, lam, theta)
        return [ew, e2, _vec(n, [(rest, a1), (l, a2), (k, a3)])]

    if lay.kind == "star-outer":
        c = lay.center
        ec = _vec(n, [(c, 1.0)])
        if case.kind == "none":
            return [ew, ec, _vec(n, [(everyone - {w, c}, 1.0)])]
        if case.kind == "edge":
            l = case.l
            rest = tuple(everyone - {w, c, l})
            return [ew, ec, _vec(n, [(rest, -1.0), (l, lam * e - 1.0)])]
        l, k = case.l, case.k
        rest = tuple(everyone - {w, c, l, k})
        return [ew, ec, _vec(n, [(rest, -1.0), (l, lam - 1.0), (k, lam * e - 1.0)])]

    a, b = set(lay.side_a), set(lay.side_b)
    na, nb = len(a), len(b)
    a_rest = tuple(a - {w})
    if case.kind == "none":
        return [ew, _vec(n, [(tuple(b), 1.0)]), _vec(n, [(a_rest, 1.0)])]
    ua = _vec(n, [(a_rest, 1.0)])
    if case.kind == "edge" and case.hub == w:
        l = case.l
        b_rest = tuple(b - {l})
        e2 = _vec(n, [(b_rest, -1.0), (l, lam * e - 1.0)])
        e4 = _vec(n, [(b_rest, lam * p - 1.0), (l, nb - 1.0)])
        return [ew, e2, ua, e4]
    if case.kind == "edge":
        l, m = case.l, case.hub
        a_rr = tuple(a - {w, l})
        b_rest = tuple(b - {m})
        e3 = _vec(n, [(a_rr, -float(nb)), (l, lam * e - nb)])
        e4 = _vec(n, [(b_rest, -1.0), (m, nb - 1.0)])
        e5 = _vec(n, [(a_rr, lam * p - nb), (l, nb * (na - 2.0))])
        return [ew, _vec(n, [(tuple(b), 1.0)]), e3, e4, e5]
    l, k = case.l, case.k
    if case.hub == w:
        b_rest = tuple(b - {l, k})
        e2 = _vec(n, [(b_rest, -1.0), (l, lam - 1.0), (k, lam * e - 1.0)])
        a1, a2, a3 = _alphas(nb + 1.0, lam, theta)
        return [ew, e2, ua, _vec(n, [(b_rest, a1), (l, a2), (k, a3)])]
    m = case.hub
    a_rr = tuple(a - {w, l, k})
    b_rest = tuple(b - {m})
    e3 = _vec(n, [(a_rr, -float(nb)), (l, lam - nb), (k, lam * e - nb)])
    e4 = _vec(n, [(b_rest, -1.0), (m, nb - 1.0)])
    a1, a2, a3 = _alphas(float(na), lam / nb, theta)
    e5 = _vec(n, [(a_rr, a1), (l, a2), (k, a3)])
    return [ew, _vec(n, [(tuple(b), 1.0)]), e3, e4, e5]


def analytic_basis(s: Scenario) -> np.ndarray:
    """Normalized Krylov basis of the trap, row by row, from the explicit formulas.

    At an exceptional point the chain stops early and only the leading vectors
    are returned.
    """
    lay = _layout(s)
    case = _classify(s, lay)
    raw = _raw_basis(lay, case)
    cut = _exceptional_length(lay, case)
    return _normalized(raw[:cut] if cut else raw)


def modified_basis(s: Scenario) -> np.ndarray:
    """Symmetry-adapted basis of the same subspace for complete and bipartite graphs."""
    lay = _layout(s)
    case = _classify(s, lay)
    if case.kind == "none" or lay.kind.startswith("star"):
        raise UncatalogedScenario("symmetry-adapted bases exist for perturbed complete and bipartite graphs only")
    if _exceptional_length(lay, case) is not None:
        raise UncatalogedScenario("at an exceptional point the symmetry-adapted basis spans a larger space")
    n, w = lay.n, lay.w
    e, p = np.exp(-1j * case.theta), np.exp(1j * case.theta)
    ew = _vec(n, [(w, 1.0)])
    everyone = set(range(n))

    def twisted(rest, l, k):
        return _vec(n, [(tuple(rest), -1.0), (l, 0.5 * (p - 1.0)), (k, 0.5 * (e - 1.0))])

    if lay.kind == "complete":
        if case.kind == "edge":
            l = case.l
            return _normalized([ew, _vec(n, [(tuple(everyone - {w, l}), 1.0)]), _vec(n, [(l, 1.0)])])
        l, k = case.l, case.k
        return _normalized([ew, twisted(everyone - {w, l, k}, l, k), _vec(n, [(l, 1.0), (k, e)])])

    a, b = set(lay.side_a), set(lay.side_b)
    ua = _vec(n, [(tuple(a - {w}), 1.0)])
    if case.kind == "edge" and case.hub == w:
        l = case.l
        return _normalized([ew, _vec(n, [(tuple(b - {l}), 1.0)]), ua, _vec(n, [(l, 1.0)])])
    if case.kind == "edge":
        l, m = case.l, case.hub
        return _normalized(
            [ew, _vec(n, [(tuple(b - {m}), 1.0)]), _vec(n, [(m, 1.0)]), _vec(n, [(tuple(a - {w, l}), 1.0)]), _vec(n, [(l, 1.0)])]
        )
    l, k = case.l, case.k
    if case.hub == w:
        return _normalized([ew, twisted(b - {l, k}, l, k), ua, _vec(n, [(l, 1.0), (k, e)])])
    m = case.hub
    return _normalized(
        [ew, _vec(n, [(tuple(b - {m}), 1.0)]), twisted(a - {w, l, k}, l, k), _vec(n, [(m, 1.0)]), _vec(n, [(l, 1.0), (k, e)])]
    )


# ---------------------------------------------------------------------------
# scenario constructors for the standard vertex layouts


def recipe_edges(problem: TransportProblem) -> list[tuple[int, int, str]]:
    """Edges to perturb for ``problem`` as ``(hub, leaf, phase_role)``.

    ``phase_role`` is ``"theta"`` for the edge carrying the tunable phase and
    ``"zero"`` for the phase-free partner of a pair. The list is empty when
    the unperturbed graph already reaches unit efficiency.
    """
    g = problem.graph
    if g.family is None:
        raise UncatalogedScenario("graph carries no family information")
    lay = _layout(Scenario(g.family, problem.initial, (), problem.trap))
    w, ini = lay.w, problem.initial
    if isinstance(ini, Localized):
        l = ini.l
        if lay.kind in ("complete", "star-central"):
            return [(w, l, "theta")]
        if lay.kind == "star-outer":
            return [] if l == lay.center else [(lay.center, l, "theta")]
        if l in lay.side_b:
            return [(w, l, "theta")]
        return [(min(lay.side_b), l, "theta")]
    l, k = ini.l, ini.k
    if lay.kind in ("complete", "star-central"):
        return [(w, l, "zero"), (w, k, "theta")]
    if lay.kind == "star-outer":
        if lay.center in (l, k):
            raise UncatalogedScenario("no cataloged perturbation for a superposition involving the centre")
        return [(lay.center, l, "zero"), (lay.center, k, "theta")]
    in_a = (l in lay.side_a, k in lay.side_a)
    if in_a == (False, False):
        return [(w, l, "zero"), (w, k, "theta")]
    if in_a == (True, True):
        return [(min(lay.side_b), l, "zero"), (min(lay.side_b), k, "theta")]
    leaf, hub = (l, k) if in_a[0] else (k, l)
    return [(hub, leaf, "theta")]


def apply_recipe(problem: TransportProblem, lam: float, theta: float) -> TransportProblem:
    g = problem.graph
    for hub, leaf, role in recipe_edges(problem):
        g = perturb_edge(g, hub, leaf, lam, theta if role == "theta" else 0.0)
    return TransportProblem(g, problem.trap, problem.kappa, problem.initial)


def recipe_scenario(
    family: FamilySpec,
    initial: InitialStateSpec,
    lam: float | None = None,
    theta: float = 0.0,
    trap: int | None = None,
) -> Scenario:
    """Scenario with the standard perturbation for ``initial`` (none if ``lam`` is None)."""
    trap = default_trap(family) if trap is None else trap
    if lam is None:
        return Scenario(family, initial, (), trap)
    base = TransportProblem(build_family(family), trap, 1.0, initial)
    perts = tuple(
        (hub, leaf, lam, theta if role == "theta" else 0.0) for hub, leaf, role in recipe_edges(base)
    )
    return Scenario(family, initial, perts, trap)
