import math

import numpy as np
import pytest

from qwtrap.graph import (
    Complete,
    CompleteBipartite,
    GraphSizeError,
    Star,
    TopologyError,
    build_family,
    canonical_phase,
    clear_perturbations,
    format_family,
    from_edges,
    laplacian,
    parse_family,
    perturb_edge,
    read_edge_list,
)


def test_complete_graph_edges_and_degrees():
    g = build_family(Complete(5))
    assert len(g.edges) == 10
    assert list(g.degrees()) == [4] * 5


def test_bipartite_sides_and_edges():
    spec = CompleteBipartite(4, 3)
    g = build_family(spec)
    assert list(spec.v1) == [0, 1, 2, 3]
    assert list(spec.v2) == [4, 5, 6]
    assert len(g.edges) == 12
    assert not g.has_edge(0, 1) and not g.has_edge(4, 5)
    assert g.has_edge(2, 6) and g.has_edge(6, 2)


def test_star_is_centred_on_zero():
    g = build_family(Star(6))
    assert list(g.degrees()) == [5, 1, 1, 1, 1, 1]


@pytest.mark.parametrize("make", [lambda: Complete(1), lambda: CompleteBipartite(0, 3), lambda: Star(1)])
def test_too_small_families_raise(make):
    with pytest.raises(GraphSizeError):
        make()


def test_laplacian_rows_sum_to_zero():
    for spec in (Complete(6), CompleteBipartite(3, 4), Star(5)):
        lap = laplacian(build_family(spec))
        np.testing.assert_allclose(lap.sum(axis=1), 0.0)
        np.testing.assert_allclose(lap, lap.T)


def test_complete_laplacian_spectrum():
    eig = np.sort(np.linalg.eigvalsh(laplacian(build_family(Complete(5)))))
    np.testing.assert_allclose(eig, [0, 5, 5, 5, 5], atol=1e-12)


def test_perturb_records_phase_canonically():
    g = perturb_edge(build_family(Complete(4)), 0, 1, 0.5, -math.pi / 2)
    assert g.perturbations == {(0, 1): (0.5, pytest.approx(3 * math.pi / 2))}


def test_perturb_replaces_either_orientation():
    g = perturb_edge(build_family(Complete(4)), 0, 1, 0.5, 1.0)
    g = perturb_edge(g, 1, 0, 0.7, 2.0)
    assert g.perturbations == {(1, 0): (0.7, 2.0)}


def test_zero_magnitude_removes_perturbation():
    g = perturb_edge(build_family(Complete(4)), 0, 1, 0.5, 1.0)
    assert perturb_edge(g, 0, 1, 0.0, 0.0).perturbations == {}
    assert clear_perturbations(g).perturbations == {}


def test_perturbing_a_non_edge_raises():
    with pytest.raises(TopologyError):
        perturb_edge(build_family(Star(5)), 1, 2, 1.0, 0.0)


def test_negative_magnitude_raises():
    with pytest.raises(ValueError):
        perturb_edge(build_family(Star(5)), 0, 2, -1.0, 0.0)


def test_perturbation_keeps_family():
    g = perturb_edge(build_family(Star(5)), 0, 2, 1.0, 0.0)
    assert g.family == Star(5)


def test_from_edges_rejects_self_loops():
    with pytest.raises(TopologyError):
        from_edges(3, [(0, 0)])


def test_from_edges_rejects_out_of_range():
    with pytest.raises(TopologyError):
        from_edges(3, [(0, 5)])


@pytest.mark.parametrize(
    "text, spec",
    [
        ("complete:7", Complete(7)),
        ("cbg:4,3", CompleteBipartite(4, 3)),
        ("star:6", Star(6)),
        ("star:6:outer", Star(6, "outer")),
        ("STAR:6:central", Star(6)),
    ],
)
def test_family_parse_round_trip(text, spec):
    assert parse_family(text) == spec
    assert parse_family(format_family(spec)) == spec


@pytest.mark.parametrize("text", ["complete", "cbg:4", "star:x", "ring:5"])
def test_bad_family_spec(text):
    with pytest.raises(ValueError):
        parse_family(text)


def test_read_edge_list(tmp_path):
    path = tmp_path / "g.txt"
    path.write_text("# triangle with one weighted edge\n0 1\n1 2 0.5 1.25\n2 0\n")
    g = read_edge_list(path)
    assert g.n == 3
    assert len(g.edges) == 3
    assert g.perturbations == {(1, 2): (0.5, 1.25)}
    assert g.family is None


def test_read_edge_list_bad_line(tmp_path):
    path = tmp_path / "g.txt"
    path.write_text("0 1 2\n")
    with pytest.raises(ValueError):
        read_edge_list(path)


@pytest.mark.parametrize("theta, expected", [(0.0, 0.0), (2 * math.pi, 0.0), (-0.5, 2 * math.pi - 0.5), (7.0, 7.0 - 2 * math.pi)])
def test_canonical_phase(theta, expected):
    assert canonical_phase(theta) == pytest.approx(expected, abs=1e-15)
    assert 0.0 <= canonical_phase(theta) < 2 * math.pi
