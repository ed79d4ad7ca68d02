"""
Test quiver doubling and classification
"""
import pytest
from pydantic import ValidationError

from app.models import QuiverModel
from app.services.quiver_service import (
    DYNKIN,
    EXTENDED_DYNKIN,
    WILD,
    adjacency,
    affine_shape,
    cartan_matrix_series,
    classify,
    double,
    dynkin_shape,
    extending_vertex,
    make_quiver,
)
from app.services.series_service import TruncSeries


def test_double_keeps_originals_first():
    q = make_quiver([0, 1], [(0, 1)])
    d = double(q)
    assert [e.name for e in d.edges] == ["a0", "a0*"]
    assert (d.edges[1].tail, d.edges[1].head) == ("1", "0")
    assert adjacency(d) == [[0, 1], [1, 0]]


def test_one_vertex_two_loops():
    q = make_quiver([0], [(0, 0), (0, 0)])
    assert adjacency(double(q)) == [[4]]
    cartan = cartan_matrix_series(adjacency(double(q)), 3)
    assert cartan[0, 0] == TruncSeries([1, -4, 1, 0])


def test_classify_dynkin():
    assert classify(dynkin_shape("A", 3)).type == "A3"
    assert classify(dynkin_shape("D", 5)).type == "D5"
    assert classify(dynkin_shape("E", 8)).type == "E8"
    assert classify(dynkin_shape("E", 6)).kind == DYNKIN


@pytest.mark.parametrize("family,n", [("A", 1), ("A", 4), ("D", 4), ("D", 7), ("E", 6), ("E", 7), ("E", 8)])
def test_classify_extended_dynkin(family, n):
    verdict = classify(affine_shape(family, n))
    assert verdict.kind == EXTENDED_DYNKIN
    assert verdict.type == f"~{family}{n}"
    assert verdict.extending_vertices


def test_extending_vertices():
    assert classify(affine_shape("D", 4)).extending_vertices == ("1", "2", "3", "4")
    # ~E8: the end of the long arm
    q = affine_shape("E", 8)
    assert q.index(extending_vertex(q)) == len(q.vertices) - 1


def test_classify_wild():
    assert classify(make_quiver([0], [(0, 0), (0, 0)])).kind == WILD
    assert classify(make_quiver([0, 1], [(0, 1)] * 3)).kind == WILD
    assert classify(make_quiver(range(6), [(0, k) for k in range(1, 6)])).kind == WILD
    assert classify(make_quiver([0, 1], [(0, 0), (0, 1)])).kind == WILD


def test_one_loop_is_extended_a0():
    assert classify(make_quiver([0], [(0, 0)])).type == "~A0"


def test_orientation_does_not_matter():
    q = QuiverModel(vertices=["a", "b", "c"], edges=[{"tail": "b", "head": "a"}, {"tail": "b", "head": "c"}])
    assert classify(q).type == "A3"


def test_extending_vertex_refuses_wild():
    with pytest.raises(ValueError, match="not extended Dynkin"):
        extending_vertex(make_quiver([0], [(0, 0), (0, 0)]))


def test_disconnected_quiver_is_refused():
    with pytest.raises(ValueError, match="connected"):
        classify(make_quiver([0, 1], []))


def test_unknown_vertex_is_a_validation_error():
    with pytest.raises(ValidationError):
        QuiverModel(vertices=["0"], edges=[{"tail": "0", "head": "1"}])


def test_degree_must_be_positive():
    with pytest.raises(ValidationError):
        make_quiver([0], [(0, 0)], degree=0)


def relabel(q: QuiverModel) -> QuiverModel:
    """Reverse the vertex order and rename every vertex"""
    n = len(q.vertices)
    rename = {v: f"n{n - 1 - i}" for i, v in enumerate(q.vertices)}
    return QuiverModel(
        vertices=[rename[v] for v in reversed(q.vertices)],
        edges=[{"tail": rename[e.tail], "head": rename[e.head], "degree": e.degree} for e in q.edges],
    )


@pytest.mark.parametrize("family,n", [("A", 4), ("D", 4), ("D", 6), ("E", 6), ("E", 7), ("E", 8)])
def test_classification_ignores_vertex_labels(family, n):
    q = affine_shape(family, n)
    moved = relabel(q)
    before, after = classify(q), classify(moved)
    assert (after.kind, after.type) == (before.kind, before.type)
    rename = dict(zip(q.vertices, reversed(moved.vertices)))
    assert set(after.extending_vertices) == {rename[v] for v in before.extending_vertices}
