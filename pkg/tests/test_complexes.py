"""Complex and graph primitives: measures, links, skeletons, serialization."""
import itertools
import json
from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hdx.complexes import (PureComplex, WeightedGraph, canonical_face,
                           dumps_complex, face_dim, loads_complex)


def uniform_complete(n, d):
    tops = list(itertools.combinations(range(n), d + 1))
    w = Fraction(1, len(tops))
    return PureComplex(n, d, [(t, w) for t in tops])


def test_canonical_face_sorts_and_rejects_repeats():
    assert canonical_face((3, 1, 2)) == (1, 2, 3)
    assert face_dim(()) == -1
    with pytest.raises(ValueError):
        canonical_face((1, 1, 2))


def test_constructor_rejects_bad_inputs():
    with pytest.raises(ValueError):
        PureComplex(3, 1, [((0, 1), Fraction(1, 2))])  # sums to 1/2
    with pytest.raises(ValueError):
        PureComplex(3, 1, [((0, 1), 1), ((0, 1), 0)])  # duplicate
    with pytest.raises(ValueError):
        PureComplex(3, 2, [((0, 1), 1)])  # wrong dimension
    with pytest.raises(ValueError):
        PureComplex(2, 1, [((0, 3), 1)])  # vertex out of range
    with pytest.raises(ValueError):
        PureComplex(3, 1, [((0, 1), 2), ((0, 2), -1)])  # negative


def test_face_measures_are_probabilities():
    X = uniform_complete(5, 2)
    for k in range(-1, 3):
        ws = [w for _, w in X.faces(k)]
        assert sum(ws) == 1
        assert all(w >= 0 for w in ws)
    # each face's mass matches the sampling recipe directly
    assert X.face_weights(1)[(0, 1)] == Fraction(3, 30)
    assert X.face_weights(0)[(2,)] == Fraction(1, 5)
    assert X.face_weights(-1)[()] == 1


def test_contains_and_skeleton():
    X = uniform_complete(4, 2)
    assert X.contains((0, 1, 2)) and X.contains((1, 3)) and X.contains(())
    assert not X.contains((0, 1, 2, 3))
    S = X.skeleton(1)
    assert S.dimension == 1
    assert S.face_weights(1) == X.face_weights(1)
    with pytest.raises(ValueError):
        X.skeleton(3)


def test_link_renormalizes():
    X = uniform_complete(5, 2)
    L = X.link((0,))
    assert L.dimension == 1
    assert L.vertex_count == 4
    assert sum(w for _, w in L.top_faces) == 1
    # the link of an edge is the opposite vertex set
    Le = X.link((0, 1))
    assert Le.dimension == 0 and Le.vertex_count == 3
    with pytest.raises(ValueError):
        X.link((0, 1, 2, 3))


def test_link_keeps_original_labels():
    X = uniform_complete(4, 2)
    L = X.link((1,))
    # relabeled vertices remember where they came from
    assert sorted(L.labels.values()) == [0, 2, 3]


def test_partite_coloring_and_restriction():
    tops = [(t, Fraction(1, 8)) for t in
            itertools.product((0, 1), (2, 3), (4, 5))]
    X = PureComplex(6, 2, [(tuple(sorted(t)), w) for t, w in tops],
                    coloring={v: v // 2 for v in range(6)})
    assert X.is_partite
    assert X.colors() == [0, 1, 2]
    R = X.color_restrict([0, 2])
    assert R.dimension == 1
    assert R.vertex_count == 4
    assert sum(w for _, w in R.top_faces) == 1
    with pytest.raises(ValueError):
        X.color_restrict([0, 7])


def test_underlying_graph_and_diameter():
    X = uniform_complete(5, 2)
    g = X.underlying_graph()
    assert sum(g.edges.values()) == 1
    assert X.diameter() == 1
    # a path complex has the expected diameter
    P = PureComplex(4, 1, [((i, i + 1), Fraction(1, 3)) for i in range(3)])
    assert P.diameter() == 3


def test_graph_vertex_measure_halves_edges():
    g = WeightedGraph(3, [((0, 1), Fraction(1, 2)), ((1, 2), Fraction(1, 2))])
    mu = g.vertex_measure()
    assert mu[0] == Fraction(1, 4)
    assert mu[1] == Fraction(1, 2)
    assert sum(mu.values()) == 1
    assert g.mu(1) == Fraction(1, 2)


def test_graph_self_loop_counts_fully():
    g = WeightedGraph(2, [((0, 0), Fraction(1, 2)), ((0, 1), Fraction(1, 2))])
    assert g.mu(0) == Fraction(3, 4)
    assert g.connected_components() == [[0, 1]]


def test_graph_requires_unit_mass():
    with pytest.raises(ValueError):
        WeightedGraph(2, [((0, 1), Fraction(1, 2))])


def test_json_round_trip():
    X = uniform_complete(4, 2)
    Y = loads_complex(dumps_complex(X))
    assert Y == X
    doc = json.loads(dumps_complex(X))
    assert all("/" in e["weight"] for e in doc["top_faces"])


def test_json_round_trip_keeps_coloring():
    X = PureComplex(4, 1,
                    [((0, 2), Fraction(1, 4)), ((0, 3), Fraction(1, 4)),
                     ((1, 2), Fraction(1, 4)), ((1, 3), Fraction(1, 4))],
                    coloring={0: 0, 1: 0, 2: 1, 3: 1})
    Y = loads_complex(dumps_complex(X))
    assert Y.coloring == X.coloring


@st.composite
def weighted_complexes(draw):
    n = draw(st.integers(min_value=3, max_value=6))
    d = draw(st.integers(min_value=1, max_value=min(3, n - 1)))
    all_tops = list(itertools.combinations(range(n), d + 1))
    chosen = draw(st.lists(st.sampled_from(all_tops), min_size=1,
                           max_size=len(all_tops), unique=True))
    raw = draw(st.lists(st.integers(min_value=1, max_value=9),
                        min_size=len(chosen), max_size=len(chosen)))
    total = sum(raw)
    return PureComplex(n, d, [(t, Fraction(r, total))
                              for t, r in zip(chosen, raw)])


@settings(max_examples=60, deadline=None)
@given(weighted_complexes())
def test_level_measures_always_sum_to_one(X):
    for k in range(-1, X.dimension + 1):
        assert sum(w for _, w in X.faces(k)) == 1


@settings(max_examples=60, deadline=None)
@given(weighted_complexes())
def test_serialization_round_trips(X):
    assert loads_complex(dumps_complex(X)) == X
