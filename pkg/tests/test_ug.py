"""Unique games from cochains: satisfiability, decoding, planted instances."""
import itertools
import random
from fractions import Fraction

import pytest

from hdx import (
    Assignment,
    Cochain,
    PureComplex,
    UGInstance,
    affine_linear_generator,
    auto_cone,
    complete_complex,
    cyclic,
    delta,
    from_cochain,
    from_table,
    is_strongly_satisfiable,
    path_value,
    random_cochain,
    solve_on_expander,
    sym,
    to_cochain,
    value,
    vertex_star_decomposition,
    weight,
)

Z2 = cyclic(2)
TRI = complete_complex(3, 2)


def flipped_triangle():
    f = Cochain(TRI, 1, Z2, {(0, 1): 1, (0, 2): 0, (1, 2): 0})
    return from_cochain(f, 2)


def test_instance_validation():
    g = TRI.underlying_graph()
    ident = {e: (0, 1) for e in g.edges}
    U = UGInstance(g, 2, ident)
    assert U.constraints == ident
    with pytest.raises(ValueError, match="empty alphabet"):
        UGInstance(g, 0, ident)
    with pytest.raises(ValueError, match="not a permutation"):
        UGInstance(g, 2, {**ident, (0, 1): (0, 0)})
    with pytest.raises(ValueError, match="cover the graph edges"):
        UGInstance(g, 2, {(0, 1): (0, 1)})
    # constraint keys are canonicalized
    keyed = {(1, 0): (0, 1), (2, 0): (0, 1), (2, 1): (0, 1)}
    assert UGInstance(g, 2, keyed).constraints == ident


def test_from_cochain_requires_action_and_degree():
    g0 = Cochain(TRI, 0, Z2, {(v,): 0 for v in range(3)})
    with pytest.raises(ValueError, match="degree-1"):
        from_cochain(g0, 2)
    table = [[0, 1], [1, 0]]
    no_action = from_table(table)
    f = Cochain(TRI, 1, no_action, {e: 0 for e, _ in TRI.faces(1)})
    with pytest.raises(ValueError, match="no point action"):
        from_cochain(f, 2)


def test_cochain_roundtrip():
    rng = random.Random(4)
    X = complete_complex(4, 2)
    f = random_cochain(X, 1, sym(3), rng)
    U = from_cochain(f, 3)
    back = to_cochain(U, X)
    assert back.values == f.values
    assert from_cochain(back, 3).constraints == U.constraints
    with pytest.raises(ValueError, match="do not match"):
        to_cochain(U, complete_complex(5, 2))


def test_value_counts_satisfied_mass():
    U = flipped_triangle()
    assert value(U, {0: 0, 1: 0, 2: 0}) == Fraction(2, 3)
    assert value(U, Assignment({0: 1, 1: 0, 2: 1})) == Fraction(2, 3)
    # the flip breaks the cocycle condition, so no assignment reaches one
    best = max(value(U, dict(enumerate(h)))
               for h in itertools.product(range(2), repeat=3))
    assert best == Fraction(2, 3)
    with pytest.raises(ValueError, match="misses an endpoint"):
        value(U, {0: 0, 1: 0})
    with pytest.raises(ValueError, match="outside the alphabet"):
        value(U, {0: 0, 1: 0, 2: 5})


def test_strong_satisfiability_matches_coboundaries():
    # exhaustive over the eight two-element cochains on the triangle
    cobs = set()
    for g in itertools.product(range(2), repeat=3):
        cobs.add(((g[0] + g[1]) % 2, (g[0] + g[2]) % 2, (g[1] + g[2]) % 2))
    for bits in itertools.product(range(2), repeat=3):
        f = Cochain(TRI, 1, Z2,
                    {(0, 1): bits[0], (0, 2): bits[1], (1, 2): bits[2]})
        res = is_strongly_satisfiable(from_cochain(f, 2))
        if bits in cobs:
            assert res.family is not None and res.witness is None
            U = from_cochain(f, 2)
            for sigma, h in res.family.items():
                assert value(U, h) == 1
            for u in range(3):
                assert {h.symbols[u] for h in res.family.values()} == {0, 1}
        else:
            assert res.family is None
            assert path_value(f, res.witness) != 0


def test_strong_satisfiability_spans_components():
    X = PureComplex(4, 1, [((0, 1), Fraction(1, 2)),
                           ((2, 3), Fraction(1, 2))])
    f = Cochain(X, 1, Z2, {(0, 1): 1, (2, 3): 1})
    res = is_strongly_satisfiable(from_cochain(f, 2))
    assert res.family is not None
    assert res.family[0].symbols in ({0: 0, 1: 1, 2: 0, 3: 1},
                                     {0: 0, 1: 1, 2: 1, 3: 0})


def test_strong_satisfiability_sees_zero_weight_edges():
    # the inconsistent loop runs through an edge of weight zero, so the
    # instance has value one yet is not strongly satisfiable
    X = PureComplex(3, 1, [((0, 1), Fraction(1, 2)),
                           ((1, 2), Fraction(1, 2)),
                           ((0, 2), Fraction(0))])
    f = Cochain(X, 1, Z2, {(0, 1): 1, (1, 2): 0, (0, 2): 0})
    U = from_cochain(f, 2)
    assert value(U, {0: 1, 1: 0, 2: 0}) == 1
    res = is_strongly_satisfiable(U)
    assert res.family is None
    assert path_value(f, res.witness) != 0


def test_affine_generator_determinism_and_extremes():
    X = complete_complex(5, 2)
    planted = [0, 1, 2, 0, 1]
    a = affine_linear_generator(X, 3, planted, Fraction(1, 2), seed=11)
    b = affine_linear_generator(X, 3, planted, Fraction(1, 2), seed=11)
    c = affine_linear_generator(X, 3, planted, Fraction(1, 2), seed=12)
    assert a.constraints == b.constraints
    assert a.constraints != c.constraints
    clean = affine_linear_generator(X, 3, planted, 0, seed="any")
    assert is_strongly_satisfiable(clean).family is not None
    assert value(clean, dict(enumerate(planted))) == 1
    g = Cochain(X, 0, cyclic(3), {(v,): planted[v] for v in range(5)})
    via_cochain = affine_linear_generator(X, 3, g, 0, seed=0)
    assert via_cochain.constraints == clean.constraints
    with pytest.raises(ValueError, match="at least two"):
        affine_linear_generator(X, 1, planted, 0, seed=0)
    with pytest.raises(ValueError, match="rate"):
        affine_linear_generator(X, 3, planted, 2, seed=0)


def test_solve_on_expander_clean_instance():
    X = complete_complex(6, 2)
    U = affine_linear_generator(X, 2, [0, 1, 0, 1, 1, 0], 0, seed="s")
    rep = solve_on_expander(U, X, Fraction(1, 2))
    assert (rep.value, rep.epsilon, rep.certified) == (1, 0, 1)
    assert rep.decoder == "brute"


def test_solve_on_expander_corrupted_instance():
    X = complete_complex(6, 2)
    U = affine_linear_generator(X, 2, [0, 1, 0, 1, 1, 0],
                                Fraction(1, 10), seed=5)
    rep = solve_on_expander(U, X, Fraction(1, 2))
    assert rep.epsilon == weight(delta(to_cochain(U, X)))
    assert rep.certified == 1 - rep.epsilon / Fraction(1, 2)
    assert rep.value >= rep.certified
    cone = auto_cone(X, 0).cone
    rc = solve_on_expander(U, X, Fraction(1, 2), decoder=("cone", cone))
    assert rc.decoder == "cone"
    assert rc.value >= rc.certified


def test_solve_on_expander_gk_decoder_matches_brute():
    X = complete_complex(5, 2)
    D = vertex_star_decomposition(X)
    for seed in range(4):
        U = affine_linear_generator(X, 2, [0] * 5, Fraction(1, 5), seed=seed)
        rg = solve_on_expander(U, X, Fraction(1, 2), decoder=("gk", D))
        rb = solve_on_expander(U, X, Fraction(1, 2), decoder="brute")
        assert rg.decoder == "gk"
        assert rg.value == rb.value
        assert rg.value >= rg.certified


def test_solve_on_expander_rejects_bad_input():
    X = complete_complex(5, 2)
    U = affine_linear_generator(X, 2, [0] * 5, 0, seed=0)
    with pytest.raises(ValueError, match="must be positive"):
        solve_on_expander(U, X, 0)
    with pytest.raises(ValueError, match="unknown decoder"):
        solve_on_expander(U, X, Fraction(1, 2), decoder="anneal")
    with pytest.raises(ValueError, match="needs a Cone"):
        solve_on_expander(U, X, Fraction(1, 2), decoder=("cone", 3))
    with pytest.raises(ValueError, match="needs a GKDecomposition"):
        solve_on_expander(U, X, Fraction(1, 2), decoder=("gk", None))
