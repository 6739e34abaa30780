"""Cone certificates: loop rewriting, validation, decoding, and bounds."""
import itertools
import random
from fractions import Fraction

import pytest

from hdx import (
    Cochain,
    Cone,
    Contraction,
    Move,
    PureComplex,
    SearchBudget,
    apply_move,
    auto_cone,
    bt_reduce,
    build_cone_complete_faces,
    compose_path,
    cone_decode,
    cone_family_bound,
    complete_complex,
    complete_partite,
    cyclic,
    delta,
    distance,
    h1_bruteforce,
    path_value,
    random_cochain,
    reverse_contraction,
    reverse_path,
    search_contraction,
    sym,
    validate_cone,
)

TRI = complete_complex(3, 2)
TRI_EDGES = {e for e, _ in TRI.faces(1)}
TRI_TRIS = {t for t, _ in TRI.faces(2)}


def test_compose_and_reverse_paths():
    assert compose_path((0, 1), (1, 2, 3)) == (0, 1, 2, 3)
    assert reverse_path((0, 1, 2)) == (2, 1, 0)
    with pytest.raises(ValueError):
        compose_path((0, 1), (2, 3))


def test_path_value_multiplies_left_to_right():
    Z3 = cyclic(3)
    f = Cochain(TRI, 1, Z3, {(0, 1): 1, (1, 2): 1, (0, 2): 0})
    assert path_value(f, (0, 1, 2)) == 2
    assert path_value(f, (2, 1, 0)) == 1  # reversed walk gives the inverse
    assert path_value(f, (0,)) == 0


def test_bt_reduce_nested():
    reduced, moves = bt_reduce((0, 1, 2, 1, 0))
    assert reduced == (0,)
    cur = (0, 1, 2, 1, 0)
    for m in moves:
        cur = apply_move(cur, m, TRI_EDGES, TRI_TRIS)
    assert cur == (0,)
    assert bt_reduce((0, 1, 2, 0)) == ((0, 1, 2, 0), [])


def test_apply_move_roundtrip():
    loop = (0, 1, 0)
    grown = apply_move(loop, Move("TR-expand", 0, (0, 1, 2)),
                       TRI_EDGES, TRI_TRIS)
    assert grown == (0, 2, 1, 0)
    back = apply_move(grown, Move("TR-contract", 0, (0, 1, 2)),
                      TRI_EDGES, TRI_TRIS)
    assert back == loop
    inserted = apply_move(loop, Move("BT-insert", 0, vertex=2),
                          TRI_EDGES, TRI_TRIS)
    assert inserted == (0, 2, 0, 1, 0)


def test_apply_move_rejects_illegal_rewrites():
    with pytest.raises(ValueError, match="no backtrack"):
        apply_move((0, 1, 2, 0), Move("BT-delete", 0), TRI_EDGES, TRI_TRIS)
    with pytest.raises(ValueError, match="is not an edge"):
        apply_move((0, 1, 0), Move("BT-insert", 0, vertex=7),
                   TRI_EDGES, TRI_TRIS)
    with pytest.raises(ValueError, match="is not a triangle"):
        apply_move((0, 1, 0), Move("TR-expand", 0, (0, 1, 3)),
                   TRI_EDGES, TRI_TRIS)
    with pytest.raises(ValueError, match="does not extend"):
        X = complete_complex(4, 2)
        apply_move((0, 1, 0), Move("TR-expand", 0, (0, 2, 3)),
                   {e for e, _ in X.faces(1)}, {t for t, _ in X.faces(2)})
    with pytest.raises(ValueError, match="not distinct"):
        apply_move((0, 1, 0), Move("TR-contract", 0, (0, 1, 2)),
                   TRI_EDGES, TRI_TRIS)
    with pytest.raises(ValueError, match="mismatches"):
        apply_move((0, 1, 2, 0), Move("TR-contract", 0, (0, 1, 3)),
                   TRI_EDGES, TRI_TRIS)
    with pytest.raises(ValueError, match="unknown move kind"):
        apply_move((0, 1, 0), Move("TR-rotate", 0), TRI_EDGES, TRI_TRIS)
    with pytest.raises(ValueError, match="out of range"):
        apply_move((0, 1, 0), Move("TR-expand", 5, (0, 1, 2)),
                   TRI_EDGES, TRI_TRIS)


def triangle_cone():
    return Cone(
        v0=0,
        paths={0: (0,), 1: (0, 1), 2: (0, 2)},
        contractions={
            (0, 1): Contraction(loops=((0, 1, 0),), moves=()),
            (0, 2): Contraction(loops=((0, 2, 0),), moves=()),
            (1, 2): Contraction(
                loops=((0, 1, 2, 0), (0, 2, 0)),
                moves=((Move("TR-contract", 0, (0, 1, 2)),),),
            ),
        },
    )


def test_validate_cone_accepts_triangle_cone():
    rep = validate_cone(TRI, triangle_cone())
    assert rep.diameter == 1
    assert rep.triangle_usage == {(0, 1, 2): 1}
    assert rep.steps_per_edge[(1, 2)] == 1


def test_validate_cone_failure_modes():
    C = triangle_cone()

    def patched(**kw):
        return Cone(**{**C.__dict__, **kw})

    with pytest.raises(ValueError, match="base vertex walk"):
        validate_cone(TRI, patched(paths={**C.paths, 0: (0, 1, 0)}))
    with pytest.raises(ValueError, match="wrong endpoints"):
        validate_cone(TRI, patched(paths={**C.paths, 1: (0, 2)}))
    with pytest.raises(ValueError, match="contraction for non-edge"):
        bad = dict(C.contractions)
        bad[(0, 3)] = Contraction(loops=((0, 3, 3, 0),), moves=())
        validate_cone(TRI, patched(contractions=bad))
    with pytest.raises(ValueError, match="two contractions"):
        bad = dict(C.contractions)
        bad[(1, 0)] = C.contractions[(0, 1)]
        validate_cone(TRI, patched(contractions=bad))
    with pytest.raises(ValueError, match="first loop"):
        bad = dict(C.contractions)
        bad[(0, 1)] = Contraction(loops=((0, 1, 2, 1, 0),), moves=())
        validate_cone(TRI, patched(contractions=bad))
    with pytest.raises(ValueError, match="length mismatch"):
        bad = dict(C.contractions)
        bad[(0, 1)] = Contraction(loops=((0, 1, 0), (0,)), moves=())
        validate_cone(TRI, patched(contractions=bad))
    with pytest.raises(ValueError, match="0 triangle exchanges"):
        bad = dict(C.contractions)
        bad[(0, 1)] = Contraction(loops=((0, 1, 0), (0,)),
                                  moves=((Move("BT-delete", 0),),))
        validate_cone(TRI, patched(contractions=bad))
    with pytest.raises(ValueError, match="do not reach"):
        bad = dict(C.contractions)
        bad[(1, 2)] = Contraction(loops=((0, 1, 2, 0), (0,)),
                                  moves=((Move("TR-contract", 0, (0, 1, 2)),),))
        validate_cone(TRI, patched(contractions=bad))
    with pytest.raises(ValueError, match="final loop"):
        bad = dict(C.contractions)
        bad[(1, 2)] = Contraction(loops=((0, 1, 2, 0),), moves=())
        validate_cone(TRI, patched(contractions=bad))
    with pytest.raises(ValueError, match="edges without contractions"):
        bad = dict(C.contractions)
        del bad[(1, 2)]
        validate_cone(TRI, patched(contractions=bad))


def test_validate_cone_reports_move_location():
    C = triangle_cone()
    bad = dict(C.contractions)
    bad[(1, 2)] = Contraction(loops=((0, 1, 2, 0), (0, 2, 0)),
                              moves=((Move("TR-contract", 0, (0, 1, 3)),),))
    with pytest.raises(ValueError,
                       match=r"edge \(1,2\) step 0 move 0: .*mismatches"):
        validate_cone(TRI, Cone(v0=0, paths=C.paths, contractions=bad))


def test_auto_cone_triangle():
    res = auto_cone(TRI, 0)
    assert res.failed_edges == ()
    assert res.diameter == 1
    assert set(res.statuses.values()) == {"found"}
    fb = cone_family_bound(TRI, res.cone)
    assert (fb.p, fb.R, fb.bound) == (1, 1, 1)
    assert fb.support_edge_mass == Fraction(1, 3)
    assert fb.distribution == {(0, 1, 2): 1}


def test_auto_cone_bound_is_sound():
    # certified lower bound never beats the exact expansion constant
    for n in (4, 5):
        X = complete_complex(n, 2)
        res = auto_cone(X, 0)
        assert res.failed_edges == ()
        fb = cone_family_bound(X, res.cone)
        assert h1_bruteforce(X, cyclic(2)).value >= fb.bound


def test_cone_family_bound_complete_four():
    X = complete_complex(4, 2)
    res = auto_cone(X, 0)
    fb = cone_family_bound(X, res.cone)
    assert (fb.p, fb.R, fb.bound) == (Fraction(3, 4), 1, Fraction(3, 4))
    # symmetrizing over the full vertex symmetry evens the distribution out
    gens = [[1, 0, 2, 3], [1, 2, 3, 0]]
    fbs = cone_family_bound(X, res.cone, k=2, generators=gens)
    assert (fbs.p, fbs.bound, fbs.closed_form) == (1, 1, 1)


def test_cone_family_bound_rejects_bad_input():
    with pytest.raises(ValueError, match="empty cone family"):
        cone_family_bound(TRI, [])
    # cones over 1-dimensional complexes validate but certify no expansion
    P = PureComplex(3, 1, [((0, 1), Fraction(1, 2)), ((1, 2), Fraction(1, 2))])
    C = Cone(v0=0, paths={0: (0,), 1: (0, 1), 2: (0, 1, 2)},
             contractions={
                 (0, 1): Contraction(loops=((0, 1, 0),), moves=()),
                 (1, 2): Contraction(loops=((0, 1, 2, 1, 0),), moves=()),
             })
    assert validate_cone(P, C).diameter == 0
    with pytest.raises(ValueError, match="outside"):
        cone_family_bound(P, C)
    # a partial cone whose contractions are pure backtracking
    bt_only = Cone(v0=0, paths={0: (0,), 1: (0, 1)},
                   contractions={(0, 1): Contraction(loops=((0, 1, 0),),
                                                     moves=())})
    with pytest.raises(ValueError, match="exchanges no triangles"):
        cone_family_bound(TRI, bt_only)
    # permutation moving a face outside the complex
    O = complete_partite([2, 2, 2])
    resO = auto_cone(O, 0)
    with pytest.raises(ValueError, match="does not preserve faces"):
        cone_family_bound(O, resO.cone, generators=[[1, 2, 0, 3, 4, 5]])


def test_cone_decode_inverts_coboundaries():
    X = complete_complex(4, 2)
    C = auto_cone(X, 0).cone
    Z3 = cyclic(3)
    for g_vals in itertools.product(range(3), repeat=4):
        g = Cochain(X, 0, Z3, {(v,): x for v, x in enumerate(g_vals)})
        f = delta(g)
        got = cone_decode(C, f)
        assert distance(f, delta(got)) == 0
        assert got.values[(0,)] == 0  # gauge pinned at the base vertex


def test_cone_decode_edge_invariant():
    # edges whose exchanged triangles all carry trivial coboundary are
    # reproduced exactly by the decoded assignment
    X = complete_complex(4, 2)
    C = auto_cone(X, 0).cone
    Z3 = cyclic(3)
    rng = random.Random(0)
    for _ in range(25):
        f = random_cochain(X, 1, Z3, rng)
        df = delta(f)
        dg = delta(cone_decode(C, f))
        for (a, b), contr in C.contractions.items():
            if all(df.values[t] == 0 for t in contr.triangles()):
                assert dg(a, b) == f(a, b)


def test_cone_decode_requires_full_paths():
    C = triangle_cone()
    partial = Cone(v0=0, paths={0: (0,), 1: (0, 1)},
                   contractions=C.contractions)
    f = Cochain(TRI, 1, cyclic(2), {e: 0 for e in TRI_EDGES})
    with pytest.raises(ValueError, match="no walk to vertex 2"):
        cone_decode(partial, f)


def test_reverse_contraction_validates_as_opposite_orientation():
    X = complete_complex(4, 2)
    C = auto_cone(X, 0).cone
    rev = Cone(v0=C.v0, paths=C.paths,
               contractions={(b, a): reverse_contraction(c)
                             for (a, b), c in C.contractions.items()})
    rep = validate_cone(X, rev)
    assert rep.diameter == validate_cone(X, C).diameter
    for (a, b), c in C.contractions.items():
        assert rev.contractions[(b, a)].steps == c.steps


def test_search_contraction_statuses():
    hollow = PureComplex(3, 1, [((0, 1), Fraction(1, 3)),
                                ((0, 2), Fraction(1, 3)),
                                ((1, 2), Fraction(1, 3))])
    status, contr = search_contraction(hollow, (0, 1, 2, 0))
    assert (status, contr) == ("exhausted", None)
    status, contr = search_contraction(
        complete_complex(5, 2), (0, 1, 2, 3, 0),
        SearchBudget(max_loop_len=4, max_states=3))
    assert (status, contr) == ("budget", None)
    status, contr = search_contraction(complete_complex(5, 2), (0, 1, 0))
    assert status == "found" and contr.steps == 0


def test_search_contraction_certificates_replay():
    X = complete_complex(5, 2)
    status, contr = search_contraction(X, (0, 1, 2, 3, 4, 0))
    assert status == "found"
    edges = {e for e, _ in X.faces(1)}
    tris = {t for t, _ in X.faces(2)}
    for step, src, dst in zip(contr.moves, contr.loops, contr.loops[1:]):
        cur = src
        for m in step:
            cur = apply_move(cur, m, edges, tris)
        assert cur == dst
    assert bt_reduce(contr.loops[-1])[0] == (0,)


def test_auto_cone_reports_failures():
    # a tube complex: triangles never fill the waist loop
    tris = [(0, 1, 3), (1, 3, 4), (1, 2, 4), (2, 4, 5), (0, 2, 5), (0, 3, 5)]
    w = Fraction(1, 6)
    X = PureComplex(6, 2, [(t, w) for t in tris])
    res = auto_cone(X, 0, SearchBudget(max_loop_len=8, max_states=2000))
    assert res.cone is None and res.diameter is None
    assert res.failed_edges
    assert all(res.statuses[e] in ("exhausted", "budget")
               for e in res.failed_edges)


def test_build_cone_complete_faces_small():
    cone, FX = build_cone_complete_faces(6, 0)
    assert FX.vertex_count == 6
    rep = validate_cone(FX, cone)
    assert rep.diameter == 3
    fb = cone_family_bound(FX, cone, k=5)
    assert (fb.p, fb.R, fb.bound) == (Fraction(1, 4), 3, Fraction(1, 12))
    assert fb.closed_form == Fraction(1, 20)


def test_build_cone_complete_faces_pairs():
    cone, FX = build_cone_complete_faces(12, 1)
    assert FX.vertex_count == 66
    rep = validate_cone(FX, cone)
    assert rep.diameter == 5


def test_build_cone_complete_faces_rejects_small_n():
    with pytest.raises(ValueError, match="need n >= 12 for r=1"):
        build_cone_complete_faces(6, 1)
    with pytest.raises(ValueError, match="need n >= 6 for r=0"):
        build_cone_complete_faces(5, 0)
