"""Exact and sampled coboundary-expansion oracles.

The headline quantity for an edge cochain f is the ratio of the weight of
its triangle coboundary to its distance from the cocycles (cosystolic mode)
or from the coboundaries (coboundary mode); the complex-level constant is
the minimum over all f outside the target set. Enumeration is exact over
rationals, with a bit-packed fast path for two-element coefficient groups.

Also hosts the blow-up reductions: majority flattening of a labeled cochain
and the verifier for the blow-up expansion bound.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import inf, lcm

import numpy as np

from .builders import LabeledComplex, label_graph
from .cochain import Cochain, delta, distance, weight
from .complexes import PureComplex
from .groups import FiniteGroup
from .spectral import edge_expansion

__all__ = [
    "H1Report",
    "h1_bruteforce",
    "H1SampleReport",
    "h1_sampled",
    "triangle_test",
    "FlattenReport",
    "blowup_flatten",
    "BlowupLemmaReport",
    "verify_blowup_lemma",
    "blowup_delta_weight",
    "blowup_distance",
    "blowup_coboundary_distance",
    "blowup_label_eta",
]

_ENUM_CAP = 1 << 24


@dataclass(frozen=True)
class H1Report:
    mode: str
    value: object  # Fraction, or None when unconstrained
    witness: object  # Cochain achieving the value, or None
    unconstrained: bool
    z1_equals_b1: bool
    z1_count: int
    b1_count: int
    cosystole_min_weight: object  # Fraction or None
    edge_count: int
    group_order: int


def _common_denominator(fracs):
    return lcm(*(f.denominator for f in fracs)) if fracs else 1


def _chunk_tables(weights_int, nbits):
    """Lookup tables turning XOR masks into weighted bit counts, 9 bits at
    a time."""
    nchunks = (nbits + 8) // 9
    tables = np.zeros((nchunks, 512), dtype=np.int64)
    for c in range(nchunks):
        for v in range(512):
            acc = 0
            for b in range(9):
                pos = 9 * c + b
                if pos < nbits and (v >> b) & 1:
                    acc += weights_int[pos]
            tables[c, v] = acc
    return tables


def _weighted_bits(arr, tables):
    out = np.zeros(arr.shape, dtype=np.int64)
    for c in range(tables.shape[0]):
        out += tables[c][(arr >> np.uint64(9 * c)) & np.uint64(511)]
    return out


def _z2_layout(X: PureComplex):
    edges = X.faces(1)
    tris = X.faces(2)
    eidx = {e: i for i, (e, _) in enumerate(edges)}
    ew = [w for _, w in edges]
    tw = [w for _, w in tris]
    de = _common_denominator(ew)
    dt = _common_denominator(tw)
    ew_int = [int(w * de) for w in ew]
    tw_int = [int(w * dt) for w in tw]
    tmasks = []
    for (a, b, c), _ in tris:
        m = (1 << eidx[(a, b)]) | (1 << eidx[(b, c)]) | (1 << eidx[(a, c)])
        tmasks.append(m)
    return edges, tris, eidx, ew_int, de, tw_int, dt, tmasks


def _z2_coboundaries(X: PureComplex, eidx):
    """All degree-0 coboundary images as edge bit masks, gauge fixed at the
    last vertex."""
    n = X.vertex_count
    garr = np.arange(1 << (n - 1), dtype=np.uint64)
    cob = np.zeros(garr.shape, dtype=np.uint64)
    for (u, v), i in eidx.items():
        bit = ((garr >> np.uint64(u)) ^ (garr >> np.uint64(v))) & np.uint64(1)
        cob |= bit << np.uint64(i)
    return np.unique(cob)


def _min_ratio_candidates(num, den, keep):
    """Indices worth exact comparison when minimizing num/den over keep."""
    val = np.where(keep, num / np.maximum(den, 1), np.inf)
    floor = val.min()
    if not np.isfinite(floor):
        return []
    return list(np.flatnonzero(val <= floor * (1 + 1e-9) + 1e-300))


def _cochain_from_bits(X, group, edges, bits):
    return Cochain(X, 1, group,
                   {e: (int(bits) >> i) & 1 for i, (e, _) in enumerate(edges)})


def h1_bruteforce(X: PureComplex, group: FiniteGroup,
                  mode: str = "coboundary") -> H1Report:
    """Exact expansion constant by full enumeration of edge cochains.

    coboundary mode measures distance to the coboundaries (all degree-0
    images, one gauge per class); cosystolic mode measures distance to the
    cocycles. Cochains at distance zero from the target set are excluded
    from the minimum; if none remain, the result is the unconstrained
    marker. The report also states whether every cocycle is a coboundary,
    with the least support weight among the stray cocycles when not.
    """
    if mode not in ("coboundary", "cosystolic"):
        raise ValueError(f"unknown mode {mode!r}")
    if X.dimension < 2:
        raise ValueError("expansion needs dimension >= 2")
    n_edges = len(X.faces(1))
    if group.order ** n_edges > _ENUM_CAP:
        raise ValueError("enumeration over "
                         f"{group.order}^{n_edges} cochains exceeds the cap; "
                         "use h1_sampled")
    if group.order == 2:
        return _h1_bruteforce_z2(X, group, mode)
    return _h1_bruteforce_generic(X, group, mode)


def _h1_bruteforce_z2(X, group, mode):
    edges, tris, eidx, ew_int, de, tw_int, dt, tmasks = _z2_layout(X)
    E = len(edges)
    arr = np.arange(1 << E, dtype=np.uint64)
    wt_num = np.zeros(arr.shape, dtype=np.int64)
    for m, w in zip(tmasks, tw_int):
        bits = np.bitwise_count(arr & np.uint64(m)) & np.uint64(1)
        wt_num += w * bits.astype(np.int64)
    z1 = arr[wt_num == 0]
    b1 = _z2_coboundaries(X, eidx)
    if not np.isin(b1, z1).all():
        raise AssertionError("a coboundary failed the cocycle check")
    z1_eq_b1 = len(z1) == len(b1)
    tables = _chunk_tables(ew_int, E)
    cosys_min = None
    if not z1_eq_b1:
        stray = z1[~np.isin(z1, b1)]
        support = _weighted_bits(stray, tables)
        cosys_min = Fraction(int(support.min()), de)
    target = z1 if mode == "cosystolic" else b1
    dist_num = np.full(arr.shape, np.iinfo(np.int64).max, dtype=np.int64)
    for m in target:
        np.minimum(dist_num, _weighted_bits(arr ^ m, tables), out=dist_num)
    keep = dist_num > 0
    best = None
    witness_bits = None
    for j in _min_ratio_candidates(wt_num, dist_num, keep):
        exact = Fraction(int(wt_num[j]), dt) / Fraction(int(dist_num[j]), de)
        if best is None or exact < best:
            best, witness_bits = exact, arr[j]
    unconstrained = not bool(keep.any())
    witness = None if witness_bits is None else _cochain_from_bits(
        X, group, edges, witness_bits)
    return H1Report(mode=mode, value=best, witness=witness,
                    unconstrained=unconstrained, z1_equals_b1=z1_eq_b1,
                    z1_count=len(z1), b1_count=len(b1),
                    cosystole_min_weight=cosys_min,
                    edge_count=E, group_order=2)


def _h1_bruteforce_generic(X, group, mode):
    edges = X.faces(1)
    tris = X.faces(2)
    eidx = {e: i for i, (e, _) in enumerate(edges)}
    ew = [w for _, w in edges]
    tw = [w for _, w in tris]
    q = group.order
    # slots: delta f on sorted (a,b,c) multiplies f(ab), f(bc), inverse f(ac)
    slots = [(eidx[(a, b)], eidx[(b, c)], eidx[(a, c)])
             for (a, b, c), _ in tris]

    def delta_weight(f):
        out = Fraction(0)
        for (i, j, k), w in zip(slots, tw):
            x = group.mul(group.mul(f[i], f[j]), group.inv(f[k]))
            if x != 0:
                out += w
        return out

    def dist_sum(f, g):
        out = Fraction(0)
        for i, w in enumerate(ew):
            if f[i] != g[i]:
                out += w
        return out

    all_f = list(itertools.product(range(q), repeat=len(edges)))
    z1 = [f for f in all_f if delta_weight(f) == 0]
    b1 = set()
    n = X.vertex_count
    for g in itertools.product(range(q), repeat=n - 1):
        gg = g + (0,)
        b1.add(tuple(group.mul(gg[u], group.inv(gg[v])) for (u, v), _ in edges))
    if not b1 <= set(z1):
        raise AssertionError("a coboundary failed the cocycle check")
    z1_eq_b1 = len(z1) == len(b1)
    cosys_min = None
    if not z1_eq_b1:
        strays = [f for f in z1 if f not in b1]
        cosys_min = min(sum((w for x, w in zip(f, ew) if x != 0),
                            start=Fraction(0)) for f in strays)
    target = z1 if mode == "cosystolic" else sorted(b1)
    best = None
    witness_f = None
    any_positive = False
    for f in all_f:
        d = min(dist_sum(f, m) for m in target)
        if d == 0:
            continue
        any_positive = True
        ratio = delta_weight(f) / d
        if best is None or ratio < best:
            best, witness_f = ratio, f
    witness = None
    if witness_f is not None:
        witness = Cochain(X, 1, group,
                          {e: witness_f[i] for i, (e, _) in enumerate(edges)})
    return H1Report(mode=mode, value=best, witness=witness,
                    unconstrained=not any_positive, z1_equals_b1=z1_eq_b1,
                    z1_count=len(z1), b1_count=len(b1),
                    cosystole_min_weight=cosys_min,
                    edge_count=len(edges), group_order=q)


@dataclass(frozen=True)
class H1SampleReport:
    value: object  # min observed ratio, None when no informative sample
    witness: object
    trials: int
    seed: object
    stray_cocycles_seen: int
    exact_distance: bool


def h1_sampled(X: PureComplex, group: FiniteGroup, trials: int, seed,
               decoder=None, rng_factory=None) -> H1SampleReport:
    """Randomized search for cochains of small expansion ratio.

    Each trial draws one uniform group element per canonical edge, in sorted
    edge order. Distances to the coboundaries are exact via gauge-fixed
    enumeration unless a decoder (cochain -> degree-0 cochain) is supplied,
    in which case the decoded coboundary gives an upper estimate of the
    distance and the reported ratios are heuristic.
    """
    import random
    if X.dimension < 2:
        raise ValueError("expansion needs dimension >= 2")
    rng = (rng_factory or random.Random)(seed)
    edges = X.faces(1)
    E = len(edges)
    q = group.order
    use_enum = decoder is None
    if use_enum and q ** (X.vertex_count - 1) > _ENUM_CAP:
        raise ValueError("no feasible distance oracle: supply a decoder")
    z2_fast = use_enum and q == 2 and E <= 64
    if z2_fast:
        _, _, eidx, ew_int, de, tw_int, dt, tmasks = _z2_layout(X)
        b1 = _z2_coboundaries(X, eidx)
        tables = _chunk_tables(ew_int, E)
    elif use_enum:
        b1_list = set()
        for g in itertools.product(range(q), repeat=X.vertex_count - 1):
            gg = g + (0,)
            b1_list.add(tuple(group.mul(gg[u], group.inv(gg[v]))
                              for (u, v), _ in edges))
        b1_list = sorted(b1_list)
    best = None
    witness = None
    strays = 0
    for _ in range(trials):
        draws = [rng.randrange(q) for _ in range(E)]
        if z2_fast:
            fbits = 0
            for i, x in enumerate(draws):
                fbits |= x << i
            wt = Fraction(0, 1)
            wnum = 0
            for m, w in zip(tmasks, tw_int):
                if (int(fbits & m).bit_count()) & 1:
                    wnum += w
            wt = Fraction(wnum, dt)
            d = int(_weighted_bits(np.uint64(fbits) ^ b1, tables).min())
            dist_f = Fraction(d, de)
        else:
            f = Cochain(X, 1, group,
                        {e: draws[i] for i, (e, _) in enumerate(edges)})
            wt = weight(delta(f))
            if use_enum:
                dist_f = min(
                    sum((w for i, (_, w) in enumerate(edges)
                         if f.values[edges[i][0]] != m[i]), start=Fraction(0))
                    for m in b1_list)
            else:
                g = decoder(f)
                dist_f = distance(f, delta(g))
        if dist_f == 0:
            continue
        if wt == 0:
            strays += 1
        ratio = wt / dist_f
        if best is None or ratio < best:
            best = ratio
            if z2_fast:
                witness = _cochain_from_bits(X, group, edges, fbits)
            else:
                witness = f
    return H1SampleReport(value=best, witness=witness, trials=trials,
                          seed=seed, stray_cocycles_seen=strays,
                          exact_distance=use_enum)


def triangle_test(f: Cochain, trials: int, seed) -> Fraction:
    """Empirical weight of the coboundary: sample triangles by measure and a
    uniform orientation, and count products around them that miss the
    identity."""
    import random
    if f.degree != 1:
        raise ValueError("expects an edge cochain")
    if f.X.dimension < 2:
        raise ValueError("needs triangles")
    rng = random.Random(seed)
    tris = f.X.faces(2)
    denom = _common_denominator([w for _, w in tris])
    cumulative = []
    acc = 0
    for t, w in tris:
        acc += int(w * denom)
        cumulative.append((acc, t))
    G = f.group
    bad = 0
    for _ in range(trials):
        r = rng.randrange(denom)
        t = next(t for c, t in cumulative if r < c)
        v, u, w = rng.choice(list(itertools.permutations(t)))
        x = G.mul(G.mul(f(v, u), f(u, w)), f(w, v))
        if x != 0:
            bad += 1
    return Fraction(bad, trials) if trials else Fraction(0)


# -- blow-up machinery --------------------------------------------------------


def _blowup_triangle_value(Xb: LabeledComplex, group, values, key):
    (e1, l1), (e2, l2), (e3, l3) = Xb.triangle_edges(key)
    x = group.mul(values[(e1, l1)], values[(e2, l2)])
    return group.mul(x, group.inv(values[(e3, l3)]))


def blowup_delta_weight(Xb: LabeledComplex, group, values) -> Fraction:
    out = Fraction(0)
    for key, w in Xb.triangles.items():
        if w and _blowup_triangle_value(Xb, group, values, key) != 0:
            out += w
    return out


def blowup_distance(Xb: LabeledComplex, group, v1, v2) -> Fraction:
    out = Fraction(0)
    for le, w in Xb.edge_weights.items():
        if w and v1[le] != v2[le]:
            out += w
    return out


def blowup_coboundary_distance(Xb: LabeledComplex, group, values):
    """Exact distance to the label-independent coboundaries, with the best
    vertex cochain (gauge fixed at the last vertex)."""
    n = Xb.vertex_count
    if group.order ** (n - 1) > _ENUM_CAP:
        raise ValueError("gauge enumeration exceeds the cap")
    best = None
    best_g = None
    for g in itertools.product(range(group.order), repeat=n - 1):
        gg = g + (0,)
        d = Fraction(0)
        for ((u, v), lab), w in Xb.edge_weights.items():
            if w and values[((u, v), lab)] != group.mul(gg[u], group.inv(gg[v])):
                d += w
        if best is None or d < best:
            best, best_g = d, gg
    return best, best_g


@dataclass(frozen=True)
class FlattenReport:
    majority: dict  # labeled edge -> element (constant across labels)
    base_cochain: Cochain
    dist_to_majority: Fraction
    wt_delta_majority: Fraction
    wt_delta_input: Fraction


def blowup_flatten(Xb: LabeledComplex, group: FiniteGroup,
                   values) -> FlattenReport:
    """Majority vote per base edge over its labels, weighted by the label
    measure (ties to the smallest element). The result is label-independent
    and drops to a base cochain whose coboundary weight matches; the
    majority's coboundary weight never exceeds three times the disagreement
    probability plus the input's coboundary weight."""
    maj = {}
    base_edges = {}
    for e, labs in Xb.edge_labels.items():
        tallies = {}
        for lab in labs:
            w = Xb.edge_weights[(e, lab)]
            x = values[(e, lab)]
            tallies[x] = tallies.get(x, Fraction(0)) + w
        winner = max(sorted(tallies), key=lambda x: (tallies[x], -x))
        base_edges[e] = winner
        for lab in labs:
            maj[(e, lab)] = winner
    base = Cochain(Xb.base, 1, group, base_edges)
    d = blowup_distance(Xb, group, values, maj)
    wt_m = blowup_delta_weight(Xb, group, maj)
    wt_f = blowup_delta_weight(Xb, group, values)
    if wt_m != weight(delta(base)):
        raise AssertionError("flattened coboundary weight mismatch")
    if wt_m > 3 * d + wt_f:
        raise AssertionError("majority coboundary bound violated")
    return FlattenReport(majority=maj, base_cochain=base, dist_to_majority=d,
                         wt_delta_majority=wt_m, wt_delta_input=wt_f)


def blowup_label_eta(Xb: LabeledComplex):
    """Least label-graph expansion over base edges, in the one-directional
    normalization (half the symmetric cut value). Single-label edges mix
    instantly and are skipped; a fully flat blow-up reports infinity."""
    etas = []
    for e in Xb.edge_labels:
        rep = edge_expansion(label_graph(Xb, e))
        if rep.eta != inf:
            etas.append(rep.eta / 2)
    return min(etas) if etas else inf


@dataclass(frozen=True)
class BlowupLemmaReport:
    holds: bool
    worst_ratio: object  # Fraction or None when every checked f had wt 0
    coefficient: object  # bound on dist/wt; inf when eta vanishes
    eta: object  # least directed label-graph expansion; inf when all flat
    beta: Fraction
    exhaustive: bool
    checked: int
    counterexample: object


def verify_blowup_lemma(Xb: LabeledComplex, group: FiniteGroup,
                        trials: int = 2000, seed=0) -> BlowupLemmaReport:
    """Check dist(f, lifted coboundaries) <= (5 / (eta * beta)) * wt(delta f)
    over the blow-up, exhaustively when feasible.

    eta is the least label-graph expansion in the one-directional
    normalization (half the symmetric cut value); edges with a single label
    mix instantly and are skipped. beta is the base complex's exact
    coboundary expansion. Fully flat blow-ups are compared against the base
    bound itself. The outcome is reported, never asserted: a blow-up with a
    poorly expanding label graph is expected to fail.
    """
    import random
    base_rep = h1_bruteforce(Xb.base, group, "coboundary")
    if base_rep.value is None:
        raise ValueError("base expansion is unconstrained")
    beta = base_rep.value
    eta = blowup_label_eta(Xb)
    if eta == inf:
        coefficient = Fraction(1) / beta
    elif eta == 0:
        coefficient = inf
    else:
        coefficient = Fraction(5) / (eta * beta)
    led = sorted(Xb.edge_weights)
    E = len(led)
    q = group.order
    exhaustive = q ** E <= _ENUM_CAP and q ** E <= 1 << 18
    rng = random.Random(seed)
    worst = None
    holds = True
    counterexample = None
    checked = 0
    if exhaustive:
        sweep = itertools.product(range(q), repeat=E)
    else:
        sweep = ([rng.randrange(q) for _ in range(E)] for _ in range(trials))
    for draws in sweep:
        values = {le: x for le, x in zip(led, draws)}
        wt = blowup_delta_weight(Xb, group, values)
        d, _ = blowup_coboundary_distance(Xb, group, values)
        checked += 1
        if wt == 0:
            if d > 0:
                holds = False
                counterexample = dict(values)
            continue
        ratio = d / wt
        if worst is None or ratio > worst:
            worst = ratio
        if coefficient != inf and ratio > coefficient:
            holds = False
            if counterexample is None:
                counterexample = dict(values)
    return BlowupLemmaReport(holds=holds, worst_ratio=worst,
                             coefficient=coefficient, eta=eta, beta=beta,
                             exhaustive=exhaustive, checked=checked,
                             counterexample=counterexample)
