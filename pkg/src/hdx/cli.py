"""Command line front end: build artifacts, run experiment suites, emit
deterministic JSON reports, and validate artifacts on disk.

Reports are byte-identical across reruns with the same seed and inputs:
rationals print as "p/q" strings, floats are rounded to nine significant
digits, keys are sorted, and wall time goes to stderr rather than into the
report. Each suite's report names the acceptance check it certifies.
"""
from __future__ import annotations

import hashlib
import json
import random
import sys
import time
from fractions import Fraction
from math import comb

import click

from . import __version__
from .builders import (LabeledComplex, blowup, complete_complex,
                       complete_partite, faces_complex, spherical_building)
from .cochain import Cochain
from .complexes import (PureComplex, WeightedGraph, canonical_face,
                        dumps_complex, loads_complex)
from .cones import (Cone, Contraction, Move, SearchBudget, auto_cone,
                    build_cone_complete_faces, cone_family_bound,
                    validate_cone)
from .gk import GKDecomposition, check_hypotheses, vertex_star_decomposition
from .groups import cyclic, sym
from .oracle import h1_bruteforce
from .spectral import lambda2, local_spectral_profile, swap_walk
from .ug import UGInstance, affine_linear_generator, solve_on_expander

__all__ = [
    "main",
    "run_experiment",
    "report_text",
    "validate_artifact",
    "parse_group",
    "dumps_cone",
    "loads_cone",
    "dumps_ug",
    "loads_ug",
    "dumps_cochain",
    "loads_cochain",
    "dumps_decomposition",
    "loads_decomposition",
]

_SYM_CAP = 6  # table size grows as (l!)^2


def parse_group(text: str):
    """Group spec: z2, z:m, or sym:l. Returns (group, canonical spelling)."""
    t = text.strip().lower()
    if t == "z2":
        return cyclic(2), "z2"
    if t.startswith("z:"):
        m = int(t[2:])
        if m < 2:
            raise ValueError("cyclic group needs order >= 2")
        return cyclic(m), f"z:{m}"
    if t.startswith("sym:"):
        l = int(t[4:])
        if not 2 <= l <= _SYM_CAP:
            raise ValueError(f"symmetric group degree must lie in "
                             f"[2, {_SYM_CAP}]")
        return sym(l), f"sym:{l}"
    raise ValueError(f"unknown group spec {text!r}; use z2, z:m, or sym:l")


# -- deterministic JSON -------------------------------------------------------


def _jsonable(x):
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, float):
        if x != x or x in (float("inf"), float("-inf")):
            return str(x)
        return float(f"{x:.9g}")
    if isinstance(x, bool) or x is None or isinstance(x, (int, str)):
        return x
    if isinstance(x, dict):
        return {_key(k): _jsonable(v) for k, v in sorted(
            x.items(), key=lambda kv: _key(kv[0]))}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    raise TypeError(f"cannot serialize {type(x).__name__}")


def _key(k):
    if isinstance(k, tuple):
        return ",".join(str(v) for v in k)
    return str(k)


def report_text(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def _envelope(role, name, params, seed, criteria, holds, results):
    inputs = _jsonable({"name": name, "params": params or {}, "seed": seed})
    blob = json.dumps(inputs, sort_keys=True, separators=(",", ":"))
    return {
        role: name,
        "version": __version__,
        "inputs": inputs,
        "input_hash": hashlib.sha256(blob.encode()).hexdigest()[:16],
        "criteria": list(criteria),
        "holds": bool(holds),
        "results": _jsonable(results),
    }


def _emit(ctx, report, report_path, t0):
    text = report_text(report)
    if report_path:
        with open(report_path, "w") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)
    click.echo(f"wall-time {time.monotonic() - t0:.3f}s", err=True)
    ctx.exit(0 if report["holds"] else 1)


def _load_complex_file(path) -> PureComplex:
    with open(path) as fh:
        return loads_complex(fh.read())


# -- experiment suites --------------------------------------------------------


def _suite_kneser_spectra(params, seed):
    lo = int(params.get("n_min", 5))
    hi = int(params.get("n_max", 8))
    if not 5 <= lo <= hi:
        raise ValueError("need 5 <= n_min <= n_max")
    rows = []
    holds = True
    for n in range(lo, hi + 1):
        X = complete_complex(n, 3)
        lam = lambda2(swap_walk(X, 1, 1)).lambda2
        exact = Fraction(1, comb(n - 2, 2))
        theorem = 4 * local_spectral_profile(X).max_abs_lambda
        ok = abs(lam - float(exact)) <= 1e-9 and lam <= theorem + 1e-9
        holds = holds and ok
        row = {"n": n, "pairs": comb(n, 2), "lambda2": lam, "exact": exact,
               "theorem_bound": theorem, "ok": ok}
        if n == 5:
            row["graph"] = "petersen"
        rows.append(row)
    return {"table": rows, "tolerance": 1e-9}, holds, [8]


def _suite_triangle_h1(params, seed):
    X = complete_complex(3, 2)
    rep = h1_bruteforce(X, cyclic(2), mode="cosystolic")
    holds = rep.value == 3
    body = {
        "h1_cosystolic": rep.value,
        "expected": Fraction(3),
        "z1_equals_b1": rep.z1_equals_b1,
        "z1_count": rep.z1_count,
        "b1_count": rep.b1_count,
    }
    return body, holds, [2]


def _sym_generators(n):
    swap = list(range(n))
    swap[0], swap[1] = 1, 0
    cycle = list(range(1, n)) + [0]
    return [tuple(swap), tuple(cycle)]


def _induced_vertex_perms(FX: PureComplex, base_perms):
    ids = {FX.labels[v]: v for v in range(FX.vertex_count)}
    out = []
    for p in base_perms:
        out.append(tuple(ids[canonical_face(p[x] for x in FX.labels[v])]
                         for v in range(FX.vertex_count)))
    return out


def _suite_faces_cone(params, seed):
    n = int(params.get("n", 12))
    r = int(params.get("r", 1))
    try:
        cone, FX = build_cone_complete_faces(n, r)
    except ValueError as exc:
        return {"n": n, "r": r, "error": str(exc)}, False, [7]
    val = validate_cone(FX, cone)
    gens = _induced_vertex_perms(FX, _sym_generators(n))
    fam = cone_family_bound(FX, [cone], k=2, generators=gens)
    target = Fraction(1, 5)
    holds = val.diameter <= 5 and fam.bound >= target
    body = {
        "n": n,
        "r": r,
        "vertices": FX.vertex_count,
        "dimension": FX.dimension,
        "diameter": val.diameter,
        "diameter_target": 5,
        "p": fam.p,
        "R": fam.R,
        "bound": fam.bound,
        "bound_target": target,
        "closed_form": fam.closed_form,
    }
    return body, holds, [7]


_SUITES = {
    "kneser-spectra": _suite_kneser_spectra,
    "triangle-h1": _suite_triangle_h1,
    "faces-cone": _suite_faces_cone,
}


def run_experiment(name: str, params: dict = None, seed: int = 0) -> dict:
    """Run a named suite and wrap its results in the report envelope."""
    if name not in _SUITES:
        raise ValueError(f"unknown suite {name!r}; "
                         f"choose from {sorted(_SUITES)}")
    body, holds, criteria = _SUITES[name](dict(params or {}), seed)
    return _envelope("suite", name, params, seed, criteria, holds, body)


# -- artifact serialization ---------------------------------------------------


def _complex_doc(X: PureComplex) -> dict:
    return json.loads(dumps_complex(X))


def dumps_cone(X: PureComplex, C: Cone) -> str:
    contractions = {}
    for (a, b), contr in sorted(C.contractions.items()):
        steps = []
        for step in contr.moves:
            docs = []
            for mv in step:
                doc = {"kind": mv.kind, "pos": mv.pos}
                if mv.triangle is not None:
                    doc["triangle"] = list(mv.triangle)
                if mv.vertex is not None:
                    doc["vertex"] = mv.vertex
                docs.append(doc)
            steps.append(docs)
        contractions[f"{a},{b}"] = {
            "loops": [list(l) for l in contr.loops],
            "moves": steps,
        }
    doc = {
        "kind": "cone",
        "complex": _complex_doc(X),
        "v0": C.v0,
        "paths": [list(C.paths[v]) for v in sorted(C.paths)],
        "contractions": contractions,
    }
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _parse_move(doc) -> Move:
    kinds = {"BT-insert", "BT-delete", "TR-expand", "TR-contract"}
    if doc["kind"] not in kinds:
        raise ValueError(f"unknown move kind {doc['kind']!r}")
    tri = doc.get("triangle")
    return Move(doc["kind"], int(doc["pos"]),
                triangle=None if tri is None else canonical_face(tri),
                vertex=doc.get("vertex"))


def loads_cone(text: str):
    doc = json.loads(text)
    X = loads_complex(json.dumps(doc["complex"]))
    paths = {p[-1]: tuple(p) for p in doc["paths"] if p}
    contractions = {}
    for key, cdoc in doc["contractions"].items():
        a, b = (int(x) for x in key.split(","))
        contractions[(a, b)] = Contraction(
            loops=tuple(tuple(l) for l in cdoc["loops"]),
            moves=tuple(tuple(_parse_move(m) for m in step)
                        for step in cdoc["moves"]))
    return X, Cone(v0=int(doc["v0"]), paths=paths, contractions=contractions)


def dumps_ug(U: UGInstance) -> str:
    doc = {
        "kind": "ug",
        "alphabet": U.alphabet_size,
        "vertices": U.graph.vertex_count,
        "edges": [{"u": u, "v": v,
                   "weight": f"{w.numerator}/{w.denominator}"}
                  for (u, v), w in sorted(U.graph.edges.items())],
        "constraints": {f"{u},{v}": list(p)
                        for (u, v), p in sorted(U.constraints.items())},
    }
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def loads_ug(text: str) -> UGInstance:
    doc = json.loads(text)
    edges = [((e["u"], e["v"]), Fraction(e["weight"])) for e in doc["edges"]]
    graph = WeightedGraph(doc["vertices"], edges)
    constraints = {tuple(int(x) for x in key.split(",")): tuple(p)
                   for key, p in doc["constraints"].items()}
    return UGInstance(graph, doc["alphabet"], constraints)


def dumps_cochain(f: Cochain, group_spec: str) -> str:
    doc = {
        "kind": "cochain",
        "complex": _complex_doc(f.X),
        "degree": f.degree,
        "group": group_spec,
        "values": {_key(t): v for t, v in sorted(f.values.items())},
    }
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def loads_cochain(text: str) -> Cochain:
    doc = json.loads(text)
    X = loads_complex(json.dumps(doc["complex"]))
    G, _ = parse_group(doc["group"])
    vals = {tuple(int(x) for x in key.split(",")) if key else (): v
            for key, v in doc["values"].items()}
    return Cochain(X, int(doc["degree"]), G, vals)


def dumps_decomposition(D: GKDecomposition) -> str:
    doc = {
        "kind": "decomposition",
        "complex": _complex_doc(D.X),
        "nu": [{"triangle": list(t), "piece": i,
                "weight": f"{w.numerator}/{w.denominator}"}
               for (t, i), w in sorted(D.nu.items())],
    }
    if D.agreement is not None:
        A = D.agreement
        doc["agreement"] = {
            "base": _complex_doc(A.base),
            "edge_labels": {_key(e): list(labs)
                            for e, labs in sorted(A.edge_labels.items())},
            "triangles": [{"base": list(t), "labels": list(labs),
                           "weight": f"{w.numerator}/{w.denominator}"}
                          for (t, labs), w in sorted(A.triangles.items())],
        }
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _agreement_from_doc(adoc) -> LabeledComplex:
    base = loads_complex(json.dumps(adoc["base"]))
    edge_labels = {tuple(int(x) for x in key.split(",")): tuple(labs)
                   for key, labs in adoc["edge_labels"].items()}
    triangles = {(canonical_face(e["base"]), tuple(e["labels"])):
                 Fraction(e["weight"]) for e in adoc["triangles"]}
    return blowup(base, edge_labels, triangles)


def loads_decomposition(text: str) -> GKDecomposition:
    doc = json.loads(text)
    X = loads_complex(json.dumps(doc["complex"]))
    nu = {(canonical_face(e["triangle"]), int(e["piece"])):
          Fraction(e["weight"]) for e in doc["nu"]}
    agreement = None
    if "agreement" in doc:
        agreement = _agreement_from_doc(doc["agreement"])
    return GKDecomposition(X, nu, agreement)


# -- artifact validation ------------------------------------------------------


def _err(errors, path, message):
    errors.append({"path": path, "message": str(message)})


def _check_complex_doc(doc, errors, prefix="$"):
    if not isinstance(doc, dict):
        _err(errors, prefix, "complex must be an object")
        return None
    for field, typ in (("dimension", int), ("vertices", int),
                       ("top_faces", list)):
        if field not in doc:
            _err(errors, f"{prefix}.{field}", "missing field")
            return None
        if not isinstance(doc[field], typ):
            _err(errors, f"{prefix}.{field}", f"expected {typ.__name__}")
            return None
    n, total = doc["vertices"], Fraction(0)
    bad = False
    for i, entry in enumerate(doc["top_faces"]):
        here = f"{prefix}.top_faces[{i}]"
        if not isinstance(entry, dict) or "verts" not in entry \
                or "weight" not in entry:
            _err(errors, here, "entry needs verts and weight")
            bad = True
            continue
        verts = entry["verts"]
        if sorted(set(verts)) != sorted(verts):
            _err(errors, f"{here}.verts", "repeated vertices")
            bad = True
        if any(not 0 <= v < n for v in verts):
            _err(errors, f"{here}.verts", f"vertex outside [0, {n})")
            bad = True
        try:
            w = Fraction(entry["weight"])
        except (ValueError, ZeroDivisionError, TypeError) as exc:
            _err(errors, f"{here}.weight", exc)
            bad = True
            continue
        if w < 0:
            _err(errors, f"{here}.weight", "negative weight")
            bad = True
        total += w
    if total != 1:
        _err(errors, f"{prefix}.top_faces",
             f"weights sum to {total}, expected 1")
        bad = True
    if "colors" in doc and len(doc["colors"]) != n:
        _err(errors, f"{prefix}.colors", "one color per vertex required")
        bad = True
    if bad:
        return None
    try:
        return loads_complex(json.dumps(doc))
    except (ValueError, KeyError, TypeError) as exc:
        _err(errors, prefix, exc)
        return None


def _validate_cochain_doc(doc, errors):
    X = _check_complex_doc(doc.get("complex"), errors, "$.complex")
    try:
        G, _ = parse_group(doc.get("group", ""))
    except ValueError as exc:
        _err(errors, "$.group", exc)
        G = None
    if X is None or G is None:
        return
    try:
        vals = {tuple(int(x) for x in key.split(",")) if key else (): v
                for key, v in doc.get("values", {}).items()}
        Cochain(X, int(doc.get("degree", 1)), G, vals)
    except (ValueError, TypeError, KeyError) as exc:
        _err(errors, "$.values", exc)


def _validate_cone_doc(doc, errors):
    X = _check_complex_doc(doc.get("complex"), errors, "$.complex")
    if X is None:
        return None
    try:
        paths = {p[-1]: tuple(p) for p in doc["paths"] if p}
    except (KeyError, TypeError) as exc:
        _err(errors, "$.paths", exc)
        return None
    contractions = {}
    for key, cdoc in doc.get("contractions", {}).items():
        steps = []
        for j, step in enumerate(cdoc.get("moves", [])):
            parsed = []
            for i, mdoc in enumerate(step):
                try:
                    parsed.append(_parse_move(mdoc))
                except (ValueError, KeyError, TypeError) as exc:
                    _err(errors,
                         f"$.contractions[{key!r}].moves[{j}][{i}]", exc)
                    return None
            steps.append(tuple(parsed))
        try:
            a, b = (int(x) for x in key.split(","))
        except ValueError as exc:
            _err(errors, f"$.contractions[{key!r}]", exc)
            return None
        contractions[(a, b)] = Contraction(
            loops=tuple(tuple(l) for l in cdoc.get("loops", [])),
            moves=tuple(steps))
    cone = Cone(v0=int(doc.get("v0", 0)), paths=paths,
                contractions=contractions)
    try:
        val = validate_cone(X, cone)
    except ValueError as exc:
        _err(errors, "$.contractions", exc)
        return None
    return {"diameter": val.diameter}


def _validate_decomposition_doc(doc, errors):
    X = _check_complex_doc(doc.get("complex"), errors, "$.complex")
    if X is None:
        return
    try:
        nu = {(canonical_face(e["triangle"]), int(e["piece"])):
              Fraction(e["weight"]) for e in doc.get("nu", [])}
    except (ValueError, KeyError, TypeError) as exc:
        _err(errors, "$.nu", exc)
        return
    agreement = None
    if "agreement" in doc:
        try:
            agreement = _agreement_from_doc(doc["agreement"])
        except (ValueError, KeyError, TypeError) as exc:
            _err(errors, "$.agreement", exc)
            return
    try:
        GKDecomposition(X, nu, agreement)
    except ValueError as exc:
        _err(errors, "$.nu", exc)


def _validate_ug_doc(doc, errors):
    try:
        edges = [((e["u"], e["v"]), Fraction(e["weight"]))
                 for e in doc.get("edges", [])]
        graph = WeightedGraph(int(doc.get("vertices", 0)), edges)
    except (ValueError, KeyError, TypeError) as exc:
        _err(errors, "$.edges", exc)
        return
    try:
        constraints = {tuple(int(x) for x in key.split(",")): tuple(p)
                       for key, p in doc.get("constraints", {}).items()}
        UGInstance(graph, int(doc.get("alphabet", 0)), constraints)
    except (ValueError, TypeError) as exc:
        _err(errors, "$.constraints", exc)


def _infer_kind(doc):
    if not isinstance(doc, dict):
        return None
    if "kind" in doc:
        return doc["kind"]
    if "constraints" in doc:
        return "ug"
    if "paths" in doc:
        return "cone"
    if "nu" in doc:
        return "decomposition"
    if "values" in doc:
        return "cochain"
    if "top_faces" in doc:
        return "complex"
    return None


def validate_artifact(path: str) -> dict:
    """Schema plus invariant diagnostics for a JSON artifact on disk."""
    errors = []
    info = None
    kind = None
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        _err(errors, "$", exc)
        doc = None
    if doc is not None:
        kind = _infer_kind(doc)
        if kind == "complex":
            _check_complex_doc(doc, errors)
        elif kind == "cochain":
            _validate_cochain_doc(doc, errors)
        elif kind == "cone":
            info = _validate_cone_doc(doc, errors)
        elif kind == "decomposition":
            _validate_decomposition_doc(doc, errors)
        elif kind == "ug":
            _validate_ug_doc(doc, errors)
        else:
            _err(errors, "$", f"unrecognized artifact kind {kind!r}")
    out = {"file": path, "kind": kind, "ok": not errors, "errors": errors}
    if info:
        out["info"] = _jsonable(info)
    return out


# -- commands -----------------------------------------------------------------


@click.group()
@click.version_option(__version__)
def main():
    """Expansion experiments on weighted simplicial complexes."""


def _write_artifact(text, out):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
        click.echo(f"wrote {out}", err=True)
    else:
        click.echo(text, nl=False)


@main.command()
@click.argument("kind", type=click.Choice(["complete", "partite", "faces",
                                           "building"]))
@click.option("--n", type=int, default=None, help="vertex count")
@click.option("--d", type=int, default=None, help="dimension")
@click.option("--sizes", default=None, help="partite part sizes, e.g. 2,2,2")
@click.option("--r", type=int, default=1, help="face size parameter")
@click.option("--q", type=int, default=2, help="field size")
@click.option("--colors", default=None, help="building colors, e.g. 1,3")
@click.option("--infile", type=click.Path(exists=True), default=None,
              help="base complex for faces")
@click.option("--out", type=click.Path(), default=None)
def build(kind, n, d, sizes, r, q, colors, infile, out):
    """Build a named complex and write it as JSON."""
    try:
        if kind == "complete":
            if n is None:
                raise ValueError("complete needs --n")
            X = complete_complex(n, n - 1 if d is None else d)
        elif kind == "partite":
            if not sizes:
                raise ValueError("partite needs --sizes")
            X = complete_partite(*(int(s) for s in sizes.split(",")))
        elif kind == "faces":
            if infile:
                base = _load_complex_file(infile)
            elif n is not None:
                base = complete_complex(n, n - 1 if d is None else d)
            else:
                raise ValueError("faces needs --infile or --n")
            X = faces_complex(base, r)
        else:
            if d is None:
                raise ValueError("building needs --d (ambient dimension)")
            cols = None if colors is None else [int(c)
                                                for c in colors.split(",")]
            X = spherical_building(d, q, colors=cols)
    except ValueError as exc:
        raise click.ClickException(str(exc))
    _write_artifact(dumps_complex(X) + "\n", out)


@main.command()
@click.argument("infile", type=click.Path(exists=True))
@click.option("--swap", default=None, help="swap walk indices k,l")
@click.option("--local", "local_", is_flag=True,
              help="include the local spectral profile")
@click.option("--report", "report_path", type=click.Path(), default=None)
@click.pass_context
def spectra(ctx, infile, swap, local_, report_path):
    """Second eigenvalues of a complex's walks."""
    t0 = time.monotonic()
    X = _load_complex_file(infile)
    results = {}
    try:
        rep = lambda2(X.underlying_graph())
        results["graph"] = {"lambda2": rep.lambda2,
                            "abs_lambda": rep.abs_lambda,
                            "connected": rep.connected}
        if swap:
            k, l = (int(x) for x in swap.split(","))
            srep = lambda2(swap_walk(X, k, l))
            results["swap"] = {"k": k, "l": l, "lambda2": srep.lambda2,
                               "abs_lambda": srep.abs_lambda,
                               "connected": srep.connected}
        if local_:
            prof = local_spectral_profile(X)
            results["local_profile"] = {
                "max_lambda2": prof.max_lambda2,
                "max_abs_lambda": prof.max_abs_lambda,
                "all_connected": prof.all_connected,
            }
    except ValueError as exc:
        raise click.ClickException(str(exc))
    report = _envelope("command", "spectra",
                       {"file": infile, "swap": swap, "local": local_},
                       0, [], True, results)
    _emit(ctx, report, report_path, t0)


@main.command()
@click.argument("infile", type=click.Path(exists=True))
@click.option("--group", default="z2", help="z2, z:m, or sym:l")
@click.option("--mode", type=click.Choice(["coboundary", "cosystolic"]),
              default="coboundary")
@click.option("--at-least", default=None,
              help="assert the constant is at least this rational")
@click.option("--report", "report_path", type=click.Path(), default=None)
@click.pass_context
def h1(ctx, infile, group, mode, at_least, report_path):
    """Exact expansion constant by brute force."""
    t0 = time.monotonic()
    X = _load_complex_file(infile)
    try:
        G, gname = parse_group(group)
        rep = h1_bruteforce(X, G, mode=mode)
    except ValueError as exc:
        raise click.ClickException(str(exc))
    holds = True
    target = None
    if at_least is not None:
        target = Fraction(at_least)
        holds = rep.value is not None and rep.value >= target
    results = {
        "mode": rep.mode,
        "value": rep.value,
        "unconstrained": rep.unconstrained,
        "z1_equals_b1": rep.z1_equals_b1,
        "z1_count": rep.z1_count,
        "b1_count": rep.b1_count,
        "cosystole_min_weight": rep.cosystole_min_weight,
        "edge_count": rep.edge_count,
        "target": target,
    }
    report = _envelope("command", "h1",
                       {"file": infile, "group": gname, "mode": mode,
                        "at_least": at_least},
                       0, [], holds, results)
    _emit(ctx, report, report_path, t0)


@main.command()
@click.argument("infile", type=click.Path(exists=True))
@click.option("--v0", type=int, default=0, help="base vertex")
@click.option("--max-loop-len", type=int, default=16)
@click.option("--max-states", type=int, default=200_000)
@click.option("--out", type=click.Path(), default=None,
              help="write the cone artifact here")
@click.option("--report", "report_path", type=click.Path(), default=None)
@click.pass_context
def cone(ctx, infile, v0, max_loop_len, max_states, out, report_path):
    """Search for a cone and report the expansion bound it certifies."""
    t0 = time.monotonic()
    X = _load_complex_file(infile)
    budget = SearchBudget(max_loop_len=max_loop_len, max_states=max_states)
    try:
        res = auto_cone(X, v0, budget)
    except ValueError as exc:
        raise click.ClickException(str(exc))
    if res.cone is None:
        results = {
            "found": False,
            "failed_edges": [list(e) for e in res.failed_edges],
            "statuses": {f"{a},{b}": s for (a, b), s in res.statuses.items()},
        }
        report = _envelope("command", "cone",
                           {"file": infile, "v0": v0}, 0, [], False, results)
        _emit(ctx, report, report_path, t0)
        return
    fam = cone_family_bound(X, [res.cone])
    results = {
        "found": True,
        "diameter": res.diameter,
        "p": fam.p,
        "R": fam.R,
        "bound": fam.bound,
        "support_edge_mass": fam.support_edge_mass,
    }
    if out:
        _write_artifact(dumps_cone(X, res.cone), out)
    report = _envelope("command", "cone", {"file": infile, "v0": v0},
                       0, [], True, results)
    _emit(ctx, report, report_path, t0)


@main.command()
@click.argument("infile", type=click.Path(exists=True))
@click.option("--group", default="z2", help="z2, z:m, or sym:l")
@click.option("--report", "report_path", type=click.Path(), default=None)
@click.pass_context
def gk(ctx, infile, group, report_path):
    """Hypothesis constants of the vertex-star decomposition."""
    t0 = time.monotonic()
    X = _load_complex_file(infile)
    try:
        G, gname = parse_group(group)
        D = vertex_star_decomposition(X)
        hyp = check_hypotheses(D, G)
    except ValueError as exc:
        raise click.ClickException(str(exc))
    holds = hyp.bound is not None and hyp.bound > 0
    results = {
        "alpha": hyp.alpha,
        "alpha_parts": hyp.alpha_parts,
        "beta": hyp.beta,
        "gamma": hyp.gamma,
        "eta": hyp.eta,
        "bound": hyp.bound,
        "pieces": D.piece_count,
        "degenerate_agreement": hyp.degenerate_agreement,
    }
    if hyp.gamma_route is not None:
        results["gamma_route"] = {
            "base_h1": hyp.gamma_route.base_h1,
            "label_eta": hyp.gamma_route.label_eta,
            "flat": hyp.gamma_route.flat,
        }
    report = _envelope("command", "gk", {"file": infile, "group": gname},
                       0, [], holds, results)
    _emit(ctx, report, report_path, t0)


@main.command()
@click.argument("infile", type=click.Path(exists=True))
@click.option("--group", default="z:3", help="cyclic alphabet, z2 or z:m")
@click.option("--rate", default="0", help="corruption rate as a rational")
@click.option("--seed", type=int, default=0)
@click.option("--beta", default=None,
              help="expansion certificate; defaults to the cone bound")
@click.option("--decoder", type=click.Choice(["auto", "brute", "cone"]),
              default="auto")
@click.option("--out", type=click.Path(), default=None,
              help="write the instance artifact here")
@click.option("--report", "report_path", type=click.Path(), default=None)
@click.pass_context
def ug(ctx, infile, group, rate, seed, beta, decoder, out, report_path):
    """Planted unique game on a complex: generate, corrupt, solve, certify."""
    t0 = time.monotonic()
    X = _load_complex_file(infile)
    try:
        G, gname = parse_group(group)
        if not gname.startswith(("z2", "z:")):
            raise ValueError("planted instances use cyclic alphabets")
        m = G.order
        prng = random.Random(f"{seed}:planted")
        planted = {v: prng.randrange(m) for v in range(X.vertex_count)}
        U = affine_linear_generator(X, m, planted, Fraction(rate),
                                    f"{seed}:corrupt")
        cone_obj = None
        if decoder in ("auto", "cone"):
            res = auto_cone(X, 0, SearchBudget())
            cone_obj = res.cone
            if cone_obj is None and decoder == "cone":
                raise ValueError("no cone found; try --decoder brute")
        if beta is not None:
            beta_val = Fraction(beta)
        elif cone_obj is not None:
            beta_val = cone_family_bound(X, [cone_obj]).bound
        else:
            raise ValueError("supply --beta when no cone certificate exists")
        chosen = ("cone", cone_obj) if cone_obj is not None else "brute"
        rep = solve_on_expander(U, X, beta_val, decoder=chosen)
    except ValueError as exc:
        raise click.ClickException(str(exc))
    if out:
        _write_artifact(dumps_ug(U), out)
    holds = rep.value >= rep.certified
    results = {
        "alphabet": m,
        "rate": Fraction(rate),
        "epsilon": rep.epsilon,
        "beta": rep.beta,
        "value": rep.value,
        "certified": rep.certified,
        "decoder": rep.decoder,
    }
    report = _envelope("command", "ug",
                       {"file": infile, "group": gname, "rate": rate,
                        "seed": seed, "decoder": decoder},
                       seed, [12], holds, results)
    _emit(ctx, report, report_path, t0)


@main.command()
@click.argument("name")
@click.option("--param", "-p", multiple=True, help="suite parameter k=v")
@click.option("--seed", type=int, default=0)
@click.option("--report", "report_path", type=click.Path(), default=None)
@click.pass_context
def suite(ctx, name, param, seed, report_path):
    """Run a named experiment suite."""
    t0 = time.monotonic()
    params = {}
    for item in param:
        if "=" not in item:
            raise click.ClickException(f"parameter {item!r} is not k=v")
        k, v = item.split("=", 1)
        try:
            params[k] = int(v)
        except ValueError:
            params[k] = v
    try:
        report = run_experiment(name, params, seed)
    except ValueError as exc:
        raise click.ClickException(str(exc))
    _emit(ctx, report, report_path, t0)


@main.command()
@click.argument("infile", type=click.Path(exists=True))
@click.pass_context
def validate(ctx, infile):
    """Schema and invariant checks for a JSON artifact."""
    diag = validate_artifact(infile)
    click.echo(json.dumps(diag, sort_keys=True, indent=2))
    ctx.exit(0 if diag["ok"] else 1)


if __name__ == "__main__":
    sys.exit(main())
