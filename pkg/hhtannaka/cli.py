"""Command-line front end.

Projects are JSON files with sections field/objects/identity/homs/compose/
differential/functor/monoidal/transformations/run. Structure constants are
lists of [result, coefficient] pairs; coefficients are integers or "p/q".
Exit codes: 0 pass, 1 verification failure, 2 input error.
"""

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Mapping

from .comod import cofree, regular_comodule, validate_coalgebra
from .corpus import Project, random_corpus
from .dgcat import (
    MonoidalPresentation,
    NaturalTransformation,
    make_category,
    make_fibre_functor,
    module_cone,
    representable,
    representable_map,
    validate_category,
    validate_fibre_functor,
    validate_monoidal,
    validate_natural_transformation,
    validate_strict_monoidal_fibre,
    zero_module,
)
from .errors import (
    DegreeOutsideExactWindow,
    HHTannakaError,
    MissingDualityData,
    ProjectParseError,
    StrictnessViolation,
    WindowViolation,
)
from .exactlin import FieldSpec
from .hochschild import (
    antipode_candidate,
    bialgebra_multiplication,
    check_simplicial_identities,
    kunneth_report,
    shuffle_associativity,
    shuffle_map,
    shuffle_symmetry,
    tannakian_dual,
)
from .homalg import Dual, Window, certified_degrees, complex_from_table, ground, homology
from .tannaka import adjunction_counit, adjunction_unit, tilting_module
from .utils.tools import defaults, get_config
from ._utils import Report, fmt_table


# -----------------------------------------------------------------------------
# project files

def _vec(fs: FieldSpec, pairs, where: str) -> dict:
    try:
        return {str(label): fs(str(c)) for label, c in pairs}
    except (TypeError, ValueError) as e:
        raise ProjectParseError(f"{where}: expected [[basis, coefficient], ...] ({e})") from None


def parse_project(data: Mapping[str, Any], name: str = "project", field: FieldSpec | None = None) -> Project:
    """Builds a Project from the JSON structure; unresolved references raise ProjectParseError."""
    if not isinstance(data, Mapping):
        raise ProjectParseError(f"{name}: top level must be an object")
    try:
        fs = FieldSpec.from_string(str(data["field"])) if "field" in data else field or FieldSpec()
        name = str(data.get("name", name))
        objects = [str(X) for X in data.get("objects", [])]
        known = set(objects)
        homs = {}
        for f, spec in data.get("homs", {}).items():
            X, Y, deg = spec
            if X not in known or Y not in known:
                raise ProjectParseError(f"{name}: hom {f!r} refers to an unknown object")
            homs[str(f)] = (str(X), str(Y), int(deg))
        identities = {str(X): str(i) for X, i in data.get("identity", {}).items()} or None
        if identities and set(identities) != known:
            raise ProjectParseError(f"{name}: identity section does not cover the objects")
        labels = set(homs) | set((identities or {X: f"id_{X}" for X in objects}).values())
        compose = {}
        for entry in data.get("compose", []):
            g, f, v = entry
            if g not in labels or f not in labels:
                raise ProjectParseError(f"{name}: compose refers to unknown morphism in {g!r}*{f!r}")
            compose[(str(g), str(f))] = _vec(fs, v, f"compose {g}*{f}")
        differential = {}
        for f, v in data.get("differential", {}).items():
            if f not in labels:
                raise ProjectParseError(f"{name}: differential of unknown morphism {f!r}")
            differential[str(f)] = _vec(fs, v, f"differential {f}")
        for v in list(compose.values()) + list(differential.values()):
            if not set(v) <= labels:
                raise ProjectParseError(f"{name}: structure constants name unknown morphisms {sorted(set(v) - labels)!r}")
        A = make_category(fs, objects, homs, compose, differential, identities, name=name)

        fibres = {}
        for wname, spec in data.get("functor", {}).items():
            spaces = {}
            table = spec.get("spaces", {})
            if not set(table) <= known:
                raise ProjectParseError(f"{name}: functor {wname} has spaces for unknown objects")
            for X in objects:
                basis: dict[int, list] = {}
                for v, n in table.get(X, {}).items():
                    basis.setdefault(int(n), []).append(str(v))
                own = {v for vs in basis.values() for v in vs}
                d = {v: _vec(fs, img, f"{wname} differential") for v, img in spec.get("differential", {}).items() if v in own}
                spaces[X] = complex_from_table(fs, basis, d, name=f"{wname}({X})")
            action = {}
            for a, t in spec.get("action", {}).items():
                if a not in labels:
                    raise ProjectParseError(f"{name}: functor {wname} acts by unknown morphism {a!r}")
                action[str(a)] = {str(v): _vec(fs, img, f"{wname}({a})") for v, img in t.items()}
            fibres[str(wname)] = make_fibre_functor(A, spaces, action, str(wname))

        monoidal, tensor_basis = None, None
        if data.get("monoidal"):
            m = data["monoidal"]
            duality = None
            if "duality" in m:
                D = m["duality"]
                duality = {
                    "objects": {str(X): str(Y) for X, Y in D.get("objects", {}).items()},
                    "morphisms": {str(a): _vec(fs, v, f"dual of {a}") for a, v in D.get("morphisms", {}).items()},
                    "fibre": {Dual(str(v)): str(u) for v, u in D.get("fibre", {}).items()},
                }
            monoidal = MonoidalPresentation(
                A, str(m["unit"]),
                {(str(X), str(Y)): str(XY) for X, Y, XY in m.get("objects", [])},
                {(str(a), str(b)): _vec(fs, v, f"{a}⊠{b}") for a, b, v in m.get("morphisms", [])},
                bool(m.get("symmetric", False)), duality, str(m.get("name", "⊠")),
            )
            tensor_basis = {(str(v), str(u)): str(t) for v, u, t in m.get("tensor_basis", [])}

        transformations = {}
        for ename, spec in data.get("transformations", {}).items():
            if spec["source"] not in fibres or spec["target"] not in fibres:
                raise ProjectParseError(f"{name}: transformation {ename} refers to an unknown functor")
            comps = {X: {str(v): _vec(fs, img, f"{ename}({v})") for v, img in spec.get("components", {}).get(X, {}).items()} for X in objects}
            transformations[str(ename)] = NaturalTransformation(fibres[spec["source"]], fibres[spec["target"]], comps, str(ename))
    except ProjectParseError:
        raise
    except (KeyError, TypeError, ValueError) as e:
        raise ProjectParseError(f"{name}: malformed project ({type(e).__name__}: {e})") from None
    return Project(name, A, fibres, monoidal, tensor_basis, transformations, dict(data.get("run", {})))


def load_project(path: str | Path, field: FieldSpec | None = None) -> Project:
    path = Path(path)
    try:
        with open(path, "r") as f:
            data = json.load(f)
    except OSError as e:
        raise ProjectParseError(f"cannot read {path}: {e.strerror}") from None
    except json.JSONDecodeError as e:
        raise ProjectParseError(f"{path}: not JSON ({e.msg} at line {e.lineno})") from None
    return parse_project(data, path.stem, field)


def serialize_project(P: Project) -> dict[str, Any]:
    """Canonical JSON structure; parse_project∘serialize_project reproduces the presentation."""
    A = P.category
    fs = A.field
    vec = lambda v: [[str(k), fs.format(c)] for k, c in v.items()]
    out: dict[str, Any] = {
        "name": P.name,
        "field": fs.kind,
        "objects": [str(X) for X in A.objects],
        "identity": {str(X): str(i) for X, i in A.identities.items()},
        "homs": {str(f): [str(A.src(f)), str(A.tgt(f)), A.degree(f)] for f in A.non_identity()},
        "compose": [[str(g), str(f), vec(v)] for (g, f), v in A.products.items() if v],
        "differential": {str(f): vec(v) for f, v in A.differential.items() if v},
    }
    if P.fibres:
        out["functor"] = {
            name: {
                "spaces": {str(X): {str(v): c.degree(v) for v in c.space.all_labels()} for X, c in w.spaces.items()},
                "differential": {str(v): vec(c.diff(v)) for c in w.spaces.values() for v in c.space.all_labels() if c.diff(v)},
                "action": {str(a): {str(v): vec(img) for v, img in t.items()} for a, t in w.action.items()},
            }
            for name, w in P.fibres.items()
        }
    if P.monoidal is not None:
        M = P.monoidal
        m: dict[str, Any] = {
            "unit": str(M.unit),
            "objects": [[str(X), str(Y), str(XY)] for (X, Y), XY in M.product.items()],
            "morphisms": [[str(a), str(b), vec(v)] for (a, b), v in M.morphism_product.items()],
            "symmetric": M.symmetric,
            "tensor_basis": [[str(v), str(u), str(t)] for (v, u), t in (P.tensor_basis or {}).items()],
        }
        if M.duality:
            m["duality"] = {
                "objects": {str(X): str(Y) for X, Y in M.duality["objects"].items()},
                "morphisms": {str(a): vec(v) for a, v in M.duality["morphisms"].items()},
                "fibre": {str(phi.of): str(u) for phi, u in M.duality["fibre"].items()},
            }
        out["monoidal"] = m
    if P.transformations:
        names = {id(w): n for n, w in P.fibres.items()}
        out["transformations"] = {
            name: {
                "source": names[id(eta.source)],
                "target": names[id(eta.target)],
                "components": {str(X): {str(v): vec(img) for v, img in t.items()} for X, t in eta.components.items() if t},
            }
            for name, eta in P.transformations.items()
        }
    if P.params:
        out["run"] = dict(P.params)
    return out


def load_seed_file(path: str | Path) -> dict[str, Any]:
    """count/seed/field/level of a random-generator seed file."""
    try:
        with open(path, "r") as f:
            data = json.load(f)
    except OSError as e:
        raise ProjectParseError(f"cannot read {path}: {e.strerror}") from None
    except json.JSONDecodeError as e:
        raise ProjectParseError(f"{path}: not JSON ({e.msg} at line {e.lineno})") from None
    if not isinstance(data, dict) or data.get("generator") != "random":
        raise ProjectParseError(f"{path}: not a random-generator seed file")
    try:
        out = {k: int(data[k]) for k in ("count", "seed", "level") if k in data}
    except (TypeError, ValueError):
        raise ProjectParseError(f"{path}: count, seed and level must be integers") from None
    if "field" in data:
        out["field"] = str(data["field"])
    return out


# -----------------------------------------------------------------------------
# commands

def _fibre(P: Project, name: str | None):
    if name is None:
        if P.fibre is None:
            raise ProjectParseError(f"{P.name}: no fibre functor")
        return P.fibre
    if name not in P.fibres:
        raise ProjectParseError(f"{P.name}: unknown fibre functor {name!r}")
    return P.fibres[name]


def _window(s: str | None) -> Window | None:
    if s is None:
        return None
    lo, sep, hi = s.partition("..")
    try:
        return Window(int(lo), int(hi)) if sep else Window(int(lo), int(lo))
    except ValueError:
        raise ProjectParseError(f"Unknown window: {s!r} (expected a..b)") from None


def _field(s) -> FieldSpec:
    try:
        return FieldSpec.from_string(str(s))
    except ValueError as e:
        raise ProjectParseError(str(e)) from None


def _emit(reports: list, csv: bool = False) -> int:
    if not csv:
        for r in reports:
            print(r)
    return 0 if all(bool(r) for r in reports) else 1


def cmd_validate(path: str, csv: bool = False, field: FieldSpec | None = None) -> int:
    P = load_project(path, field)
    reports = [validate_category(P.category)]
    reports += [validate_fibre_functor(w) for w in P.fibres.values()]
    if P.monoidal is not None:
        reports.append(validate_monoidal(P.monoidal))
        if P.tensor_basis and P.fibre is not None:
            reports.append(validate_strict_monoidal_fibre(P.monoidal, P.fibre, P.tensor_basis))
    reports += [validate_natural_transformation(eta) for eta in P.transformations.values()]
    if csv:
        print(fmt_table(["check", "passed", "checks", "failures"], [[r.name, r.passed, r.checked, len(r.failures)] for r in reports], csv=True))
    return _emit(reports, csv)


def cmd_tannakian_dual(
    path: str,
    normalized: bool = True,
    level: int = 6,
    window: str | None = None,
    structure: bool = False,
    fibre: str | None = None,
    csv: bool = False,
    verbose: bool = False,
    field: FieldSpec | None = None,
) -> int:
    P = load_project(path, field)
    w = _fibre(P, fibre)
    C = tannakian_dual(P.category, w, normalized, level, certify=False, verbose=verbose)
    report = validate_coalgebra(C, verbose=verbose)
    c = C.carrier
    degrees = _window(window) or certified_degrees(c)
    rows = [[n, c.space.dim(n), homology(c, n).dim] for n in (reversed(degrees.degrees()) if not degrees.empty else ())]
    if not csv:
        print(f"{C.name} over {c.field}: L = {level}, exact window {c.exact_window}")
    print(fmt_table(["degree", "dim", "H"], rows, csv))
    if structure:
        fmt = c.field.format
        drows = [[str(x), str(l), str(r), fmt(e)] for x in c.space.all_labels() for (l, r), e in C.delta(x).items()]
        erows = [[str(x), fmt(C.eps(x))] for x in c.space.all_labels() if not c.field.is_zero(C.eps(x))]
        print(fmt_table(["x", "left", "right", "coefficient"], drows, csv))
        print(fmt_table(["x", "ε"], erows, csv))
    return _emit([report], csv)


def cmd_bialgebra(
    path: str, level: int = 3, fibre: str | None = None, csv: bool = False, verbose: bool = False, field: FieldSpec | None = None
) -> int:
    P = load_project(path, field)
    if P.monoidal is None or P.tensor_basis is None:
        raise ProjectParseError(f"{P.name}: no monoidal section")
    w = _fibre(P, fibre)
    B = bialgebra_multiplication(P.monoidal, w, P.tensor_basis, level, verbose=verbose)
    c = B.coalgebra.carrier
    fmt = c.field.format
    zero = c.labels(0)
    rows = [[str(x), str(y), str(z), fmt(e)] for x in zero for y in zero for z, e in B.multiply(x, y).items()]
    if not csv:
        print(f"{B.coalgebra.name}: unit {B.unit!r}")
    print(fmt_table(["x", "y", "x·y", "coefficient"], rows, csv))
    reports: list = [B.report]
    if P.monoidal.duality:
        try:
            reports.append(antipode_candidate(P.monoidal, w, P.tensor_basis, level, bialgebra=B))
        except MissingDualityData as e:
            print(f"antipode skipped: {e}")
    if not csv:
        for r in reports:
            print(r)
    return 0 if all(r.passed for r in reports) else 1


def _module(P: Project, spec: str):
    A = P.category
    match spec.split(":", 1):
        case ["0"]:
            return zero_module(A)
        case ["h", X] if X in A.objects:
            return representable(A, X)
        case ["cone", X] if X in A.objects:
            return module_cone(representable_map(A, A.identities[X]))
        case _:
            raise ProjectParseError(f"Unknown module: {spec!r} (expected 0, h:X or cone:X)")


def _comodule(T, spec: str):
    fs = T.category.field
    match spec.split(":", 1):
        case ["C"]:
            return regular_comodule(T.C)
        case ["cofree", n]:
            try:
                shift = int(n)
            except ValueError:
                raise ProjectParseError(f"Unknown comodule: {spec!r}") from None
            return cofree(ground(fs, "k", -shift), T.C, certify=False)
        case _:
            raise ProjectParseError(f"Unknown comodule: {spec!r} (expected C or cofree:n)")


def cmd_adjunction(
    path: str,
    module: str | None = None,
    comodule: str | None = None,
    level: int = 6,
    fibre: str | None = None,
    csv: bool = False,
    verbose: bool = False,
    field: FieldSpec | None = None,
) -> int:
    P = load_project(path, field)
    w = _fibre(P, fibre)
    T = tilting_module(P.category, w, level, normalized=True, verbose=verbose)
    if module is not None:
        report = adjunction_unit(T, _module(P, module))
    else:
        report = adjunction_counit(T, _comodule(T, comodule or "C"))
    if csv:
        rows = [[k, n, hs, ht, r] for k, q in report.checks.items() for n, hs, ht, r in q.rows]
        print(fmt_table(["check", "degree", "H source", "H target", "rank"], rows, csv=True))
    else:
        print(report)
    return 0 if report.verdict else 1


def cmd_shuffle_check(
    path_b: str,
    path_c: str,
    level: int = 4,
    degrees: str | None = None,
    csv: bool = False,
    verbose: bool = False,
    field: FieldSpec | None = None,
) -> int:
    PB, PC = load_project(path_b, field), load_project(path_c, field)
    wB, wC = _fibre(PB, None), _fibre(PC, None)
    sh = shuffle_map(wB, wC, level, verbose=verbose)
    reports = [kunneth_report(sh, _window(degrees))]
    reports.append(shuffle_symmetry(sh, shuffle_map(wC, wB, level)))
    reports.append(shuffle_associativity(wB, wC, wB, min(level, 2)))
    if csv:
        print(fmt_table(["check", "passed", "checks"], [[r.name, r.passed, r.checked] for r in reports], csv=True))
    return _emit(reports, csv)


def cmd_corpus(
    count: int = 25,
    seed: int = 0,
    field: FieldSpec | None = None,
    level: int = 4,
    csv: bool = False,
    verbose: bool = False,
) -> int:
    """Coalgebra axioms, simplicial identities and normalization invariance over the random corpus."""
    rows, ok = [], True
    for P in random_corpus(count, seed, field or FieldSpec(109)):
        w = P.fibre
        C = tannakian_dual(P.category, w, False, level, certify=False, verbose=verbose)
        NC = tannakian_dual(P.category, w, True, level, certify=False, verbose=verbose)
        checks = [
            validate_category(P.category).merge(validate_fibre_functor(w)),
            validate_coalgebra(C),
            check_simplicial_identities(C.simplicial),
        ]
        same = Report("normalization")
        shared = certified_degrees(C.carrier).intersect(certified_degrees(NC.carrier))
        for n in shared.degrees() if not shared.empty else ():
            same.checked += 1
            a, b = homology(C.carrier, n).dim, homology(NC.carrier, n).dim
            if a != b:
                same.fail(f"H^{n}: {a} vs {b}")
        checks.append(same)
        ok &= all(r.passed for r in checks)
        rows.append([P.name, len(P.category.objects), C.carrier.space.total_dim] + [r.passed for r in checks])
        if verbose:
            for r in checks:
                print(r)
    print(fmt_table(["instance", "objects", "dim C", "valid", "coalgebra", "simplicial", "normalization"], rows, csv))
    return 0 if ok else 1


# -----------------------------------------------------------------------------
# entry point

def build_parser(config: Mapping[str, Any]) -> argparse.ArgumentParser:
    level = config["level"]
    parser = argparse.ArgumentParser(prog="hhtannaka", description="Tannakian duals of dg categories")
    parser.add_argument("--csv", action="store_true", help="machine-readable tables")
    parser.add_argument("--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="structural validators")
    p.add_argument("path")

    p = sub.add_parser("tannakian-dual", help="C_ω(𝒜): dims, homology, structure constants")
    p.add_argument("path")
    p.add_argument("--normalized", action=argparse.BooleanOptionalAction, default=config["normalized"])
    p.add_argument("--level", type=int, default=level)
    p.add_argument("--homology-window", dest="window", help="a..b, e.g. --homology-window=-6..0")
    p.add_argument("--structure", action="store_true", help="print Δ and ε")
    p.add_argument("--fibre")

    p = sub.add_parser("bialgebra", help="multiplication, unit and antipode")
    p.add_argument("path")
    p.add_argument("--level", type=int, default=min(level, 3))
    p.add_argument("--fibre")

    p = sub.add_parser("adjunction", help="unit or counit of the reconstruction adjunction")
    p.add_argument("path")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--module", help="0, h:X or cone:X")
    g.add_argument("--comodule", help="C or cofree:n")
    p.add_argument("--level", type=int, default=level)
    p.add_argument("--fibre")

    p = sub.add_parser("shuffle-check", help="Künneth, symmetry and associativity of shuffles")
    p.add_argument("path_b")
    p.add_argument("path_c")
    p.add_argument("--level", type=int, default=min(level, 5))
    p.add_argument("--degrees", help="a..b")

    p = sub.add_parser("corpus", help="axiom suite over the random corpus")
    p.add_argument("seeds", nargs="?", help="seed file overriding the options below")
    p.add_argument("--count", type=int, default=config["corpus_size"])
    p.add_argument("--seed", type=int, default=config["corpus_seed"])
    p.add_argument("--field", default=config["corpus_field"])
    p.add_argument("--level", type=int, default=config["corpus_level"])
    return parser


def main(argv: list[str] | None = None) -> int:
    try:
        config = {**defaults(), **get_config()["acceptance"]}
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    args = build_parser(config).parse_args(argv)
    field = config["field"]
    try:
        match args.command:
            case "validate":
                return cmd_validate(args.path, args.csv, field)
            case "tannakian-dual":
                return cmd_tannakian_dual(args.path, args.normalized, args.level, args.window, args.structure, args.fibre, args.csv, args.verbose, field)
            case "bialgebra":
                return cmd_bialgebra(args.path, args.level, args.fibre, args.csv, args.verbose, field)
            case "adjunction":
                return cmd_adjunction(args.path, args.module, args.comodule, args.level, args.fibre, args.csv, args.verbose, field)
            case "shuffle-check":
                return cmd_shuffle_check(args.path_b, args.path_c, args.level, args.degrees, args.csv, args.verbose, field)
            case "corpus":
                opts = {"count": args.count, "seed": args.seed, "field": args.field, "level": args.level}
                if args.seeds:
                    opts.update(load_seed_file(args.seeds))
                return cmd_corpus(int(opts["count"]), int(opts["seed"]), _field(opts["field"]), int(opts["level"]), args.csv, args.verbose)
            case _:
                raise ValueError(f"Unknown command: {args.command}")
    except (ProjectParseError, DegreeOutsideExactWindow, WindowViolation, StrictnessViolation) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except HHTannakaError as e:
        print(f"verification failed: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
