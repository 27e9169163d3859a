"""Bundled example instances and the seeded random-category generator."""

from dataclasses import dataclass, field
from collections import deque

import numpy as np

from .dgcat import (
    DgCategoryPresentation,
    FibreFunctor,
    MonoidalPresentation,
    NaturalTransformation,
    identity_transformation,
    make_category,
    make_fibre_functor,
    validate_category,
    validate_fibre_functor,
)
from .exactlin import FieldSpec, Matrix, Solver, kernel_basis
from .homalg import Dual, Vec, WindowedComplex, complex_from_table, ground, span_rank, vadd
from ._utils import sign


@dataclass
class Project:
    """A dg category with its fibre functors, optional monoidal data and run parameters."""

    name: str
    category: DgCategoryPresentation
    fibres: dict[str, FibreFunctor] = field(default_factory=dict)
    monoidal: MonoidalPresentation | None = None
    tensor_basis: dict | None = None
    transformations: dict[str, NaturalTransformation] = field(default_factory=dict)
    params: dict = field(default_factory=dict)

    @property
    def field(self) -> FieldSpec:
        return self.category.field

    @property
    def fibre(self) -> FibreFunctor | None:
        return next(iter(self.fibres.values()), None)


def kellerex(fs: FieldSpec | None = None) -> Project:
    """k[ε], ε² = 0 in degree 0, with ω = k and ε acting by zero."""
    fs = fs or FieldSpec()
    A = make_category(fs, ["*"], {"ε": ("*", "*", 0)}, identities={"*": "id"}, name="k[ε]")
    w = make_fibre_functor(A, {"*": ground(fs, "v")}, {}, "ω")
    mon = MonoidalPresentation(
        A, "*", {("*", "*"): "*"},
        {("ε", "id"): {"ε": fs.one}, ("id", "ε"): {"ε": fs.one}},
        symmetric=True,
        duality={"objects": {"*": "*"}, "morphisms": {"ε": {"ε": fs.one}}, "fibre": {Dual("v"): "v"}},
        name="⊠",
    )
    return Project(
        "kellerex", A, {"ω": w}, mon, {("v", "v"): "v"},
        {"η": identity_transformation(w)}, {"level": 6, "normalized": True},
    )


def one_object_k(fs: FieldSpec | None = None) -> Project:
    fs = fs or FieldSpec()
    A = make_category(fs, ["*"], {}, identities={"*": "id"}, name="k")
    return Project("k", A, {"ω": make_fibre_functor(A, {"*": ground(fs, "v")}, {}, "ω")})


def matrix_algebra(fs: FieldSpec | None = None) -> Project:
    """M_2(k) on one object, basis id, e11, e12, e21; ω is the column module."""
    fs = fs or FieldSpec(7)
    products = {
        ("e11", "e11"): {"e11": 1}, ("e11", "e12"): {"e12": 1},
        ("e12", "e21"): {"e11": 1},
        ("e21", "e11"): {"e21": 1}, ("e21", "e12"): {"id": 1, "e11": -1},
    }
    A = make_category(
        fs, ["*"], {e: ("*", "*", 0) for e in ("e11", "e12", "e21")},
        products=products, identities={"*": "id"}, name="M_2",
    )
    col = complex_from_table(fs, {0: ["v1", "v2"]}, name="k^2")
    action = {"e11": {"v1": {"v1": 1}}, "e12": {"v2": {"v1": 1}}, "e21": {"v1": {"v2": 1}}}
    return Project("M2", A, {"ω": make_fibre_functor(A, {"*": col}, action, "ω")})


def cyclic_group(fs: FieldSpec | None = None) -> Project:
    """ℤ/2 as a discrete monoidal category, ω = k on both objects."""
    fs = fs or FieldSpec()
    A = make_category(fs, ["e", "g"], {}, name="Z/2")
    w = make_fibre_functor(A, {"e": ground(fs, "ve"), "g": ground(fs, "vg")}, {}, "ω")
    law = {("e", "e"): "e", ("e", "g"): "g", ("g", "e"): "g", ("g", "g"): "e"}
    mon = MonoidalPresentation(
        A, "e", law, {}, symmetric=True,
        duality={"objects": {"e": "e", "g": "g"}, "morphisms": {}, "fibre": {Dual("ve"): "ve", Dual("vg"): "vg"}},
        name="⊠",
    )
    basis = {(f"v{X}", f"v{Y}"): f"v{XY}" for (X, Y), XY in law.items()}
    return Project("Z2", A, {"ω": w}, mon, basis)


def trivial_group(fs: FieldSpec | None = None) -> Project:
    fs = fs or FieldSpec()
    A = make_category(fs, ["e"], {}, name="1")
    w = make_fibre_functor(A, {"e": ground(fs, "v")}, {}, "ω")
    mon = MonoidalPresentation(
        A, "e", {("e", "e"): "e"}, {}, symmetric=True,
        duality={"objects": {"e": "e"}, "morphisms": {}, "fibre": {Dual("v"): "v"}},
        name="⊠",
    )
    return Project("trivial", A, {"ω": w}, mon, {("v", "v"): "v"})


BUNDLED = {
    "kellerex": kellerex,
    "k": one_object_k,
    "M2": matrix_algebra,
    "Z2": cyclic_group,
    "trivial": trivial_group,
}


def _coefficient(rng: np.random.Generator) -> int:
    return int(rng.choice([-3, -2, -1, 1, 2, 3]))


# maps between fibre spaces are stored as {(target label, source label): coefficient}

def _compose(fs: FieldSpec, g: Vec, f: Vec) -> Vec:
    by_source: dict = {}
    for (w, u), c in g.items():
        by_source.setdefault(u, []).append((w, c))
    out: Vec = {}
    for (u, v), c in f.items():
        for w, e in by_source.get(u, ()):
            vadd(fs, out, {(w, v): c * e})
    return out


def _commutator(fs: FieldSpec, VX: WindowedComplex, VY: WindowedComplex, f: Vec, k: int) -> Vec:
    """d∘f - (-1)^k f∘d for f: VX → VY of degree k."""
    out: Vec = {}
    by_source: dict = {}
    for (u, v), c in f.items():
        by_source.setdefault(v, []).append((u, c))
        for u2, e in VY.diff(u).items():
            vadd(fs, out, {(u2, v): c * e})
    s = sign(k)
    for v2 in VX.space.all_labels():
        for v, e in VX.diff(v2).items():
            for u, c in by_source.get(v, ()):
                vadd(fs, out, {(u, v2): c * e}, -s)
    return out


def _chain_maps(fs: FieldSpec, VX: WindowedComplex, VY: WindowedComplex) -> list[Vec]:
    unknowns = [(u, v) for v in VX.space.all_labels() for u in VY.space.all_labels() if VY.degree(u) == VX.degree(v)]
    rows: dict = {}
    cols = []
    for key in unknowns:
        img = _commutator(fs, VX, VY, {key: fs.one}, 0)
        cols.append({rows.setdefault(r, len(rows)): c for r, c in img.items()})
    m = Matrix.from_columns(fs, len(rows), cols)
    return [{key: c for key, c in zip(unknowns, vec) if not fs.is_zero(c)} for vec in kernel_basis(m)]


def _random_space(fs: FieldSpec, rng: np.random.Generator, X: str, max_fibre: int) -> WindowedComplex:
    basis: dict[int, list] = {}
    for i in range(int(rng.integers(1, max_fibre + 1))):
        basis.setdefault(int(rng.integers(-1, 1)), []).append(f"v{X}_{i}")
    d = {}
    if basis.get(-1) and basis.get(0) and rng.random() < 0.5:
        d = {basis[-1][0]: {basis[0][0]: _coefficient(rng)}}
    return complex_from_table(fs, basis, d, name=f"ω({X})")


def _random_map(fs: FieldSpec, rng: np.random.Generator, VX: WindowedComplex, VY: WindowedComplex, k: int) -> Vec:
    if k == 0:
        out: Vec = {}
        for b in _chain_maps(fs, VX, VY):
            vadd(fs, out, b, _coefficient(rng))
        return out
    return {
        (u, v): fs(_coefficient(rng))
        for v in VX.space.all_labels()
        for u in VY.space.all_labels()
        if VY.degree(u) == VX.degree(v) + k and rng.random() < 0.7
    }


def _close(fs: FieldSpec, spaces: dict, gens: list, max_arrows: int) -> dict | None:
    """Spans per (source, target, degree) of everything the generators reach; identities come first.

    None once more than ``max_arrows`` non-identity basis maps are needed.
    """
    spans = {(X, X, 0): [{(v, v): fs.one for v in V.space.all_labels()}] for X, V in spaces.items()}
    arrows: list[tuple] = []
    queue = deque(gens)
    while queue:
        X, Y, k, f = queue.popleft()
        if not f:
            continue
        span = spans.setdefault((X, Y, k), [])
        if span_rank(fs, span + [f]) == len(span):
            continue
        span.append(f)
        arrows.append((X, Y, k, f))
        if len(arrows) > max_arrows:
            return None
        queue.append((X, Y, k + 1, _commutator(fs, spaces[X], spaces[Y], f, k)))
        for X2, Y2, k2, g in arrows:
            if Y == X2:
                queue.append((X, Y2, k + k2, _compose(fs, g, f)))
            if Y2 == X:
                queue.append((X2, Y, k + k2, _compose(fs, f, g)))
    return spans


def _closure_project(fs: FieldSpec, name: str, objects: list, spaces: dict, spans: dict) -> Project:
    labels: dict[tuple, list] = {}
    morphisms, vectors = {}, {}
    for (X, Y, k), span in spans.items():
        labels[(X, Y, k)] = []
        for j, f in enumerate(span):
            if X == Y and k == 0 and j == 0:
                label = f"id_{X}"
            else:
                label = f"{X}{Y}_{len(morphisms)}"
                morphisms[label] = (X, Y, k)
            labels[(X, Y, k)].append(label)
            vectors[label] = f

    solvers = {}
    for key, span in spans.items():
        rows: dict = {}
        cols = [{rows.setdefault(r, len(rows)): c for r, c in f.items()} for f in span]
        solvers[key] = (rows, Solver(Matrix.from_columns(fs, len(rows), cols)))

    def coordinates(key, vec: Vec) -> Vec:
        rows, solver = solvers[key]
        assert set(vec) <= set(rows), f"{name}: closure is missing a map in {key}"
        x = solver.coordinates({rows[r]: c for r, c in vec.items()})
        assert x is not None, f"{name}: closure is missing a map in {key}"
        return {labels[key][j]: c for j, c in x.items() if not fs.is_zero(c)}

    products, differential = {}, {}
    for g, (Xg, Yg, kg) in morphisms.items():
        for f, (Xf, Yf, kf) in morphisms.items():
            if Yf != Xg:
                continue
            gf = _compose(fs, vectors[g], vectors[f])
            if gf:
                products[(g, f)] = coordinates((Xf, Yg, kf + kg), gf)
        dg = _commutator(fs, spaces[Xg], spaces[Yg], vectors[g], kg)
        if dg:
            differential[g] = coordinates((Xg, Yg, kg + 1), dg)
    A = make_category(fs, objects, morphisms, products, differential, {X: f"id_{X}" for X in objects}, name=name)

    action: dict = {}
    for f in morphisms:
        for (u, v), c in vectors[f].items():
            action.setdefault(f, {}).setdefault(v, {})[u] = c
    w = make_fibre_functor(A, spaces, action, "ω")
    return Project(name, A, {"ω": w}, params={"level": 4, "normalized": True})


def random_instance(
    seed: int,
    fs: FieldSpec | None = None,
    max_objects: int = 2,
    max_fibre: int = 2,
    max_generators: int = 3,
    max_arrows: int = 6,
) -> Project:
    """A random dg subcategory of the endomorphism category of small complexes; ω is the inclusion.

    Every ω(X) sits in degrees -1..0 and may carry a nonzero differential. Random maps
    of degree -1 and random chain maps of degree 0 are closed under composition and
    f ↦ d∘f - (-1)^{|f|} f∘d, so composition is associative and ω is a dg functor by
    construction. Draws needing more than ``max_arrows`` non-identity arrows are
    discarded, and every accepted draw passes the category and fibre functor validators.
    """
    rng = np.random.default_rng(seed)
    fs = fs or FieldSpec(109)
    name = f"random#{seed}"
    for _ in range(100):
        objects = [f"X{i}" for i in range(int(rng.integers(1, max_objects + 1)))]
        spaces = {X: _random_space(fs, rng, X, max_fibre) for X in objects}
        gens = []
        for _ in range(int(rng.integers(1, max_generators + 1))):
            X, Y = (str(o) for o in rng.choice(objects, 2))
            k = int(rng.integers(-1, 1))
            gens.append((X, Y, k, _random_map(fs, rng, spaces[X], spaces[Y], k)))
        spans = _close(fs, spaces, gens, max_arrows)
        if spans is None:
            continue
        P = _closure_project(fs, name, objects, spaces, spans)
        if validate_category(P.category).passed and validate_fibre_functor(P.fibre).passed:
            return P
    raise RuntimeError(f"{name}: no admissible draw")


def random_corpus(count: int = 25, seed: int = 0, fs: FieldSpec | None = None) -> list[Project]:
    return [random_instance(seed + i, fs) for i in range(count)]
