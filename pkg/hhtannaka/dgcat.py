"""Finitely presented dg categories, fibre functors, bimodules and modules.

Direction convention: ``hom(X, Y)`` holds the morphisms X → Y and ``compose(g, f)``
is g∘f. Formulas written with the reversed accessor 𝒜(x, y) go through
``DgCategoryPresentation.hom_to(x, y)``, which is hom(y, x).
"""

from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Callable, Hashable, Literal, Mapping, NamedTuple, Sequence

from .errors import ComponentNotQuasiIso, NaturalityFailure
from .exactlin import FieldSpec, Scalar
from .homalg import (
    ChainMap,
    Dual,
    GradedSpace,
    Label,
    Vec,
    Window,
    WindowedComplex,
    cone,
    direct_sum,
    dual,
    is_quasi_iso,
    tensor,
    vadd,
    vmap,
    vscale,
    vsub,
)
from ._utils import Report, sign

Obj = Hashable


class Morphism(NamedTuple):
    src: Obj
    tgt: Obj
    degree: int


# -----------------------------------------------------------------------------
# categories

@dataclass(frozen=True, eq=False)
class DgCategoryPresentation:
    """Objects, labelled hom bases, differential and composition structure constants.

    ``products[(g, f)]`` is g∘f for pairs where neither factor is an identity;
    missing entries are zero and identities act implicitly.
    """

    field: FieldSpec
    objects: tuple
    morphisms: Mapping[Label, Morphism]
    identities: Mapping[Obj, Label]
    differential: Mapping[Label, Mapping] = field(default_factory=dict)
    products: Mapping[tuple[Label, Label], Mapping] = field(default_factory=dict)
    name: str = ""
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        homs: dict = {}
        for f, m in self.morphisms.items():
            homs.setdefault((m.src, m.tgt), []).append(f)
        object.__setattr__(self, "_homs", {k: tuple(v) for k, v in homs.items()})
        object.__setattr__(self, "_identity_set", frozenset(self.identities.values()))

    def src(self, f: Label) -> Obj:
        return self.morphisms[f].src

    def tgt(self, f: Label) -> Obj:
        return self.morphisms[f].tgt

    def degree(self, f: Label) -> int:
        return self.morphisms[f].degree

    def is_identity(self, f: Label) -> bool:
        return f in self._identity_set

    def basis(self, X: Obj, Y: Obj) -> tuple[Label, ...]:
        return self._homs.get((X, Y), ())

    def non_identity(self) -> list[Label]:
        return [f for f in self.morphisms if not self.is_identity(f)]

    def d(self, f: Label) -> Vec:
        return dict(self.differential.get(f, {}))

    def compose(self, g: Label, f: Label) -> Vec:
        """g∘f; zero when the pair is not composable."""
        if self.src(g) != self.tgt(f):
            return {}
        if self.is_identity(g):
            return {f: self.field.one}
        if self.is_identity(f):
            return {g: self.field.one}
        return dict(self.products.get((g, f), {}))

    def compose_vec(self, gv: Mapping, fv: Mapping) -> Vec:
        out: Vec = {}
        for g, a in gv.items():
            for f, b in fv.items():
                vadd(self.field, out, self.compose(g, f), a * b)
        return out

    def hom(self, X: Obj, Y: Obj) -> WindowedComplex:
        """Finite complex of morphisms X → Y."""
        memo = self._cache.setdefault("hom", {})
        if (X, Y) not in memo:
            basis: dict[int, list] = {}
            for f in self.basis(X, Y):
                basis.setdefault(self.degree(f), []).append(f)
            memo[(X, Y)] = WindowedComplex(GradedSpace(self.field, basis), self.d, name=f"hom({X},{Y})")
        return memo[(X, Y)]

    def hom_to(self, x: Obj, y: Obj) -> WindowedComplex:
        """𝒜(x, y) := hom(y, x)."""
        return self.hom(y, x)

    def homs_from(self, X: Obj) -> WindowedComplex:
        """⊕_Y hom(X, Y)."""
        return direct_sum([self.hom(X, Y) for Y in self.objects], name=f"hom({X},-)")

    def homs_into(self, Y: Obj) -> WindowedComplex:
        """⊕_X hom(X, Y)."""
        return direct_sum([self.hom(X, Y) for X in self.objects], name=f"hom(-,{Y})")

    @cached_property
    def max_degree(self) -> int | None:
        degs = [self.degree(f) for f in self.non_identity()]
        return max(degs) if degs else None

    def signature(self) -> dict:
        """Canonical, name-free description; equal signatures mean equal presentations."""
        fs = self.field
        return {
            "field": fs.kind,
            "objects": [str(X) for X in self.objects],
            "morphisms": {str(f): [str(m.src), str(m.tgt), m.degree] for f, m in self.morphisms.items()},
            "identities": {str(X): str(i) for X, i in self.identities.items()},
            "differential": {str(f): {str(g): fs.format(c) for g, c in v.items()} for f, v in sorted(self.differential.items(), key=str) if v},
            "products": {f"{g}*{f}": {str(h): fs.format(c) for h, c in v.items()} for (g, f), v in sorted(self.products.items(), key=str) if v},
        }


def _check_vec(A: DgCategoryPresentation, v: Mapping, src: Obj, tgt: Obj, degree: int) -> str | None:
    for h in v:
        if h not in A.morphisms:
            return f"unknown morphism {h!r}"
        m = A.morphisms[h]
        if (m.src, m.tgt, m.degree) != (src, tgt, degree):
            return f"{h!r} is {m.src}->{m.tgt} in degree {m.degree}, expected {src}->{tgt} in degree {degree}"
    return None


def validate_category(A: DgCategoryPresentation) -> Report:
    report = Report(f"category {A.name}".strip())
    fs = A.field
    for f, m in A.morphisms.items():
        if m.src not in A.objects or m.tgt not in A.objects:
            report.fail(f"{f!r} has an endpoint outside the object list")
    for X in A.objects:
        i = A.identities.get(X)
        if i is None or i not in A.morphisms:
            report.fail(f"object {X!r} has no identity")
            continue
        if A.morphisms[i] != Morphism(X, X, 0):
            report.fail(f"identity {i!r} of {X!r} is not a degree-0 endomorphism")
        if A.differential.get(i):
            report.fail(f"d({i!r}) != 0")
    for (g, f), v in A.products.items():
        if A.is_identity(g) or A.is_identity(f):
            report.fail(f"product table lists an identity factor in {g!r}*{f!r}")
            continue
        if A.src(g) != A.tgt(f):
            report.fail(f"product {g!r}*{f!r} is not composable")
            continue
        err = _check_vec(A, v, A.src(f), A.tgt(g), A.degree(g) + A.degree(f))
        if err:
            report.fail(f"{g!r}*{f!r}: {err}")
    for f, v in A.differential.items():
        err = _check_vec(A, v, A.src(f), A.tgt(f), A.degree(f) + 1)
        if err:
            report.fail(f"d({f!r}): {err}")
    if report.failures:
        return report
    for f in A.morphisms:
        report.checked += 1
        if _dvec(A, A.d(f)):
            report.fail(f"d^2 != 0 on {f!r}")
    labels = list(A.morphisms)
    for g in labels:
        for f in labels:
            if A.src(g) != A.tgt(f):
                continue
            report.checked += 1
            lhs = _dvec(A, A.compose(g, f))
            rhs = A.compose_vec(A.d(g), {f: fs.one})
            vadd(fs, rhs, A.compose_vec({g: fs.one}, A.d(f)), sign(A.degree(g)))
            if vsub(fs, lhs, rhs):
                report.fail(f"Leibniz fails on ({g!r}, {f!r})")
    for h in labels:
        for g in labels:
            if A.src(h) != A.tgt(g):
                continue
            for f in labels:
                if A.src(g) != A.tgt(f):
                    continue
                report.checked += 1
                lhs = A.compose_vec(A.compose(h, g), {f: fs.one})
                rhs = A.compose_vec({h: fs.one}, A.compose(g, f))
                if vsub(fs, lhs, rhs):
                    report.fail(f"associativity fails on ({h!r}, {g!r}, {f!r})")
    return report


def _dvec(A: DgCategoryPresentation, v: Mapping) -> Vec:
    out: Vec = {}
    for f, c in v.items():
        vadd(A.field, out, A.d(f), c)
    return out


def make_category(
    fs: FieldSpec,
    objects: Sequence[Obj],
    morphisms: Mapping[Label, tuple[Obj, Obj, int]],
    products: Mapping[tuple[Label, Label], Mapping] | None = None,
    differential: Mapping[Label, Mapping] | None = None,
    identities: Mapping[Obj, Label] | None = None,
    name: str = "",
) -> DgCategoryPresentation:
    """Convenience constructor; identities default to ``id_X`` labels prepended to the basis."""
    identities = dict(identities or {X: f"id_{X}" for X in objects})
    mors = {identities[X]: Morphism(X, X, 0) for X in objects}
    mors.update({f: Morphism(*m) for f, m in morphisms.items()})
    conv = lambda table: {k: {h: fs(c) for h, c in v.items()} for k, v in (table or {}).items()}
    return DgCategoryPresentation(fs, tuple(objects), mors, identities, conv(differential), conv(products), name)


def opposite(A: DgCategoryPresentation) -> DgCategoryPresentation:
    """hom_op(X, Y) = hom(Y, X) and f ∘op g = (-1)^{|f||g|} g∘f."""
    mors = {f: Morphism(m.tgt, m.src, m.degree) for f, m in A.morphisms.items()}
    prods = {(f, g): vscale(A.field, v, sign(A.degree(f) * A.degree(g))) for (g, f), v in A.products.items()}
    name = A.name[:-3] if A.name.endswith("^op") else f"{A.name}^op"
    return DgCategoryPresentation(A.field, A.objects, mors, dict(A.identities), dict(A.differential), prods, name)


def tensor_categories(A: DgCategoryPresentation, B: DgCategoryPresentation, name: str | None = None) -> DgCategoryPresentation:
    """Objects (X, U); morphisms (a, b) with (a⊗b)∘(a'⊗b') = (-1)^{|b||a'|} aa'⊗bb'."""
    if A.field != B.field:
        raise ValueError(f"Field mismatch: {A.field} vs {B.field}")
    fs = A.field
    objects = tuple(product(A.objects, B.objects))
    identities = {(X, U): (A.identities[X], B.identities[U]) for X, U in objects}
    mors = {}
    for a, ma in A.morphisms.items():
        for b, mb in B.morphisms.items():
            mors[(a, b)] = Morphism((ma.src, mb.src), (ma.tgt, mb.tgt), ma.degree + mb.degree)
    differential = {}
    for a, b in mors:
        out: Vec = {}
        for a2, c in A.d(a).items():
            vadd(fs, out, {(a2, b): c})
        for b2, c in B.d(b).items():
            vadd(fs, out, {(a, b2): c}, sign(A.degree(a)))
        if out:
            differential[(a, b)] = out
    idset = set(identities.values())
    products = {}
    for (a, b), m in mors.items():
        if (a, b) in idset:
            continue
        for (a2, b2), m2 in mors.items():
            if (a2, b2) in idset or m.src != m2.tgt:
                continue
            left, right = A.compose(a, a2), B.compose(b, b2)
            s = sign(B.degree(b) * A.degree(a2))
            out = {}
            for x, c in left.items():
                for y, e in right.items():
                    vadd(fs, out, {(x, y): c * e}, s)
            if out:
                products[((a, b), (a2, b2))] = out
    return DgCategoryPresentation(fs, objects, mors, identities, differential, products, name or f"{A.name}⊗{B.name}")


def full_subcategory(A: DgCategoryPresentation, objects: Sequence[Obj]) -> DgCategoryPresentation:
    keep = set(objects)
    mors = {f: m for f, m in A.morphisms.items() if m.src in keep and m.tgt in keep}
    return DgCategoryPresentation(
        A.field, tuple(X for X in A.objects if X in keep), mors,
        {X: A.identities[X] for X in A.objects if X in keep},
        {f: v for f, v in A.differential.items() if f in mors},
        {k: v for k, v in A.products.items() if k[0] in mors and k[1] in mors},
        f"{A.name}|{','.join(map(str, objects))}",
    )


def interval_category(fs: FieldSpec) -> DgCategoryPresentation:
    """Two objects 0, 1 and one degree-0 arrow ∂: 0 → 1."""
    return make_category(fs, [0, 1], {"∂": (0, 1, 0)}, identities={0: "id0", 1: "id1"}, name="I")


# -----------------------------------------------------------------------------
# functors

@dataclass(frozen=True, eq=False)
class DgFunctor:
    source: DgCategoryPresentation
    target: DgCategoryPresentation
    on_objects: Mapping[Obj, Obj]
    on_morphisms: Mapping[Label, Mapping]
    name: str = "F"

    def apply(self, f: Label) -> Vec:
        if self.source.is_identity(f):
            return {self.target.identities[self.on_objects[self.source.src(f)]]: self.target.field.one}
        return dict(self.on_morphisms.get(f, {}))

    def apply_vec(self, v: Mapping) -> Vec:
        out: Vec = {}
        for f, c in v.items():
            vadd(self.target.field, out, self.apply(f), c)
        return out


def identity_functor(A: DgCategoryPresentation) -> DgFunctor:
    return DgFunctor(A, A, {X: X for X in A.objects}, {f: {f: A.field.one} for f in A.non_identity()}, "id")


def inclusion_functor(A: DgCategoryPresentation, objects: Sequence[Obj]) -> DgFunctor:
    B = full_subcategory(A, objects)
    return DgFunctor(B, A, {X: X for X in B.objects}, {f: {f: A.field.one} for f in B.non_identity()}, "incl")


def validate_functor(F: DgFunctor) -> Report:
    B, A = F.source, F.target
    report = Report(f"functor {F.name}")
    fs = A.field
    for f in B.morphisms:
        img = F.apply(f)
        err = _check_vec(A, img, F.on_objects[B.src(f)], F.on_objects[B.tgt(f)], B.degree(f))
        if err:
            report.fail(f"F({f!r}): {err}")
            continue
        report.checked += 1
        if vsub(fs, _dvec(A, img), F.apply_vec(B.d(f))):
            report.fail(f"F does not commute with d on {f!r}")
    for g in B.morphisms:
        for f in B.morphisms:
            if B.src(g) != B.tgt(f):
                continue
            report.checked += 1
            if vsub(fs, A.compose_vec(F.apply(g), F.apply(f)), F.apply_vec(B.compose(g, f))):
                report.fail(f"F does not preserve the composite ({g!r}, {f!r})")
    return report


# -----------------------------------------------------------------------------
# fibre functors

@dataclass(frozen=True, eq=False)
class FibreFunctor:
    """X ↦ ω(X) finite complexes on globally unique labels, a ↦ ω(a).

    ``action[a][v]`` is ω(a)v for non-identity a; missing entries are zero.
    """

    category: DgCategoryPresentation
    spaces: Mapping[Obj, WindowedComplex]
    action: Mapping[Label, Mapping[Label, Mapping]]
    name: str = "ω"
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        where = {}
        for X, c in self.spaces.items():
            for v in c.space.all_labels():
                if v in where:
                    raise ValueError(f"fibre label {v!r} used by both {where[v]!r} and {X!r}")
                where[v] = X
        object.__setattr__(self, "_where", where)

    @property
    def field(self) -> FieldSpec:
        return self.category.field

    def locate(self, v: Label) -> Obj:
        return self._where[v]

    def degree(self, v: Label) -> int:
        return self.spaces[self._where[v]].degree(v)

    def apply(self, a: Label, v: Label) -> Vec:
        A = self.category
        if A.is_identity(a):
            return {v: self.field.one} if self._where.get(v) == A.src(a) else {}
        return dict(self.action.get(a, {}).get(v, {}))

    def apply_vec(self, a: Label, vec: Mapping) -> Vec:
        out: Vec = {}
        for v, c in vec.items():
            vadd(self.field, out, self.apply(a, v), c)
        return out

    def dual_space(self, X: Obj) -> WindowedComplex:
        memo = self._cache.setdefault("dual", {})
        if X not in memo:
            memo[X] = dual(self.spaces[X], name=f"{self.name}({X})^∨")
        return memo[X]

    def transpose(self, a: Label, phi: Dual) -> Vec:
        """φ·a = φ∘ω(a) for φ in ω(tgt a)^∨, as a vector in ω(src a)^∨."""
        memo = self._cache.setdefault("tr", {})
        key = (a, phi)
        if key not in memo:
            A = self.category
            out: Vec = {}
            if self._where.get(phi.of) == A.tgt(a):
                for w in self.spaces[A.src(a)].space.all_labels():
                    c = self.apply(a, w).get(phi.of)
                    if c is not None:
                        out[Dual(w)] = c
            memo[key] = out
        return memo[key]

    def coev(self, X: Obj) -> list[tuple[Label, Dual]]:
        """Σ_b b⊗b^∨, the degree-0 coevaluation of ω(X)."""
        return [(b, Dual(b)) for b in self.spaces[X].space.all_labels()]

    def pair(self, phi: Dual, v: Label) -> Scalar:
        return self.field.one if phi.of == v else self.field.zero

    def dims(self) -> dict[Obj, int]:
        return {X: c.space.total_dim for X, c in self.spaces.items()}


def validate_fibre_functor(w: FibreFunctor) -> Report:
    A = w.category
    fs = A.field
    report = Report(f"fibre functor {w.name}")
    for X in A.objects:
        if X not in w.spaces:
            report.fail(f"no space for object {X!r}")
    if report.failures:
        return report
    for a in A.morphisms:
        sX, sY = w.spaces[A.src(a)], w.spaces[A.tgt(a)]
        for v in sX.space.all_labels():
            img = w.apply(a, v)
            for u in img:
                if u not in sY.space or sY.degree(u) != sX.degree(v) + A.degree(a):
                    report.fail(f"{w.name}({a!r}) sends {v!r} outside {w.name}({A.tgt(a)}) in the right degree")
                    break
            # ω(da) = d∘ω(a) - (-1)^{|a|} ω(a)∘d
            report.checked += 1
            lhs = _apply_combo(w, A.d(a), v)
            rhs = sY.apply_d(img)
            vadd(fs, rhs, w.apply_vec(a, sX.diff(v)), -sign(A.degree(a)))
            if vsub(fs, lhs, rhs):
                report.fail(f"{w.name} does not commute with d on {a!r} at {v!r}")
    for g in A.morphisms:
        for f in A.morphisms:
            if A.src(g) != A.tgt(f):
                continue
            for v in w.spaces[A.src(f)].space.all_labels():
                report.checked += 1
                lhs = w.apply_vec(g, w.apply(f, v))
                rhs = _apply_combo(w, A.compose(g, f), v)
                if vsub(fs, lhs, rhs):
                    report.fail(f"{w.name}({g!r}∘{f!r}) != {w.name}({g!r})∘{w.name}({f!r}) at {v!r}")
                    break
    return report


def _apply_combo(w: FibreFunctor, combo: Mapping, v: Label) -> Vec:
    out: Vec = {}
    for a, c in combo.items():
        vadd(w.field, out, w.apply(a, v), c)
    return out


def make_fibre_functor(
    A: DgCategoryPresentation,
    spaces: Mapping[Obj, WindowedComplex],
    action: Mapping[Label, Mapping[Label, Mapping]],
    name: str = "ω",
) -> FibreFunctor:
    fs = A.field
    conv = {a: {v: {u: fs(c) for u, c in img.items()} for v, img in m.items()} for a, m in action.items()}
    return FibreFunctor(A, dict(spaces), conv, name)


def tensor_fibre_functor(w1: FibreFunctor, w2: FibreFunctor, category: DgCategoryPresentation | None = None) -> FibreFunctor:
    """ω⊙ω' on ℬ⊗𝒞: (b⊗c)(v⊗w) = (-1)^{|c||v|} bv⊗cw on labels (v, w)."""
    B, C = w1.category, w2.category
    BC = category or tensor_categories(B, C)
    fs = BC.field
    spaces = {(X, U): tensor(w1.spaces[X], w2.spaces[U], name=f"{w1.name}({X})⊗{w2.name}({U})") for X, U in BC.objects}
    action: dict = {}
    for (b, c) in BC.non_identity():
        X, U = B.src(b), C.src(c)
        table = {}
        for v in w1.spaces[X].space.all_labels():
            bv = w1.apply(b, v)
            if not bv:
                continue
            s = sign(C.degree(c) * w1.degree(v))
            for w in w2.spaces[U].space.all_labels():
                cw = w2.apply(c, w)
                img: Vec = {}
                for v2, x in bv.items():
                    for w2l, y in cw.items():
                        vadd(fs, img, {(v2, w2l): x * y}, s)
                if img:
                    table[(v, w)] = img
        if table:
            action[(b, c)] = table
    return FibreFunctor(BC, spaces, action, f"{w1.name}⊙{w2.name}")


def pullback_fibre(w: FibreFunctor, F: DgFunctor) -> tuple[FibreFunctor, Callable[[Label], tuple[Label, Scalar]]]:
    """ω∘F on labels (X, v), with the end identification (X, v) ↦ v."""
    B = F.source
    fs = B.field
    spaces = {}
    for X in B.objects:
        c = w.spaces[F.on_objects[X]]
        basis = {n: [(X, v) for v in c.labels(n)] for n in c.space.degrees()}
        spaces[X] = WindowedComplex(
            GradedSpace(fs, basis),
            (lambda c, X: lambda xv: {(X, u): e for u, e in c.diff(xv[1]).items()})(c, X),
            name=f"{w.name}F({X})",
        )
    action: dict = {}
    for b in B.non_identity():
        X, Y = B.src(b), B.tgt(b)
        img_b = F.apply(b)
        table = {}
        for v in w.spaces[F.on_objects[X]].space.all_labels():
            img = {(Y, u): c for u, c in _apply_combo(w, img_b, v).items()}
            if img:
                table[(X, v)] = img
        if table:
            action[b] = table
    return FibreFunctor(B, spaces, action, f"{w.name}∘{F.name}"), (lambda xv: (xv[1], fs.one))


# -----------------------------------------------------------------------------
# bimodules

@dataclass(frozen=True, eq=False)
class Bimodule:
    """F(X, Y) with left action hom(X, X')⊗F(X, Y) → F(X', Y) and right action
    F(X, Y)⊗hom(Y', Y) → F(X, Y')."""

    category: DgCategoryPresentation
    values: Mapping[tuple[Obj, Obj], WindowedComplex]
    left: Callable[[Label, Label], Vec]
    right: Callable[[Label, Label], Vec]
    name: str = "F"

    def __post_init__(self):
        where = {}
        for XY, c in self.values.items():
            for f in c.space.all_labels():
                where[f] = XY
        object.__setattr__(self, "_where", where)

    @property
    def field(self) -> FieldSpec:
        return self.category.field

    def locate(self, f: Label) -> tuple[Obj, Obj]:
        return self._where[f]

    def degree(self, f: Label) -> int:
        return self.values[self._where[f]].degree(f)

    def act_left(self, a: Label, f: Label) -> Vec:
        A = self.category
        if A.src(a) != self._where[f][0]:
            return {}
        if A.is_identity(a):
            return {f: self.field.one}
        return self.left(a, f)

    def act_right(self, f: Label, a: Label) -> Vec:
        A = self.category
        if A.tgt(a) != self._where[f][1]:
            return {}
        if A.is_identity(a):
            return {f: self.field.one}
        return self.right(f, a)

    def diff(self, f: Label) -> Vec:
        return self.values[self._where[f]].diff(f)


def validate_bimodule(F: Bimodule) -> Report:
    A = F.category
    fs = A.field
    report = Report(f"bimodule {F.name}")
    labels = list(A.morphisms)
    for f in F._where:
        X, Y = F.locate(f)
        for a in labels:
            if A.src(a) == X:
                report.checked += 1
                lhs = vmap(fs, F.act_left(a, f), F.diff)
                rhs = vmap(fs, A.d(a), lambda b: F.act_left(b, f))
                vadd(fs, rhs, vmap(fs, F.diff(f), lambda g: F.act_left(a, g)), sign(A.degree(a)))
                if vsub(fs, lhs, rhs):
                    report.fail(f"left action is not a chain map at ({a!r}, {f!r})")
                for b in labels:
                    if A.src(b) == A.tgt(a):
                        lhs = vmap(fs, F.act_left(a, f), lambda g: F.act_left(b, g))
                        rhs = vmap(fs, A.compose(b, a), lambda c: F.act_left(c, f))
                        if vsub(fs, lhs, rhs):
                            report.fail(f"left action not associative at ({b!r}, {a!r}, {f!r})")
                    if A.tgt(b) == Y:
                        lhs = vmap(fs, F.act_left(a, f), lambda g: F.act_right(g, b))
                        rhs = vmap(fs, F.act_right(f, b), lambda g: F.act_left(a, g))
                        if vsub(fs, lhs, rhs):
                            report.fail(f"actions do not commute at ({a!r}, {f!r}, {b!r})")
            if A.tgt(a) == Y:
                report.checked += 1
                lhs = vmap(fs, F.act_right(f, a), F.diff)
                rhs = vmap(fs, F.diff(f), lambda g: F.act_right(g, a))
                vadd(fs, rhs, vmap(fs, A.d(a), lambda b: F.act_right(f, b)), sign(F.degree(f)))
                if vsub(fs, lhs, rhs):
                    report.fail(f"right action is not a chain map at ({f!r}, {a!r})")
                for b in labels:
                    if A.tgt(b) == A.src(a):
                        lhs = vmap(fs, F.act_right(f, a), lambda g: F.act_right(g, b))
                        rhs = vmap(fs, A.compose(a, b), lambda c: F.act_right(f, c))
                        if vsub(fs, lhs, rhs):
                            report.fail(f"right action not associative at ({f!r}, {a!r}, {b!r})")
    return report


def coefficient_bimodule(w: FibreFunctor) -> Bimodule:
    """F(X, Y) = ω(X)⊗ω(Y)^∨ on labels (v, Dual(u))."""
    A = w.category
    values = {(X, Y): tensor(w.spaces[X], w.dual_space(Y)) for X in A.objects for Y in A.objects}

    def left(a, f):
        v, phi = f
        return {(u, phi): c for u, c in w.apply(a, v).items()}

    def right(f, a):
        v, phi = f
        return {(v, psi): c for psi, c in w.transpose(a, phi).items()}

    return Bimodule(A, values, left, right, f"{w.name}⊗{w.name}^∨")


def yoneda_bimodule(A: DgCategoryPresentation) -> Bimodule:
    """F(x, y) = ⊕_{U,V} hom(V, x)⊗hom(y, U) on labels (v, g)."""
    values = {(x, y): tensor(A.homs_into(x), A.homs_from(y)) for x in A.objects for y in A.objects}
    fs = A.field

    def left(a, f):
        v, g = f
        return {(u, g): c for u, c in A.compose(a, v).items()}

    def right(f, a):
        v, g = f
        return {(v, h): c for h, c in A.compose(g, a).items()}

    return Bimodule(A, values, left, right, "h⊗h")


# -----------------------------------------------------------------------------
# one-sided modules

Side = Literal["left", "right"]


@dataclass(frozen=True, eq=False)
class DgModule:
    """A dg functor into complexes: right modules are contravariant (m·a), left
    modules covariant (a·m).

    ``act(a, m)`` is only called for non-identity a with m living over the
    matching object: tgt(a) for right modules, src(a) for left modules.
    """

    category: DgCategoryPresentation
    side: Side
    complexes: Mapping[Obj, WindowedComplex]
    act: Callable[[Label, Label], Vec]
    name: str = "M"

    def __post_init__(self):
        match self.side:
            case "left" | "right":
                pass
            case _:
                raise ValueError(f"Unknown module side: {self.side}")
        where = {}
        for X, c in self.complexes.items():
            for m in c.space.all_labels():
                if m in where:
                    raise ValueError(f"module label {m!r} used by both {where[m]!r} and {X!r}")
                where[m] = X
        object.__setattr__(self, "_where", where)

    @property
    def field(self) -> FieldSpec:
        return self.category.field

    def locate(self, m: Label) -> Obj:
        return self._where[m]

    def degree(self, m: Label) -> int:
        return self.complexes[self._where[m]].degree(m)

    def value(self, X: Obj) -> WindowedComplex:
        return self.complexes[X]

    def action(self, a: Label, m: Label) -> Vec:
        A = self.category
        home = A.tgt(a) if self.side == "right" else A.src(a)
        if self._where.get(m) != home:
            return {}
        if A.is_identity(a):
            return {m: self.field.one}
        return self.act(a, m)

    def action_vec(self, a: Label, v: Mapping) -> Vec:
        return vmap(self.field, v, lambda m: self.action(a, m))

    def diff(self, m: Label) -> Vec:
        return self.complexes[self._where[m]].diff(m)

    def all_labels(self) -> list[Label]:
        return list(self._where)


def validate_module(M: DgModule, limit: int | None = None) -> Report:
    A = M.category
    fs = A.field
    report = Report(f"module {M.name}")
    labels = list(A.morphisms)
    elements = M.all_labels()[:limit] if limit else M.all_labels()
    for m in elements:
        X = M.locate(m)
        for a in labels:
            if (A.tgt(a) if M.side == "right" else A.src(a)) != X:
                continue
            report.checked += 1
            lhs = vmap(fs, M.action(a, m), M.diff)
            if M.side == "right":
                rhs = vmap(fs, M.diff(m), lambda n: M.action(a, n))
                vadd(fs, rhs, vmap(fs, A.d(a), lambda b: M.action(b, m)), sign(M.degree(m)))
            else:
                rhs = vmap(fs, A.d(a), lambda b: M.action(b, m))
                vadd(fs, rhs, vmap(fs, M.diff(m), lambda n: M.action(a, n)), sign(A.degree(a)))
            if vsub(fs, lhs, rhs):
                report.fail(f"action is not a chain map at ({a!r}, {m!r})")
            for b in labels:
                if M.side == "right" and A.tgt(b) == A.src(a):
                    lhs = vmap(fs, M.action(a, m), lambda n: M.action(b, n))
                    rhs = vmap(fs, A.compose(a, b), lambda c: M.action(c, m))
                elif M.side == "left" and A.src(b) == A.tgt(a):
                    lhs = vmap(fs, M.action(a, m), lambda n: M.action(b, n))
                    rhs = vmap(fs, A.compose(b, a), lambda c: M.action(c, m))
                else:
                    continue
                report.checked += 1
                if vsub(fs, lhs, rhs):
                    report.fail(f"action not associative at ({a!r}, {b!r}, {m!r})")
    return report


def representable(A: DgCategoryPresentation, X: Obj) -> DgModule:
    """h_X = hom(-, X), a right module: g·a = g∘a."""
    return DgModule(A, "right", {Y: A.hom(Y, X) for Y in A.objects}, lambda a, g: A.compose(g, a), f"h_{X}")


def all_homs_right(A: DgCategoryPresentation) -> DgModule:
    """X ↦ ⊕_Y hom(X, Y) with precomposition."""
    return DgModule(A, "right", {X: A.homs_from(X) for X in A.objects}, lambda a, g: A.compose(g, a), "hom(-,·)")


def all_homs_left(A: DgCategoryPresentation) -> DgModule:
    """X ↦ ⊕_Y hom(Y, X) with postcomposition."""
    return DgModule(A, "left", {X: A.homs_into(X) for X in A.objects}, lambda a, v: A.compose(a, v), "hom(·,-)")


def fibre_module(w: FibreFunctor) -> DgModule:
    """ω as a left module: a·v = ω(a)v."""
    return DgModule(w.category, "left", dict(w.spaces), w.apply, w.name)


def dual_fibre_module(w: FibreFunctor) -> DgModule:
    """ω^∨ as a right module: φ·a = φ∘ω(a)."""
    A = w.category
    return DgModule(A, "right", {X: w.dual_space(X) for X in A.objects}, lambda a, phi: w.transpose(a, phi), f"{w.name}^∨")


def zero_module(A: DgCategoryPresentation, side: Side = "right") -> DgModule:
    return DgModule(A, side, {X: WindowedComplex(GradedSpace(A.field, {}), lambda x: {}, name="0") for X in A.objects}, lambda a, m: {}, "0")


@dataclass(frozen=True, eq=False)
class ModuleMap:
    """Degree-0 closed natural transformation given on basis labels."""

    source: DgModule
    target: DgModule
    f: Callable[[Label], Vec]
    name: str = "f"

    def component(self, X: Obj) -> ChainMap:
        return ChainMap(self.source.value(X), self.target.value(X), self.f, name=f"{self.name}_{X}")


def representable_map(A: DgCategoryPresentation, a: Label) -> ModuleMap:
    """h_X → h_Y, g ↦ a∘g, for a closed degree-0 a: X → Y."""
    assert A.degree(a) == 0 and not A.d(a)
    return ModuleMap(representable(A, A.src(a)), representable(A, A.tgt(a)), lambda g: A.compose(a, g), f"{a}∘-")


def module_cone(f: ModuleMap) -> DgModule:
    """Objectwise cone on labels ("a", m), ("b", n); the shifted summand is twisted by (-1)^{|a|} for left modules."""
    M, N = f.source, f.target
    A = M.category
    fs = A.field
    complexes = {X: cone(f.component(X), name=f"cone({f.name})({X})") for X in A.objects}

    def act(a, t):
        tag, m = t
        if tag == "b":
            return {("b", n): c for n, c in N.action(a, m).items()}
        s = 1 if M.side == "right" else sign(A.degree(a))
        return {("a", n): c for n, c in vscale(fs, M.action(a, m), s).items()}

    return DgModule(A, M.side, complexes, act, f"cone({f.name})")


# -----------------------------------------------------------------------------
# monoidal structure

@dataclass(frozen=True, eq=False)
class MonoidalPresentation:
    """Strict monoidal structure: ⊠ on objects and on morphism pairs.

    ``morphism_product[(a, b)]`` is a⊠b for every pair of morphisms except
    (identity, identity), which is the identity of the product object.
    ``duality`` optionally holds the data of a duality functor X ↦ X*:
    ``{"objects": {X: X*}, "morphisms": {a: vec}, "fibre": {Dual(v): u}}`` with
    ω(X*) identified with ω(X)^∨ through ``fibre``.
    """

    base: DgCategoryPresentation
    unit: Obj
    product: Mapping[tuple[Obj, Obj], Obj]
    morphism_product: Mapping[tuple[Label, Label], Mapping]
    symmetric: bool = False
    duality: Mapping | None = None
    name: str = ""

    def obj(self, X: Obj, Y: Obj) -> Obj:
        return self.product[(X, Y)]

    def mor(self, a: Label, b: Label) -> Vec:
        A = self.base
        if A.is_identity(a) and A.is_identity(b):
            return {A.identities[self.obj(A.src(a), A.src(b))]: A.field.one}
        return dict(self.morphism_product.get((a, b), {}))

    def mor_vec(self, av: Mapping, bv: Mapping) -> Vec:
        out: Vec = {}
        for a, x in av.items():
            for b, y in bv.items():
                vadd(self.base.field, out, self.mor(a, b), x * y)
        return out

    def product_functor(self) -> DgFunctor:
        """⊠: 𝒜⊗𝒜 → 𝒜."""
        A = self.base
        AA = tensor_categories(A, A)
        return DgFunctor(
            AA, A,
            {(X, Y): self.obj(X, Y) for X, Y in AA.objects},
            {(a, b): self.mor(a, b) for (a, b) in AA.non_identity()},
            "⊠",
        )


def validate_monoidal(M: MonoidalPresentation) -> Report:
    A = M.base
    fs = A.field
    report = Report(f"monoidal {M.name}")
    objs = A.objects
    for X in objs:
        if M.obj(M.unit, X) != X or M.obj(X, M.unit) != X:
            report.fail(f"unit law fails on object {X!r}")
        for Y in objs:
            for Z in objs:
                if M.obj(M.obj(X, Y), Z) != M.obj(X, M.obj(Y, Z)):
                    report.fail(f"associativity fails on objects ({X!r}, {Y!r}, {Z!r})")
    if report.failures:
        return report
    idU = A.identities[M.unit]
    for a in A.morphisms:
        report.checked += 1
        if vsub(fs, M.mor(idU, a), {a: fs.one}) or vsub(fs, M.mor(a, idU), {a: fs.one}):
            report.fail(f"unit law fails on {a!r}")
    labels = list(A.morphisms)
    for a in labels:
        for b in labels:
            for c in labels:
                report.checked += 1
                lhs = M.mor_vec(M.mor(a, b), {c: fs.one})
                rhs = M.mor_vec({a: fs.one}, M.mor(b, c))
                if vsub(fs, lhs, rhs):
                    report.fail(f"⊠ not strictly associative on ({a!r}, {b!r}, {c!r})")
    report.merge(validate_functor(M.product_functor()))
    return report


def validate_strict_monoidal_fibre(M: MonoidalPresentation, w: FibreFunctor, tensor_basis: Mapping[tuple[Label, Label], Label]) -> Report:
    """ω(X⊠Y) = ω(X)⊗ω(Y) on bases through ``tensor_basis`` and ω(a⊠b) = ω(a)⊗ω(b)."""
    A = M.base
    fs = A.field
    report = Report(f"strict monoidal {w.name}")
    for X in A.objects:
        for Y in A.objects:
            XY = M.obj(X, Y)
            for v in w.spaces[X].space.all_labels():
                for u in w.spaces[Y].space.all_labels():
                    t = tensor_basis.get((v, u))
                    if t is None or w.locate(t) != XY or w.degree(t) != w.degree(v) + w.degree(u):
                        report.fail(f"basis {v!r}⊗{u!r} has no matching basis vector in {w.name}({XY!r})")
            if len(w.spaces[XY].space.all_labels()) != w.spaces[X].space.total_dim * w.spaces[Y].space.total_dim:
                report.fail(f"dim {w.name}({XY!r}) != dim {w.name}({X!r}) * dim {w.name}({Y!r})")
    if report.failures:
        return report
    for a in A.morphisms:
        for b in A.morphisms:
            X, Y = A.src(a), A.src(b)
            for v in w.spaces[X].space.all_labels():
                for u in w.spaces[Y].space.all_labels():
                    report.checked += 1
                    lhs = _apply_combo(w, M.mor(a, b), tensor_basis[(v, u)])
                    rhs: Vec = {}
                    s = sign(A.degree(b) * w.degree(v))
                    for v2, x in w.apply(a, v).items():
                        for u2, y in w.apply(b, u).items():
                            vadd(fs, rhs, {tensor_basis[(v2, u2)]: x * y}, s)
                    if vsub(fs, lhs, rhs):
                        report.fail(f"{w.name}({a!r}⊠{b!r}) != {w.name}({a!r})⊗{w.name}({b!r}) at {v!r}⊗{u!r}")
    return report


# -----------------------------------------------------------------------------
# natural transformations and the interval construction

@dataclass(frozen=True, eq=False)
class NaturalTransformation:
    source: FibreFunctor
    target: FibreFunctor
    components: Mapping[Obj, Mapping[Label, Mapping]]
    name: str = "η"

    def apply(self, v: Label) -> Vec:
        return dict(self.components[self.source.locate(v)].get(v, {}))

    def component(self, X: Obj) -> ChainMap:
        return ChainMap(self.source.spaces[X], self.target.spaces[X], self.apply, name=f"{self.name}_{X}")


def identity_transformation(w: FibreFunctor) -> NaturalTransformation:
    one = w.field.one
    return NaturalTransformation(w, w, {X: {v: {v: one} for v in c.space.all_labels()} for X, c in w.spaces.items()}, "id")


def validate_natural_transformation(eta: NaturalTransformation, strict: bool = False) -> Report:
    w, w2 = eta.source, eta.target
    A = w.category
    fs = A.field
    report = Report(f"natural transformation {eta.name}")
    for X in A.objects:
        src, tgt = w.spaces[X], w2.spaces[X]
        for v in src.space.all_labels():
            report.checked += 1
            img = eta.apply(v)
            if any(u not in tgt.space or tgt.degree(u) != src.degree(v) for u in img):
                report.fail(f"{eta.name}_{X}({v!r}) leaves degree {src.degree(v)} of {w2.name}({X})")
                continue
            if vsub(fs, tgt.apply_d(img), vmap(fs, src.diff(v), eta.apply)):
                report.fail(f"{eta.name}_{X} is not a chain map at {v!r}")
        if strict:
            c = eta.component(X)
            lo = int(min(src.space.bottom, tgt.space.bottom, 0))
            hi = int(max(src.space.top, tgt.space.top, 0))
            if not is_quasi_iso(c, Window(lo, hi)):
                report.fail(f"component {eta.name}_{X} is not a quasi-isomorphism")
    for a in A.morphisms:
        for v in w.spaces[A.src(a)].space.all_labels():
            report.checked += 1
            lhs = w2.apply_vec(a, eta.apply(v))
            rhs = vmap(fs, w.apply(a, v), eta.apply)
            if vsub(fs, lhs, rhs):
                report.fail(f"naturality square fails for {a!r} at {v!r}")
    return report


@dataclass(frozen=True, eq=False)
class IntervalExtension:
    category: DgCategoryPresentation
    fibre: FibreFunctor
    inclusions: tuple[DgFunctor, DgFunctor]
    end_maps: tuple[Callable, Callable]


def interval_extension(
    A: DgCategoryPresentation,
    w: FibreFunctor,
    w2: FibreFunctor,
    eta: NaturalTransformation,
    strict: bool = False,
) -> IntervalExtension:
    """𝒜×I with the glued functor η̄: (X,0) ↦ ω(X), (X,1) ↦ ω'(X), a⊗∂ ↦ ω'(a)∘η_X."""
    report = validate_natural_transformation(eta, strict=strict)
    if not report.passed:
        if strict and any("quasi-isomorphism" in f for f in report.failures):
            raise ComponentNotQuasiIso("; ".join(report.failures))
        raise NaturalityFailure("; ".join(report.failures))
    fs = A.field
    I = interval_category(fs)
    AI = tensor_categories(A, I, name=f"{A.name}×I")
    spaces = {}
    for X in A.objects:
        for end, f in ((0, w), (1, w2)):
            c = f.spaces[X]
            spaces[(X, end)] = WindowedComplex(
                GradedSpace(fs, {n: [(v, end) for v in c.labels(n)] for n in c.space.degrees()}),
                (lambda c, end: lambda t: {(u, end): e for u, e in c.diff(t[0]).items()})(c, end),
                name=f"{f.name}({X})",
            )
    action: dict = {}
    for (a, i) in AI.non_identity():
        X = A.src(a)
        table = {}
        if i == "id0":
            for v in w.spaces[X].space.all_labels():
                img = {(u, 0): c for u, c in w.apply(a, v).items()}
                if img:
                    table[(v, 0)] = img
        elif i == "id1":
            for v in w2.spaces[X].space.all_labels():
                img = {(u, 1): c for u, c in w2.apply(a, v).items()}
                if img:
                    table[(v, 1)] = img
        else:
            for v in w.spaces[X].space.all_labels():
                img = {(u, 1): c for u, c in w2.apply_vec(a, eta.apply(v)).items()}
                if img:
                    table[(v, 0)] = img
        if table:
            action[(a, i)] = table
    bar = FibreFunctor(AI, spaces, action, f"{eta.name}̄")
    incs = tuple(
        DgFunctor(A, AI, {X: (X, end) for X in A.objects}, {a: {(a, idl): fs.one} for a in A.non_identity()}, f"i{end}")
        for end, idl in ((0, "id0"), (1, "id1"))
    )
    ends = ((lambda v: ((v, 0), fs.one)), (lambda v: ((v, 1), fs.one)))
    return IntervalExtension(AI, bar, incs, ends)
