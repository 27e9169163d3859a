"""Modules over a dg category and the reconstruction harness.

P = B(hom(-,·), 𝒜, ω) is a left 𝒜-module and a right C-comodule resolving ω;
Q = B(ω^∨, 𝒜, hom(·,-)) is its mirror, a right 𝒜-module and left C-comodule
resolving ω^∨. Right modules and C-comodules are compared through -⊗_𝒜P and
Hom_C(P, -).

Truncated coalgebras and comodules enter the adjunction as finite filtration
pieces: every complex is taken as stored and verdicts are read off on a band of
degrees kept clear of truncation effects.
"""

from dataclasses import dataclass, field
from math import inf
from typing import Callable, Hashable, Mapping, Sequence

from .comod import (
    DgCoalgebra,
    DgComodule,
    comodule_hom_embedding,
    validate_comodule,
)
from .dgcat import (
    DgCategoryPresentation,
    DgModule,
    FibreFunctor,
    IntervalExtension,
    ModuleMap,
    MonoidalPresentation,
    NaturalTransformation,
    Obj,
    all_homs_left,
    all_homs_right,
    dual_fibre_module,
    fibre_module,
    interval_extension,
    module_cone,
    representable,
    representable_map,
    validate_module,
    zero_module,
)
from .errors import CoalgebraAxiomFailure, CoalgebraMismatch, NotCompactPresentation
from .exactlin import rank
from .hochschild import (
    Bialgebra,
    InducedMap,
    TannakianDual,
    _nondegenerate,
    _push,
    _shuffle,
    bar_levels,
    bialgebra_multiplication,
    fibre_coev,
    functoriality_map,
    normalized_complex,
    split_string,
    tannakian_dual,
    total_complex,
)
from .homalg import (
    EMPTY,
    ChainMap,
    GradedSpace,
    Hom,
    Label,
    Quotient,
    QuasiIsoReport,
    Vec,
    Window,
    WindowedComplex,
    bounds,
    certified_degrees,
    coordinates,
    direct_sum,
    finite_piece,
    hom_bounds,
    hom_complex,
    hom_value,
    homology,
    is_chain_map,
    is_quasi_iso,
    linear_kernel,
    partition,
    quotient_complex,
    span_solver,
    subcomplex,
    tensor,
    tensor_bounds,
    vadd,
    vsub,
)
from ._utils import Report, sign, unstable


# -----------------------------------------------------------------------------
# tensor and Hom over 𝒜

def tensor_over_A_quotient(M: DgModule, N: DgModule) -> Quotient:
    """M⊗_𝒜N as the quotient of ⊕_X M(X)⊗N(X) by m·a⊗n - m⊗a·n."""
    assert M.side == "right" and N.side == "left", "need a right module and a left module"
    assert M.category is N.category
    A = M.category
    fs = A.field
    S = direct_sum([tensor(M.value(X), N.value(X)) for X in A.objects], name=f"{M.name}⊗_{A.name}{N.name}")
    relations: dict[int, list] = {}
    ex = S.exact_window
    for a in A.non_identity():
        X, Y = A.src(a), A.tgt(a)
        ex = ex.intersect(
            tensor_bounds(tensor_bounds(bounds(M.value(Y)), bounds(A.hom(X, Y))), bounds(N.value(X))).exact
        )
        for m in M.value(Y).space.all_labels():
            ma = M.action(a, m)
            for n in N.value(X).space.all_labels():
                rel: Vec = {(m2, n): c for m2, c in ma.items()}
                vadd(fs, rel, {(m, n2): c for n2, c in N.action(a, n).items()}, -1)
                if rel:
                    relations.setdefault(M.degree(m) + A.degree(a) + N.degree(n), []).append(rel)
    return quotient_complex(S, relations, name=S.name, exact_window=ex)


def tensor_over_A(M: DgModule, N: DgModule) -> WindowedComplex:
    return tensor_over_A_quotient(M, N).complex


def module_hom_embedding(M: DgModule, N: DgModule, tag: Hashable = "Hom_A") -> tuple[WindowedComplex, ChainMap]:
    """Natural maps inside ⊕_X Hom(M(X), N(X)).

    Right modules: f(m·a) = f(m)·a. Left modules: f(a·m) = (-1)^{|f||a|} a·f(m).
    """
    assert M.side == N.side and M.category is N.category
    A = M.category
    fs = A.field
    H = direct_sum([hom_complex(M.value(X), N.value(X)) for X in A.objects], name=f"Hom_{A.name}({M.name},{N.name})")
    home = A.tgt if M.side == "right" else A.src
    other = A.src if M.side == "right" else A.tgt
    arrows = A.non_identity()
    inverse: dict = {}
    by_home: dict = {}
    ex = H.exact_window
    for a in arrows:
        by_home.setdefault(home(a), []).append(a)
        ex = ex.intersect(
            hom_bounds(tensor_bounds(bounds(M.value(home(a))), bounds(A.hom(A.src(a), A.tgt(a)))), bounds(N.value(other(a)))).exact
        )
        for m in M.value(home(a)).space.all_labels():
            for x, u in M.action(a, m).items():
                inverse.setdefault(x, []).append((a, m, u))

    def constraint(e):
        y, x = e
        deg = N.degree(y) - M.degree(x)
        out: Vec = {}
        for a, m, u in inverse.get(x, ()):
            vadd(fs, out, {(a, m, y): u})
        for a in by_home.get(M.locate(x), ()):
            s = 1 if M.side == "right" else sign(deg * A.degree(a))
            for y2, v in N.action(a, y).items():
                vadd(fs, out, {(a, x, y2): v}, -s)
        return out

    vectors = {n: linear_kernel(fs, H.labels(n), constraint) for n in H.space.degrees()}
    return subcomplex(H, vectors, tag=tag, exact_window=ex)


def module_hom_complex(M: DgModule, N: DgModule) -> WindowedComplex:
    return module_hom_embedding(M, N)[0]


class _Coordinates:
    """Coordinates of ambient vectors in the basis of an embedded subcomplex."""

    def __init__(self, sub: WindowedComplex, incl: ChainMap):
        self.sub, self.incl = sub, incl
        self._solvers: dict = {}

    def __call__(self, n: int, v: Mapping) -> Vec:
        if not v:
            return {}
        if n not in self._solvers:
            labels = self.sub.labels(n)
            self._solvers[n] = (labels, span_solver(self.sub.field, [self.incl(x) for x in labels]))
        labels, (solver, keys) = self._solvers[n]
        coords = coordinates(solver, keys, v) if labels else None
        assert coords is not None, f"vector in degree {n} leaves {self.sub.name}"
        return {labels[i]: c for i, c in coords.items()}


# -----------------------------------------------------------------------------
# tilting data

def _truncate(c: WindowedComplex, keep: Callable[[Label], bool], name: str) -> WindowedComplex:
    basis = {n: [x for x in c.labels(n) if keep(x)] for n in c.space.degrees()}
    return WindowedComplex(GradedSpace(c.field, basis), c.d, name=name)


@dataclass(frozen=True, eq=False)
class TiltingData:
    category: DgCategoryPresentation
    fibre: FibreFunctor
    level: int
    normalized: bool
    C: TannakianDual
    P: DgModule
    P_comodule: DgComodule
    augmentation: ModuleMap
    Q: DgModule
    Q_comodule: DgComodule
    Q_augmentation: ModuleMap
    report: Report
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def coalgebra_piece(self) -> DgCoalgebra:
        """C as a finite complex."""
        if "C" not in self._cache:
            C = self.C
            self._cache["C"] = DgCoalgebra(finite_piece(C.carrier), C.delta, C.eps, C.name)
        return self._cache["C"]

    def P_piece(self, Y: Obj) -> DgComodule:
        memo = self._cache.setdefault("P", {})
        if Y not in memo:
            memo[Y] = DgComodule(finite_piece(self.P.value(Y)), self.coalgebra_piece, self.P_comodule.coaction, "right", name=f"P({Y})")
        return memo[Y]

    def P_module(self, level: int | None = None) -> DgModule:
        """P on finite pieces, optionally cut down to strings of level ≤ level+1."""
        key = ("Pmod", level)
        if key not in self._cache:
            A = self.category
            if level is None:
                complexes = {Y: self.P_piece(Y).carrier for Y in A.objects}
            else:
                complexes = {Y: _truncate(self.P.value(Y), lambda x: len(x) - 2 <= level + 1, f"P_{level}({Y})") for Y in A.objects}
            self._cache[key] = DgModule(A, "left", complexes, self.P.act, f"P_{self.level if level is None else level}")
        return self._cache[key]

    def over_piece(self, N: DgComodule) -> DgComodule:
        """N as a comodule over the finite piece of C."""
        Cp = self.coalgebra_piece
        if N.coalgebra is Cp:
            return N
        if N.coalgebra is not self.C:
            raise CoalgebraMismatch(f"{N.name} is over {N.coalgebra.name}, not {self.C.name}")
        return DgComodule(finite_piece(N.carrier), Cp, N.coaction, N.side, N.cogenerators, N.name)


def tilting_module(
    A: DgCategoryPresentation,
    w: FibreFunctor,
    level: int = 6,
    normalized: bool = True,
    certify: bool = True,
    verbose: bool = False,
) -> TiltingData:
    fs = A.field
    C = tannakian_dual(A, w, normalized, level, certify=certify, verbose=verbose)
    coev = fibre_coev(w)
    totalize = normalized_complex if normalized else total_complex

    sP = bar_levels(A, all_homs_right(A), fibre_module(w), level + 1)
    totP = totalize(sP, verbose)
    mP = sP.model
    P = DgModule(
        A, "left", partition(totP, lambda x: A.tgt(x[0]), keys=A.objects),
        lambda b, x: {(h,) + x[1:]: c for h, c in A.compose(b, x[0]).items()},
        f"P_{w.name}",
    )

    def coact_P(x):
        out: Vec = {}
        for left, right, e in split_string(mP, x, coev):
            vadd(fs, out, {(left, right): fs.one}, e)
        return out

    P_comodule = DgComodule(totP, C, coact_P, "right", name=P.name)
    omega = fibre_module(w)

    def aug_P(x):
        if len(x) != 2:
            return {}
        g, v = x
        return w.apply(g, v)

    augmentation = ModuleMap(P, omega, aug_P, "P→ω")

    sQ = bar_levels(A, dual_fibre_module(w), all_homs_left(A), level + 1)
    totQ = totalize(sQ, verbose)
    mQ = sQ.model

    def act_Q(b, x):
        e = sign((len(x) - 2) * A.degree(b))
        return {x[:-1] + (h,): c * e for h, c in A.compose(x[-1], b).items()}

    Q = DgModule(A, "right", partition(totQ, lambda x: A.src(x[-1]), keys=A.objects), act_Q, f"Q_{w.name}")

    def coact_Q(x):
        out: Vec = {}
        for left, right, e in split_string(mQ, x, coev):
            vadd(fs, out, {(left, right): fs.one}, e)
        return out

    Q_comodule = DgComodule(totQ, C, coact_Q, "left", name=Q.name)
    omega_dual = dual_fibre_module(w)

    def aug_Q(x):
        if len(x) != 2:
            return {}
        phi, g = x
        return w.transpose(g, phi)

    Q_augmentation = ModuleMap(Q, omega_dual, aug_Q, "Q→ω^∨")

    T = TiltingData(A, w, level, normalized, C, P, P_comodule, augmentation, Q, Q_comodule, Q_augmentation, Report(f"tilting data {w.name}"))
    if certify:
        T.report.merge(validate_tilting(T, verbose=verbose))
        if not T.report.passed:
            raise CoalgebraAxiomFailure(str(T.report))
    return T


def validate_tilting(T: TiltingData, verbose: bool = False) -> Report:
    """Comodule axioms, module axioms, augmentations, and the coaction commuting with the 𝒜-action."""
    A = T.category
    fs = A.field
    report = Report("tilting data")
    report.merge(validate_comodule(T.P_comodule, verbose=verbose))
    report.merge(validate_comodule(T.Q_comodule, verbose=verbose))
    report.merge(validate_module(T.P))
    report.merge(validate_module(T.Q))
    for X in A.objects:
        for M, aug, target in ((T.P, T.augmentation, T.fibre.spaces[X]), (T.Q, T.Q_augmentation, T.fibre.dual_space(X))):
            f = aug.component(X)
            report.merge(is_chain_map(f))
            degrees = certified_degrees(M.value(X)).intersect(certified_degrees(target))
            qi = is_quasi_iso(f, degrees, name=f"{aug.name} at {X!r}")
            report.checked += 1
            if not qi:
                report.fail(str(qi))
    for a in A.non_identity():
        for x in T.P.value(A.src(a)).space.all_labels():
            report.checked += 1
            lhs = T.P_comodule.coaction_vec(T.P.action(a, x))
            rhs: Vec = {}
            for (x1, c), e in T.P_comodule.coaction(x).items():
                for y, u in T.P.action(a, x1).items():
                    vadd(fs, rhs, {(y, c): e * u})
            if vsub(fs, lhs, rhs):
                report.fail(f"coaction does not commute with {a!r} on {x!r}")
        for x in T.Q.value(A.tgt(a)).space.all_labels():
            report.checked += 1
            lhs = T.Q_comodule.coaction_vec(T.Q.action(a, x))
            rhs = {}
            for (c, x1), e in T.Q_comodule.coaction(x).items():
                for y, u in T.Q.action(a, x1).items():
                    vadd(fs, rhs, {(c, y): e * u})
            if vsub(fs, lhs, rhs):
                report.fail(f"coaction does not commute with {a!r} on {x!r}")
    return report


# -----------------------------------------------------------------------------
# the adjunction

@dataclass(frozen=True, eq=False)
class HomModule:
    """Hom_C(P, N) as a right 𝒜-module, with its embedding into Hom_k(P(Y), N)."""

    module: DgModule
    incl: Mapping[Obj, ChainMap]
    coords: Mapping[Obj, _Coordinates]

    def vector(self, f: Label) -> Vec:
        return self.incl[self.module.locate(f)](f)


def hom_c_module(T: TiltingData, N: DgComodule, tag: Hashable = "E") -> HomModule:
    N = T.over_piece(N)
    A = T.category
    fs = A.field
    emb = {Y: comodule_hom_embedding(T.P_piece(Y), N, tag=(tag, Y)) for Y in A.objects}
    coords = {Y: _Coordinates(*emb[Y]) for Y in A.objects}
    grouped: dict = {}

    def by_source(Y, f):
        if f not in grouped:
            table: dict = {}
            for (y, x), e in emb[Y][1](f).items():
                table.setdefault(x, []).append((y, e))
            grouped[f] = table
        return grouped[f]

    def act(b, f):
        Y, Z = A.tgt(b), A.src(b)
        table = by_source(Y, f)
        out: Vec = {}
        for x2 in T.P.value(Z).space.all_labels():
            for x, c in T.P.action(b, x2).items():
                for y, e in table.get(x, ()):
                    vadd(fs, out, {Hom(y, x2): c * e})
        return coords[Z](emb[Y][0].degree(f) + A.degree(b), out)

    E = DgModule(A, "right", {Y: emb[Y][0] for Y in A.objects}, act, f"Hom_C(P,{N.name})")
    return HomModule(E, {Y: emb[Y][1] for Y in A.objects}, coords)


def module_tensor_P(T: TiltingData, M: DgModule, level: int | None = None) -> tuple[Quotient, DgComodule]:
    """M⊗_𝒜P with the coaction on the P factor."""
    q = tensor_over_A_quotient(M, T.P_module(level))
    Cp = T.coalgebra_piece

    def coact(t):
        m, x = t
        out: Vec = {}
        for (x1, c), e in T.P_comodule.coaction(x).items():
            for r, u in q.projection((m, x1)).items():
                vadd(T.category.field, out, {(r, c): e * u})
        return out

    return q, DgComodule(q.complex, Cp, coact, "right", name=f"{M.name}⊗P")


@dataclass
class AdjunctionReport:
    name: str
    level: int
    inner_level: int
    band: Window
    checks: dict[str, QuasiIsoReport] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    @property
    def verdict(self) -> bool:
        return all(bool(c) for c in self.checks.values())

    def verdict_of(self, prefix: str) -> bool:
        return all(bool(c) for k, c in self.checks.items() if k.startswith(prefix))

    def __bool__(self) -> bool:
        return self.verdict

    def __str__(self) -> str:
        lines = [f"{self.name} (L={self.level}, inner L={self.inner_level}) on band {self.band}: {self.verdict}"]
        lines += [str(c) for c in self.checks.values()]
        lines += [f"  note: {n}" for n in self.notes]
        return "\n".join(lines)


def _band(bottom: float, top: float, level: int, inner: int) -> Window:
    """Degrees clear of the truncation artifacts of P at levels ``level`` and ``inner``."""
    return Window.of(bottom - inner, top + level - inner - 1)


def _module_range(M: DgModule) -> tuple[float, float]:
    tops = [M.value(X).space.top for X in M.category.objects]
    bottoms = [M.value(X).space.bottom for X in M.category.objects]
    return min(bottoms), max(tops)


def adjunction_counit(T: TiltingData, N: DgComodule, inner_level: int | None = None) -> AdjunctionReport:
    """ε_N: Hom_C(P, N)⊗_𝒜P → N, evaluation."""
    A = T.category
    fs = A.field
    L = T.level
    Lp = (L + 1) // 2 if inner_level is None else inner_level
    Np = T.over_piece(N)
    E = hom_c_module(T, Np, tag="E")
    q = tensor_over_A_quotient(E.module, T.P_module(Lp))

    def ev(t):
        f, x = t
        return hom_value(fs, E.vector(f), x)

    counit = ChainMap(q.complex, Np.carrier, ev, name=f"ε_{N.name}")
    if N.cogenerators is not None:
        lo, hi = N.cogenerators.space.bottom, N.cogenerators.space.top
    else:
        lo = hi = Np.carrier.space.top - T.C.carrier.space.top
    report = AdjunctionReport(f"counit at {N.name}", L, Lp, EMPTY)
    if not (-inf < lo <= hi < inf):
        lo, hi = 0, 0
    band = _band(lo, hi, L, Lp)
    report.band = band
    if band.empty:
        report.notes.append(f"band is empty; rebuild with truncation level >= {int(lo - hi) + 1}")
        return report
    report.checks["counit"] = is_quasi_iso(counit, band, name="ε")
    chain = is_chain_map(counit)
    if not chain:
        report.notes.append(str(chain))
    return report


@dataclass(frozen=True, eq=False)
class Reconstruction:
    """Hom_C(P, M⊗_𝒜P) with the unit η: M → Hom_C(P, M⊗_𝒜P)."""

    module: DgModule
    hom: HomModule
    tensor: Quotient
    unit: Callable[[Label], Vec]


def reconstruct(T: TiltingData, M: DgModule, tag: Hashable = "F") -> Reconstruction:
    A = T.category
    fs = A.field
    q, G = module_tensor_P(T, M)
    F = hom_c_module(T, G, tag=tag)

    def eta(m):
        Y = M.locate(m)
        out: Vec = {}
        for x in T.P.value(Y).space.all_labels():
            for r, c in q.projection((m, x)).items():
                vadd(fs, out, {Hom(r, x): c})
        return F.coords[Y](M.degree(m), out)

    return Reconstruction(F.module, F, q, eta)


def adjunction_unit(T: TiltingData, M: DgModule, inner_level: int | None = None) -> AdjunctionReport:
    """η_M: M → Hom_C(P, M⊗_𝒜P); (a) η itself, (b) η⊗_𝒜P."""
    A = T.category
    fs = A.field
    L = T.level
    Lp = (L + 1) // 2 if inner_level is None else inner_level
    R = reconstruct(T, M)
    lo, hi = _module_range(M)
    report = AdjunctionReport(f"unit at {M.name}", L, Lp, EMPTY)
    if not (-inf < lo <= hi < inf):
        lo, hi = 0, 0
    band = _band(lo, hi, L, Lp)
    report.band = band
    if band.empty:
        report.notes.append(f"band is empty; rebuild with truncation level >= {int(lo - hi) + 1}")
        return report
    for Y in A.objects:
        eta = ChainMap(finite_piece(M.value(Y)), R.module.value(Y), R.unit, name=f"η({Y})")
        report.checks[f"a: η at {Y!r}"] = is_quasi_iso(eta, band, name=f"(a) η at {Y!r}")

    Pin = T.P_module(Lp)
    src = tensor_over_A_quotient(M, Pin)
    tgt = tensor_over_A_quotient(R.module, Pin)

    def eta_P(t):
        m, x = t
        out: Vec = {}
        for f, c in R.unit(m).items():
            vadd(fs, out, tgt.projection((f, x)), c)
        return out

    report.checks["b: η⊗P"] = is_quasi_iso(ChainMap(src.complex, tgt.complex, eta_P, name="η⊗P"), band, name="(b) η⊗_𝒜P")
    return report


@unstable
def retraction_idempotence(T: TiltingData, M: DgModule, band: Window | None = None) -> Report:
    """Homology of R(M) and R(R(M)), R = Hom_C(P, -⊗_𝒜P), agree on the band."""
    A = T.category
    R1 = reconstruct(T, M, tag="R1")
    R2 = reconstruct(T, R1.module, tag="R2")
    if band is None:
        lo, hi = _module_range(M)
        Lp = (T.level + 1) // 2
        band = _band(lo, hi, T.level, Lp) if -inf < lo <= hi < inf else Window(0, 0)
    report = Report(f"retraction idempotence at {M.name}")
    report.note(f"band {band}")
    if band.empty:
        return report
    for Y in A.objects:
        once, twice = R1.module.value(Y), R2.module.value(Y)
        for n in band.degrees():
            report.checked += 1
            h1, h2 = homology(once, n).dim, homology(twice, n).dim
            if h1 != h2:
                report.fail(f"H^{n} at {Y!r}: R(M) has {h1}, R(R(M)) has {h2}")
    return report


# -----------------------------------------------------------------------------
# ker ω and its orthogonal

def ker_omega_membership(M: DgModule, w: FibreFunctor, window: Window | None = None) -> Report:
    """M⊗_𝒜ω acyclic on the window (all certified degrees by default)."""
    c = tensor_over_A(M, fibre_module(w))
    window = certified_degrees(c) if window is None else window
    report = Report(f"{M.name} in ker {w.name}")
    if window.empty:
        return report
    for n in window.degrees():
        report.checked += 1
        h = homology(c, n).dim
        if h:
            report.fail(f"H^{n}({M.name}⊗_𝒜{w.name}) has dimension {h}")
    return report


def orthogonality_check(
    M: DgModule,
    kernel_witnesses: Sequence[DgModule],
    w: FibreFunctor | None = None,
    window: Window | None = None,
) -> Report:
    """Hom_𝒜(K, M) acyclic on the window for every witness K."""
    report = Report(f"{M.name} in (ker ω)^⊥")
    for K in kernel_witnesses:
        if w is not None:
            member = ker_omega_membership(K, w)
            if not member:
                report.fail(f"witness {K.name} is not in ker {w.name}")
                continue
        H = module_hom_complex(K, M)
        degrees = certified_degrees(H) if window is None else window
        if degrees.empty:
            continue
        for n in degrees.degrees():
            report.checked += 1
            h = homology(H, n).dim
            if h:
                report.fail(f"H^{n} Hom({K.name}, {M.name}) has dimension {h}")
    return report


def kernel_witnesses(A: DgCategoryPresentation) -> list[DgModule]:
    """Modules in ker ω for every ω: zero and the cones of identities."""
    return [zero_module(A)] + [module_cone(representable_map(A, A.identities[X])) for X in A.objects]


def interval_witnesses(ext: IntervalExtension) -> list[DgModule]:
    """cone(h_{(X,0)} → h_{(X,1)}) in 𝒜×I, killed by η̄ when η is invertible."""
    AI = ext.category
    A = ext.inclusions[0].source
    return [module_cone(representable_map(AI, (A.identities[X], "∂"))) for X in A.objects]


# -----------------------------------------------------------------------------
# compact modules and preduals

@dataclass(frozen=True, eq=False)
class TwistedComplex:
    """⊕_i h_{X_i}[n_i] with twisting t_{ji}: X_i → X_j of degree n_j - n_i + 1."""

    category: DgCategoryPresentation
    terms: Sequence[tuple[Obj, int]]
    twist: Mapping[tuple[int, int], Mapping] = field(default_factory=dict)
    name: str = "M"


def validate_twisted(Tw: TwistedComplex) -> Report:
    A = Tw.category
    fs = A.field
    report = Report(f"twisted complex {Tw.name}")
    k = len(Tw.terms)
    for X, _ in Tw.terms:
        if X not in A.objects:
            report.fail(f"unknown object {X!r}")
    if report.failures:
        return report
    for (j, i), t in Tw.twist.items():
        if not (0 <= i < k and 0 <= j < k):
            report.fail(f"twist index ({j}, {i}) out of range")
            continue
        (Xi, ni), (Xj, nj) = Tw.terms[i], Tw.terms[j]
        for a in t:
            if a not in A.morphisms or A.src(a) != Xi or A.tgt(a) != Xj or A.degree(a) != nj - ni + 1:
                report.fail(f"t_({j},{i}) has component {a!r} outside hom({Xi!r}, {Xj!r}) in degree {nj - ni + 1}")
    if report.failures:
        return report
    for l in range(k):
        for i in range(k):
            report.checked += 1
            out: Vec = {}
            t = Tw.twist.get((l, i), {})
            for a, c in t.items():
                vadd(fs, out, A.d(a), c * sign(Tw.terms[l][1]))
            for j in range(k):
                vadd(fs, out, A.compose_vec(Tw.twist.get((l, j), {}), Tw.twist.get((j, i), {})))
            if out:
                report.fail(f"Maurer-Cartan equation fails at ({l}, {i})")
    return report


def twisted_module(Tw: TwistedComplex) -> DgModule:
    """The right module on labels (i, g), g ∈ hom(Y, X_i), in degree |g| - n_i."""
    report = validate_twisted(Tw)
    if not report.passed:
        raise NotCompactPresentation(str(report))
    A = Tw.category
    fs = A.field
    complexes = {}
    for Y in A.objects:
        basis: dict[int, list] = {}
        for i, (X, n) in enumerate(Tw.terms):
            for g in A.basis(Y, X):
                basis.setdefault(A.degree(g) - n, []).append((i, g))

        def d(t):
            i, g = t
            out: Vec = {(i, h): c * sign(Tw.terms[i][1]) for h, c in A.d(g).items()}
            for (j, i2), tv in Tw.twist.items():
                if i2 == i:
                    for h, c in A.compose_vec(tv, {g: fs.one}).items():
                        vadd(fs, out, {(j, h): c})
            return out

        complexes[Y] = WindowedComplex(GradedSpace(fs, basis), d, name=f"{Tw.name}({Y})")

    def act(a, t):
        i, g = t
        return {(i, h): c for h, c in A.compose(g, a).items()}

    return DgModule(A, "right", complexes, act, Tw.name)


@dataclass(frozen=True, eq=False)
class Predual:
    source: DgModule
    module: DgModule
    incl: Mapping[Obj, ChainMap]


def predual(M: TwistedComplex | DgModule) -> Predual:
    """M′(Z) = Hom_𝒜(M, h_Z), a left module by postcomposition."""
    if isinstance(M, TwistedComplex):
        M = twisted_module(M)
    elif M.side != "right":
        raise NotCompactPresentation(f"{M.name} is not a right module")
    A = M.category
    fs = A.field
    emb = {Z: module_hom_embedding(M, representable(A, Z), tag=("′", Z)) for Z in A.objects}
    coords = {Z: _Coordinates(*emb[Z]) for Z in A.objects}

    def act(b, psi):
        Z = A.tgt(b)
        out: Vec = {}
        for (y, x), c in emb[A.src(b)][1](psi).items():
            for y2, e in A.compose(b, y).items():
                vadd(fs, out, {Hom(y2, x): c * e})
        return coords[Z](emb[A.src(b)][0].degree(psi) + A.degree(b), out)

    Mp = DgModule(A, "left", {Z: emb[Z][0] for Z in A.objects}, act, f"{M.name}′")
    return Predual(M, Mp, {Z: emb[Z][1] for Z in A.objects})


def predual_comparison(D: Predual, N: DgModule) -> Report:
    """Φ: M⊗_𝒜N → Hom_𝒜(M′, N), Φ(m⊗n)(ψ) = (-1)^{|ψ|(|m|+|n|)} ψ(m)·n, is an isomorphism."""
    M, Mp = D.source, D.module
    A = M.category
    fs = A.field
    q = tensor_over_A_quotient(M, N)
    H, incl = module_hom_embedding(Mp, N, tag="Φ")
    coords = _Coordinates(H, incl)
    psis = [(Z, psi) for Z in A.objects for psi in Mp.value(Z).space.all_labels()]

    def phi(t):
        m, n = t
        deg = M.degree(m) + N.degree(n)
        out: Vec = {}
        for Z, psi in psis:
            s = sign(Mp.degree(psi) * deg)
            for a, c in hom_value(fs, D.incl[Z](psi), m).items():
                for n2, e in N.action(a, n).items():
                    vadd(fs, out, {Hom(n2, psi): c * e}, s)
        return coords(deg, out)

    f = ChainMap(q.complex, H, phi, name="Φ")
    report = Report(f"predual comparison for {M.name}, {N.name}")
    report.merge(is_chain_map(f))
    for n in sorted(set(q.complex.space.degrees()) | set(H.space.degrees())):
        report.checked += 1
        a, b = q.complex.space.dim(n), H.space.dim(n)
        if a != b or (a and rank(f.matrix(n)) != a):
            report.fail(f"Φ is not bijective in degree {n} (dims {a} → {b})")
    return report


# -----------------------------------------------------------------------------
# homotopy invariance and the monoidal tilting module

@dataclass
class SpanReport:
    extension: IntervalExtension
    maps: tuple[InducedMap, InducedMap]
    checks: dict[str, QuasiIsoReport]

    @property
    def verdict(self) -> bool:
        return all(m.report.passed for m in self.maps) and all(bool(c) for c in self.checks.values())

    def __bool__(self) -> bool:
        return self.verdict

    def __str__(self) -> str:
        lines = [f"span C_ω(𝒜) → C_η̄(𝒜×I) ← C_ω'(𝒜): {self.verdict}"]
        lines += [str(m.report) for m in self.maps]
        lines += [str(c) for c in self.checks.values()]
        return "\n".join(lines)


def span_quasi_iso(
    A: DgCategoryPresentation,
    w: FibreFunctor,
    w2: FibreFunctor,
    eta: NaturalTransformation,
    level: int = 4,
    normalized: bool = True,
) -> SpanReport:
    """Both legs of the span through 𝒜×I are coalgebra quasi-isomorphisms."""
    ext = interval_extension(A, w, w2, eta, strict=True)
    maps = tuple(
        functoriality_map(inc, f, ext.fibre, end_map=end, normalized=normalized, level=level)
        for inc, f, end in zip(ext.inclusions, (w, w2), ext.end_maps)
    )
    checks = {}
    for name, m in zip(("i0", "i1"), maps):
        degrees = certified_degrees(m.source.carrier).intersect(certified_degrees(m.target.carrier))
        checks[name] = is_quasi_iso(m.map, degrees, name=f"C({name})")
    return SpanReport(ext, maps, checks)


def tilting_multiplication(
    T: TiltingData,
    Mon: MonoidalPresentation,
    tensor_basis: Mapping[tuple[Label, Label], Label],
    bialgebra: Bialgebra | None = None,
) -> Report:
    """P(X)⊗P(Y) → P(X⊠Y) by shuffle and ⊠; unit (id_𝟙, u); the coaction is multiplicative."""
    assert T.normalized, "the monoidal structure lives on the normalized tilting module"
    B = bialgebra or bialgebra_multiplication(Mon, T.fibre, tensor_basis, level=T.level)
    A = T.category
    fs = A.field
    mP = bar_levels(A, all_homs_right(A), fibre_module(T.fibre), 0).model
    u = T.fibre.spaces[Mon.unit].space.all_labels()[0]
    one = (A.identities[Mon.unit], u)
    top = T.level + 1
    head = lambda gh: Mon.mor(*gh)
    slot = lambda ab: Mon.mor(*ab)
    tail = lambda vw: {tensor_basis[vw]: fs.one}
    memo: dict = {}

    def mult(x, y):
        if (x, y) not in memo:
            img: Vec = {}
            for s, c in _shuffle(fs, mP, mP, x, y, join=lambda g, h: (g, h)).items():
                vadd(fs, img, _push(fs, s, [head] + [slot] * (len(s) - 2) + [tail]), c)
            memo[(x, y)] = _nondegenerate(mP, img)
        return memo[(x, y)]

    report = Report("tilting multiplication")
    labels = T.P_comodule.carrier.space.all_labels()
    lv = lambda x: len(x) - 2
    deg = T.P_comodule.carrier.degree
    cdeg = T.C.carrier.degree
    for x in labels:
        report.checked += 1
        if vsub(fs, mult(one, x), {x: fs.one}) or vsub(fs, mult(x, one), {x: fs.one}):
            report.fail(f"unit law fails on {x!r}")
    for x in labels:
        for y in labels:
            if lv(x) + lv(y) > top:
                continue
            report.checked += 1
            lhs = T.P_comodule.coaction_vec(mult(x, y))
            rhs: Vec = {}
            for (x1, c1), a in T.P_comodule.coaction(x).items():
                for (y1, c2), b in T.P_comodule.coaction(y).items():
                    e = sign(cdeg(c1) * deg(y1))
                    for s, p in mult(x1, y1).items():
                        for t, q in B.multiply(c1, c2).items():
                            vadd(fs, rhs, {(s, t): a * b * p * q}, e)
            if vsub(fs, lhs, rhs):
                report.fail(f"coaction is not multiplicative on ({x!r}, {y!r})")
    return report
