"""Dg coalgebras and dg comodules over k.

Coalgebra elements are vectors over the carrier's labels; Δ(x) is a vector over
pairs (l, r) and ε(x) a scalar. A right comodule sends m to a vector over
(m', c), a left comodule to a vector over (c, m').
"""

from dataclasses import dataclass, field
from math import inf
from typing import Callable, Hashable, Literal, Mapping

from .errors import CoalgebraAxiomFailure, CoalgebraMismatch
from .exactlin import FieldSpec, Scalar
from .homalg import (
    EMPTY,
    ChainMap,
    GradedSpace,
    QuasiIsoReport,
    Vec,
    Window,
    WindowedComplex,
    bounds,
    certified_degrees,
    cone,
    ground,
    hom_bounds,
    hom_complex,
    is_chain_map,
    is_quasi_iso,
    linear_kernel,
    subcomplex,
    tensor,
    tensor_bounds,
    vadd,
    vsub,
)
from ._utils import Report, heuristic, progress, sign

Label = Hashable
Side = Literal["left", "right"]


# -----------------------------------------------------------------------------
# coalgebras

@dataclass(frozen=True, eq=False)
class DgCoalgebra:
    carrier: WindowedComplex
    comultiply: Callable[[Label], Vec]
    counit: Callable[[Label], Scalar]
    name: str = "C"
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def field(self) -> FieldSpec:
        return self.carrier.field

    def delta(self, x: Label) -> Vec:
        memo = self._cache.setdefault("delta", {})
        if x not in memo:
            memo[x] = self.comultiply(x)
        return memo[x]

    def eps(self, x: Label) -> Scalar:
        memo = self._cache.setdefault("eps", {})
        if x not in memo:
            memo[x] = self.counit(x)
        return memo[x]

    def delta_vec(self, v: Mapping) -> Vec:
        out: Vec = {}
        for x, c in v.items():
            vadd(self.field, out, self.delta(x), c)
        return out

    def eps_vec(self, v: Mapping) -> Scalar:
        fs = self.field
        acc = fs.zero
        for x, c in v.items():
            acc = acc + c * self.eps(x)
        return acc

    def __str__(self) -> str:
        return f"coalgebra {self.name} on {self.carrier}"


def ground_coalgebra(fs: FieldSpec) -> DgCoalgebra:
    """k with Δ(1) = 1⊗1."""
    return DgCoalgebra(ground(fs), lambda x: {(x, x): fs.one}, lambda x: fs.one, name="k")


def _tensor_diff(a: WindowedComplex, b: WindowedComplex, pair: tuple) -> Vec:
    fs = a.field
    x, y = pair
    out: Vec = {}
    for x2, c in a.diff(x).items():
        vadd(fs, out, {(x2, y): c})
    s = sign(a.degree(x))
    for y2, c in b.diff(y).items():
        vadd(fs, out, {(x, y2): c}, s)
    return out


def _tensor_diff_vec(a: WindowedComplex, b: WindowedComplex, v: Mapping) -> Vec:
    out: Vec = {}
    for pair, c in v.items():
        vadd(a.field, out, _tensor_diff(a, b, pair), c)
    return out


def validate_coalgebra(C: DgCoalgebra, verbose: bool = False, limit: int | None = None) -> Report:
    """Coassociativity, both counit laws, Δ and ε as chain maps, on every stored basis element."""
    fs = C.field
    X = C.carrier
    report = Report(f"coalgebra {C.name}")
    labels = X.space.all_labels()
    if limit is not None:
        labels = labels[:limit]
        report.note(f"checked the first {len(labels)} basis elements only")
    for x in progress(labels, f"validate {C.name}", verbose):
        n = X.degree(x)
        dx = C.delta(x)
        report.checked += 1
        stray = [lr for lr in dx if lr[0] not in X.space or lr[1] not in X.space]
        if stray:
            report.fail(f"Δ({x!r}) has components outside the carrier, e.g. {stray[0]!r}")
            continue
        if any(X.degree(l) + X.degree(r) != n for l, r in dx):
            report.fail(f"Δ({x!r}) is not homogeneous of degree {n}")
            continue
        if n != 0 and not fs.is_zero(C.eps(x)):
            report.fail(f"ε({x!r}) is nonzero off degree 0")

        lhs: Vec = {}
        rhs: Vec = {}
        left: Vec = {}
        right: Vec = {}
        for (l, r), c in dx.items():
            for (l1, l2), e in C.delta(l).items():
                vadd(fs, lhs, {(l1, l2, r): c * e})
            for (r1, r2), e in C.delta(r).items():
                vadd(fs, rhs, {(l, r1, r2): c * e})
            vadd(fs, left, {r: c * C.eps(l)})
            vadd(fs, right, {l: c * C.eps(r)})
        if vsub(fs, lhs, rhs):
            report.fail(f"not coassociative on {x!r}")
        if vsub(fs, left, {x: fs.one}) or vsub(fs, right, {x: fs.one}):
            report.fail(f"counit law fails on {x!r}")
        if vsub(fs, C.delta_vec(X.diff(x)), _tensor_diff_vec(X, X, dx)):
            report.fail(f"Δ does not commute with d on {x!r}")
        if not fs.is_zero(C.eps_vec(X.diff(x))):
            report.fail(f"ε∘d != 0 on {x!r}")
    return report


def validate_coalgebra_map(g: ChainMap, src: DgCoalgebra, tgt: DgCoalgebra) -> Report:
    """g a chain map with (g⊗g)Δ = Δg and εg = ε."""
    fs = src.field
    report = Report(f"coalgebra map {g.name}".strip())
    report.merge(is_chain_map(g))
    for x in src.carrier.space.all_labels():
        gx = g(x)
        report.checked += 1
        lhs: Vec = {}
        for (l, r), c in src.delta(x).items():
            gl, gr = g(l), g(r)
            for a, u in gl.items():
                for b, v in gr.items():
                    vadd(fs, lhs, {(a, b): c * u * v})
        if vsub(fs, lhs, tgt.delta_vec(gx)):
            report.fail(f"does not commute with Δ on {x!r}")
        if tgt.eps_vec(gx) != src.eps(x):
            report.fail(f"does not preserve ε on {x!r}")
    return report


# -----------------------------------------------------------------------------
# comodules

@dataclass(frozen=True, eq=False)
class DgComodule:
    carrier: WindowedComplex
    coalgebra: DgCoalgebra
    coact: Callable[[Label], Vec]
    side: Side = "right"
    cogenerators: WindowedComplex | None = None
    name: str = "M"
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def field(self) -> FieldSpec:
        return self.carrier.field

    def coaction(self, m: Label) -> Vec:
        memo = self._cache.setdefault("rho", {})
        if m not in memo:
            memo[m] = self.coact(m)
        return memo[m]

    def coaction_vec(self, v: Mapping) -> Vec:
        out: Vec = {}
        for m, c in v.items():
            vadd(self.field, out, self.coaction(m), c)
        return out

    def split(self, key: tuple) -> tuple[Label, Label]:
        """(module part, coalgebra part) of a coaction label."""
        return key if self.side == "right" else (key[1], key[0])

    def __str__(self) -> str:
        return f"{self.side} {self.coalgebra.name}-comodule {self.name} on {self.carrier}"


def validate_comodule(M: DgComodule, verbose: bool = False) -> Report:
    fs = M.field
    C = M.coalgebra
    X, K = M.carrier, C.carrier
    report = Report(f"{M.side} comodule {M.name}")
    for m in progress(X.space.all_labels(), f"validate {M.name}", verbose):
        rho = M.coaction(m)
        report.checked += 1
        parts = [M.split(k) for k in rho]
        stray = [p for p in parts if p[0] not in X.space or p[1] not in K.space]
        if stray:
            report.fail(f"ρ({m!r}) has components outside the window, e.g. {stray[0]!r}")
            continue
        if any(X.degree(a) + K.degree(c) != X.degree(m) for a, c in parts):
            report.fail(f"ρ({m!r}) is not homogeneous")
            continue

        lhs: Vec = {}
        rhs: Vec = {}
        unit: Vec = {}
        for key, e in rho.items():
            a, c = M.split(key)
            vadd(fs, unit, {a: e * C.eps(c)})
            if M.side == "right":
                for (a2, c1), u in M.coaction(a).items():
                    vadd(fs, lhs, {(a2, c1, c): e * u})
                for (c1, c2), u in C.delta(c).items():
                    vadd(fs, rhs, {(a, c1, c2): e * u})
            else:
                for (c1, c2), u in C.delta(c).items():
                    vadd(fs, lhs, {(c1, c2, a): e * u})
                for (c1, a2), u in M.coaction(a).items():
                    vadd(fs, rhs, {(c, c1, a2): e * u})
        if vsub(fs, lhs, rhs):
            report.fail(f"not coassociative on {m!r}")
        if vsub(fs, unit, {m: fs.one}):
            report.fail(f"counit law fails on {m!r}")
        if M.side == "right":
            dr = _tensor_diff_vec(X, K, rho)
        else:
            dr = _tensor_diff_vec(K, X, rho)
        if vsub(fs, M.coaction_vec(X.diff(m)), dr):
            report.fail(f"ρ does not commute with d on {m!r}")
    return report


def validate_comodule_map(f: ChainMap, P: DgComodule, N: DgComodule) -> Report:
    """f a degree-0 chain map with ρ_N∘f = (f⊗1)∘ρ_P."""
    fs = P.field
    report = Report(f"comodule map {f.name}".strip())
    report.merge(is_chain_map(f))
    for x in P.carrier.space.all_labels():
        report.checked += 1
        pushed: Vec = {}
        for key, e in P.coaction(x).items():
            a, c = P.split(key)
            for b, u in f(a).items():
                vadd(fs, pushed, {(b, c) if N.side == "right" else (c, b): e * u})
        if vsub(fs, N.coaction_vec(f(x)), pushed):
            report.fail(f"does not commute with the coaction on {x!r}")
    return report


def _certified(M: DgComodule, certify: bool) -> DgComodule:
    if certify:
        report = validate_comodule(M)
        if not report.passed:
            raise CoalgebraAxiomFailure(str(report))
    return M


def regular_comodule(C: DgCoalgebra, side: Side = "right") -> DgComodule:
    """C coacting on itself through Δ."""
    return DgComodule(C.carrier, C, C.delta, side, name=C.name)


def cofree(V: WindowedComplex, C: DgCoalgebra, side: Side = "right", certify: bool = True) -> DgComodule:
    """V⊗C with coaction 1⊗Δ (or C⊗V with Δ⊗1 on the left)."""
    fs = C.field
    if side == "right":
        carrier = tensor(V, C.carrier, name=f"{V.name}⊗{C.name}")

        def coact(vc):
            v, c = vc
            return {((v, c1), c2): e for (c1, c2), e in C.delta(c).items()}
    elif side == "left":
        carrier = tensor(C.carrier, V, name=f"{C.name}⊗{V.name}")

        def coact(cv):
            c, v = cv
            return {(c1, (c2, v)): e for (c1, c2), e in C.delta(c).items()}
    else:
        raise ValueError(f"Unknown comodule side: {side}")
    M = DgComodule(carrier, C, lambda x: dict(coact(x)), side, cogenerators=V, name=f"cofree({V.name})")
    assert fs == carrier.field
    return _certified(M, certify)


def comodule_cone(f: ChainMap, P: DgComodule, N: DgComodule, certify: bool = True) -> DgComodule:
    """cone(f) of a comodule map; the left coaction on the shifted part picks up (-1)^{|c|}."""
    carrier = cone(f)
    K = P.coalgebra.carrier

    def coact(t):
        tag, x = t
        src = P if tag == "a" else N
        out = {}
        for key, e in src.coaction(x).items():
            a, c = src.split(key)
            if src.side == "right":
                out[((tag, a), c)] = e
            else:
                out[(c, (tag, a))] = e * sign(K.degree(c)) if tag == "a" else e
        return out

    return _certified(DgComodule(carrier, P.coalgebra, coact, P.side, name=f"cone({f.name})"), certify)


# -----------------------------------------------------------------------------
# cotensor and comodule Hom

def _same_coalgebra(*ms: DgComodule) -> DgCoalgebra:
    C = ms[0].coalgebra
    for M in ms[1:]:
        if M.coalgebra is not C:
            raise CoalgebraMismatch(f"{M.name} is over {M.coalgebra.name}, expected {C.name}")
    return C


def cotensor_embedding(N: DgComodule, M: DgComodule) -> tuple[WindowedComplex, ChainMap]:
    """N□M = ker(ρ_N⊗1 - 1⊗ρ_M) inside N⊗M, with its inclusion."""
    C = _same_coalgebra(N, M)
    if N.side != "right" or M.side != "left":
        raise CoalgebraMismatch("cotensor needs a right comodule and a left comodule")
    fs = C.field
    T = tensor(N.carrier, M.carrier)

    def constraint(nm):
        n, m = nm
        out: Vec = {}
        for (n2, c), e in N.coaction(n).items():
            vadd(fs, out, {(n2, c, m): e})
        for (c, m2), e in M.coaction(m).items():
            vadd(fs, out, {(n, c, m2): -e})
        return out

    vectors = {k: linear_kernel(fs, T.labels(k), constraint) for k in T.space.degrees()}
    bn, bm, bc = bounds(N.carrier), bounds(M.carrier), bounds(C.carrier)
    ex = tensor_bounds(bn, bm).exact.intersect(tensor_bounds(tensor_bounds(bn, bc), bm).exact)
    sub, incl = subcomplex(T, vectors, tag="□", exact_window=ex)
    return sub, incl


def cotensor(N: DgComodule, M: DgComodule) -> WindowedComplex:
    return cotensor_embedding(N, M)[0]


def comodule_hom_embedding(P: DgComodule, N: DgComodule, tag: Hashable = "Hom_C") -> tuple[WindowedComplex, ChainMap]:
    """Hom_C(P, N) inside Hom_k(P, N): maps f with ρ_N∘f = (f⊗1)∘ρ_P."""
    C = _same_coalgebra(P, N)
    if P.side != N.side:
        raise CoalgebraMismatch("comodule Hom needs two comodules on the same side")
    fs = C.field
    K = C.carrier
    H = hom_complex(P.carrier, N.carrier)
    # x' ↦ [(x, c, coeff)] read backwards: which x' have x in their coaction
    inverse: dict = {}
    for x2 in P.carrier.space.all_labels():
        for key, e in P.coaction(x2).items():
            x, c = P.split(key)
            inverse.setdefault(x, []).append((x2, c, e))

    def constraint(h):
        y, x = h
        deg = N.carrier.degree(y) - P.carrier.degree(x)
        out: Vec = {}
        for key, e in N.coaction(y).items():
            y2, c = N.split(key)
            vadd(fs, out, {(x, c, y2): e})
        for x2, c, e in inverse.get(x, ()):
            s = 1 if P.side == "right" else sign(deg * K.degree(c))
            vadd(fs, out, {(x2, c, y): -e}, s)
        return out

    vectors = {k: linear_kernel(fs, H.labels(k), constraint) for k in H.space.degrees()}
    bp, bn = bounds(P.carrier), bounds(N.carrier)
    ex = hom_bounds(bp, bn).exact.intersect(hom_bounds(bp, tensor_bounds(bn, bounds(K))).exact)
    return subcomplex(H, vectors, tag=tag, exact_window=ex)


def comodule_hom_complex(P: DgComodule, N: DgComodule) -> WindowedComplex:
    return comodule_hom_embedding(P, N)[0]


# -----------------------------------------------------------------------------
# cobar resolution

@dataclass(frozen=True, eq=False)
class BarResolution:
    """Normalized cobar M⊗C̄^{⊗n}⊗C, levels 0..depth, with the augmentation M → level 0."""

    comodule: DgComodule
    augmentation: ChainMap
    certificate: QuasiIsoReport
    depth: int
    pivot: Label | None

    @property
    def complex(self) -> WindowedComplex:
        return self.comodule.carrier


def _pivot(C: DgCoalgebra) -> Label | None:
    for x in C.carrier.labels(0):
        if not C.field.is_zero(C.eps(x)):
            return x
    return None


def bar_resolution(M: DgComodule, depth: int = 4, verbose: bool = False) -> BarResolution:
    """Truncated cobar resolution of a right comodule.

    Level n holds m⊗c̄_1⊗..⊗c̄_n⊗c in total degree (internal + n), where c̄ runs
    over x̄ = x - ε(x)/ε(p)·p for the basis elements x ≠ p and p is a fixed
    element with ε(p) ≠ 0. The differential is δ + (-1)^n d with
    δ = Σ_i (-1)^i δ^i, δ^0 = ρ_M and δ^i = Δ on the i-th coalgebra slot.
    When the reduced coalgebra reaches degree 0 or above no depth is exact, and
    only level 0 is built with an empty certificate.
    """
    assert depth >= 0
    if M.side != "right":
        raise ValueError(f"Unknown comodule side for a cobar resolution: {M.side}")
    C = M.coalgebra
    fs = C.field
    X, K = M.carrier, C.carrier
    p = _pivot(C)
    bar_labels = [x for x in K.space.all_labels() if x != p]
    bar_top = max((K.degree(x) for x in bar_labels), default=None)
    if bar_top is not None and bar_top >= 0:
        # no level count gives an exact window, so only M⊗C is materialized
        heuristic(f"cobar resolution of {M.name}: reduced coalgebra reaches degree {bar_top}, no exact window")
        depth = 0

    def expand(c):
        """x̄ as a vector over C."""
        if p is None or fs.is_zero(C.eps(c)):
            return {c: fs.one}
        return {c: fs.one, p: -C.eps(c) / C.eps(p)}

    def internal(t):
        return X.degree(t[0]) + sum(K.degree(c) for c in t[1:])

    basis: dict[int, list] = {}
    for n in progress(range(depth + 1), "cobar levels", verbose):
        layer = [(m,) for m in X.space.all_labels()]
        for _ in range(n):
            layer = [t + (c,) for t in layer for c in bar_labels]
        layer = [t + (c,) for t in layer for c in K.space.all_labels()]
        for t in layer:
            basis.setdefault(internal(t) + n, []).append(t)

    def keep(t):
        return len(t) - 2 <= depth and all(c != p for c in t[1:-1])

    def expanded(t):
        """Terms of m⊗x̄_1⊗..⊗x̄_n⊗c over plain basis strings."""
        terms = {(t[0],): fs.one}
        for c in t[1:-1]:
            terms_next: Vec = {}
            for s, a in terms.items():
                for y, b in expand(c).items():
                    vadd(fs, terms_next, {s + (y,): a * b})
            terms = terms_next
        return {s + (t[-1],): a for s, a in terms.items()}

    def coface(s):
        """δ on a plain string, one level up."""
        out: Vec = {}
        for (m2, c0), e in M.coaction(s[0]).items():
            vadd(fs, out, {(m2, c0) + s[1:]: e})
        for i in range(1, len(s)):
            for (c1, c2), e in C.delta(s[i]).items():
                vadd(fs, out, {s[:i] + (c1, c2) + s[i + 1:]: e}, sign(i))
        return out

    def internal_d(s):
        out: Vec = {}
        deg = 0
        for i, tok in enumerate(s):
            space = X if i == 0 else K
            for y, e in space.diff(tok).items():
                vadd(fs, out, {s[:i] + (y,) + s[i + 1:]: e}, sign(deg))
            deg += space.degree(tok)
        return out

    def d(t):
        n = len(t) - 2
        out: Vec = {}
        for s, a in expanded(t).items():
            if n < depth:
                vadd(fs, out, coface(s), a)
            vadd(fs, out, internal_d(s), a * sign(n))
        return {s: e for s, e in out.items() if keep(s)}

    top = X.space.top + K.space.top
    ex = tensor_bounds(bounds(X), bounds(K)).exact
    if bar_top is not None and bar_top <= -1:
        ex = ex.intersect(Window.of(top + (depth + 1) * (bar_top + 1) - 1, inf))
    elif bar_top is not None:
        ex = EMPTY
    carrier = WindowedComplex(
        GradedSpace(fs, basis), d, exact_window=ex, name=f"cobar({M.name})",
    )

    def coact(t):
        return {(t[:-1] + (c1,), c2): e for (c1, c2), e in C.delta(t[-1]).items()}

    R = DgComodule(carrier, C, coact, "right", cogenerators=None, name=f"cobar({M.name})")
    aug = ChainMap(X, carrier, lambda m: {(a, c): e for (a, c), e in M.coaction(m).items()}, name="ρ")
    degrees = certified_degrees(carrier).intersect(certified_degrees(X)) if not ex.empty else EMPTY
    return BarResolution(R, aug, is_quasi_iso(aug, degrees, name=f"augmentation {M.name} → cobar"), depth, p)
