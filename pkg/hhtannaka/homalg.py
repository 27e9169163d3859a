"""Graded spaces, cochain complexes and their constructions.

Sign ledger, fixed once for the whole package:

    tensor   d(x⊗y) = dx⊗y + (-1)^{|x|} x⊗dy
    swap     τ(x⊗y) = (-1)^{|x||y|} y⊗x
    dual     d(f)   = -(-1)^{|f|} f∘d
    Hom      d(f)   = d∘f - (-1)^{|f|} f∘d
    shift    d_{c[m]} = (-1)^m d_c

Vectors are sparse ``{label: scalar}`` dicts over globally unique basis labels.
Every complex carries an ``exact_window``: the degrees where the stored data is
known to equal the untruncated object. Homology is refused outside it.
"""

from dataclasses import dataclass, field
from math import inf
from typing import Callable, Hashable, Iterable, Mapping, NamedTuple, Sequence

from .errors import DegreeOutsideExactWindow, WindowViolation
from .exactlin import FieldSpec, Matrix, Scalar, Solver, kernel_basis, rank, rref
from ._utils import Report, sign

Label = Hashable
Vec = dict


# -----------------------------------------------------------------------------
# sparse vectors

def vadd(fs: FieldSpec, acc: Vec, v: Mapping, c: Scalar | int = 1) -> Vec:
    """acc += c*v in place, dropping zeros."""
    if isinstance(c, int):
        c = fs(c)
    if fs.is_zero(c):
        return acc
    for k, x in v.items():
        y = acc.get(k, fs.zero) + c * x
        if fs.is_zero(y):
            acc.pop(k, None)
        else:
            acc[k] = y
    return acc


def vscale(fs: FieldSpec, v: Mapping, c: Scalar | int) -> Vec:
    return vadd(fs, {}, v, c)


def vsum(fs: FieldSpec, terms: Iterable[tuple[Mapping, Scalar | int]]) -> Vec:
    acc: Vec = {}
    for v, c in terms:
        vadd(fs, acc, v, c)
    return acc


def vsub(fs: FieldSpec, a: Mapping, b: Mapping) -> Vec:
    return vadd(fs, dict(a), b, -1)


def vmap(fs: FieldSpec, v: Mapping, fn: Callable[[Label], Mapping]) -> Vec:
    """Linear extension of fn."""
    acc: Vec = {}
    for x, c in v.items():
        vadd(fs, acc, fn(x), c)
    return acc


# -----------------------------------------------------------------------------
# windows

@dataclass(frozen=True)
class Window:
    """Closed degree interval; None is unbounded on that side."""

    lo: int | None = None
    hi: int | None = None

    @classmethod
    def of(cls, lo: float, hi: float) -> "Window":
        if lo > hi:
            return EMPTY
        return cls(None if lo == -inf else int(lo), None if hi == inf else int(hi))

    @property
    def lo_f(self) -> float:
        return -inf if self.lo is None else self.lo

    @property
    def hi_f(self) -> float:
        return inf if self.hi is None else self.hi

    @property
    def empty(self) -> bool:
        return self.lo_f > self.hi_f

    def __contains__(self, n: int) -> bool:
        return self.lo_f <= n <= self.hi_f

    def contains_window(self, other: "Window") -> bool:
        return other.empty or (self.lo_f <= other.lo_f and other.hi_f <= self.hi_f)

    def intersect(self, *others: "Window") -> "Window":
        lo, hi = self.lo_f, self.hi_f
        for o in others:
            lo, hi = max(lo, o.lo_f), min(hi, o.hi_f)
        return Window.of(lo, hi)

    def shift(self, k: int) -> "Window":
        return self if self.empty else Window.of(self.lo_f + k, self.hi_f + k)

    def negate(self) -> "Window":
        return self if self.empty else Window.of(-self.hi_f, -self.lo_f)

    def shrink(self, k: int = 1) -> "Window":
        return self if self.empty else Window.of(self.lo_f + k, self.hi_f - k)

    def degrees(self) -> range:
        assert self.lo is not None and self.hi is not None
        return range(self.lo, self.hi + 1)

    def __str__(self) -> str:
        if self.empty:
            return "[]"
        lo = "-inf" if self.lo is None else str(self.lo)
        hi = "inf" if self.hi is None else str(self.hi)
        return f"[{lo}, {hi}]"


EMPTY = Window(1, 0)
EVERYWHERE = Window()


# -----------------------------------------------------------------------------
# graded spaces and complexes

class Dual(NamedTuple):
    """Basis functional dual to ``of``."""
    of: Label


class Hom(NamedTuple):
    """Elementary linear map sending basis ``src`` to ``dst``."""
    dst: Label
    src: Label


@dataclass(frozen=True, eq=False)
class GradedSpace:
    field: FieldSpec
    basis: Mapping[int, tuple[Label, ...]]

    def __post_init__(self):
        deg, idx = {}, {}
        clean = {}
        for n in sorted(self.basis):
            labels = tuple(self.basis[n])
            if not labels:
                continue
            clean[n] = labels
            for i, x in enumerate(labels):
                if x in deg:
                    raise ValueError(f"Basis label {x!r} appears twice")
                deg[x], idx[x] = n, i
        object.__setattr__(self, "basis", clean)
        object.__setattr__(self, "_deg", deg)
        object.__setattr__(self, "_idx", idx)

    def degree(self, x: Label) -> int:
        return self._deg[x]

    def index(self, x: Label) -> int:
        return self._idx[x]

    def labels(self, n: int) -> tuple[Label, ...]:
        return self.basis.get(n, ())

    def dim(self, n: int) -> int:
        return len(self.basis.get(n, ()))

    def degrees(self) -> list[int]:
        return list(self.basis)

    def all_labels(self) -> list[Label]:
        return [x for n in self.basis for x in self.basis[n]]

    def __contains__(self, x: Label) -> bool:
        return x in self._deg

    @property
    def total_dim(self) -> int:
        return len(self._deg)

    @property
    def bottom(self) -> float:
        return min(self.basis) if self.basis else inf

    @property
    def top(self) -> float:
        return max(self.basis) if self.basis else -inf


@dataclass(frozen=True, eq=False)
class WindowedComplex:
    """A cochain complex on labelled bases.

    ``d`` sends a basis label to the vector of its differential. ``window`` is the
    range of materialized degrees (unbounded when everything is stored) and
    ``exact_window`` the range certified complete. ``floor_top``, when set, is the
    top degree f of a level-truncated total complex; it turns refusals into a
    required-depth hint.
    """

    space: GradedSpace
    d: Callable[[Label], Vec]
    window: Window = EVERYWHERE
    exact_window: Window = EVERYWHERE
    name: str = ""
    floor_top: int | None = None
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if not self.window.contains_window(self.exact_window):
            raise WindowViolation(f"exact window {self.exact_window} exceeds window {self.window}")

    @property
    def field(self) -> FieldSpec:
        return self.space.field

    def degree(self, x: Label) -> int:
        return self.space.degree(x)

    def labels(self, n: int) -> tuple[Label, ...]:
        return self.space.labels(n)

    def diff(self, x: Label) -> Vec:
        memo = self._cache.setdefault("d", {})
        if x not in memo:
            memo[x] = self.d(x)
        return memo[x]

    def apply_d(self, v: Mapping) -> Vec:
        fs = self.field
        acc: Vec = {}
        for x, c in v.items():
            vadd(fs, acc, self.diff(x), c)
        return acc

    def matrix(self, n: int) -> Matrix:
        """d^n as a matrix from degree n to degree n+1."""
        memo = self._cache.setdefault("m", {})
        if n not in memo:
            memo[n] = to_matrix(self.field, self.labels(n), self.space, n + 1, self.diff)
        return memo[n]

    def dims(self) -> dict[int, int]:
        return {n: self.space.dim(n) for n in self.space.degrees()}

    def bottom(self) -> float:
        """Lowest degree the untruncated complex can occupy."""
        return self.space.bottom if self.exact_window.lo is None else -inf

    def top(self) -> float:
        return self.space.top if self.exact_window.hi is None else inf

    def required_level(self, n: int) -> int | None:
        return None if self.floor_top is None else self.floor_top - n

    def __str__(self) -> str:
        dims = ", ".join(f"{n}:{k}" for n, k in sorted(self.dims().items(), reverse=True))
        return f"{self.name or 'complex'} over {self.field} dims {{{dims}}} exact {self.exact_window}"


def to_matrix(fs: FieldSpec, cols: Sequence[Label], target: GradedSpace, n: int, f: Callable[[Label], Vec]) -> Matrix:
    rows = target.labels(n)
    pos = {y: i for i, y in enumerate(rows)}
    entries = {}
    for j, x in enumerate(cols):
        for y, c in f(x).items():
            if y not in pos:
                raise WindowViolation(f"image of {x!r} has component {y!r} outside degree {n}")
            entries[(pos[y], j)] = c
    return Matrix(fs, len(rows), len(cols), entries)


def complex_from_table(
    fs: FieldSpec,
    basis: Mapping[int, Sequence[Label]],
    d: Mapping[Label, Mapping] | None = None,
    name: str = "",
    exact_window: Window = EVERYWHERE,
) -> WindowedComplex:
    table = {k: {y: fs(c) for y, c in v.items()} for k, v in (d or {}).items()}
    return WindowedComplex(GradedSpace(fs, {n: tuple(b) for n, b in basis.items()}), lambda x: dict(table.get(x, {})), name=name, exact_window=exact_window)


def zero_complex(fs: FieldSpec, name: str = "0") -> WindowedComplex:
    return complex_from_table(fs, {}, name=name)


def ground(fs: FieldSpec, label: Label = "1", degree: int = 0) -> WindowedComplex:
    """k concentrated in one degree."""
    return complex_from_table(fs, {degree: [label]}, name="k" if degree == 0 else f"k[{-degree}]")


# -----------------------------------------------------------------------------
# validation and maps

def validate_complex(c: WindowedComplex) -> Report:
    report = Report(f"complex {c.name}".strip())
    fs = c.field
    for n in c.space.degrees():
        bad = False
        for x in c.labels(n):
            dx = c.diff(x)
            for y in dx:
                if y not in c.space or c.degree(y) != n + 1:
                    report.fail(f"d({x!r}) has component {y!r} outside degree {n + 1}")
                    bad = True
            if bad:
                break
            report.checked += 1
            if c.apply_d(dx):
                report.fail(f"d^2 != 0 in degree {n} (on {x!r})")
                break
    return report


@dataclass(frozen=True, eq=False)
class ChainMap:
    source: WindowedComplex
    target: WindowedComplex
    f: Callable[[Label], Vec]
    degree: int = 0
    name: str = ""
    _cache: dict = field(default_factory=dict, repr=False)

    def __call__(self, x: Label) -> Vec:
        if x not in self._cache:
            self._cache[x] = self.f(x)
        return self._cache[x]

    def apply(self, v: Mapping) -> Vec:
        fs = self.source.field
        acc: Vec = {}
        for x, c in v.items():
            vadd(fs, acc, self(x), c)
        return acc

    def matrix(self, n: int) -> Matrix:
        return to_matrix(self.source.field, self.source.labels(n), self.target.space, n + self.degree, self)


def identity_map(c: WindowedComplex) -> ChainMap:
    return ChainMap(c, c, lambda x: {x: c.field.one}, name="id")


def is_chain_map(f: ChainMap, degrees: Window = EVERYWHERE) -> Report:
    """d∘f = (-1)^{|f|} f∘d on every stored basis element in ``degrees``."""
    report = Report(f"chain map {f.name}".strip())
    fs = f.source.field
    s = sign(f.degree)
    for n in f.source.space.degrees():
        if n not in degrees:
            continue
        for x in f.source.labels(n):
            lhs = f.target.apply_d(f(x))
            rhs = vscale(fs, f.apply(f.source.diff(x)), s)
            report.checked += 1
            if vsub(fs, lhs, rhs):
                report.fail(f"not a chain map on {x!r} (degree {n})")
                break
    return report


def linear_kernel(fs: FieldSpec, labels: Sequence[Label], constraint: Callable[[Label], Mapping]) -> list[Vec]:
    """Basis of {v in span(labels) : constraint(v) = 0}, as vectors over labels."""
    keys: dict = {}
    entries = {}
    for j, x in enumerate(labels):
        for k, c in constraint(x).items():
            i = keys.setdefault(k, len(keys))
            entries[(i, j)] = c
    m = Matrix(fs, len(keys), len(labels), entries)
    out = []
    for v in kernel_basis(m):
        out.append({labels[j]: c for j, c in enumerate(v) if not fs.is_zero(c)})
    return out


def span_solver(fs: FieldSpec, vectors: Sequence[Mapping]) -> tuple[Solver, dict]:
    keys: dict = {}
    cols = []
    for v in vectors:
        cols.append({keys.setdefault(k, len(keys)): c for k, c in v.items()})
    return Solver(Matrix.from_columns(fs, len(keys), cols) if cols else Matrix(fs, len(keys), 0, {})), keys


def coordinates(solver: Solver, keys: dict, v: Mapping) -> dict[int, Scalar] | None:
    """Coefficients of v in the spanning vectors of ``solver``, or None."""
    b = {}
    for k, c in v.items():
        if k not in keys:
            return None
        b[keys[k]] = c
    return solver.coordinates(b)


def span_rank(fs: FieldSpec, vectors: Sequence[Mapping]) -> int:
    keys: dict = {}
    entries = {}
    for j, v in enumerate(vectors):
        for k, c in v.items():
            entries[(keys.setdefault(k, len(keys)), j)] = c
    return rank(Matrix(fs, len(keys), len(vectors), entries))


# -----------------------------------------------------------------------------
# homology

class Homology(NamedTuple):
    degree: int
    dim: int
    basis: list[Vec]


def _check_exact(c: WindowedComplex, n: int) -> None:
    for k in (n - 1, n, n + 1):
        if k not in c.exact_window:
            req = c.required_level(n)
            raise DegreeOutsideExactWindow(n, c.exact_window, req)


def homology(c: WindowedComplex, n: int) -> Homology:
    """H^n with representative cycles; refused outside the exact window."""
    _check_exact(c, n)
    memo = c._cache.setdefault("h", {})
    if n in memo:
        return memo[n]
    fs = c.field
    labels = c.labels(n)
    cycles = [{labels[j]: x for j, x in enumerate(v) if not fs.is_zero(x)} for v in kernel_basis(c.matrix(n))]
    boundaries = [c.diff(x) for x in c.labels(n - 1)]
    boundaries = [b for b in boundaries if b]
    reps = _complement(fs, boundaries, cycles)
    h = Homology(n, len(reps), reps)
    memo[n] = h
    return h


def _complement(fs: FieldSpec, base: Sequence[Mapping], extra: Sequence[Mapping]) -> list[Vec]:
    """Members of ``extra`` that are independent modulo span(base), pivot order."""
    keys: dict = {}
    entries = {}
    vectors = list(base) + list(extra)
    for j, v in enumerate(vectors):
        for k, x in v.items():
            entries[(keys.setdefault(k, len(keys)), j)] = x
    _, pivots = rref(Matrix(fs, len(keys), len(vectors), entries))
    return [vectors[p] for p in pivots if p >= len(base)]


def homology_dims(c: WindowedComplex, degrees: Iterable[int]) -> dict[int, int]:
    return {n: homology(c, n).dim for n in degrees}


def certified_degrees(c: WindowedComplex) -> Window:
    """Degrees where homology may be reported, clipped to the stored support."""
    w = c.exact_window.shrink(1)
    if c.space.total_dim == 0:
        return w.intersect(Window(0, 0)) if not w.empty else w
    return w.intersect(Window.of(c.space.bottom - 1, c.space.top + 1))


@dataclass
class QuasiIsoReport:
    name: str
    degrees: Window
    rows: list[tuple[int, int, int, int]] = field(default_factory=list)  # (n, dim H source, dim H target, rank)

    @property
    def verdict(self) -> bool:
        return all(hs == ht == r for _, hs, ht, r in self.rows)

    def __bool__(self) -> bool:
        return self.verdict

    def __str__(self) -> str:
        lines = [f"{self.name}: quasi-iso on {self.degrees}: {self.verdict}"]
        lines += [f"  H^{n}: source {hs}, target {ht}, induced rank {r}" for n, hs, ht, r in self.rows]
        return "\n".join(lines)


def is_quasi_iso(f: ChainMap, degrees: Window | tuple[int, int], name: str = "") -> QuasiIsoReport:
    if isinstance(degrees, tuple):
        degrees = Window(*degrees)
    if degrees.empty:
        return QuasiIsoReport(name or f.name, degrees)
    src_ok = f.source.exact_window.shrink(1).contains_window(degrees)
    tgt_ok = f.target.exact_window.shrink(1).contains_window(degrees.shift(f.degree))
    if not (src_ok and tgt_ok):
        raise WindowViolation(
            f"degrees {degrees} not inside exact windows {f.source.exact_window} / {f.target.exact_window} shrunk by 1"
        )
    fs = f.source.field
    report = QuasiIsoReport(name or f.name, degrees)
    for n in degrees.degrees():
        hs = homology(f.source, n)
        ht = homology(f.target, n + f.degree)
        boundaries = [b for b in (f.target.diff(x) for x in f.target.labels(n + f.degree - 1)) if b]
        images = [f.apply(v) for v in hs.basis]
        r = span_rank(fs, boundaries + images) - span_rank(fs, boundaries)
        report.rows.append((n, hs.dim, ht.dim, r))
    return report


# -----------------------------------------------------------------------------
# constructions

class Bounds(NamedTuple):
    """Exact window plus the degree range the untruncated complex can occupy."""
    exact: Window
    bottom: float
    top: float

    @property
    def zero(self) -> bool:
        return self.bottom > self.top


def bounds(c: WindowedComplex) -> Bounds:
    return Bounds(c.exact_window, c.bottom(), c.top())


def tensor_bounds(a: Bounds, b: Bounds) -> Bounds:
    if a.zero and a.exact == EVERYWHERE or b.zero and b.exact == EVERYWHERE:
        return Bounds(EVERYWHERE, inf, -inf)
    ea, eb = a.exact, b.exact
    if ea.empty or eb.empty:
        return Bounds(EMPTY, a.bottom + b.bottom, a.top + b.top)
    lo, hi = -inf, inf
    if ea.lo is not None:
        lo = max(lo, ea.lo + b.top)
    if eb.lo is not None:
        lo = max(lo, eb.lo + a.top)
    if ea.hi is not None:
        hi = min(hi, ea.hi + b.bottom)
    if eb.hi is not None:
        hi = min(hi, eb.hi + a.bottom)
    return Bounds(Window.of(lo, hi), a.bottom + b.bottom, a.top + b.top)


def hom_bounds(a: Bounds, b: Bounds) -> Bounds:
    if a.zero and a.exact == EVERYWHERE or b.zero and b.exact == EVERYWHERE:
        return Bounds(EVERYWHERE, inf, -inf)
    ea, eb = a.exact, b.exact
    if ea.empty or eb.empty:
        return Bounds(EMPTY, b.bottom - a.top, b.top - a.bottom)
    lo, hi = -inf, inf
    if ea.hi is not None:
        lo = max(lo, b.top - ea.hi)
    if eb.lo is not None:
        lo = max(lo, eb.lo - a.bottom)
    if ea.lo is not None:
        hi = min(hi, b.bottom - ea.lo)
    if eb.hi is not None:
        hi = min(hi, eb.hi - a.top)
    return Bounds(Window.of(lo, hi), b.bottom - a.top, b.top - a.bottom)


def tensor(a: WindowedComplex, b: WindowedComplex, name: str | None = None) -> WindowedComplex:
    """a⊗b on pair labels (x, y)."""
    if a.field != b.field:
        raise ValueError(f"Field mismatch: {a.field} vs {b.field}")
    fs = a.field
    basis: dict[int, list] = {}
    for i in a.space.degrees():
        for j in b.space.degrees():
            basis.setdefault(i + j, []).extend((x, y) for x in a.labels(i) for y in b.labels(j))

    def d(xy):
        x, y = xy
        out: Vec = {}
        for x2, c in a.diff(x).items():
            vadd(fs, out, {(x2, y): c})
        s = sign(a.degree(x))
        for y2, c in b.diff(y).items():
            vadd(fs, out, {(x, y2): c}, s)
        return out

    return WindowedComplex(GradedSpace(fs, basis), d, exact_window=tensor_bounds(bounds(a), bounds(b)).exact, name=name or f"({a.name}⊗{b.name})")


def dual(c: WindowedComplex, name: str | None = None) -> WindowedComplex:
    """c^∨ on labels Dual(x), (c^∨)^n = (c^{-n})^∨."""
    fs = c.field
    basis = {-n: [Dual(x) for x in c.labels(n)] for n in c.space.degrees()}

    def d(phi):
        x = phi.of
        n = c.degree(x)
        s = -sign(n)
        out: Vec = {}
        for y in c.labels(n - 1):
            coeff = c.diff(y).get(x)
            if coeff is not None:
                vadd(fs, out, {Dual(y): coeff}, s)
        return out

    return WindowedComplex(GradedSpace(fs, basis), d, exact_window=c.exact_window.negate(), name=name or f"{c.name}^∨")


def evaluation(c: WindowedComplex, dc: WindowedComplex, unit: WindowedComplex) -> ChainMap:
    """c^∨⊗c → k, Dual(x)⊗y ↦ δ_{xy}."""
    one = unit.labels(0)[0]
    pair = tensor(dc, c)
    return ChainMap(pair, unit, lambda t: {one: c.field.one} if t[0].of == t[1] else {}, name="ev")


def hom_complex(a: WindowedComplex, b: WindowedComplex, name: str | None = None) -> WindowedComplex:
    """Hom(a, b) on elementary maps Hom(y, x): x ↦ y."""
    if a.field != b.field:
        raise ValueError(f"Field mismatch: {a.field} vs {b.field}")
    fs = a.field
    basis: dict[int, list] = {}
    for n in a.space.degrees():
        for m in b.space.degrees():
            basis.setdefault(m - n, []).extend(Hom(y, x) for x in a.labels(n) for y in b.labels(m))

    def d(e):
        y, x = e
        deg = b.degree(y) - a.degree(x)
        out: Vec = {}
        for z, c in b.diff(y).items():
            vadd(fs, out, {Hom(z, x): c})
        s = -sign(deg)
        for x2 in a.labels(a.degree(x) - 1):
            c = a.diff(x2).get(x)
            if c is not None:
                vadd(fs, out, {Hom(y, x2): c}, s)
        return out

    ex = hom_bounds(bounds(a), bounds(b)).exact
    return WindowedComplex(GradedSpace(fs, basis), d, exact_window=ex, name=name or f"Hom({a.name},{b.name})")


def hom_value(fs: FieldSpec, f: Mapping, x: Label) -> Vec:
    """Evaluate a vector of elementary maps on a basis label."""
    out: Vec = {}
    for e, c in f.items():
        if e.src == x:
            vadd(fs, out, {e.dst: c})
    return out


def shift(c: WindowedComplex, m: int) -> WindowedComplex:
    """c[m]: same labels, degree |x| - m, differential (-1)^m d."""
    fs = c.field
    basis = {n - m: list(c.labels(n)) for n in c.space.degrees()}
    s = sign(m)
    d = (lambda x: c.diff(x)) if s == 1 else (lambda x: vscale(fs, c.diff(x), -1))
    return WindowedComplex(GradedSpace(fs, basis), d, exact_window=c.exact_window.shift(-m), name=f"{c.name}[{m}]")


def cone(f: ChainMap, name: str | None = None) -> WindowedComplex:
    """cone(f)^n = a^{n+1} ⊕ b^n on labels ("a", x), ("b", y); d(x, y) = (-dx, f x + dy)."""
    a, b = f.source, f.target
    assert f.degree == 0
    fs = a.field
    basis: dict[int, list] = {}
    for n in a.space.degrees():
        basis.setdefault(n - 1, []).extend(("a", x) for x in a.labels(n))
    for n in b.space.degrees():
        basis.setdefault(n, []).extend(("b", y) for y in b.labels(n))

    def d(t):
        tag, x = t
        if tag == "b":
            return {("b", y): c for y, c in b.diff(x).items()}
        out = {("a", y): -c for y, c in a.diff(x).items()}
        return vadd(fs, out, {("b", y): c for y, c in f(x).items()})

    ex = a.exact_window.shift(-1).intersect(b.exact_window)
    return WindowedComplex(GradedSpace(fs, basis), d, exact_window=ex, name=name or f"cone({f.name})")


def direct_sum(parts: Sequence[WindowedComplex], tags: Sequence | None = None, name: str = "") -> WindowedComplex:
    """Direct sum; labels are kept as they are unless tags are given."""
    fs = parts[0].field
    basis: dict[int, list] = {}
    owner = {}
    for i, c in enumerate(parts):
        for n in c.space.degrees():
            for x in c.labels(n):
                lab = x if tags is None else (tags[i], x)
                basis.setdefault(n, []).append(lab)
                owner[lab] = i

    def d(lab):
        i = owner[lab]
        if tags is None:
            return parts[i].diff(lab)
        return {(tags[i], y): c for y, c in parts[i].diff(lab[1]).items()}

    ex = EVERYWHERE.intersect(*(c.exact_window for c in parts)) if parts else EVERYWHERE
    return WindowedComplex(GradedSpace(fs, basis), d, exact_window=ex, name=name or "⊕")


def subcomplex(
    c: WindowedComplex,
    vectors: Mapping[int, Sequence[Mapping]],
    tag: Hashable = "sub",
    exact_window: Window | None = None,
) -> tuple[WindowedComplex, ChainMap]:
    """Subcomplex spanned by independent ``vectors`` per degree, on labels (tag, n, i)."""
    fs = c.field
    basis = {n: [(tag, n, i) for i in range(len(vs))] for n, vs in vectors.items()}
    vec = {(tag, n, i): dict(v) for n, vs in vectors.items() for i, v in enumerate(vs)}
    solvers = {}

    def d(lab):
        n = lab[1]
        image = c.apply_d(vec[lab])
        if not image:
            return {}
        if n + 1 not in solvers:
            solvers[n + 1] = span_solver(fs, vectors.get(n + 1, ()))
        coords = coordinates(*solvers[n + 1], image)
        if coords is None:
            raise ValueError(f"span in degree {n} is not closed under d (at {lab!r})")
        return {(tag, n + 1, i): x for i, x in coords.items()}

    sub = WindowedComplex(
        GradedSpace(fs, basis), d,
        exact_window=c.exact_window if exact_window is None else exact_window,
        name=f"{tag}({c.name})",
    )
    return sub, ChainMap(sub, c, lambda lab: dict(vec[lab]), name="incl")


@dataclass(frozen=True, eq=False)
class Quotient:
    complex: WindowedComplex
    projection: ChainMap

    def project(self, v: Mapping) -> Vec:
        return self.projection.apply(v)


def quotient_complex(
    c: WindowedComplex,
    relations: Mapping[int, Sequence[Mapping]],
    name: str = "",
    exact_window: Window | None = None,
) -> Quotient:
    """c modulo a subcomplex spanned by ``relations``; quotient basis = non-pivot labels of c."""
    fs = c.field
    eliminate: dict[Label, Vec] = {}
    basis = {}
    for n in c.space.degrees():
        labels = c.labels(n)
        rels = [r for r in relations.get(n, ()) if r]
        if not rels:
            basis[n] = list(labels)
            continue
        pos = {x: j for j, x in enumerate(labels)}
        entries = {(i, pos[x]): v for i, r in enumerate(rels) for x, v in r.items()}
        rows, pivots = rref(Matrix(fs, len(rels), len(labels), entries))
        pivot_set = set(pivots)
        for i, p in enumerate(pivots):
            eliminate[labels[p]] = {labels[j]: -v for j, v in rows.get(i, {}).items() if j != p}
        basis[n] = [x for j, x in enumerate(labels) if j not in pivot_set]

    def proj(x):
        return dict(eliminate[x]) if x in eliminate else {x: fs.one}

    def project(v):
        out: Vec = {}
        for x, a in v.items():
            vadd(fs, out, proj(x), a)
        return out

    q = WindowedComplex(
        GradedSpace(fs, basis), lambda x: project(c.diff(x)),
        exact_window=c.exact_window if exact_window is None else exact_window,
        name=name or f"{c.name}/~",
    )
    return Quotient(q, ChainMap(c, q, proj, name="proj"))


def swap(a: WindowedComplex, b: WindowedComplex) -> ChainMap:
    """τ: a⊗b → b⊗a."""
    ab, ba = tensor(a, b), tensor(b, a)
    return ChainMap(ab, ba, lambda t: {(t[1], t[0]): a.field(sign(a.degree(t[0]) * b.degree(t[1])))}, name="swap")


def span_basis(fs: FieldSpec, vectors: Sequence[Mapping]) -> list[Vec]:
    """An independent subfamily of ``vectors`` with the same span."""
    return [dict(v) for v in _complement(fs, [], [v for v in vectors if v])]


def partition(
    c: WindowedComplex,
    key: Callable[[Label], Hashable],
    keys: Iterable[Hashable] = (),
) -> dict[Hashable, WindowedComplex]:
    """Split a complex whose differential preserves ``key`` into its summands."""
    groups: dict = {k: {} for k in keys}
    for n in c.space.degrees():
        for x in c.labels(n):
            groups.setdefault(key(x), {}).setdefault(n, []).append(x)
    return {
        k: WindowedComplex(
            GradedSpace(c.field, basis), c.diff,
            window=c.window, exact_window=c.exact_window,
            name=f"{c.name}{k}", floor_top=c.floor_top,
        )
        for k, basis in groups.items()
    }


def finite_piece(c: WindowedComplex) -> WindowedComplex:
    """The stored data of ``c`` taken as a complex in its own right, exact in every degree."""
    return WindowedComplex(c.space, c.d, name=c.name, _cache=c._cache)
