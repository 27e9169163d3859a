from expecttest import assert_expected_inline
import pytest

from hhtannaka.errors import DegreeOutsideExactWindow, WindowViolation
from hhtannaka.exactlin import FieldSpec
from hhtannaka.homalg import (
    EMPTY,
    EVERYWHERE,
    ChainMap,
    Window,
    WindowedComplex,
    certified_degrees,
    complex_from_table,
    cone,
    dual,
    evaluation,
    ground,
    hom_complex,
    homology,
    homology_dims,
    identity_map,
    is_chain_map,
    is_quasi_iso,
    quotient_complex,
    shift,
    subcomplex,
    swap,
    tensor,
    validate_complex,
    zero_complex,
)

QQ = FieldSpec()


def interval():
    """k --id--> k in degrees -1, 0."""
    return complex_from_table(QQ, {-1: ["x"], 0: ["y"]}, {"x": {"y": 1}}, name="I")


def circle():
    """H^0 = k spanned by b."""
    return complex_from_table(QQ, {0: ["a", "b"], 1: ["c"]}, {"a": {"c": 1}}, name="C")


def test_window():
    assert_expected_inline(str(Window(-3, 0)), """[-3, 0]""")
    assert_expected_inline(str(EMPTY), """[]""")
    assert_expected_inline(str(EVERYWHERE), """[-inf, inf]""")
    assert_expected_inline(str(Window(-6, None).shrink(1)), """[-5, inf]""")
    assert_expected_inline(str(Window(-3, 2).intersect(Window(0, None))), """[0, 2]""")
    assert Window.of(2, 1).empty
    assert Window(-3, 2).contains_window(Window(-3, 0))
    assert not Window(-2, 2).contains_window(Window(-3, 0))
    assert list(Window(-1, 1).degrees()) == [-1, 0, 1]


def test_complex_str_and_validation():
    assert_expected_inline(str(interval()), """I over QQ dims {0:1, -1:1} exact [-inf, inf]""")
    assert_expected_inline(str(ground(QQ, "v", -1)), """k[1] over QQ dims {-1:1} exact [-inf, inf]""")
    assert validate_complex(circle()).passed
    bad = complex_from_table(QQ, {0: ["a"], 1: ["b"], 2: ["c"]}, {"a": {"b": 1}, "b": {"c": 1}}, name="bad")
    assert not validate_complex(bad).passed


def test_homology():
    assert homology_dims(interval(), range(-2, 2)) == {-2: 0, -1: 0, 0: 0, 1: 0}
    h = homology(circle(), 0)
    assert h.dim == 1
    assert h.basis == [{"b": QQ.one}]
    assert homology(circle(), 1).dim == 0


def test_tensor_and_hom():
    t = tensor(circle(), circle())
    assert validate_complex(t).passed
    assert homology_dims(t, range(-1, 3)) == {-1: 0, 0: 1, 1: 0, 2: 0}
    mixed = tensor(interval(), shift(circle(), 1))
    assert validate_complex(mixed).passed
    assert homology_dims(mixed, range(-3, 2)) == {-3: 0, -2: 0, -1: 0, 0: 0, 1: 0}
    h = hom_complex(circle(), circle())
    assert validate_complex(h).passed
    assert homology_dims(h, range(-2, 3)) == {-2: 0, -1: 0, 0: 1, 1: 0, 2: 0}
    assert validate_complex(hom_complex(interval(), circle())).passed
    assert homology_dims(hom_complex(interval(), circle()), range(-1, 3)) == {-1: 0, 0: 0, 1: 0, 2: 0}


def test_dual_and_evaluation():
    c = interval()
    dc = dual(c)
    assert validate_complex(dc).passed
    assert dc.dims() == {0: 1, 1: 1}
    assert is_chain_map(evaluation(c, dc, ground(QQ))).passed
    assert is_chain_map(evaluation(shift(circle(), 1), dual(shift(circle(), 1)), ground(QQ))).passed


def test_swap_is_chain_map():
    a, b = interval(), shift(circle(), 1)
    assert is_chain_map(swap(a, b)).passed
    assert is_chain_map(swap(b, b)).passed


def test_shift_and_cone():
    s = shift(circle(), 1)
    assert validate_complex(s).passed
    assert_expected_inline(str(s), """C[1] over QQ dims {0:1, -1:2} exact [-inf, inf]""")
    assert homology(s, -1).dim == 1
    k = cone(identity_map(circle()))
    assert validate_complex(k).passed
    assert homology_dims(k, range(-2, 3)) == {-2: 0, -1: 0, 0: 0, 1: 0, 2: 0}


def test_quasi_iso_report():
    c = circle()
    k = ground(QQ, "b")
    proj = ChainMap(c, k, lambda x: {"b": QQ.one} if x == "b" else {}, name="proj")
    assert is_chain_map(proj).passed
    report = is_quasi_iso(proj, (-1, 1))
    assert report.verdict
    assert_expected_inline(
        str(report),
        """\
proj: quasi-iso on [-1, 1]: True
  H^-1: source 0, target 0, induced rank 0
  H^0: source 1, target 1, induced rank 1
  H^1: source 0, target 0, induced rank 0""",
    )
    zero = ChainMap(c, k, lambda x: {}, name="0")
    assert not is_quasi_iso(zero, (0, 0)).verdict


def test_refusal_outside_exact_window():
    c = circle()
    trunc = WindowedComplex(c.space, c.d, exact_window=Window(0, None), name="C≥0", floor_top=1)
    with pytest.raises(DegreeOutsideExactWindow) as e:
        homology(trunc, 0)
    assert e.value.required_depth == 1
    assert homology(trunc, 1).dim == 0
    with pytest.raises(WindowViolation):
        is_quasi_iso(identity_map(trunc), (0, 1))
    assert is_quasi_iso(identity_map(trunc), (1, 2)).verdict


def test_certified_degrees():
    assert_expected_inline(str(certified_degrees(circle())), """[-1, 2]""")
    assert_expected_inline(str(certified_degrees(zero_complex(QQ))), """[0, 0]""")
    c = circle()
    trunc = WindowedComplex(c.space, c.d, exact_window=Window(0, None))
    assert_expected_inline(str(certified_degrees(trunc)), """[1, 2]""")


def test_quotient_and_subcomplex():
    c = circle()
    q = quotient_complex(c, {0: [{"a": QQ.one}], 1: [{"c": QQ.one}]})
    assert q.complex.dims() == {0: 1}
    assert q.project({"a": QQ.one, "b": QQ(2)}) == {"b": QQ(2)}
    assert is_chain_map(q.projection).passed
    sub, incl = subcomplex(c, {0: [{"a": QQ.one}], 1: [{"c": QQ.one}]})
    assert validate_complex(sub).passed
    assert sub.diff(("sub", 0, 0)) == {("sub", 1, 0): QQ.one}
    assert is_chain_map(incl).passed
    assert homology_dims(sub, range(-1, 3)) == {-1: 0, 0: 0, 1: 0, 2: 0}
