from expecttest import assert_expected_inline
import pytest

from hhtannaka.comod import cofree, regular_comodule, validate_comodule
from hhtannaka.corpus import kellerex, matrix_algebra, random_corpus
from hhtannaka.dgcat import dual_fibre_module, fibre_module, identity_transformation, interval_extension, representable
from hhtannaka.errors import CoalgebraMismatch, NotCompactPresentation
from hhtannaka.exactlin import FieldSpec
from hhtannaka.hochschild import tannakian_dual
from hhtannaka.homalg import Window, certified_degrees, ground, homology, homology_dims
from hhtannaka.tannaka import (
    TwistedComplex,
    adjunction_counit,
    adjunction_unit,
    interval_witnesses,
    ker_omega_membership,
    kernel_witnesses,
    module_hom_complex,
    module_tensor_P,
    orthogonality_check,
    predual,
    predual_comparison,
    retraction_idempotence,
    span_quasi_iso,
    tensor_over_A,
    tilting_module,
    tilting_multiplication,
    twisted_module,
    validate_tilting,
)

QQ = FieldSpec()


@pytest.fixture(scope="module")
def keller_tilting():
    P = kellerex()
    return P, tilting_module(P.category, P.fibre, level=6)


def test_yoneda_collapse():
    for P in (kellerex(), matrix_algebra()):
        A, w = P.category, P.fibre
        assert tensor_over_A(representable(A, "*"), fibre_module(w)).dims() == w.spaces["*"].dims()


def test_tor_over_dual_numbers(keller_tilting):
    P, T = keller_tilting
    # k⊗_𝒜(bar resolution of k) computes Tor(k, k), one class per degree
    c = tensor_over_A(dual_fibre_module(P.fibre), T.P_module())
    assert homology_dims(c, range(-5, 1)) == {n: 1 for n in range(-5, 1)}


def test_tilting_certificates(keller_tilting):
    _, T = keller_tilting
    assert T.report.passed, str(T.report)
    M2 = matrix_algebra()
    assert validate_tilting(tilting_module(M2.category, M2.fibre, level=2, certify=False)).passed


def test_counit_on_acceptance_window(keller_tilting):
    _, T = keller_tilting
    for N, band in ((regular_comodule(T.C), "[-3, 2]"), (cofree(ground(QQ, "u", -1), T.C), "[-4, 1]")):
        report = adjunction_counit(T, N)
        assert str(report.band) == band
        assert report.band.contains_window(Window(-3, 0))
        assert report.verdict, str(report)


def test_unit_on_representable(keller_tilting):
    P, T = keller_tilting
    report = adjunction_unit(T, representable(P.category, "*"))
    assert_expected_inline(str(report.band), """[-3, 2]""")
    assert report.verdict_of("a"), str(report)
    assert report.verdict_of("b"), str(report)


def test_counit_rejects_foreign_comodule(keller_tilting):
    P, T = keller_tilting
    other = tannakian_dual(P.category, P.fibre, normalized=True, level=2)
    with pytest.raises(CoalgebraMismatch):
        adjunction_counit(T, regular_comodule(other))


def test_module_tensor_P_is_a_comodule(keller_tilting):
    P, T = keller_tilting
    _, G = module_tensor_P(T, representable(P.category, "*"), level=2)
    assert validate_comodule(G).passed


def test_ker_omega_witnesses_kill_P():
    projects = [kellerex(), matrix_algebra()] + random_corpus(25, seed=0)
    for P in projects:
        A, w = P.category, P.fibre
        T = tilting_module(A, w, level=2, certify=False)
        for K in kernel_witnesses(A):
            assert ker_omega_membership(K, w).passed, (P.name, K.name)
            c = tensor_over_A(K, T.P_module())
            degrees = certified_degrees(c)
            assert all(h == 0 for h in homology_dims(c, degrees.degrees()).values()), (P.name, K.name)


def test_orthogonality():
    P = kellerex()
    A, w = P.category, P.fibre
    report = orthogonality_check(representable(A, "*"), kernel_witnesses(A), w)
    assert report.passed, str(report)
    H = module_hom_complex(representable(A, "*"), representable(A, "*"))
    assert homology(H, 0).dim == 2


def test_interval_witnesses():
    P = kellerex()
    ext = interval_extension(P.category, P.fibre, P.fibre, identity_transformation(P.fibre))
    for K in interval_witnesses(ext):
        assert ker_omega_membership(K, ext.fibre).passed


def test_span_for_identity():
    P = kellerex()
    report = span_quasi_iso(P.category, P.fibre, P.fibre, P.transformations["η"], level=3)
    assert report.verdict, str(report)


def test_predual_comparison():
    P = kellerex()
    A, w = P.category, P.fibre
    one = A.field.one
    for Tw in (
        TwistedComplex(A, [("*", 0)], name="h"),
        TwistedComplex(A, [("*", 0), ("*", -1)], {(1, 0): {"ε": one}}, name="cone(ε)"),
    ):
        D = predual(Tw)
        report = predual_comparison(D, fibre_module(w))
        assert report.passed, str(report)
    with pytest.raises(NotCompactPresentation):
        twisted_module(TwistedComplex(A, [("*", 0), ("*", 0)], {(1, 0): {"ε": one}}))


def test_retraction_idempotence_is_unstable():
    P = kellerex()
    T = tilting_module(P.category, P.fibre, level=2, certify=False)
    with pytest.warns(FutureWarning):
        report = retraction_idempotence(T, representable(P.category, "*"))
    assert_expected_inline(report.notes[0], """band [-1, 0]""")
    assert report.checked > 0


def test_tilting_multiplication():
    P = kellerex()
    T = tilting_module(P.category, P.fibre, level=2, certify=False)
    report = tilting_multiplication(T, P.monoidal, P.tensor_basis)
    assert report.passed, str(report)
