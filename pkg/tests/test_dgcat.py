from expecttest import assert_expected_inline
import pytest

from hhtannaka.corpus import BUNDLED, kellerex, matrix_algebra, random_corpus
from hhtannaka.dgcat import (
    coefficient_bimodule,
    identity_functor,
    interval_extension,
    make_category,
    module_cone,
    opposite,
    representable,
    representable_map,
    tensor_categories,
    validate_bimodule,
    validate_category,
    validate_fibre_functor,
    validate_functor,
    validate_module,
    validate_monoidal,
    validate_natural_transformation,
    validate_strict_monoidal_fibre,
    yoneda_bimodule,
)
from hhtannaka.exactlin import FieldSpec

QQ = FieldSpec()


def path_category(coefficient=1):
    """0 → 1 → 2 → 3 with all composites; (h∘g)∘f picks up ``coefficient``."""
    morphisms = {
        "f": (0, 1, 0), "g": (1, 2, 0), "h": (2, 3, 0),
        "gf": (0, 2, 0), "hg": (1, 3, 0), "hgf": (0, 3, 0),
    }
    products = {
        ("g", "f"): {"gf": 1}, ("h", "g"): {"hg": 1},
        ("h", "gf"): {"hgf": 1}, ("hg", "f"): {"hgf": coefficient},
    }
    return make_category(QQ, [0, 1, 2, 3], morphisms, products=products, name="path")


@pytest.mark.parametrize("name", sorted(BUNDLED))
def test_bundled_projects_validate(name):
    P = BUNDLED[name]()
    assert validate_category(P.category).passed
    for w in P.fibres.values():
        assert validate_fibre_functor(w).passed
    if P.monoidal is not None:
        assert validate_monoidal(P.monoidal).passed
        assert validate_strict_monoidal_fibre(P.monoidal, P.fibre, P.tensor_basis).passed
    for eta in P.transformations.values():
        assert validate_natural_transformation(eta).passed


def test_random_corpus_validates():
    for P in random_corpus(25, seed=0):
        assert validate_category(P.category).passed, P.name
        assert validate_fibre_functor(P.fibre).passed, P.name


def test_random_corpus_has_composition_and_differentials():
    corpus = random_corpus(25, seed=0)
    composite = differential = 0
    for P in corpus:
        A, w = P.category, P.fibre
        ids = set(A.identities.values())
        composite += any(v and not {g, f} & ids for (g, f), v in A.products.items())
        differential += any(w.spaces[X].diff(v) for X in A.objects for v in w.spaces[X].space.all_labels())
        assert all(A.degree(f) <= 0 for f in A.morphisms), P.name
    assert composite > 0
    assert differential > 0


def test_associativity_failure_is_reported():
    assert validate_category(path_category()).passed
    report = validate_category(path_category(2))
    assert not report.passed
    assert_expected_inline(report.failures[0], """associativity fails on ('h', 'g', 'f')""")


def test_empty_category():
    report = validate_category(make_category(QQ, [], {}, name="∅"))
    assert report.passed
    assert report.checked == 0


def test_matrix_algebra_signature():
    A = matrix_algebra().category
    sig = A.signature()
    assert sig["field"] == "GF(7)"
    assert_expected_inline(str(sig["products"]["e21*e12"]), """{'id': '1', 'e11': '6'}""")


def test_opposite_and_tensor():
    A = kellerex().category
    assert opposite(opposite(A)).signature() == A.signature()
    assert validate_category(opposite(A)).passed
    AA = tensor_categories(A, A)
    assert validate_category(AA).passed
    assert len(AA.non_identity()) == 3
    assert validate_functor(identity_functor(A)).passed


def test_modules():
    A = matrix_algebra().category
    h = representable(A, "*")
    assert validate_module(h).passed
    c = module_cone(representable_map(A, "id"))
    assert validate_module(c).passed
    assert c.value("*").dims() == {-1: 4, 0: 4}


def test_interval_extension():
    P = kellerex()
    ext = interval_extension(P.category, P.fibre, P.fibre, P.transformations["η"])
    assert validate_category(ext.category).passed
    assert validate_fibre_functor(ext.fibre).passed
    assert sorted(map(str, ext.category.objects)) == ["('*', 0)", "('*', 1)"]


def test_yoneda_bimodule():
    A = kellerex().category
    F = yoneda_bimodule(A)
    assert {XY: c.dims() for XY, c in F.values.items()} == {("*", "*"): {0: 4}}
    assert validate_bimodule(F).passed


@pytest.mark.parametrize("name", ["kellerex", "M2"])
def test_bundled_bimodules(name):
    P = BUNDLED[name]()
    for F in (yoneda_bimodule(P.category), coefficient_bimodule(P.fibre)):
        report = validate_bimodule(F)
        assert report.passed, str(report)
        assert report.checked > 0


def test_random_corpus_bimodules():
    for P in random_corpus(25, seed=0):
        for F in (yoneda_bimodule(P.category), coefficient_bimodule(P.fibre)):
            report = validate_bimodule(F)
            assert report.passed, (P.name, str(report))
