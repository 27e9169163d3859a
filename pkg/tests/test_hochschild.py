from expecttest import assert_expected_inline
import pytest

from hhtannaka.comod import validate_coalgebra
from hhtannaka.corpus import cyclic_group, kellerex, matrix_algebra, one_object_k, random_corpus, trivial_group
from hhtannaka.dgcat import coefficient_bimodule, identity_functor, inclusion_functor
from hhtannaka.errors import DegreeOutsideExactWindow, MissingDualityData
from hhtannaka.exactlin import FieldSpec
from hhtannaka.hochschild import (
    antipode_candidate,
    bialgebra_multiplication,
    cc_levels,
    check_simplicial_identities,
    compact_subcoalgebra,
    functoriality_map,
    kunneth_report,
    rewrite_map,
    shuffle_associativity,
    shuffle_map,
    shuffle_symmetry,
    tannakian_dual,
    universal_coalgebra,
    validate_universal_coalgebra,
)
from hhtannaka.homalg import Dual, Window, certified_degrees, homology, homology_dims, is_chain_map

F109 = FieldSpec(109)


def test_keller_example():
    P = kellerex()
    C = tannakian_dual(P.category, P.fibre, normalized=True, level=8)
    assert [homology(C.carrier, -n).dim for n in range(9)] == [1] * 9
    for n in range(9):
        (x,) = C.carrier.labels(-n)
        assert x == (Dual("v"),) + ("ε",) * n + ("v",)
        # full deconcatenation, one term per cut
        assert len(C.delta(x)) == n + 1
        assert {C.string_level(l) + C.string_level(r) for l, r in C.delta(x)} == {n}
    assert C.eps((Dual("v"), "v")) == C.field.one
    assert_expected_inline(str(C.carrier.exact_window), """[-9, inf]""")


def test_refusal_names_required_level():
    P = kellerex()
    C = tannakian_dual(P.category, P.fibre, normalized=True, level=2)
    with pytest.raises(DegreeOutsideExactWindow) as e:
        homology(C.carrier, -3)
    assert e.value.required_depth == 3


def test_morita_sanity():
    P = matrix_algebra()
    C = tannakian_dual(P.category, P.fibre, normalized=True, level=6, certify=False)
    assert homology_dims(C.carrier, range(-6, 1)) == {n: 1 if n == 0 else 0 for n in range(-6, 1)}


def test_small_coalgebras():
    k = one_object_k()
    assert tannakian_dual(k.category, k.fibre, normalized=True, level=3).carrier.dims() == {0: 1}
    T = trivial_group()
    assert tannakian_dual(T.category, T.fibre, normalized=True, level=3).carrier.dims() == {0: 1}


def test_random_corpus_coalgebra_axioms():
    for P in random_corpus(25, seed=0, fs=F109):
        C = tannakian_dual(P.category, P.fibre, normalized=True, level=4, certify=False)
        report = validate_coalgebra(C)
        assert report.passed, str(report)


def test_random_corpus_simplicial_identities():
    for P in random_corpus(25, seed=0, fs=F109):
        C = tannakian_dual(P.category, P.fibre, level=2, certify=False)
        report = check_simplicial_identities(C.simplicial)
        assert report.passed, str(report)


def test_normalization_invariance():
    for P in random_corpus(25, seed=0, fs=F109):
        C = tannakian_dual(P.category, P.fibre, normalized=False, level=2, certify=False)
        NC = tannakian_dual(P.category, P.fibre, normalized=True, level=2, certify=False)
        window = certified_degrees(C.carrier).intersect(certified_degrees(NC.carrier))
        degrees = window.degrees()
        assert homology_dims(C.carrier, degrees) == homology_dims(NC.carrier, degrees), P.name


def test_rewrite_map():
    P = kellerex()
    f = rewrite_map(P.fibre, level=3)
    assert is_chain_map(f).passed
    for n in f.source.space.degrees():
        assert f.source.space.dim(n) == f.target.space.dim(n)


def test_functoriality_identity():
    P = kellerex()
    g = functoriality_map(identity_functor(P.category), P.fibre, P.fibre, normalized=True, level=3)
    assert g.report.passed
    x = (Dual("v"), "ε", "ε", "v")
    assert g.map(x) == {x: P.field.one}


def test_functoriality_along_full_subcategory():
    P = kellerex()
    g = functoriality_map(inclusion_functor(P.category, ["*"]), None, P.fibre, normalized=True, level=3)
    assert g.report.passed
    x = (Dual(("*", "v")), "ε", "ε", ("*", "v"))
    assert g.map(x) == {(Dual("v"), "ε", "ε", "v"): P.field.one}
    for Q in random_corpus(25, seed=0, fs=F109):
        A = Q.category
        if len(A.objects) < 2:
            continue
        g = functoriality_map(inclusion_functor(A, A.objects[:1]), None, Q.fibre, normalized=True, level=2)
        assert g.report.passed, (Q.name, str(g.report))
        assert is_chain_map(g.map).passed, Q.name


def test_shuffle_and_kunneth():
    w = kellerex().fibre
    sh = shuffle_map(w, w, level=5)
    assert is_chain_map(sh.map).passed
    C12 = sh.target.carrier
    assert [homology(C12, -n).dim for n in range(6)] == [1, 2, 3, 4, 5, 6]
    report = kunneth_report(sh, Window(-5, 0))
    assert report.passed, str(report)
    assert report.notes[:2] == ["H^-5: 6", "H^-4: 5"]


def test_shuffle_symmetry_and_associativity():
    w = kellerex().fibre
    assert shuffle_symmetry(shuffle_map(w, w, level=3), shuffle_map(w, w, level=3)).passed
    assert shuffle_associativity(w, w, w, level=2).passed


def test_group_bialgebra():
    P = cyclic_group()
    fs = P.field
    B = bialgebra_multiplication(P.monoidal, P.fibre, P.tensor_basis, level=2)
    C = B.coalgebra
    assert C.carrier.dims() == {0: 2}
    assert B.report.passed, str(B.report)
    g = (Dual("vg"), "vg")
    e = (Dual("ve"), "ve")
    assert C.delta(g) == {(g, g): fs.one}
    assert B.multiply(g, g) == {e: fs.one}
    assert B.multiply(e, g) == {g: fs.one}
    assert B.unit == e
    antipode = antipode_candidate(P.monoidal, P.fibre, P.tensor_basis, level=2, bialgebra=B)
    assert antipode.passed, str(antipode)


def test_kellerex_bialgebra():
    P = kellerex()
    B = bialgebra_multiplication(P.monoidal, P.fibre, P.tensor_basis, level=2)
    assert B.report.passed, str(B.report)
    assert "bialgebra axioms: commutativity certified" in B.report.notes


def test_antipode_needs_duality():
    P = cyclic_group()
    mon = P.monoidal
    bare = type(mon)(mon.base, mon.unit, mon.product, mon.morphism_product, mon.symmetric, None, mon.name)
    with pytest.raises(MissingDualityData):
        antipode_candidate(bare, P.fibre, P.tensor_basis, level=1)


def test_universal_coalgebra_and_compact_pieces():
    A = kellerex().category
    D = universal_coalgebra(A, level=2)
    assert validate_universal_coalgebra(D).passed
    V = {("*", "*"): [{"ε": A.field.one}]}
    D1 = compact_subcoalgebra(A, ["*"], 1, V, universal=D)
    D2 = compact_subcoalgebra(A, ["*"], 2, V, universal=D)
    assert D1.report.passed, str(D1.report)
    assert D2.contains(D1)


def test_cc_level_dims():
    P = kellerex()
    s = cc_levels(P.category, coefficient_bimodule(P.fibre), 3)
    assert [s.level(n).space.total_dim for n in range(4)] == [1, 2, 4, 8]
    assert s.level(2).dims() == {0: 4}
    K = one_object_k()
    s = cc_levels(K.category, coefficient_bimodule(K.fibre), 5)
    assert all(c.space.total_dim == 1 for c in s.levels.values())


def test_random_corpus_universal_coalgebra():
    for P in random_corpus(25, seed=0, fs=F109):
        D = universal_coalgebra(P.category, level=1)
        report = validate_universal_coalgebra(D)
        assert report.passed, (P.name, str(report))
