from expecttest import assert_expected_inline
import pytest

from hhtannaka.comod import (
    bar_resolution,
    cofree,
    comodule_cone,
    comodule_hom_complex,
    cotensor,
    ground_coalgebra,
    regular_comodule,
    validate_coalgebra,
    validate_coalgebra_map,
    validate_comodule,
)
from hhtannaka.corpus import kellerex, matrix_algebra
from hhtannaka.errors import CoalgebraMismatch
from hhtannaka.exactlin import FieldSpec
from hhtannaka.hochschild import tannakian_dual
from hhtannaka.homalg import ground, hom_complex, identity_map

QQ = FieldSpec()


def keller_coalgebra(level=2):
    P = kellerex()
    return tannakian_dual(P.category, P.fibre, normalized=True, level=level)


def test_ground_coalgebra():
    k = ground_coalgebra(QQ)
    assert validate_coalgebra(k).passed
    assert_expected_inline(str(k), """coalgebra k on k over QQ dims {0:1} exact [-inf, inf]""")


def test_regular_and_cofree():
    C = keller_coalgebra()
    assert validate_comodule(regular_comodule(C)).passed
    assert validate_comodule(regular_comodule(C, "left")).passed
    F = cofree(ground(QQ, "u", -1), C)
    assert validate_comodule(F).passed
    assert F.carrier.dims() == {-1: 1, -2: 1, -3: 1, -4: 1}
    assert validate_comodule(cofree(ground(QQ, "u"), C, side="left")).passed
    with pytest.raises(ValueError, match="Unknown comodule side"):
        cofree(ground(QQ, "u"), C, side="middle")


def test_cotensor_with_regular_is_identity():
    C = keller_coalgebra()
    assert cotensor(regular_comodule(C), regular_comodule(C, "left")).dims() == C.carrier.dims()


def test_cofree_adjunction_dims():
    C = keller_coalgebra()
    V = ground(QQ, "u")
    H = comodule_hom_complex(regular_comodule(C), cofree(V, C))
    assert H.dims() == hom_complex(C.carrier, V).dims()
    assert H.dims() == {0: 1, 1: 1, 2: 1, 3: 1}


def test_comodule_cone_and_maps():
    C = keller_coalgebra()
    R = regular_comodule(C)
    cone = comodule_cone(identity_map(C.carrier), R, R)
    assert validate_comodule(cone).passed
    assert validate_coalgebra_map(identity_map(C.carrier), C, C).passed


def test_coalgebra_mismatch():
    C, D = keller_coalgebra(), keller_coalgebra(1)
    with pytest.raises(CoalgebraMismatch):
        cotensor(regular_comodule(C), regular_comodule(D, "left"))
    with pytest.raises(CoalgebraMismatch):
        cotensor(regular_comodule(C, "left"), regular_comodule(C))


def test_bar_resolution():
    C = keller_coalgebra()
    res = bar_resolution(regular_comodule(C), depth=2)
    assert res.pivot is not None
    assert validate_comodule(res.comodule).passed
    assert res.certificate.verdict, str(res.certificate)
    assert_expected_inline(str(res.complex.exact_window), """[-1, inf]""")
    with pytest.raises(ValueError, match="Unknown comodule side"):
        bar_resolution(regular_comodule(C, "left"))


def test_bar_resolution_without_exact_window():
    P = matrix_algebra()
    C = tannakian_dual(P.category, P.fibre, normalized=True, level=1, certify=False)
    M = regular_comodule(C)
    with pytest.warns(RuntimeWarning, match="no exact window"):
        res = bar_resolution(M, depth=4)
    assert res.depth == 0
    assert res.complex.exact_window.empty
    assert res.certificate.degrees.empty and res.certificate.rows == []
    assert res.complex.space.total_dim == M.carrier.space.total_dim * C.carrier.space.total_dim
