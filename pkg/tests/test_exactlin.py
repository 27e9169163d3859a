from expecttest import assert_expected_inline
import pytest
import numpy as np

from hhtannaka.exactlin import (
    FieldSpec,
    Matrix,
    Solver,
    kernel_basis,
    rank,
    solve,
)

QQ = FieldSpec()
F109 = FieldSpec(109)


def _random_matrix(fs, rng, rows, cols, density=0.4):
    return Matrix.from_rows(
        fs, [[int(rng.integers(-5, 6)) if rng.random() < density else 0 for _ in range(cols)] for _ in range(rows)]
    )


def test_field_parse_and_format():
    assert_expected_inline(QQ.format(QQ("6/4")), """3/2""")
    assert_expected_inline(QQ.format(QQ("-2")), """-2""")
    assert_expected_inline(FieldSpec(7).format(FieldSpec(7)("-1")), """6""")
    assert_expected_inline(FieldSpec(7).format(FieldSpec(7)("1/2")), """4""")
    assert_expected_inline(str(FieldSpec.from_string("GF(109)")), """GF(109)""")
    assert_expected_inline(str(FieldSpec.from_string("QQ")), """QQ""")
    assert FieldSpec.from_string("109") == F109


def test_field_errors():
    with pytest.raises(ValueError, match="Unknown prime field"):
        FieldSpec(8)
    with pytest.raises(ValueError, match="Unknown scalar literal"):
        QQ("x")
    with pytest.raises(ValueError, match="Zero denominator"):
        QQ("1/0")
    with pytest.raises(ValueError, match="Unknown field"):
        FieldSpec.from_string("RR")


def test_matrix_str():
    m = Matrix.from_rows(QQ, [[1, 2], [2, 4]])
    assert_expected_inline(str(m), """[[1, 2], [2, 4]]""")
    assert_expected_inline(str(m.transpose()), """[[1, 2], [2, 4]]""")
    assert_expected_inline(str(Matrix.identity(FieldSpec(5), 2)), """[[1, 0], [0, 1]]""")
    assert_expected_inline(str(m @ Matrix.identity(QQ, 2)), """[[1, 2], [2, 4]]""")


def test_rank_and_kernel():
    m = Matrix.from_rows(QQ, [[1, 2], [2, 4]])
    assert rank(m) == 1
    assert_expected_inline(str([[QQ.format(x) for x in v] for v in kernel_basis(m)]), """[['-2', '1']]""")
    assert rank(Matrix.zeros(QQ, 3, 2)) == 0
    assert len(kernel_basis(Matrix.zeros(QQ, 3, 2))) == 2


@pytest.mark.parametrize("fs", [QQ, F109])
def test_rank_nullity_random(fs):
    rng = np.random.default_rng(0)
    for _ in range(20):
        m = _random_matrix(fs, rng, int(rng.integers(1, 8)), int(rng.integers(1, 8)))
        ker = kernel_basis(m)
        assert rank(m) + len(ker) == m.cols
        for v in ker:
            assert all(fs.is_zero(x) for x in m.matvec(v))


def test_solve():
    m = Matrix.from_rows(QQ, [[1, 1], [0, 1]])
    x = solve(m, [QQ(3), QQ(1)])
    assert [QQ.format(c) for c in x] == ["2", "1"]
    singular = Matrix.from_rows(QQ, [[1, 1], [1, 1]])
    assert solve(singular, [QQ(1), QQ(2)]) is None
    with pytest.raises(ValueError, match="Dimension mismatch"):
        solve(m, [QQ(1)])


def test_solve_agrees_with_matvec_random():
    rng = np.random.default_rng(1)
    for _ in range(20):
        m = _random_matrix(F109, rng, 5, 4)
        target = [F109(int(rng.integers(-5, 6))) for _ in range(4)]
        b = m.matvec(target)
        x = solve(m, b)
        assert x is not None
        assert m.matvec(x) == b


def test_solver_coordinates():
    s = Solver(Matrix.from_rows(QQ, [[1, 0, 1], [0, 1, 1]]))
    assert s.pivots == (0, 1)
    coords = s.coordinates({0: QQ(2), 1: QQ(3)})
    assert {j: QQ.format(c) for j, c in coords.items()} == {0: "2", 1: "3"}
    assert Solver(Matrix.from_rows(QQ, [[1], [0]])).coordinates({1: QQ(1)}) is None
    assert Solver(Matrix.from_rows(QQ, [[1], [0]])).coordinates({}) == {}
