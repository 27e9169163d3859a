from expecttest import assert_expected_inline
import pytest

from hhtannaka.exactlin import FieldSpec
from hhtannaka.utils.tools import defaults, get_config
from hhtannaka._utils import Report, fmt_table, koszul_sign, sign, unstable


@pytest.fixture
def fresh_config(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    get_config.cache_clear()
    yield tmp_path
    get_config.cache_clear()


def test_signs():
    assert [sign(n) for n in range(-2, 3)] == [1, -1, 1, -1, 1]
    assert koszul_sign([1, 1], [1, 0]) == -1
    assert koszul_sign([1, 2], [1, 0]) == 1
    assert koszul_sign([1, 1, 1], [2, 1, 0]) == -1
    assert koszul_sign([1, 0, 1], [0, 1, 2]) == 1


def test_report():
    r = Report("outer", checked=2)
    r.note("fine")
    inner = Report("inner", checked=1)
    inner.fail("broken")
    assert inner.passed is False
    assert r.merge(inner) is r
    assert not r
    assert_expected_inline(
        str(r),
        """\
outer: FAIL (3 checks)
  - inner: broken
  note: fine""",
    )


def test_fmt_table():
    rows = [[0, 1, 1], [-1, 12, 1]]
    assert_expected_inline(
        fmt_table(["degree", "dim", "H"], rows),
        """\
degree  dim  H
     0    1  1
    -1   12  1""",
    )
    assert fmt_table(["degree", "dim"], [[0, 1]], csv=True) == "degree,dim\n0,1"
    assert fmt_table(["a", "b"], []) == "a  b"


def test_unstable_warns():
    @unstable
    def experiment(x):
        return x + 1

    with pytest.warns(FutureWarning, match="experiment\\(\\) is unstable"):
        assert experiment(1) == 2


def test_config_defaults(fresh_config):
    config = get_config()
    assert config["acceptance"]["corpus_size"] == 25
    assert config["paths"]["projects_dir"].name == "projects"
    assert defaults() == {"field": FieldSpec(), "level": 6, "normalized": True}


def test_config_file_and_environment(fresh_config, monkeypatch):
    (fresh_config / "hhtannaka.toml").write_text('[defaults]\nfield = "GF(5)"\nlevel = 3\n')
    assert defaults()["field"] == FieldSpec(5)
    monkeypatch.setenv("HHTANNAKA_LEVEL", "4")
    assert defaults()["level"] == 4
    monkeypatch.setenv("HHTANNAKA_LEVEL", "four")
    with pytest.raises(ValueError, match="Unknown truncation level"):
        defaults()
