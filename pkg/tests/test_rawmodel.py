"""貼り合わせの形式モデルのテスト"""

import pytest

from src.descent import DescentDatum
from src.exceptions import UsageError
from src.rawmodel import (
    BINARY,
    UNARY,
    RawModel,
    build_raw_model,
    cumulative,
    filtered_dimensions,
    raw_fragment,
    raw_model_check,
)
from src.report import VERDICT_PASS


@pytest.fixture(scope="module")
def model(z6_datum: DescentDatum) -> RawModel:
    return build_raw_model(z6_datum, z6_datum.lattice.sites, max_degree=2)


class TestRawFragment:
    """形式モデル用の断片のテスト"""

    def test_objects(self, z6_datum: DescentDatum) -> None:
        """1 点集合・2 点集合・パッチとの共通部分・U を含む"""
        frag = raw_fragment(z6_datum, range(6))
        assert "{2}" in frag.objects
        assert "{2,5}" in frag.objects
        assert "{0,1,3,4}" in frag.objects
        assert "{0,1,2,3,4,5}" in frag.objects

    def test_empty_region(self, z6_datum: DescentDatum) -> None:
        with pytest.raises(UsageError):
            raw_fragment(z6_datum, [])


class TestRawModel:
    """形式モデルの濾過つき次元のテスト"""

    def test_symbols(self, model: RawModel) -> None:
        """単位・1 項・2 項の生成子がそろう"""
        kinds = {s.kind for s in model.symbols}
        assert kinds == {"e", UNARY, BINARY}
        assert all(s.degree <= 2 for s in model.symbols)
        assert model.relations

    def test_filtered_dimensions(self, model: RawModel) -> None:
        """濾過つき次元は 1, 7, 28（素朴な貼り合わせなら 29）"""
        assert filtered_dimensions(model, 2) == {0: 1, 1: 7, 2: 28}

    def test_cumulative(self) -> None:
        assert cumulative({0: 1, 1: 6, 2: 21}) == {0: 1, 1: 7, 2: 28}

    def test_degree_limit(self, z6_datum: DescentDatum) -> None:
        with pytest.raises(UsageError):
            build_raw_model(z6_datum, range(6), max_degree=3)

    def test_check(self, z6_datum: DescentDatum) -> None:
        """オペラド的な貼り合わせの表示と一致し、素朴な貼り合わせとは次数 2 で異なる"""
        result = raw_model_check(z6_datum, instance="z6")
        assert result.verdict == VERDICT_PASS, result.witness
        assert result.check == "raw_model"
        assert result.dims == result.reference_dims == {0: 1, 1: 7, 2: 28}
        assert "naive [(0, 1), (1, 7), (2, 29)]" in result.details
