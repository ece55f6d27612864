"""厳密なスカラーと非可換多項式のテスト"""

import random
from fractions import Fraction

import pytest

from src.exactalg import (
    I_UNIT,
    ONE,
    ZERO,
    Generator,
    GeneratorMap,
    GeneratorTable,
    NCPoly,
    Scalar,
    Word,
    nc_mul,
    span_rank,
    sparse_rank,
)
from src.exceptions import UsageError


@pytest.fixture
def table() -> GeneratorTable:
    return GeneratorTable.build(Generator(i) for i in (2, 0, 1))


class TestScalar:
    """ガウス有理数のテスト"""

    def test_arithmetic(self) -> None:
        """四則演算が厳密に行われる"""
        a = Scalar(Fraction(1, 2), Fraction(1))
        b = Scalar(Fraction(1, 3))
        assert a + b == Scalar(Fraction(5, 6), Fraction(1))
        assert a * I_UNIT == Scalar(Fraction(-1), Fraction(1, 2))
        assert (a / a) == ONE
        assert a - a == ZERO

    def test_integer_comparison(self) -> None:
        """整数と比較できる"""
        assert Scalar.of(3) == 3
        assert I_UNIT * I_UNIT == -1

    def test_inverse(self) -> None:
        """逆元"""
        s = Scalar(Fraction(1), Fraction(1))
        assert s * s.inverse() == ONE
        with pytest.raises(ZeroDivisionError):
            ZERO.inverse()

    def test_text_form(self) -> None:
        """正準テキスト形式"""
        s = Scalar(Fraction(-1, 2), Fraction(-3, 4))
        assert s.to_text() == "-1/2-3/4*i"
        assert Scalar.from_text(s.to_text()) == s
        assert ONE.to_text() == "1/1+0/1*i"

    def test_invalid_text(self) -> None:
        """正準形式でない文字列"""
        with pytest.raises(UsageError):
            Scalar.from_text("0.5")

    def test_of_rejects_float(self) -> None:
        """浮動小数点数は受け付けない"""
        with pytest.raises(UsageError):
            Scalar.of(0.5)  # type: ignore[arg-type]

    def test_conj_and_real(self) -> None:
        """共役と実数判定"""
        assert I_UNIT.conj() == -I_UNIT
        assert ONE.is_real
        assert not I_UNIT.is_real


class TestGeneratorTable:
    """生成子表のテスト"""

    def test_build_sorts(self, table: GeneratorTable) -> None:
        """build は整列して重複を除く"""
        assert [g.site for g in table] == [0, 1, 2]
        assert table.index(Generator(2)) == 2

    def test_unsorted_rejected(self) -> None:
        """整列していない表は作れない"""
        with pytest.raises(UsageError):
            GeneratorTable((Generator(1), Generator(0)))

    def test_labels_sort_first(self) -> None:
        """パッチ名が先に比較される"""
        t = GeneratorTable.build([Generator(5, patch="B"), Generator(9, patch="A")])
        assert [g.name for g in t] == ["A:x9", "B:x5"]

    def test_word_text(self, table: GeneratorTable) -> None:
        """語のテキストと解析"""
        assert table.word_text((2, 0)) == "x2 x0"
        assert table.word_text(()) == "1"
        assert table.parse_word("x2 x0") == (2, 0)

    def test_unknown_generator(self, table: GeneratorTable) -> None:
        """表にない生成子"""
        with pytest.raises(UsageError):
            table.index(Generator(7))
        with pytest.raises(UsageError):
            table.parse_word("x7")


class TestNCPoly:
    """非可換多項式のテスト"""

    def test_multiplication_is_noncommutative(self, table: GeneratorTable) -> None:
        """積は語の連結"""
        x0, x1 = NCPoly.generator(table, 0), NCPoly.generator(table, 1)
        assert x0 * x1 != x1 * x0
        assert (x0 * x1).terms == {(0, 1): ONE}

    def test_nc_mul_bilinear(self, table: GeneratorTable) -> None:
        x0, x1 = NCPoly.generator(table, 0), NCPoly.generator(table, 1)
        assert nc_mul(x0 + x1, x1.scale(I_UNIT)) == (x0 * x1 + x1 * x1).scale(I_UNIT)

    def test_nc_mul_table_mismatch(self, table: GeneratorTable) -> None:
        other = GeneratorTable.build(Generator(i) for i in (0, 1))
        with pytest.raises(UsageError):
            nc_mul(NCPoly.generator(table, 0), NCPoly.generator(other, 0))

    def test_zero_terms_removed(self, table: GeneratorTable) -> None:
        """係数 0 の項は残らない"""
        x0 = NCPoly.generator(table, 0)
        assert (x0 - x0).is_zero
        assert (x0 - x0).degree() == -1

    def test_scalar_arithmetic(self, table: GeneratorTable) -> None:
        """スカラーとの演算"""
        x0 = NCPoly.generator(table, 0)
        p = 2 * x0 + 1
        assert p.coefficient((0,)) == 2
        assert p.coefficient(()) == 1
        assert p - 1 == x0.scale(2)

    def test_leading_word(self, table: GeneratorTable) -> None:
        """次数辞書式順序の先頭語"""
        p = NCPoly(table, {(0, 2): 1, (1, 0): 1, (2,): 1})
        assert p.leading_word() == (1, 0)
        assert p.words() == [(1, 0), (0, 2), (2,)]
        with pytest.raises(UsageError):
            NCPoly.zero(table).leading_word()

    def test_star(self, table: GeneratorTable) -> None:
        """∗は語を反転し係数を共役にする"""
        p = NCPoly.monomial(table, (0, 1), I_UNIT)
        assert p.star() == NCPoly.monomial(table, (1, 0), -I_UNIT)
        assert p.star().star() == p

    def test_text_form(self, table: GeneratorTable) -> None:
        """正準テキスト形式"""
        p = NCPoly(table, {(1, 0): 1, (): Scalar(Fraction(0), Fraction(-1, 2))})
        text = p.to_text()
        assert text == "1/1+0/1*i * x1 x0 ; 0/1-1/2*i * 1"
        assert NCPoly.from_text(table, text) == p
        assert NCPoly.zero(table).to_text() == "0"

    def test_out_of_range_word(self, table: GeneratorTable) -> None:
        """表の範囲外の生成子番号"""
        with pytest.raises(UsageError):
            NCPoly.monomial(table, (3,))

    def test_mismatched_tables(self, table: GeneratorTable) -> None:
        """生成子表の異なる多項式は足せない"""
        other = GeneratorTable.build([Generator(0, patch="A")])
        with pytest.raises(UsageError):
            NCPoly.generator(table, 0) + NCPoly.generator(other, 0)


class TestGeneratorMap:
    """生成子写像のテスト"""

    def test_apply_and_compose(self, table: GeneratorTable) -> None:
        """像の積で延長され、合成は順に適用したものと一致する"""
        x = [NCPoly.generator(table, k) for k in range(3)]
        swap = GeneratorMap(table, table, (x[1], x[0], x[2]))
        double = GeneratorMap(table, table, (x[0].scale(2), x[1], x[2]))
        p = x[0] * x[1] + 1
        assert swap.apply(p) == x[1] * x[0] + 1
        assert swap.then(double).apply(p) == double.apply(swap.apply(p))

    def test_image_count_checked(self, table: GeneratorTable) -> None:
        """像の個数は始域の生成子数と一致する必要がある"""
        with pytest.raises(UsageError):
            GeneratorMap(table, table, (NCPoly.one(table),))


class TestRank:
    """ℚ(i) 上の階数のテスト"""

    def test_sparse_rank(self) -> None:
        """疎な行の階数"""
        rows = [{"a": ONE, "b": I_UNIT}, {"a": I_UNIT, "b": -ONE}, {"c": ONE}, {}]
        assert sparse_rank(rows) == 2
        assert sparse_rank([]) == 0

    def test_span_rank(self, table: GeneratorTable) -> None:
        """多項式の張る空間の次元"""
        x0, x1 = NCPoly.generator(table, 0), NCPoly.generator(table, 1)
        assert span_rank([x0, x1, x0 + x1, x0 * x1]) == 3


def random_scalar(rng: random.Random) -> Scalar:
    return Scalar(
        Fraction(rng.randint(-6, 6), rng.randint(1, 5)),
        Fraction(rng.randint(-6, 6), rng.randint(1, 5)),
    )


def random_poly(rng: random.Random, table: GeneratorTable) -> NCPoly:
    """長さ 2 以下の語を最大 4 項もつ多項式"""
    terms: dict[Word, Scalar] = {}
    for _ in range(rng.randint(0, 4)):
        word = tuple(rng.randrange(len(table)) for _ in range(rng.randint(0, 2)))
        terms[word] = random_scalar(rng)
    return NCPoly(table, terms)


class TestRandomizedAxioms:
    """乱択による環の公理と∗の性質のテスト"""

    TRIALS = 200

    def test_ring_axioms(self, table: GeneratorTable) -> None:
        """結合律と両側の分配律"""
        rng = random.Random(7)
        for _ in range(self.TRIALS):
            p, q, r = (random_poly(rng, table) for _ in range(3))
            assert (p * q) * r == p * (q * r)
            assert p * (q + r) == p * q + p * r
            assert (p + q) * r == p * r + q * r

    def test_star_anti_homomorphism(self, table: GeneratorTable) -> None:
        """(pq)* = q*p*、(cp)* = c̄p*、p** = p"""
        rng = random.Random(11)
        for _ in range(self.TRIALS):
            p, q = random_poly(rng, table), random_poly(rng, table)
            c = random_scalar(rng)
            assert (p * q).star() == q.star() * p.star()
            assert p.scale(c).star() == p.star().scale(c.conj())
            assert p.star().star() == p
            assert (p + q).star() == p.star() + q.star()

    def test_scalar_text_round_trip(self) -> None:
        rng = random.Random(13)
        for _ in range(self.TRIALS):
            s = random_scalar(rng)
            assert Scalar.from_text(s.to_text()) == s

    def test_poly_text_round_trip(self, table: GeneratorTable) -> None:
        rng = random.Random(17)
        for _ in range(self.TRIALS):
            p = random_poly(rng, table)
            assert NCPoly.from_text(table, p.to_text()) == p
