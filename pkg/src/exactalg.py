"""厳密なスカラーと非可換∗多項式

このモジュールは、すべての代数の表示が生きる土台となる自由∗代数を提供します。
係数体はガウス有理数 ℚ(i) で、浮動小数点は一切使いません。

主要な型:
    Scalar: ガウス有理数 re + im·i（共役つき）
    Generator / GeneratorTable: サイト・ファイバー番号・パッチ名をもつ生成子の表
    NCPoly: 語（生成子番号の列）から Scalar への有限線形結合

単項式順序:
    次数辞書式順序。生成子の比較は表の中の番号で行い、表は
    (パッチ名, サイト, ファイバー番号) の順に整列されています。

正準テキスト形式:
    スカラーは "a/b+c/d*i"、語は生成子名を空白で連結したもの（空語は "1"）。
    多項式は "<スカラー> * <語>" を " ; " で連結し、順序の大きい項から並べます。

使用例:
    table = GeneratorTable.build([Generator(0), Generator(1)])
    x0, x1 = NCPoly.generator(table, 0), NCPoly.generator(table, 1)
    p = x1 * x0 - x0 * x1 + Scalar(0, Fraction(1, 2))
    star(p)
"""

import re
from dataclasses import dataclass, field
from fractions import Fraction
from types import MappingProxyType
from typing import Any, Hashable, Iterable, Iterator, Mapping, Optional, Union

from sympy.polys.domains import QQ, QQ_I
from sympy.polys.matrices import DomainMatrix

from src.exceptions import UsageError

Word = tuple[int, ...]
ScalarLike = Union["Scalar", int, Fraction]

_SCALAR_TEXT = re.compile(r"^(-?\d+)/(\d+)([+-])(\d+)/(\d+)\*i$")


@dataclass(frozen=True, eq=False)
class Scalar:
    """ガウス有理数 re + im·i"""

    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        object.__setattr__(self, "re", Fraction(self.re))
        object.__setattr__(self, "im", Fraction(self.im))

    @classmethod
    def of(cls, value: ScalarLike) -> "Scalar":
        """int / Fraction / Scalar を Scalar に変換する"""
        if isinstance(value, Scalar):
            return value
        if isinstance(value, (int, Fraction)) and not isinstance(value, bool):
            return cls(Fraction(value))
        raise UsageError(f"スカラーに変換できない値です: {value!r}")

    @staticmethod
    def _coerce(value: object) -> Optional["Scalar"]:
        if isinstance(value, Scalar):
            return value
        if isinstance(value, (int, Fraction)) and not isinstance(value, bool):
            return Scalar(Fraction(value))
        return None

    def conj(self) -> "Scalar":
        return Scalar(self.re, -self.im)

    def __add__(self, other: object) -> "Scalar":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Scalar(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other: object) -> "Scalar":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Scalar(self.re - o.re, self.im - o.im)

    def __rsub__(self, other: object) -> "Scalar":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __neg__(self) -> "Scalar":
        return Scalar(-self.re, -self.im)

    def __mul__(self, other: object) -> "Scalar":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Scalar(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def inverse(self) -> "Scalar":
        norm = self.re * self.re + self.im * self.im
        if norm == 0:
            raise ZeroDivisionError("ゼロスカラーの逆元は存在しません")
        return Scalar(self.re / norm, -self.im / norm)

    def __truediv__(self, other: object) -> "Scalar":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other: object) -> "Scalar":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __eq__(self, other: object) -> bool:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self) -> int:
        return hash((self.re, self.im))

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    @property
    def is_real(self) -> bool:
        return self.im == 0

    def to_text(self) -> str:
        """正準テキスト形式 "a/b+c/d*i" に変換する"""
        sign = "-" if self.im < 0 else "+"
        im = abs(self.im)
        return (
            f"{self.re.numerator}/{self.re.denominator}"
            f"{sign}{im.numerator}/{im.denominator}*i"
        )

    @classmethod
    def from_text(cls, text: str) -> "Scalar":
        """正準テキスト形式からスカラーを復元する"""
        match = _SCALAR_TEXT.match(text.strip())
        if match is None:
            raise UsageError(f"スカラーの正準形式ではありません: {text!r}")
        re_num, re_den, sign, im_num, im_den = match.groups()
        im = Fraction(int(im_num), int(im_den))
        return cls(Fraction(int(re_num), int(re_den)), -im if sign == "-" else im)

    def __str__(self) -> str:
        if not self.im:
            return str(self.re)
        if not self.re:
            return f"{self.im}*i"
        return f"({self.to_text()})"

    def __repr__(self) -> str:
        return f"Scalar({self.to_text()})"


ZERO = Scalar()
ONE = Scalar(Fraction(1))
I_UNIT = Scalar(Fraction(0), Fraction(1))


def conj(s: Scalar) -> Scalar:
    """複素共役 (a+bi) ↦ (a−bi)"""
    return s.conj()


@dataclass(frozen=True)
class Generator:
    """サイト・ファイバー番号・パッチ名で識別される自己共役な生成子"""

    site: int
    fiber: int = 0
    patch: Optional[str] = None

    def sort_key(self) -> tuple[str, int, int]:
        return (self.patch or "", self.site, self.fiber)

    @property
    def name(self) -> str:
        base = f"x{self.site}" if not self.fiber else f"x{self.site}_{self.fiber}"
        return f"{self.patch}:{base}" if self.patch else base


@dataclass(frozen=True)
class GeneratorTable:
    """生成子の表。番号の大小がそのまま単項式順序の生成子比較になる"""

    generators: tuple[Generator, ...]
    _index: dict[Generator, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        keys = [g.sort_key() for g in self.generators]
        if any(a >= b for a, b in zip(keys, keys[1:])):
            raise UsageError("生成子表は (パッチ, サイト, ファイバー) で狭義に整列している必要があります")
        object.__setattr__(self, "_index", {g: i for i, g in enumerate(self.generators)})

    @classmethod
    def build(cls, generators: Iterable[Generator]) -> "GeneratorTable":
        """重複を除いて整列した表を作る"""
        unique = {g.sort_key(): g for g in generators}
        return cls(tuple(unique[k] for k in sorted(unique)))

    def __len__(self) -> int:
        return len(self.generators)

    def __getitem__(self, index: int) -> Generator:
        return self.generators[index]

    def __iter__(self) -> Iterator[Generator]:
        return iter(self.generators)

    def index(self, generator: Generator) -> int:
        try:
            return self._index[generator]
        except KeyError:
            raise UsageError(f"生成子表にない生成子です: {generator.name}") from None

    def __contains__(self, generator: object) -> bool:
        return generator in self._index

    def word_text(self, word: Word) -> str:
        if not word:
            return "1"
        return " ".join(self.generators[g].name for g in word)

    def parse_word(self, text: str) -> Word:
        names = {g.name: i for i, g in enumerate(self.generators)}
        if text.strip() == "1":
            return ()
        try:
            return tuple(names[token] for token in text.split())
        except KeyError as e:
            raise UsageError(f"生成子名が表にありません: {e.args[0]}") from None


def word_key(word: Word) -> tuple[int, Word]:
    """次数辞書式順序のソートキー"""
    return (len(word), word)


class NCPoly:
    """語から Scalar への有限線形結合。生成後は変更されない"""

    __slots__ = ("_table", "_terms")

    def __init__(
        self, table: GeneratorTable, terms: Optional[Mapping[Word, ScalarLike]] = None
    ) -> None:
        n = len(table)
        cleaned: dict[Word, Scalar] = {}
        for word, coef in (terms or {}).items():
            word = tuple(word)
            if any(g < 0 or g >= n for g in word):
                raise UsageError(f"生成子番号が表の範囲外です: {word}")
            s = Scalar.of(coef)
            if s:
                cleaned[word] = s
        self._table = table
        self._terms = cleaned

    @classmethod
    def _raw(cls, table: GeneratorTable, terms: dict[Word, Scalar]) -> "NCPoly":
        # 呼び出し側がゼロ係数を含まないことを保証する
        p = cls.__new__(cls)
        p._table = table
        p._terms = terms
        return p

    @classmethod
    def zero(cls, table: GeneratorTable) -> "NCPoly":
        return cls._raw(table, {})

    @classmethod
    def one(cls, table: GeneratorTable) -> "NCPoly":
        return cls._raw(table, {(): ONE})

    @classmethod
    def constant(cls, table: GeneratorTable, value: ScalarLike) -> "NCPoly":
        return cls(table, {(): value})

    @classmethod
    def generator(cls, table: GeneratorTable, index: int) -> "NCPoly":
        return cls(table, {(index,): ONE})

    @classmethod
    def monomial(cls, table: GeneratorTable, word: Word, coef: ScalarLike = 1) -> "NCPoly":
        return cls(table, {word: coef})

    @property
    def table(self) -> GeneratorTable:
        return self._table

    @property
    def terms(self) -> Mapping[Word, Scalar]:
        return MappingProxyType(self._terms)

    def words(self) -> list[Word]:
        """順序の大きい語から並べた語のリスト"""
        return sorted(self._terms, key=word_key, reverse=True)

    @property
    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def degree(self) -> int:
        """次数（ゼロ多項式は -1）"""
        return max((len(w) for w in self._terms), default=-1)

    def leading_word(self) -> Word:
        if not self._terms:
            raise UsageError("ゼロ多項式には先頭語がありません")
        return max(self._terms, key=word_key)

    def coefficient(self, word: Word) -> Scalar:
        return self._terms.get(tuple(word), ZERO)

    def _check_table(self, other: "NCPoly") -> None:
        if other._table is not self._table and other._table != self._table:
            raise UsageError("生成子表が一致しない多項式同士の演算です")

    def _lift(self, other: object) -> Optional["NCPoly"]:
        if isinstance(other, NCPoly):
            self._check_table(other)
            return other
        s = Scalar._coerce(other)
        if s is None:
            return None
        return NCPoly.constant(self._table, s)

    def __add__(self, other: object) -> "NCPoly":
        o = self._lift(other)
        if o is None:
            return NotImplemented
        acc = dict(self._terms)
        for w, c in o._terms.items():
            add_term(acc, w, c)
        return NCPoly._raw(self._table, acc)

    __radd__ = __add__

    def __neg__(self) -> "NCPoly":
        return NCPoly._raw(self._table, {w: -c for w, c in self._terms.items()})

    def __sub__(self, other: object) -> "NCPoly":
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other: object) -> "NCPoly":
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o - self

    def scale(self, c: ScalarLike) -> "NCPoly":
        s = Scalar.of(c)
        if not s:
            return NCPoly.zero(self._table)
        return NCPoly._raw(self._table, {w: s * v for w, v in self._terms.items()})

    def __mul__(self, other: object) -> "NCPoly":
        if isinstance(other, NCPoly):
            return nc_mul(self, other)
        s = Scalar._coerce(other)
        if s is None:
            return NotImplemented
        return self.scale(s)

    def __rmul__(self, other: object) -> "NCPoly":
        s = Scalar._coerce(other)
        if s is None:
            return NotImplemented
        return self.scale(s)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, NCPoly):
            return self._table == other._table and self._terms == other._terms
        s = Scalar._coerce(other)
        if s is None:
            return NotImplemented
        return self == NCPoly.constant(self._table, s)

    __hash__ = None  # type: ignore[assignment]

    def star(self) -> "NCPoly":
        return star(self)

    def to_text(self) -> str:
        if not self._terms:
            return "0"
        return " ; ".join(
            f"{self._terms[w].to_text()} * {self._table.word_text(w)}" for w in self.words()
        )

    @classmethod
    def from_text(cls, table: GeneratorTable, text: str) -> "NCPoly":
        if text.strip() == "0":
            return cls.zero(table)
        terms: dict[Word, Scalar] = {}
        for chunk in text.split(" ; "):
            coef_text, _, word_text = chunk.partition(" * ")
            add_term(terms, table.parse_word(word_text), Scalar.from_text(coef_text))
        return cls._raw(table, terms)

    def __repr__(self) -> str:
        return f"NCPoly({self.to_text()})"


def add_term(acc: dict[Word, Scalar], word: Word, coef: Scalar) -> None:
    """係数辞書に項を加える（ゼロになった項は取り除く）"""
    total = acc.get(word)
    total = coef if total is None else total + coef
    if total:
        acc[word] = total
    else:
        acc.pop(word, None)


def nc_mul(p: NCPoly, q: NCPoly) -> NCPoly:
    """語の連結の双線形拡張"""
    p._check_table(q)
    acc: dict[Word, Scalar] = {}
    for u, a in p._terms.items():
        for v, b in q._terms.items():
            add_term(acc, u + v, a * b)
    return NCPoly._raw(p._table, acc)


def star(p: NCPoly) -> NCPoly:
    """∗-対合: 語を反転し、係数を共役にする（生成子は自己共役）"""
    return NCPoly._raw(p.table, {w[::-1]: c.conj() for w, c in p.terms.items()})


@dataclass(frozen=True)
class GeneratorMap:
    """生成子の像で決まる自由代数の間の∗代数写像"""

    source: GeneratorTable
    target: GeneratorTable
    images: tuple[NCPoly, ...]

    def __post_init__(self) -> None:
        if len(self.images) != len(self.source):
            raise UsageError("生成子の像の個数が始域の生成子数と一致しません")
        for img in self.images:
            if img.table != self.target:
                raise UsageError("生成子の像が終域の生成子表にありません")

    def image(self, index: int) -> NCPoly:
        return self.images[index]

    def apply(self, p: NCPoly) -> NCPoly:
        """語ごとに生成子の像を掛け合わせて線形に延長する"""
        if p.table != self.source:
            raise UsageError("写像の始域と多項式の生成子表が一致しません")
        acc: dict[Word, Scalar] = {}
        cache: dict[Word, NCPoly] = {}
        for word, coef in p.terms.items():
            value = cache.get(word)
            if value is None:
                value = NCPoly.one(self.target)
                for g in word:
                    value = value * self.images[g]
                cache[word] = value
            for w, c in value.terms.items():
                add_term(acc, w, coef * c)
        return NCPoly._raw(self.target, acc)

    def then(self, other: "GeneratorMap") -> "GeneratorMap":
        """合成 other ∘ self"""
        if other.source != self.target:
            raise UsageError("合成できない生成子写像です")
        return GeneratorMap(self.source, other.target, tuple(other.apply(i) for i in self.images))


def to_domain(s: Scalar) -> Any:
    """sympy のガウス有理数体 QQ_I の元に変換する"""
    return QQ_I(QQ(s.re.numerator, s.re.denominator), QQ(s.im.numerator, s.im.denominator))


def sparse_rank(rows: Iterable[Mapping[Hashable, Scalar]]) -> int:
    """疎な行（列キー ↦ 係数）の ℚ(i) 上の階数（sympy の疎な DomainMatrix で計算）"""
    columns: dict[Hashable, int] = {}
    matrix: dict[int, dict[int, Any]] = {}
    for row in rows:
        entries = {}
        for key, c in row.items():
            if c:
                entries[columns.setdefault(key, len(columns))] = to_domain(c)
        if entries:
            matrix[len(matrix)] = entries
    if not matrix:
        return 0
    return int(DomainMatrix(matrix, (len(matrix), len(columns)), QQ_I).rank())


def span_rank(polys: Iterable[NCPoly]) -> int:
    """多項式の張る ℚ(i) 上の線形空間の次元"""
    return sparse_rank(p.terms for p in polys)
