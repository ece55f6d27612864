"""1次元離散幾何

このモジュールは、円周（cycle）と線分（path）の格子、その上の階数 1 の束と
辺ごとの ±1 平行移動、離散接続 ∇、ポアソン構造 τ、1 の分割、直交性を提供します。

主な機能:
    - Lattice1D: 格子の種類・サイト数・辺の平行移動。構築時に τ の反対称性を全数検査
    - nabla / tau: 離散接続と台形則によるペアリング
    - orthogonal: グラフ距離 2 以上（共有サイトも隣接サイトもない）
    - Cover / validate_cover: 弧からなる被覆と許容性の検査
    - partition_of_unity / validate_partition / multiply: 1 の分割

式:
    (∇ψ)(i, i+1) = t·ψ(i+1) − ψ(i)
    τ(φ, ψ) = Σ_e ½·(φ(i) + t_e·φ(i+1))·(∇ψ)(e)

使用例:
    lat = Lattice1D.cycle(12)
    tau(lat, lat.delta(0), lat.delta(1))   # 1/2
    cover = Cover.from_mapping({"A": range(6), "B": range(4, 10)})
"""

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from src.exactalg import ONE, ZERO, Scalar, ScalarLike
from src.exceptions import InvariantError, UsageError
from src.report import ValidationReport, Violation, report_of

Sites = frozenset[int]

CYCLE = "cycle"
PATH = "path"
HALF = Scalar(Fraction(1, 2))


@dataclass(frozen=True)
class DiscreteForm:
    """サイトごとの係数（長さ N のタプル）"""

    values: tuple[Scalar, ...]

    def __call__(self, site: int) -> Scalar:
        return self.values[site]

    def support(self) -> Sites:
        return frozenset(i for i, v in enumerate(self.values) if v)

    def __add__(self, other: "DiscreteForm") -> "DiscreteForm":
        _check_len(self.values, other.values)
        return DiscreteForm(tuple(a + b for a, b in zip(self.values, other.values)))

    def __sub__(self, other: "DiscreteForm") -> "DiscreteForm":
        _check_len(self.values, other.values)
        return DiscreteForm(tuple(a - b for a, b in zip(self.values, other.values)))

    def scale(self, c: ScalarLike) -> "DiscreteForm":
        s = Scalar.of(c)
        return DiscreteForm(tuple(s * v for v in self.values))

    def nonzero_items(self) -> list[tuple[int, Scalar]]:
        return [(i, v) for i, v in enumerate(self.values) if v]


@dataclass(frozen=True)
class EdgeForm:
    """辺ごとの係数。辺 k は (k, k+1)（円周では mod N）"""

    values: tuple[Scalar, ...]

    def __call__(self, edge: int) -> Scalar:
        return self.values[edge]

    def support(self) -> frozenset[int]:
        return frozenset(k for k, v in enumerate(self.values) if v)


def _check_len(a: Sequence[Scalar], b: Sequence[Scalar]) -> None:
    if len(a) != len(b):
        raise UsageError(f"長さの異なる形式同士の演算です: {len(a)} と {len(b)}")


@dataclass(frozen=True)
class Lattice1D:
    """
    1次元格子と辺の平行移動

    Attributes:
        kind: "cycle" または "path"
        n_sites: サイト数 N
        transports: 辺ごとの ±1（円周は N 本、線分は N − 1 本）
    """

    kind: str
    n_sites: int
    transports: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.kind not in (CYCLE, PATH):
            raise UsageError(f"格子の種類が不正です: {self.kind}")
        if self.kind == CYCLE and self.n_sites < 3:
            raise UsageError(f"円周格子には N ≥ 3 が必要です: N={self.n_sites}")
        if self.kind == PATH and self.n_sites < 2:
            raise UsageError(f"線分格子には N ≥ 2 が必要です: N={self.n_sites}")
        if len(self.transports) != self.n_edges:
            raise UsageError(
                f"平行移動の個数 {len(self.transports)} が辺の数 {self.n_edges} と一致しません"
            )
        if any(t not in (1, -1) for t in self.transports):
            raise UsageError("平行移動は +1 または -1 である必要があります")
        broken = antisymmetry_sweep(self)
        if not broken.ok:
            raise InvariantError(
                f"τ の反対称性が破れています: {broken.violations[0].witness}", self.describe()
            )

    @classmethod
    def cycle(cls, n_sites: int, transports: Optional[Sequence[int]] = None) -> "Lattice1D":
        return cls(CYCLE, n_sites, tuple(transports) if transports else (1,) * n_sites)

    @classmethod
    def path(cls, n_sites: int, transports: Optional[Sequence[int]] = None) -> "Lattice1D":
        return cls(PATH, n_sites, tuple(transports) if transports else (1,) * (n_sites - 1))

    @property
    def n_edges(self) -> int:
        return self.n_sites if self.kind == CYCLE else self.n_sites - 1

    @property
    def sites(self) -> Sites:
        return frozenset(range(self.n_sites))

    def describe(self) -> str:
        return f"{self.kind}(N={self.n_sites})"

    def edge(self, k: int) -> tuple[int, int]:
        return (k, (k + 1) % self.n_sites)

    def edges(self) -> list[tuple[int, int]]:
        return [self.edge(k) for k in range(self.n_edges)]

    def distance(self, i: int, j: int) -> int:
        d = abs(i - j)
        if self.kind == CYCLE:
            d = min(d, self.n_sites - d)
        return d

    def form(self, values: Mapping[int, ScalarLike]) -> DiscreteForm:
        coeffs = [ZERO] * self.n_sites
        for site, v in values.items():
            if not 0 <= site < self.n_sites:
                raise UsageError(f"サイト {site} は格子の範囲外です", self.describe())
            coeffs[site] = Scalar.of(v)
        return DiscreteForm(tuple(coeffs))

    def delta(self, site: int) -> DiscreteForm:
        return self.form({site: 1})

    def constant(self, value: ScalarLike = 1) -> DiscreteForm:
        return DiscreteForm((Scalar.of(value),) * self.n_sites)

    def zero(self) -> DiscreteForm:
        return DiscreteForm((ZERO,) * self.n_sites)

    def is_interior(self, phi: DiscreteForm) -> bool:
        """線分格子で両端のサイトで 0 になるか（円周では常に True）"""
        if self.kind == CYCLE:
            return True
        return not phi(0) and not phi(self.n_sites - 1)


def nabla(lat: Lattice1D, phi: DiscreteForm) -> EdgeForm:
    """離散接続 (∇φ)(i, i+1) = t·φ(i+1) − φ(i)"""
    values = []
    for k, (i, j) in enumerate(lat.edges()):
        values.append(phi(j) * lat.transports[k] - phi(i))
    return EdgeForm(tuple(values))


def _tau_raw(lat: Lattice1D, phi: DiscreteForm, psi: DiscreteForm) -> Scalar:
    grad = nabla(lat, psi)
    total = ZERO
    for k, (i, j) in enumerate(lat.edges()):
        g = grad(k)
        if g:
            total = total + HALF * (phi(i) + phi(j) * lat.transports[k]) * g
    return total


def tau(lat: Lattice1D, phi: DiscreteForm, psi: DiscreteForm) -> Scalar:
    """
    ポアソン構造 τ(φ, ψ)

    Raises:
        UsageError: 線分格子で φ か ψ が端点で 0 でない場合
    """
    if not (lat.is_interior(phi) and lat.is_interior(psi)):
        raise UsageError("線分格子では τ の引数は両端で 0 である必要があります", lat.describe())
    return _tau_raw(lat, phi, psi)


def delta_tau(lat: Lattice1D, i: int, j: int) -> Scalar:
    """τ(δ_i, δ_j)"""
    return tau(lat, lat.delta(i), lat.delta(j))


def antisymmetry_sweep(lat: Lattice1D) -> ValidationReport:
    """デルタ形式のすべての組で τ(δ_i, δ_j) + τ(δ_j, δ_i) = 0 を確かめる"""
    if lat.kind == CYCLE:
        sites = list(range(lat.n_sites))
    else:
        sites = list(range(1, lat.n_sites - 1))
    violations = []
    deltas = {i: lat.delta(i) for i in sites}
    for i in sites:
        for j in sites:
            if j < i:
                continue
            s = _tau_raw(lat, deltas[i], deltas[j]) + _tau_raw(lat, deltas[j], deltas[i])
            if s:
                violations.append(
                    Violation("antisymmetry", "τ(δ_i,δ_j) + τ(δ_j,δ_i) ≠ 0", f"({i}, {j}): {s}")
                )
    return report_of(lat.describe(), violations)


def orthogonal(lat: Lattice1D, u: Iterable[int], v: Iterable[int]) -> bool:
    """グラフ距離 2 以上なら True"""
    us, vs = set(u), set(v)
    return all(lat.distance(a, b) >= 2 for a in us for b in vs)


def multiply(chi: DiscreteForm, phi: DiscreteForm) -> DiscreteForm:
    """サイトごとの積"""
    _check_len(chi.values, phi.values)
    return DiscreteForm(tuple(a * b for a, b in zip(chi.values, phi.values)))


@dataclass(frozen=True)
class Cover:
    """名前つきパッチ（サイト集合）の族。名前の順に並ぶ"""

    patches: tuple[tuple[str, Sites], ...]

    def __post_init__(self) -> None:
        names = [name for name, _ in self.patches]
        if names != sorted(set(names)):
            raise UsageError("パッチ名は重複なく整列している必要があります")
        for name, sites in self.patches:
            if not sites:
                raise UsageError("空のパッチは指定できません", name)

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, Iterable[int]]) -> "Cover":
        return cls(tuple((name, frozenset(mapping[name])) for name in sorted(mapping)))

    @property
    def labels(self) -> list[str]:
        return [name for name, _ in self.patches]

    def patch(self, label: str) -> Sites:
        for name, sites in self.patches:
            if name == label:
                return sites
        raise UsageError("被覆にないパッチ名です", label)

    def union(self) -> Sites:
        out: set[int] = set()
        for _, sites in self.patches:
            out |= sites
        return frozenset(out)

    def labels_at(self, site: int) -> list[str]:
        return [name for name, sites in self.patches if site in sites]

    def restricted_to(self, region: Iterable[int]) -> dict[str, Sites]:
        """各パッチと region の共通部分（空は除く）"""
        r = frozenset(region)
        return {name: sites & r for name, sites in self.patches if sites & r}

    def contains_whole(self, lat: Lattice1D) -> bool:
        return any(sites == lat.sites for _, sites in self.patches)


def is_arc(lat: Lattice1D, sites: Iterable[int]) -> bool:
    """連続したサイトの区間（円周では弧）か"""
    s = frozenset(sites)
    if not s:
        return False
    if lat.kind == PATH:
        return max(s) - min(s) + 1 == len(s)
    if s == lat.sites:
        return True
    ends = [i for i in s if (i + 1) % lat.n_sites not in s]
    return len(ends) == 1


def arc_ends(lat: Lattice1D, sites: Iterable[int]) -> tuple[int, int]:
    """真の弧 [s, e] の始点と終点"""
    s = frozenset(sites)
    if not is_arc(lat, s) or s == lat.sites:
        raise UsageError(f"真の弧ではありません: {sorted(s)}")
    if lat.kind == PATH:
        return min(s), max(s)
    n = lat.n_sites
    start = next(i for i in s if (i - 1) % n not in s)
    end = next(i for i in s if (i + 1) % n not in s)
    return start, end


def arc_sites(lat: Lattice1D, start: int, length: int) -> list[int]:
    """start から順方向に length 個のサイト"""
    if lat.kind == CYCLE:
        return [(start + k) % lat.n_sites for k in range(length)]
    return list(range(start, start + length))


def validate_cover(lat: Lattice1D, cover: Cover, w_min: int = 2) -> ValidationReport:
    """
    被覆の妥当性と許容性を検査する

    検査内容:
        - パッチの和集合が全サイトに一致する
        - 各パッチが弧である
        - 真の弧 [s, e] の各端で、端の w_min 個のサイトとその外側の 1 サイトを
          まとめて含む別のパッチがある（隣の弧との重なり幅が w_min 以上）。
          線分格子の端点は対象外。M 全体を含む被覆は常に許容

    Returns:
        ValidationReport: 違反がなければ ok
    """
    violations = []
    subject = f"cover on {lat.describe()}"
    for name, sites in cover.patches:
        bad = sorted(i for i in sites if not 0 <= i < lat.n_sites)
        if bad:
            violations.append(Violation("range", f"パッチ {name} に範囲外のサイトがあります", str(bad)))
    missing = sorted(lat.sites - cover.union())
    if missing:
        violations.append(Violation("union", "被覆されていないサイトがあります", str(missing)))
    if violations:
        return report_of(subject, violations)

    for name, sites in cover.patches:
        if not is_arc(lat, sites):
            violations.append(Violation("arc", f"パッチ {name} が弧ではありません", str(sorted(sites))))
    if violations or cover.contains_whole(lat):
        return report_of(subject, violations)

    for name, sites in cover.patches:
        start, end = arc_ends(lat, sites)
        width = min(w_min, len(sites))
        checks = []
        if not (lat.kind == PATH and end == lat.n_sites - 1):
            checks.append(("右端", end, arc_sites(lat, end - width + 1, width + 1)))
        if not (lat.kind == PATH and start == 0):
            checks.append(("左端", start, arc_sites(lat, start - 1, width + 1)))
        for side, site, needed in checks:
            needed_set = frozenset(i % lat.n_sites for i in needed)
            if not any(
                other != name and needed_set <= other_sites
                for other, other_sites in cover.patches
            ):
                violations.append(
                    Violation(
                        "overlap",
                        f"パッチ {name} の{side} {site} で重なり幅が {w_min} 未満です",
                        str(sorted(needed_set)),
                    )
                )
    return report_of(subject, violations)


def partition_of_unity(lat: Lattice1D, cover: Cover) -> dict[str, DiscreteForm]:
    """一様な重みの 1 の分割 χ_α(i) = 1/#{β : i ∈ M_β}（i ∈ M_α）"""
    counts = {i: len(cover.labels_at(i)) for i in range(lat.n_sites)}
    out = {}
    for name, sites in cover.patches:
        out[name] = lat.form({i: Fraction(1, counts[i]) for i in sites if 0 <= i < lat.n_sites})
    return out


def validate_partition(
    lat: Lattice1D, cover: Cover, partition: Mapping[str, DiscreteForm]
) -> ValidationReport:
    """利用者指定の 1 の分割が被覆に従属し、サイトごとに和が 1 かを検査する"""
    violations = []
    subject = "partition of unity"
    if sorted(partition) != cover.labels:
        violations.append(
            Violation("labels", "分割のラベルが被覆と一致しません", f"{sorted(partition)}")
        )
        return report_of(subject, violations)
    for name, chi in partition.items():
        if len(chi.values) != lat.n_sites:
            violations.append(Violation("length", f"χ_{name} の長さが N と一致しません"))
            continue
        outside = sorted(chi.support() - cover.patch(name))
        if outside:
            violations.append(Violation("support", f"χ_{name} の台がパッチの外にあります", str(outside)))
        negative = [i for i, v in chi.nonzero_items() if not v.is_real or v.re < 0]
        if negative:
            violations.append(Violation("sign", f"χ_{name} が非負の実数ではありません", str(negative)))
    if violations:
        return report_of(subject, violations)
    for i in range(lat.n_sites):
        total = ZERO
        for chi in partition.values():
            total = total + chi(i)
        if total != ONE:
            violations.append(Violation("sum", "χ の和が 1 ではありません", f"site {i}: {total}"))
    return report_of(subject, violations)


def sites_text(sites: Iterable[int]) -> str:
    return "{" + ",".join(str(i) for i in sorted(sites)) + "}"
