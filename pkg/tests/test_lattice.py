"""格子・ポアソン構造・被覆のテスト"""

import random
from fractions import Fraction

import pytest

from src.exactalg import ONE, ZERO, Scalar
from src.exceptions import UsageError
from src.lattice import (
    Cover,
    DiscreteForm,
    Lattice1D,
    antisymmetry_sweep,
    arc_ends,
    delta_tau,
    is_arc,
    multiply,
    nabla,
    orthogonal,
    partition_of_unity,
    sites_text,
    tau,
    validate_cover,
    validate_partition,
)

HALF = Scalar(Fraction(1, 2))


class TestLattice:
    """格子のテスト"""

    def test_cycle_edges(self) -> None:
        """円周格子は N 本の辺をもつ"""
        lat = Lattice1D.cycle(5)
        assert lat.n_edges == 5
        assert lat.edge(4) == (4, 0)
        assert lat.distance(0, 4) == 1

    def test_path_edges(self) -> None:
        """線分格子は N − 1 本の辺をもつ"""
        lat = Lattice1D.path(5)
        assert lat.n_edges == 4
        assert lat.distance(0, 4) == 4

    def test_invalid_transports(self) -> None:
        """平行移動は ±1 で辺の数だけ必要"""
        with pytest.raises(UsageError):
            Lattice1D.cycle(4, [1, 1, 1])
        with pytest.raises(UsageError):
            Lattice1D.cycle(3, [1, 2, 1])

    def test_form_out_of_range(self) -> None:
        """範囲外のサイト"""
        with pytest.raises(UsageError):
            Lattice1D.cycle(4).delta(4)

    def test_nabla(self) -> None:
        """∇δ_1 は辺 (0,1) で 1、辺 (1,2) で −1"""
        lat = Lattice1D.path(4)
        grad = nabla(lat, lat.delta(1))
        assert grad(0) == ONE
        assert grad(1) == -ONE
        assert grad(2) == ZERO


class TestPoissonStructure:
    """ポアソン構造 τ のテスト"""

    @pytest.mark.parametrize("n", [3, 5, 12])
    def test_neighbors_on_cycle(self, n: int) -> None:
        """τ(δ_a, δ_{a+1}) = 1/2、逆順は −1/2"""
        lat = Lattice1D.cycle(n)
        for a in range(n):
            assert delta_tau(lat, a, (a + 1) % n) == HALF
            assert delta_tau(lat, (a + 1) % n, a) == -HALF

    def test_distant_sites_vanish(self) -> None:
        """距離 2 以上のサイトでは 0"""
        lat = Lattice1D.cycle(12)
        assert delta_tau(lat, 3, 7) == ZERO
        assert delta_tau(lat, 0, 2) == ZERO
        assert delta_tau(lat, 4, 4) == ZERO

    def test_twisted_transport(self) -> None:
        """平行移動 t = −1 の辺では τ(δ_a, δ_{a+1}) = −1/2"""
        lat = Lattice1D.cycle(4, [1, -1, 1, 1])
        assert delta_tau(lat, 1, 2) == -HALF
        assert delta_tau(lat, 2, 1) == HALF

    @pytest.mark.parametrize(
        "lat",
        [Lattice1D.cycle(6), Lattice1D.cycle(5, [1, -1, 1, -1, -1]), Lattice1D.path(6)],
        ids=["cycle", "twisted", "path"],
    )
    def test_antisymmetry(self, lat: Lattice1D) -> None:
        """すべてのデルタ形式の組で反対称"""
        assert antisymmetry_sweep(lat).ok

    @pytest.mark.parametrize("n", range(3, 9))
    @pytest.mark.parametrize("kind", ["cycle", "path"])
    @pytest.mark.parametrize("alternating", [False, True], ids=["trivial", "alternating"])
    def test_antisymmetry_small_lattices(self, n: int, kind: str, alternating: bool) -> None:
        """N ≤ 8 の円周と線分、平行移動が自明なものと交互に符号を変えるもの"""
        n_edges = n if kind == "cycle" else n - 1
        transports = [(-1) ** k for k in range(n_edges)] if alternating else None
        lat = Lattice1D.cycle(n, transports) if kind == "cycle" else Lattice1D.path(n, transports)
        assert lat.transports == tuple(transports or [1] * n_edges)
        assert antisymmetry_sweep(lat).ok

    def test_random_forms(self) -> None:
        """N = 12 の乱択した形式の組 100 個で τ(φ, ψ) = −τ(ψ, φ)"""
        rng = random.Random(3)
        lat = Lattice1D.cycle(12, [rng.choice((1, -1)) for _ in range(12)])

        def random_form() -> DiscreteForm:
            return lat.form(
                {i: Fraction(rng.randint(-9, 9), rng.randint(1, 6)) for i in range(12)}
            )

        for _ in range(100):
            phi, psi = random_form(), random_form()
            assert tau(lat, phi, psi) == -tau(lat, psi, phi)
            assert tau(lat, phi, phi) == ZERO

    def test_general_forms(self) -> None:
        """一般の形式でも反対称"""
        lat = Lattice1D.cycle(6)
        phi = lat.form({0: 2, 1: -1, 3: Fraction(1, 3)})
        psi = lat.form({1: 1, 2: 5, 5: -2})
        assert tau(lat, phi, psi) == -tau(lat, psi, phi)

    def test_path_boundary(self) -> None:
        """線分格子では端点で 0 でない形式を受け付けない"""
        lat = Lattice1D.path(5)
        with pytest.raises(UsageError):
            tau(lat, lat.delta(0), lat.delta(1))


class TestCover:
    """被覆のテスト"""

    def test_orthogonal(self) -> None:
        """直交性はグラフ距離 2 以上"""
        lat = Lattice1D.cycle(12)
        assert orthogonal(lat, {0, 1}, {3, 4})
        assert not orthogonal(lat, {0, 1}, {2})
        assert not orthogonal(lat, {0}, {11})

    def test_arcs(self) -> None:
        """弧の判定と端点"""
        lat = Lattice1D.cycle(12)
        assert is_arc(lat, [8, 9, 10, 11, 0, 1])
        assert not is_arc(lat, [0, 2])
        assert arc_ends(lat, [8, 9, 10, 11, 0, 1]) == (8, 1)
        assert sites_text([3, 1, 2]) == "{1,2,3}"

    def test_admissible_cover(self, z12: Lattice1D, z12_cover: Cover) -> None:
        """重なり幅 2 の 3 パッチ被覆は許容"""
        assert validate_cover(z12, z12_cover, w_min=2).ok

    def test_cover_with_whole_lattice(self, z12: Lattice1D) -> None:
        """M 全体を含む被覆は常に許容"""
        cover = Cover.from_mapping({"A": [0, 1, 2], "M": range(12)})
        assert validate_cover(z12, cover).ok

    def test_narrow_overlap(self, z12: Lattice1D) -> None:
        """重なり幅が足りない"""
        cover = Cover.from_mapping({"A": range(0, 7), "B": range(6, 12)})
        report = validate_cover(z12, cover, w_min=2)
        assert not report.ok
        assert report.kinds == {"overlap"}

    def test_union_and_arc(self, z12: Lattice1D) -> None:
        """被覆漏れと弧でないパッチ"""
        assert validate_cover(z12, Cover.from_mapping({"A": range(0, 11)})).kinds == {"union"}
        cover = Cover.from_mapping({"A": [0, 1, 2, 4], "B": range(3, 12)})
        assert "arc" in validate_cover(z12, cover).kinds

    def test_unsorted_or_empty(self) -> None:
        """空のパッチ"""
        with pytest.raises(UsageError):
            Cover.from_mapping({"A": []})


class TestPartition:
    """1 の分割のテスト"""

    def test_uniform_partition(self, z12: Lattice1D, z12_cover: Cover) -> None:
        """一様な分割は重なりで 1/2 ずつ"""
        chis = partition_of_unity(z12, z12_cover)
        assert chis["A"](4) == HALF
        assert chis["A"](2) == ONE
        assert chis["A"](7) == ZERO
        assert validate_partition(z12, z12_cover, chis).ok

    def test_invalid_partition(self, z12: Lattice1D, z12_cover: Cover) -> None:
        """台がパッチからはみ出す分割と和が 1 でない分割"""
        chis = dict(partition_of_unity(z12, z12_cover))
        chis["A"] = chis["A"] + z12.delta(7)
        assert "support" in validate_partition(z12, z12_cover, chis).kinds
        chis = dict(partition_of_unity(z12, z12_cover))
        chis["A"] = chis["A"].scale(2)
        assert validate_partition(z12, z12_cover, chis).kinds == {"sum"}

    def test_wrong_labels(self, z12: Lattice1D, z12_cover: Cover) -> None:
        """ラベルが被覆と一致しない"""
        chis = partition_of_unity(z12, z12_cover)
        del chis["C"]
        assert validate_partition(z12, z12_cover, chis).kinds == {"labels"}

    def test_multiply(self, z12: Lattice1D, z12_cover: Cover) -> None:
        """χ_α φ はサイトごとの積"""
        chis = partition_of_unity(z12, z12_cover)
        phi = z12.constant(2)
        product = multiply(chis["A"], phi)
        assert product(4) == ONE
        assert product(0) == ONE
        assert product(2) == Scalar(Fraction(2))
        assert product.support() == frozenset(range(6))
        with pytest.raises(UsageError):
            multiply(chis["A"], Lattice1D.cycle(6).constant())
