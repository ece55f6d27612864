"""直交圏の色つきオペラドのテスト"""

import random

import pytest

from src.exceptions import ResourceError, UsageError
from src.lattice import Lattice1D
from src.operad import (
    Permutation,
    action_order,
    all_ops,
    axiom_suite,
    canonicalize,
    compose,
    identity_op,
    multifunctor_apply,
    perm_act,
    star_op,
    unit_op,
)
from src.orthcat import OpenFragment, inclusion_functor, open_fragment, random_poset_category

SWAP = Permutation.transposition(2, 0)
ID2 = Permutation.identity(2)
SMALL_OPENS = {"U": {0, 1}, "V": {0, 1, 2}, "Y": set(range(6))}


@pytest.fixture(scope="module")
def fragment() -> OpenFragment:
    opens = {"U": {0, 1}, "V": {0, 1, 2}, "W": {4, 5}, "X": set(range(6))}
    return open_fragment(Lattice1D.cycle(12), opens)


class TestPermutation:
    """置換のテスト"""

    def test_product_and_inverse(self) -> None:
        p = Permutation((1, 2, 0))
        assert p * p.inverse() == Permutation.identity(3)
        assert Permutation.transposition(3, 1).images == (0, 2, 1)
        assert Permutation.reversal(3).images == (2, 1, 0)

    def test_not_bijective(self) -> None:
        with pytest.raises(UsageError):
            Permutation((0, 0))

    def test_block(self) -> None:
        """ブロック置換とブロック和"""
        assert SWAP.block([2, 1]).images == (2, 0, 1)
        assert Permutation.block_sum([SWAP, Permutation.identity(1)]).images == (1, 0, 2)

    def test_act(self) -> None:
        """右作用 (g̲σ)_i = g_{σ(i)}"""
        assert Permutation((2, 0, 1)).act(["a", "b", "c"]) == ("c", "a", "b")


class TestCanonicalize:
    """演算の正準代表のテスト"""

    def test_orthogonal_pair_merges(self, fragment: OpenFragment) -> None:
        """直交する組では掛ける順序によらず同じ演算"""
        g = ("U->X", "W->X")
        a = canonicalize(fragment, "X", ID2, g)
        b = canonicalize(fragment, "X", SWAP, g)
        assert a == b
        assert a.orbit_size == 2

    def test_non_orthogonal_pair(self, fragment: OpenFragment) -> None:
        """直交しない組では順序が区別される"""
        g = ("U->X", "V->X")
        a = canonicalize(fragment, "X", ID2, g)
        b = canonicalize(fragment, "X", SWAP, g)
        assert a != b
        assert action_order(b) == (1, 0)

    def test_wrong_target(self, fragment: OpenFragment) -> None:
        with pytest.raises(UsageError):
            canonicalize(fragment, "V", ID2, ("U->X", "W->X"))

    def test_orbit_cap(self, fragment: OpenFragment) -> None:
        """軌道が上限を超える"""
        with pytest.raises(ResourceError):
            canonicalize(fragment, "X", ID2, ("U->X", "W->X"), orbit_cap=1)


class TestOperations:
    """合成・作用・∗のテスト"""

    def test_units(self, fragment: OpenFragment) -> None:
        o = canonicalize(fragment, "X", SWAP, ("U->X", "V->X"))
        assert compose(identity_op(fragment, "X"), [o]) == o
        assert compose(o, [identity_op(fragment, "U"), identity_op(fragment, "V")]) == o

    def test_compose_sources(self, fragment: OpenFragment) -> None:
        """内側の演算の射は外側の射と合成される"""
        inner = canonicalize(fragment, "V", ID2, ("U->V", "id_V"))
        outer = canonicalize(fragment, "X", ID2, ("V->X", "W->X"))
        composed = compose(outer, [inner, identity_op(fragment, "W")])
        assert composed.morphisms == ("U->X", "V->X", "W->X")

    def test_compose_with_unit(self, fragment: OpenFragment) -> None:
        """0 項の演算を差し込むと項数が減る"""
        o = canonicalize(fragment, "X", ID2, ("U->X", "W->X"))
        composed = compose(o, [unit_op(fragment, "U"), identity_op(fragment, "W")])
        assert composed.morphisms == ("W->X",)

    def test_compose_color_mismatch(self, fragment: OpenFragment) -> None:
        o = canonicalize(fragment, "X", ID2, ("U->X", "W->X"))
        with pytest.raises(UsageError):
            compose(o, [identity_op(fragment, "W"), identity_op(fragment, "U")])

    def test_star_reverses_order(self, fragment: OpenFragment) -> None:
        """∗ は掛ける順序を反転する"""
        g = ("U->X", "V->X")
        o = canonicalize(fragment, "X", ID2, g)
        assert star_op(o) == canonicalize(fragment, "X", SWAP, g)
        assert star_op(star_op(o)) == o

    def test_perm_act(self, fragment: OpenFragment) -> None:
        """右作用は射の並びと置換を同時に並べ替える"""
        o = canonicalize(fragment, "X", ID2, ("U->X", "V->X"))
        moved = perm_act(o, SWAP)
        assert moved.morphisms == ("V->X", "U->X")
        assert perm_act(moved, SWAP) == o

    def test_all_ops_counts(self, fragment: OpenFragment) -> None:
        """項数 0 の演算は対象ごとに 1 つ"""
        ops = all_ops(fragment, 0)
        assert len(ops) == len(fragment.objects)


class TestAxiomSuite:
    """オペラド公理のテスト"""

    def test_fragment(self, fragment: OpenFragment) -> None:
        report = axiom_suite(fragment, random.Random(0), max_arity=3, random_composites=200)
        assert report.ok, report.lines()

    @pytest.mark.parametrize("seed", range(5))
    def test_random_categories(self, seed: int) -> None:
        rng = random.Random(seed)
        category = random_poset_category(rng, 4, n_seeds=3)
        report = axiom_suite(category, rng, max_arity=3, random_composites=200)
        assert report.ok, report.lines()


class TestMultifunctor:
    """直交関手が誘導するマルチ関手のテスト"""

    def test_inclusion(self, fragment: OpenFragment) -> None:
        """包含に沿った像は大きい断片の同じ演算"""
        small = open_fragment(Lattice1D.cycle(12), SMALL_OPENS)
        functor = inclusion_functor(small, fragment)
        o = canonicalize(small, "Y", SWAP, ("U->Y", "V->Y"))
        image = multifunctor_apply(functor, o)
        assert image == canonicalize(fragment, "X", SWAP, ("U->X", "V->X"))
        assert multifunctor_apply(functor, star_op(o)) == star_op(image)

    def test_compose_preserved(self, fragment: OpenFragment) -> None:
        small = open_fragment(Lattice1D.cycle(12), SMALL_OPENS)
        functor = inclusion_functor(small, fragment)
        outer = canonicalize(small, "Y", ID2, ("V->Y", "U->Y"))
        inner = canonicalize(small, "V", SWAP, ("U->V", "id_V"))
        composed = compose(outer, [inner, identity_op(small, "U")])
        assert multifunctor_apply(functor, composed) == compose(
            multifunctor_apply(functor, outer),
            [multifunctor_apply(functor, inner), identity_op(fragment, "U")],
        )

    def test_wrong_category(self, fragment: OpenFragment) -> None:
        small = open_fragment(Lattice1D.cycle(12), {"U": {0, 1}, "Y": set(range(6))})
        functor = inclusion_functor(small, fragment)
        with pytest.raises(UsageError):
            multifunctor_apply(functor, identity_op(fragment, "X"))
