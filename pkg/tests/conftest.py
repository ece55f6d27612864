"""テスト共通のフィクスチャ"""

import json
from collections.abc import Iterable, Mapping
from pathlib import Path
from typing import Any, Callable

import pytest

from src.descent import DescentDatum, data_functor
from src.lattice import Cover, Lattice1D, sites_text
from src.orthcat import intersection_closure, open_fragment
from src.probe import ProbeAQFT, build_probe

INSTANCES = Path(__file__).resolve().parent.parent / "instances"

Z12_COVER = {"A": range(0, 6), "B": range(4, 10), "C": [8, 9, 10, 11, 0, 1]}
Z6_COVER = {"P": [0, 1, 2, 3, 4], "Q": [3, 4, 5, 0, 1]}


def make_probe(
    lat: Lattice1D, opens: Mapping[str, Iterable[int]], degree_bound: int = 4
) -> ProbeAQFT:
    """名前つきの開集合と M、その共通部分からなる断片上のプローブ関手"""
    named = {name: frozenset(sites) for name, sites in opens.items()}
    named.setdefault("M", lat.sites)
    known = set(named.values())
    for sites in intersection_closure(list(named.values())):
        if sites not in known:
            named[sites_text(sites)] = sites
            known.add(sites)
    return build_probe(lat, open_fragment(lat, named), degree_bound)


def make_datum(
    lat: Lattice1D, cover: Mapping[str, Iterable[int]], degree_bound: int = 4
) -> DescentDatum:
    return data_functor(make_probe(lat, cover, degree_bound), Cover.from_mapping(cover))


@pytest.fixture(scope="session")
def z12() -> Lattice1D:
    return Lattice1D.cycle(12)


@pytest.fixture(scope="session")
def z6() -> Lattice1D:
    return Lattice1D.cycle(6)


@pytest.fixture(scope="session")
def z12_cover() -> Cover:
    return Cover.from_mapping(Z12_COVER)


@pytest.fixture(scope="session")
def z12_probe(z12: Lattice1D) -> ProbeAQFT:
    return make_probe(z12, {**Z12_COVER, "AB": range(0, 10)})


@pytest.fixture(scope="session")
def z12_datum(z12_probe: ProbeAQFT, z12_cover: Cover) -> DescentDatum:
    return data_functor(z12_probe, z12_cover)


@pytest.fixture(scope="session")
def z12_with_m_datum(z12: Lattice1D) -> DescentDatum:
    return make_datum(z12, {"A": range(0, 6), "M": range(12)})


@pytest.fixture(scope="session")
def z6_datum(z6: Lattice1D) -> DescentDatum:
    return make_datum(z6, Z6_COVER)


@pytest.fixture
def write_json(tmp_path: Path) -> Callable[[str, Any], Path]:
    """tmp_path に JSON を書き出す関数"""

    def write(name: str, data: Any) -> Path:
        path = tmp_path / name
        path.write_text(json.dumps(data), encoding="utf-8")
        return path

    return write
