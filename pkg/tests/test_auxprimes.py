"""Тесты для вспомогательных простых и проверки большого образа."""

import pytest

from app.modforms.arith import PrimePowerModulus
from app.modforms.auxprimes import (
    BigImageVerdict,
    big_image_verdict,
    frob_order_pair,
    frobenius_charpoly,
    is_auxiliary,
    search_auxiliary,
)
from app.modforms.ellcurve import ApTable, WeierstrassCurve, ap_table
from app.modforms.errors import InsufficientDataError, ModformsError, NotSplitError


@pytest.fixture(scope="module")
def curve_17a1():
    """Фикстура с кривой 17a1."""
    return WeierstrassCurve.from_invariants([1, -1, 1, -1, -14], label="17a1")


@pytest.fixture(scope="module")
def table_17a1(curve_17a1):
    """Фикстура с таблицей a_l до 400."""
    return ap_table(curve_17a1, 400)


def test_is_auxiliary_113():
    """Тест: 113 - вспомогательное простое по модулю 25 со знаком -1."""
    cert = is_auxiliary(113, -14, 5, 2, 17)
    assert cert is not None
    assert cert.sign == -1
    assert cert.to_json()["q"] == 113


def test_is_auxiliary_negative_cases():
    """Тест отрицательных случаев."""
    # 11 = 1 mod 5
    assert is_auxiliary(11, -12, 5, 1, 17) is None
    assert is_auxiliary(113, 0, 5, 2, 17) is None
    with pytest.raises(ModformsError):
        is_auxiliary(17, 1, 5, 2, 17)
    with pytest.raises(ModformsError):
        is_auxiliary(15, 1, 5, 2, 17)


def test_search_auxiliary(table_17a1):
    """Тест поиска до 200 по модулю 25 и монотонности по показателю."""
    found = search_auxiliary(table_17a1, 5, 2, 200, 17)
    assert 113 in [c.q for c in found]
    assert [c.q for c in found] == sorted(c.q for c in found)
    assert all(c.q <= 200 for c in found)

    coarse = {c.q for c in search_auxiliary(table_17a1, 5, 1, 200, 17)}
    assert {c.q for c in found} <= coarse
    assert search_auxiliary(table_17a1, 5, 2, 1, 17) == []


def test_search_from_curve(curve_17a1):
    """Тест поиска по кривой с параллельным подсчетом."""
    found = search_auxiliary(curve_17a1, 5, 2, 120, 17, jobs=2)
    assert [c.q for c in found if c.q == 113] == [113]


def test_search_tampered_table(table_17a1):
    """Тест: после подмены a_113 простое 113 не находится."""
    tampered = table_17a1.replace(113, -13)
    assert 113 not in [c.q for c in search_auxiliary(tampered, 5, 2, 200, 17)]


def test_frob_order_pair():
    """Тест порядка Фробениуса в 113."""
    assert frob_order_pair(113, -14, 5, 2) == (4, 20)
    with pytest.raises(NotSplitError):
        frob_order_pair(2, -1, 5, 2)


def test_frobenius_charpoly():
    """Тест характеристического многочлена Фробениуса."""
    mod25 = PrimePowerModulus(5, 2)
    poly = frobenius_charpoly(-14, 113, mod25)
    assert (poly.a1, poly.a0) == (14, 113 % 25)
    assert poly.split and poly.distinct
    assert not frobenius_charpoly(-1, 2, mod25).split


def test_big_image_17a1(table_17a1):
    """Тест: образ 17a1 по модулю 5 содержит SL2(F_5)."""
    assert big_image_verdict(table_17a1, 17, 5) == BigImageVerdict.CONTAINS_SL2


def test_big_image_cm_curve_inconclusive():
    """Тест: для кривой с КМ проверка не дает результата."""
    table = ap_table(WeierstrassCurve.from_invariants([0, 0, 0, -1, 0]), 100)
    assert big_image_verdict(table, 32, 7) == BigImageVerdict.INCONCLUSIVE


def test_big_image_needs_data():
    """Тест отказа на таблице без хороших простых."""
    with pytest.raises(InsufficientDataError, match="данных: 2$") as error:
        big_image_verdict(ApTable({5: 0}), 17, 5)
    assert error.value.prime == 2
    with pytest.raises(InsufficientDataError) as error:
        big_image_verdict(ApTable({2: 1}, bad_primes={2: "multiplicative-split"}), 17, 5, depth=3)
    assert error.value.prime == 3
