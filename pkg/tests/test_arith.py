"""Тесты для арифметики в Z/p^n."""

import numpy as np
import pytest

from app.modforms.arith import (
    PrimePowerModulus,
    ResidueMatrix,
    hensel_sqrt,
    howell_form,
    howell_kernel,
    intersect,
    left_kernel,
    matmul_mod,
    modulus_exponent_bound,
    mult_order,
    quadratic_roots,
)
from app.modforms.errors import ModformsError, NotSplitError


@pytest.fixture
def mod25():
    """Фикстура с модулем 5^2."""
    return PrimePowerModulus(5, 2)


def test_modulus_validation():
    """Тест проверки простого и показателя."""
    with pytest.raises(ModformsError):
        PrimePowerModulus(3, 2)
    with pytest.raises(ModformsError):
        PrimePowerModulus(9, 1)
    with pytest.raises(ModformsError):
        PrimePowerModulus(5, 0)
    assert str(PrimePowerModulus(5, 2)) == "5^2"


def test_residue_valuation(mod25):
    """Тест нормирования вычетов."""
    assert mod25.residue(0).val == 2
    assert mod25.residue(5).val == 1
    assert mod25.residue(7).val == 0
    assert mod25.residue(-1).value == 24


def test_hensel_sqrt_examples(mod25):
    """Тест квадратного корня на ветви 1 mod p."""
    assert hensel_sqrt(mod25.residue(1)).value == 1
    assert hensel_sqrt(mod25.residue(6)).value == 16

    mod125 = PrimePowerModulus(5, 3)
    r = hensel_sqrt(mod125.residue(6))
    assert r.value % 5 == 1
    assert (r * r).value == 6
    expected = [x for x in range(125) if x % 5 == 1 and (x * x) % 125 == 6]
    assert [r.value] == expected


def test_hensel_sqrt_rejects_non_one(mod25):
    """Тест отказа для u, не сравнимого с 1."""
    with pytest.raises(ModformsError):
        hensel_sqrt(mod25.residue(2))


def test_hensel_sqrt_property(mod25):
    """Тест свойств: r^2 = u и корень из u^2 равен u."""
    for u in range(1, 25, 5):
        x = mod25.residue(u)
        assert hensel_sqrt(x) ** 2 == x
        assert hensel_sqrt(x * x) == x


def test_howell_kernel_examples(mod25):
    """Тест ядра в форме Хауэлла на простых матрицах."""
    assert howell_kernel(ResidueMatrix.identity(2, mod25)) == []

    kernel = howell_kernel(ResidueMatrix([[5]], mod25))
    assert [[int(x) for x in v] for v in kernel] == [[5]]


def test_howell_kernel_companion(mod25):
    """Тест ядра M - 12 I для сопутствующей матрицы x^2 + 14x + 113."""
    companion = ResidueMatrix([[0, -113], [1, -14]], mod25)
    kernel = howell_kernel(companion.shift(12))
    assert len(kernel) == 1
    form = howell_form([[int(x) for x in kernel[0]]], mod25)
    assert form.length == 2
    vector = np.array([[int(x)] for x in kernel[0]])
    assert not matmul_mod(companion.shift(12).data, vector, mod25).any()


def test_howell_kernel_annihilates_and_is_idempotent(mod25):
    """Тест: ядро аннулирует матрицу и не меняется при повторной редукции."""
    rng = np.random.default_rng(7)
    for _ in range(20):
        m = ResidueMatrix(rng.integers(0, 25, size=(3, 5)), mod25)
        kernel = np.array([[int(x) for x in v] for v in howell_kernel(m)], dtype=np.int64)
        if kernel.size == 0:
            continue
        assert not matmul_mod(m.data, kernel.T, mod25).any()
        again = howell_form(kernel, mod25)
        assert np.array_equal(again.rows, kernel)


def test_howell_kernel_unit_determinant_is_empty(mod25):
    """Тест: при обратимом определителе ядро пусто."""
    m = ResidueMatrix([[2, 1], [1, 1]], mod25)
    assert howell_kernel(m) == []


def test_howell_form_annihilator_rows(mod25):
    """Тест: строка с неединичным ведущим элементом порождает аннуляторную строку."""
    form = howell_form([[5, 1]], mod25)
    assert form.pivot_cols == [0, 1]
    assert form.rows.tolist() == [[5, 1], [0, 5]]
    assert form.length == 2


def test_howell_form_is_canonical(mod25):
    """Тест: разные порождающие одного модуля дают одну форму."""
    a = howell_form([[1, 2, 3], [0, 5, 10]], mod25)
    b = howell_form([[0, 10, 20], [1, 7, 13], [2, 4, 6]], mod25)
    assert np.array_equal(a.rows, b.rows)


def test_left_kernel_and_intersection(mod25):
    """Тест левого ядра и пересечения подмодулей."""
    a = np.array([[1, 0], [0, 5]])
    kernel = left_kernel(a, mod25)
    assert kernel.rows.tolist() == [[0, 5]]

    meet = intersect(np.array([[1, 0], [0, 1]]), np.array([[5, 5]]), mod25)
    assert meet.rows.tolist() == [[5, 5]]
    assert meet.length == 1


def test_quadratic_roots_examples(mod25):
    """Тест корней квадратного многочлена."""
    r1, r2 = quadratic_roots(mod25.residue(14), mod25.residue(113))
    assert (r1.value, r2.value) == (12, 24)

    r1, r2 = quadratic_roots(mod25.residue(0), mod25.residue(-1))
    assert (r1.value, r2.value) == (1, 24)

    with pytest.raises(NotSplitError):
        quadratic_roots(mod25.residue(1), mod25.residue(1))


def test_quadratic_roots_vieta():
    """Тест формул Виета для поднятых корней."""
    modulus = PrimePowerModulus(7, 3)
    for a1 in range(7):
        for a0 in range(1, 7):
            try:
                r1, r2 = quadratic_roots(a1, a0, modulus)
            except NotSplitError:
                continue
            assert (r1 + r2).value == (-a1) % modulus.order
            assert (r1 * r2).value == a0
            assert r1.value % 7 != r2.value % 7


def test_mult_order_examples(mod25):
    """Тест мультипликативного порядка."""
    assert mult_order(mod25.residue(1)) == 1
    assert mult_order(mod25.residue(13)) == 20
    assert mult_order(PrimePowerModulus(5, 1).residue(3)) == 4
    assert (mod25.residue(12) * mod25.residue(24).inverse()).value == 13
    with pytest.raises(ModformsError):
        mult_order(mod25.residue(10))


def test_mult_order_divides_group_order():
    """Тест: порядок делит p^(n-1)(p-1)."""
    modulus = PrimePowerModulus(7, 2)
    for a in range(1, 49):
        if a % 7:
            assert (7 * 6) % mult_order(a, modulus) == 0


def test_modulus_exponent_bound():
    """Тест границы показателя в модуле."""
    assert modulus_exponent_bound(False, 7, 5) == 1
    assert modulus_exponent_bound(True, 20, 5) == 26
    assert modulus_exponent_bound(True, 1, 5) == 2
    values = [modulus_exponent_bound(True, e, 5) for e in range(1, 30)]
    assert values == sorted(values)
