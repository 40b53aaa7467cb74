"""Тесты для сравнений собственных систем и свидетелей повышения уровня."""

import itertools

import numpy as np
import pytest

from app.modforms.arith import PrimePowerModulus, howell_form, matmul_mod
from app.modforms.congr import (
    EigensystemConstraint,
    HeckeCache,
    NewformData,
    congruent_mod_pn,
    eichler_shimura_check,
    eigensystem_kernel,
    level_raising_witness,
)
from app.modforms.ellcurve import ApTable, WeierstrassCurve, ap_table
from app.modforms.errors import InputError, InsufficientDataError, ModformsError
from app.modforms.modsym import build_space, hecke_operator


@pytest.fixture(scope="module")
def table_17a1():
    """Фикстура с таблицей a_l кривой 17a1 до 400."""
    return ap_table(WeierstrassCurve.from_invariants([1, -1, 1, -1, -14]), 400)


@pytest.fixture(scope="module")
def form_17a1(table_17a1):
    """Фикстура с собственной формой уровня 17."""
    return NewformData(level=17, ap=table_17a1, label="17a1")


@pytest.fixture(scope="module")
def form_11a1():
    """Фикстура с собственной формой кривой 11a1."""
    table = ap_table(WeierstrassCurve.from_invariants([0, -1, 1, -10, -20]), 100)
    return NewformData(level=11, ap=table, label="11a1")


def test_newform_json_round_trip(form_17a1):
    """Тест разбора JSON собственной формы."""
    payload = {"level": 17, "weight": 2, "ap": {"2": -1, "3": 0}, "bad": {"17": 1}}
    form = NewformData.from_json(payload)
    assert form.ap[2] == -1
    assert form.ap.is_bad(17)
    assert form.to_json() == payload


def test_newform_rejects_bad_input():
    """Тест отказа на весе и схеме."""
    with pytest.raises(InputError):
        NewformData.from_json({"level": 17, "weight": 4, "ap": {}})
    with pytest.raises(InputError):
        NewformData.from_json({"weight": 2, "ap": {}})


def test_congruent_examples(table_17a1):
    """Тест сравнения таблиц по модулю 25."""
    mod25 = PrimePowerModulus(5, 2)
    assert congruent_mod_pn(table_17a1, table_17a1, mod25, 342)
    shifted = table_17a1.replace(3, table_17a1[3] + 25)
    assert congruent_mod_pn(table_17a1, shifted, mod25, 10)
    assert not congruent_mod_pn(table_17a1, table_17a1.replace(2, 0), mod25, 10)


def test_congruent_monotone_in_exponent(table_17a1):
    """Тест: сравнение по модулю 5^2 влечет сравнение по модулю 5."""
    other = table_17a1.replace(7, table_17a1[7] + 25).replace(11, table_17a1[11] + 5)
    assert congruent_mod_pn(table_17a1, other, PrimePowerModulus(5, 1), 50)
    assert not congruent_mod_pn(table_17a1, other, PrimePowerModulus(5, 2), 50)
    assert congruent_mod_pn(table_17a1, other, PrimePowerModulus(5, 2), 50, excluded={11})


def test_congruent_insufficient_data():
    """Тест отсутствия простого в таблице."""
    f = ApTable({3: 0})
    with pytest.raises(InsufficientDataError, match="2"):
        congruent_mod_pn(f, f, PrimePowerModulus(5, 1), 3)


def test_kernel_level_17(table_17a1):
    """Тест совместного ядра на уровне 17."""
    mod25 = PrimePowerModulus(5, 2)
    space = build_space(17, mod25)
    constraints = [EigensystemConstraint("T_2", -1), EigensystemConstraint("T_3", 0)]
    kernel = eigensystem_kernel(space, constraints)
    assert kernel.length == 2 * 2

    with pytest.raises(ModformsError):
        eigensystem_kernel(space, [])


def test_kernel_brute_force_mod_5():
    """Тест: ядро T_2 - (a_2 + 1) по модулю 5 совпадает с перебором по F_5^2."""
    mod5 = PrimePowerModulus(5, 1)
    space = build_space(17, mod5)
    kernel = eigensystem_kernel(space, [EigensystemConstraint("T_2", 0)])
    shifted = hecke_operator(space, "T_2").matrix.shift(0).data
    brute = [
        v for v in itertools.product(range(5), repeat=2) if not matmul_mod(np.array([v]), shifted, mod5).any()
    ]
    assert 5**kernel.length == len(brute)


def test_kernel_permutation_invariant():
    """Тест независимости ядра от порядка ограничений."""
    mod25 = PrimePowerModulus(5, 2)
    space = build_space(34, mod25)
    constraints = [
        EigensystemConstraint("T_3", 2),
        EigensystemConstraint("T_5", -2),
        EigensystemConstraint("U_2", 1),
    ]
    cache = HeckeCache(space)
    first = eigensystem_kernel(space, constraints, cache)
    second = eigensystem_kernel(space, list(reversed(constraints)), cache)
    assert np.array_equal(first.rows, second.rows)


def test_kernel_over_field_matches_rank():
    """Тест: по модулю p длина ядра равна размерности, найденной через ранг."""
    mod7 = PrimePowerModulus(7, 1)
    space = build_space(37, mod7)
    t2 = hecke_operator(space, "T_2").matrix
    for eigenvalue in range(7):
        kernel = eigensystem_kernel(space, [EigensystemConstraint("T_2", eigenvalue)])
        rank = howell_form(t2.shift(eigenvalue).data, mod7).length
        assert kernel.length == space.cuspidal_dimension - rank


def test_eichler_shimura_traces(form_17a1, form_11a1):
    """Тест: след T_l на уровнях 17 и 11 равен 2*a_l, подмена a_7 видна по модулю 25."""
    mod25 = PrimePowerModulus(5, 2)
    check = eichler_shimura_check(form_17a1, mod25)
    assert check.passed
    assert 17 not in check.traces and check.traces[2] == (2 * -1) % 25
    assert eichler_shimura_check(form_11a1, mod25, bound=30).passed

    tampered = NewformData(level=17, ap=form_17a1.ap.replace(7, form_17a1.ap[7] + 5))
    assert eichler_shimura_check(tampered, mod25, bound=10).mismatches == [7]
    assert eichler_shimura_check(tampered, PrimePowerModulus(5, 1), bound=10).passed
    with pytest.raises(ModformsError):
        eichler_shimura_check(NewformData(level=34, ap=form_17a1.ap), mod25)


def test_witness_small_level(form_17a1):
    """Тест свидетеля на уровне 17*23 по модулю 5."""
    report = level_raising_witness(form_17a1, 17, 23, PrimePowerModulus(5, 1), 1)
    assert report.level == 391
    assert report.sturm == 72
    assert report.new_witness
    assert report.new_dim > 0 and report.new_exponent == 1
    assert report.joint_dim == report.old_dim
    assert report.to_json()["modulus"] == "5^1"


def test_witness_without_new_forms(form_11a1):
    """Тест: на уровне 22 нет новых форм, свидетеля нет."""
    report = level_raising_witness(form_11a1, 11, 2, PrimePowerModulus(5, 1), 1)
    assert report.joint_dim == report.old_dim
    assert not report.new_witness
    assert report.new_dim == 0
    assert report.to_json()["new_exponent"] == 0


def test_witness_unsatisfiable(form_11a1):
    """Тест невыполнимых ограничений: joint = old = 0."""
    table = form_11a1.ap.replace(3, 1)
    form = NewformData(level=11, ap=table)
    report = level_raising_witness(form, 11, 2, PrimePowerModulus(5, 1), 1)
    assert report.joint_dim == 0
    assert report.old_dim == 0
    assert not report.new_witness


def test_witness_rejects_non_auxiliary(form_17a1):
    """Тест отказа на невспомогательном простом."""
    with pytest.raises(ModformsError):
        level_raising_witness(form_17a1, 17, 3, PrimePowerModulus(5, 2), 1)
    with pytest.raises(ModformsError):
        level_raising_witness(form_17a1, 17, 17, PrimePowerModulus(5, 2), 1)


@pytest.mark.slow
@pytest.mark.integration
def test_witness_level_1921(form_17a1):
    """Тест свидетеля на уровне 1921 по модулю 25 для обоих знаков."""
    mod25 = PrimePowerModulus(5, 2)
    source = build_space(17, mod25)
    target = build_space(1921, mod25)
    minus = level_raising_witness(form_17a1, 17, 113, mod25, -1, source, target)
    plus = level_raising_witness(form_17a1, 17, 113, mod25, 1, source, target)
    assert minus.new_witness
    assert minus.new_exponent == 2
    assert plus.joint_dim < minus.joint_dim
