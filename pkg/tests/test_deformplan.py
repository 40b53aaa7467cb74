"""Тесты для семейств C_l, подпространств N_l и элемента v."""

import numpy as np
import pytest

from app.modforms.arith import PrimePowerModulus, ResidueMatrix
from app.modforms.cohodim import LocalCase, dims
from app.modforms.deformplan import (
    G1,
    G3,
    CocycleGen,
    aux_plan,
    conjugated_h,
    cq_membership,
    delegated_plan,
    in_upper_family,
    j_cocycle,
    lemma_v_element,
    plan_for,
    u_cocycle,
    verify_adjustment,
)
from app.modforms.errors import InconsistentCaseError, ModformsError, ShapeError
from app.modforms.localtypes import EllClass, FrobShape, ResidualKind, ResidualLocalType, TameLocalData

RESIDUALS = [
    ResidualLocalType.principal_series(phi_ramified=True),
    ResidualLocalType.steinberg(),
    ResidualLocalType.induced(m_ramified=False),
    ResidualLocalType.induced(m_ramified=True),
    ResidualLocalType.unramified(FrobShape.SCALAR),
    ResidualLocalType.unramified(FrobShape.REGULAR),
    ResidualLocalType.unramified(FrobShape.UNIPOTENT),
    ResidualLocalType(ResidualKind.UNRAMIFIED_TWIST_LINE),
]


def _all_cases():
    for residual in RESIDUALS:
        for cls in EllClass:
            for a, b in ((False, False), (True, False), (False, True), (True, True)):
                try:
                    yield LocalCase(residual, cls, alpha_ell=a, alpha_ell_inverse=b)
                except InconsistentCaseError:
                    continue


def _rho(ell, x, y, modulus):
    return TameLocalData.from_lists(ell, [[ell, x], [0, 1]], [[1, y], [0, 1]], modulus)


def test_cocycle_trace_zero():
    """Тест: значения коцикла имеют след ноль."""
    with pytest.raises(ShapeError):
        CocycleGen("bad", sigma=((1, 0), (0, 1)))
    v = CocycleGen.combine("v", [(1, G1), (-2, G3)])
    assert v.sigma == ((0, 0), (1, 0))
    assert v.tau == ((-2, 0), (0, 2))


def test_plan_sizes_match_dims():
    """Тест: |N| = d1 - d2 для всех случаев."""
    for case in _all_cases():
        entry = plan_for(case)
        triple = dims(case)
        assert len(entry.basis) == triple.d1 - triple.d2, case
        assert not entry.delegated


def test_plan_examples():
    """Тест примеров планов."""
    st = plan_for(LocalCase(ResidualLocalType.steinberg(), EllClass.ONE))
    assert [g.name for g in st.basis] == ["j"]
    assert st.basis[0].sigma == ((0, 1), (0, 0))

    scalar = plan_for(LocalCase(ResidualLocalType.unramified(FrobShape.SCALAR), EllClass.ONE))
    assert [g.name for g in scalar.basis] == ["u1", "u2", "v"]
    assert scalar.basis[2].symbolic

    regular = plan_for(LocalCase(ResidualLocalType.unramified(FrobShape.REGULAR), EllClass.OTHER))
    assert regular.basis == [u_cocycle()]

    induced = plan_for(LocalCase(ResidualLocalType.induced(), EllClass.MINUS_ONE))
    assert induced.basis == [] and induced.family == {"C": "{rho_l}"}


def test_plan_with_v_element():
    """Тест: вычисленный v подставляется в план скалярного случая."""
    mod = PrimePowerModulus(5, 3)
    result = lemma_v_element(25, 5, 31, mod)
    entry = plan_for(LocalCase(ResidualLocalType.unramified(FrobShape.SCALAR), EllClass.ONE), v_element=result.v)
    assert entry.basis[2] == result.v
    assert entry.to_json()["basis"][2]["name"] == "v"


def test_delegated_plans():
    """Тест делегированных планов."""
    entry = delegated_plan(5)
    assert entry.delegated and entry.case is None
    unramified_ps = LocalCase(ResidualLocalType.principal_series(phi_ramified=False), EllClass.OTHER)
    assert plan_for(unramified_ps).delegated


def test_conjugated_h():
    """Тест образующей для ветви без рациональной диагонализации."""
    mod = PrimePowerModulus(5, 2)
    generator, c = conjugated_h(2, 3, mod)
    assert generator.sigma == ((20, 13), (2, -20))
    assert generator.tau == ((0, 0), (0, 0))
    case = LocalCase(ResidualLocalType.principal_series(), EllClass.ONE)
    entry = plan_for(case, eigenvalues=(2, 3, mod))
    assert entry.basis == [generator]
    with pytest.raises(ModformsError):
        conjugated_h(2, 7, mod)


def test_aux_plan():
    """Тест плана во вспомогательном простом."""
    entry = aux_plan(113)
    assert entry.basis == [u_cocycle()]
    assert entry.family["sigma"] == "(113, p*y; 0, 1)"


def test_cq_membership_and_invariance():
    """Тест C_q: принадлежность, сопряжение (1, p*t; 0, 1) и действие u."""
    mod = PrimePowerModulus(5, 2)
    data = TameLocalData.from_lists(113, [[113, 10], [0, 1]], [[1, 5], [0, 1]], mod)
    assert cq_membership(data, 113)
    for t in range(5):
        u = ResidueMatrix([[1, 5 * t], [0, 1]], mod)
        assert cq_membership(data.conjugate(u), 113)
    assert cq_membership(u_cocycle().act(data, 5), 113)
    assert not cq_membership(data, 23)
    outside = TameLocalData.from_lists(113, [[113, 1], [0, 1]], [[1, 5], [0, 1]], mod)
    assert not cq_membership(outside, 113)


def test_steinberg_family_preserved():
    """Тест: N = <j> сохраняет семейство (l, *; 0, 1), (1, *; 0, 1)."""
    mod = PrimePowerModulus(5, 3)
    rho = _rho(11, 7, 5, mod)
    assert in_upper_family(rho)
    for c in range(5):
        assert in_upper_family(j_cocycle().act(rho, 25 * c))


def test_lemma_v_example():
    """Тест элемента v на данных (25, 5, 31) по модулю 5^3."""
    mod = PrimePowerModulus(5, 3)
    result = lemma_v_element(25, 5, 31, mod)
    assert result.case == 4
    assert result.v.tau != ((0, 0), (0, 0))
    assert verify_adjustment(_rho(31, 25, 5, mod), result.v, result.conjugator, 3)
    # другой вектор данных: то же v не подходит
    assert not verify_adjustment(_rho(31, 5, 25, mod), result.v, result.conjugator, 3)


def test_lemma_v_case_selection():
    """Тест выбора случая: x = 0, y - единица."""
    mod = PrimePowerModulus(5, 3)
    result = lemma_v_element(0, 3, 11, mod)
    assert result.case == 1
    assert result.v.sigma == ((0, 0), (0, 0))
    assert result.v.tau == ((1, 0), (0, -1))


def test_lemma_v_errors():
    """Тест отказов."""
    mod = PrimePowerModulus(5, 3)
    with pytest.raises(ModformsError):
        lemma_v_element(5, 0, 11, mod)
    with pytest.raises(ModformsError):
        lemma_v_element(5, 5, 7, mod)
    with pytest.raises(ModformsError):
        lemma_v_element(25, 25, 26, mod)


def test_verify_adjustment_trivial_and_shape():
    """Тест: v = 0, C = I проходит; данные вне семейства отвергаются."""
    mod = PrimePowerModulus(5, 3)
    zero = CocycleGen("0")
    identity = ResidueMatrix.identity(2, mod)
    assert verify_adjustment(_rho(11, 5, 5, mod), zero, identity, 3)
    with pytest.raises(ShapeError):
        verify_adjustment(_rho(11, 5, 5, mod), zero, identity, 2)
    lower = TameLocalData.from_lists(11, [[11, 0], [5, 1]], [[1, 5], [0, 1]], mod)
    with pytest.raises(ShapeError):
        verify_adjustment(lower, zero, identity, 3)


# (минимальные величины) для каждого из семи случаев
CASE_MINIMA = {
    1: {"y"},
    2: {"x"},
    3: {"l"},
    4: {"y", "l"},
    5: {"x", "y"},
    6: {"x", "l"},
    7: {"x", "y", "l"},
}


def _with_valuation(rng, v: int, p: int, m: int) -> int:
    if v >= m:
        return 0
    while True:
        unit = int(rng.integers(1, p ** (m - v)))
        if unit % p:
            return p**v * unit


def _random_instance(rng, case: int, p: int, m: int):
    e = int(rng.integers(1, m - 1))
    minima = CASE_MINIMA[case]
    valuations = {}
    for key in ("x", "y", "l"):
        if key in minima:
            valuations[key] = e
        else:
            top = m - 1 if key == "y" else m
            valuations[key] = int(rng.integers(e + 1, top + 1))
    x = _with_valuation(rng, valuations["x"], p, m)
    y = _with_valuation(rng, valuations["y"], p, m)
    ell = 1 + _with_valuation(rng, valuations["l"], p, m)
    return x, y, ell


def _run_suite(instances_per_case: int, seed: int):
    rng = np.random.default_rng(seed)
    for case in CASE_MINIMA:
        for _ in range(instances_per_case):
            p = int(rng.choice([5, 7]))
            m = int(rng.choice([3, 4]))
            mod = PrimePowerModulus(p, m)
            x, y, ell = _random_instance(rng, case, p, m)
            result = lemma_v_element(x, y, ell, mod)
            assert result.case == case, (x, y, ell, p, m)
            assert verify_adjustment(_rho(ell, x, y, mod), result.v, result.conjugator, m), (
                x, y, ell, p, m,
            )


def test_lemma_v_randomized_quick():
    """Тест семи случаев на небольшой случайной выборке."""
    _run_suite(20, seed=7)


@pytest.mark.slow
def test_lemma_v_randomized_full():
    """Тест семи случаев: по 500 случайных экземпляров на случай."""
    _run_suite(500, seed=2024)
