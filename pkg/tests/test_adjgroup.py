"""Тесты для действия PGL2(F_5) на матрицах следа ноль."""

import numpy as np
import pytest

from app.modforms.adjgroup import (
    EXPECTED_PRIME_TO_5,
    IDENTITY,
    S3XC2_GENERATORS,
    V1_BASIS,
    V2_BASIS,
    VECTORS,
    PGL2F5Element,
    SemidirectElement,
    acts_trivially,
    adjoint_action,
    elements,
    generate,
    invariant_decomposition_check,
    label_of,
    normality_check,
    semidirect_normal,
    span,
    stabilizer_in,
    subgroup_classes_prime_to_5,
    subgroups_prime_to_5,
    vec,
    verify_suite,
)
from app.modforms.errors import ShapeError


@pytest.fixture(scope="module")
def s3xc2():
    """Фикстура с подгруппой S3 x C2."""
    return generate(S3XC2_GENERATORS)


@pytest.fixture(scope="module")
def c6(s3xc2):
    """Фикстура со стабилизатором (4,1,1) в S3 x C2."""
    return stabilizer_in(s3xc2, V1_BASIS[0])


def test_elements_and_normalization():
    """Тест перечисления PGL2(F_5) и нормировки представителей."""
    group = elements()
    assert len(group) == 120
    assert PGL2F5Element.of(2, 0, 0, 2) == IDENTITY
    assert PGL2F5Element.of(0, 3, 3, 3) == PGL2F5Element.of(0, 1, 1, 1)
    assert all(g * g.inverse() == IDENTITY for g in group)
    with pytest.raises(ShapeError):
        PGL2F5Element.of(1, 2, 2, 4)


def test_adjoint_action_examples():
    """Тест примеров: (3,2;2,2) фиксирует (4,1,1), (4,2;1,1) меняет знак."""
    assert adjoint_action(PGL2F5Element.of(3, 2, 2, 2), (4, 1, 1)) == (4, 1, 1)
    assert adjoint_action(PGL2F5Element.of(4, 2, 1, 1), (4, 1, 1)) == (1, 4, 4)
    assert adjoint_action(IDENTITY, (2, 3, 4)) == (2, 3, 4)


def test_action_axioms_on_all_vectors():
    """Тест: (gh)*m = g*(h*m) на всех 125 векторах для образующих S3 x C2."""
    for g in S3XC2_GENERATORS:
        for h in S3XC2_GENERATORS:
            for m in VECTORS:
                assert adjoint_action(g * h, m) == adjoint_action(g, adjoint_action(h, m))


def test_numpy_entries_accepted():
    """Тест: представитель строится из элементов numpy, произведение считается."""
    g = PGL2F5Element.of(*np.array([4, 2, 1, 1], dtype=np.int64))
    assert g == PGL2F5Element.of(4, 2, 1, 1)
    assert g.order() in (1, 2, 3, 4, 5, 6)
    assert g.order() % (g * g).order() == 0
    assert all(isinstance(x, int) for x in (g * g).entries)


def test_action_preserves_determinant():
    """Тест: сопряжение сохраняет определитель -c1^2 - c2*c3 для всех g и M."""

    def det(m):
        return (-m[0] * m[0] - m[1] * m[2]) % 5

    for g in elements():
        for m in VECTORS:
            assert det(adjoint_action(g, m)) == det(m), (g, m)


def test_vec_and_span():
    """Тест координат и линейной оболочки."""
    assert vec(6, -1, 5) == (1, 4, 0)
    with pytest.raises(ShapeError):
        vec(1, 2)
    assert len(span(V2_BASIS)) == 25
    assert len(span(V1_BASIS)) == 5
    assert len(span([(1, 1, 1), (2, 2, 2)])) == 5


def test_s3xc2_and_stabilizer(s3xc2, c6):
    """Тест порядка S3 x C2 и стабилизатора C6."""
    assert len(s3xc2) == 12
    assert label_of(s3xc2) == "S3xC2"
    assert len(c6) == 6
    assert label_of(c6) == "C6"
    assert generate(S3XC2_GENERATORS, limit=5) is None


def test_invariant_decomposition(s3xc2):
    """Тест инвариантности разложения и отказа на недополняющих подпространствах."""
    assert invariant_decomposition_check(S3XC2_GENERATORS, V1_BASIS, V2_BASIS)
    with pytest.raises(ShapeError):
        invariant_decomposition_check(S3XC2_GENERATORS, [(3, 1, 0)], V2_BASIS)
    # S_5 целиком разложение не сохраняет
    assert not invariant_decomposition_check(elements(), V1_BASIS, V2_BASIS)


def test_normality_iff_trivial_action(s3xc2, c6):
    """Тест: нормальность H x| V2 равносильна тривиальности действия на V1."""
    assert not acts_trivially(s3xc2, V1_BASIS)
    assert not normality_check(s3xc2, V1_BASIS, V2_BASIS)
    assert acts_trivially(c6, V1_BASIS)
    assert normality_check(c6, V1_BASIS, V2_BASIS)
    trivial = frozenset([IDENTITY])
    assert normality_check(trivial, V1_BASIS, V2_BASIS)


def test_normality_rejects_bad_input(s3xc2):
    """Тест отказов: V1 не одномерно, разложение не сохраняется."""
    with pytest.raises(ShapeError):
        normality_check(s3xc2, V2_BASIS, V1_BASIS)
    with pytest.raises(ShapeError):
        normality_check(elements(), V1_BASIS, V2_BASIS)


def test_wholesale_normality(s3xc2, c6):
    """Тест: C6 x| V2 нормальна во всем S3 x C2 x| M."""
    module = frozenset(VECTORS)
    assert semidirect_normal(s3xc2, c6, module, span(V2_BASIS))
    assert not semidirect_normal(s3xc2, s3xc2, module, span(V2_BASIS))


def test_semidirect_element():
    """Тест умножения и обращения в полупрямом произведении."""
    g = SemidirectElement(PGL2F5Element.of(4, 2, 1, 1), (4, 1, 1))
    h = SemidirectElement(PGL2F5Element.of(3, 2, 2, 2), (3, 1, 0))
    unit = SemidirectElement(IDENTITY, (0, 0, 0))
    assert g * g.inverse() == unit
    assert (g * h) * g.inverse() == g * (h * g.inverse())


def test_subgroups_prime_to_5():
    """Тест типов подгрупп S_5 порядка, взаимно простого с 5."""
    assert subgroups_prime_to_5() == EXPECTED_PRIME_TO_5
    classes = subgroup_classes_prime_to_5()
    assert len(classes) == 14
    assert [label for label, _ in classes].count("C2") == 2
    assert [label for label, _ in classes].count("S3") == 2


@pytest.mark.slow
def test_verify_suite():
    """Тест полного набора проверок."""
    report = verify_suite()
    assert report.passed, report.to_json()
    assert len(report.claims) == 11
