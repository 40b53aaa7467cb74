"""Тесты для размерностей локальных когомологий."""

import itertools

import pytest
from sympy import primerange

from app.modforms.cohodim import (
    DIMENSION_TABLE,
    DimTriple,
    LocalCase,
    QuadraticExtension,
    aux_case_dims,
    dims,
    dims_unramified_oracle,
    flat_subspace_dim,
    frobenius_case,
)
from app.modforms.errors import InconsistentCaseError, ModformsError, ShapeError
from app.modforms.localtypes import EllClass, FrobShape, ResidualKind, ResidualLocalType

RAMIFIED_PS = ResidualLocalType.principal_series(phi_ramified=True)
REGULAR = ResidualLocalType.unramified(FrobShape.REGULAR)


def _prime_in_class(residue: int, p: int) -> int:
    return next(q for q in primerange(3, 1000) if q % p == residue)


def test_dims_examples():
    """Тест табличных размерностей."""
    assert dims(LocalCase(RAMIFIED_PS, EllClass.ONE)).as_tuple() == (1, 2, 1)
    assert dims(LocalCase(ResidualLocalType.steinberg(), EllClass.OTHER)).as_tuple() == (0, 0, 0)
    scalar = ResidualLocalType.unramified(FrobShape.SCALAR)
    assert dims(LocalCase(scalar, EllClass.ONE)).as_tuple() == (3, 6, 3)
    assert dims(LocalCase(REGULAR, EllClass.OTHER, alpha_ell=True)).as_tuple() == (1, 2, 1)
    induced = ResidualLocalType.induced(m_ramified=False)
    assert dims(LocalCase(induced, EllClass.MINUS_ONE)).as_tuple() == (0, 1, 1)


def test_table_is_consistent():
    """Тест: таблица из 15 строк и d1 = d0 + d2 в каждой."""
    assert len(DIMENSION_TABLE) == 15
    for d0, d1, d2 in DIMENSION_TABLE.values():
        assert d1 == d0 + d2


def test_dims_total_on_enumeration():
    """Тест: dims определена на каждом допустимом случае."""
    residuals = [
        RAMIFIED_PS,
        ResidualLocalType.steinberg(),
        ResidualLocalType.induced(m_ramified=False),
        ResidualLocalType.induced(m_ramified=True),
        ResidualLocalType.unramified(FrobShape.SCALAR),
        REGULAR,
        ResidualLocalType.unramified(FrobShape.UNIPOTENT),
        ResidualLocalType(ResidualKind.UNRAMIFIED_TWIST_LINE),
    ]
    seen = set()
    for residual, cls, a, b in itertools.product(residuals, EllClass, (False, True), (False, True)):
        try:
            case = LocalCase(residual, cls, alpha_ell=a, alpha_ell_inverse=b)
        except InconsistentCaseError:
            continue
        triple = dims(case)
        assert triple.d1 == triple.d0 + triple.d2
        seen.add(triple.as_tuple())
    assert (3, 6, 3) in seen and (1, 3, 2) in seen


def test_inconsistent_cases():
    """Тест противоречивых описаний."""
    with pytest.raises(InconsistentCaseError):
        DimTriple(1, 1, 1)
    with pytest.raises(InconsistentCaseError):
        LocalCase(RAMIFIED_PS, EllClass.OTHER, alpha_ell=True)
    with pytest.raises(InconsistentCaseError):
        LocalCase(REGULAR, EllClass.ONE, alpha_ell=True)
    with pytest.raises(InconsistentCaseError):
        LocalCase(REGULAR, EllClass.MINUS_ONE, alpha_ell=True)
    with pytest.raises(InconsistentCaseError):
        dims(LocalCase(ResidualLocalType.principal_series(phi_ramified=False), EllClass.OTHER))


def test_for_prime_and_json():
    """Тест построения случая по простому и JSON."""
    case = LocalCase.for_prime(REGULAR, 3, 5, alpha=3)
    assert case.alpha_ell and not case.alpha_ell_inverse
    assert LocalCase.from_json(case.to_json()) == case
    assert LocalCase.from_json({"residual": REGULAR.to_json(), "ell": 3, "p": 5, "alpha": 3}) == case
    with pytest.raises(ModformsError):
        LocalCase.for_prime(REGULAR, 5, 5)


def test_aux_case_dims():
    """Тест размерностей во вспомогательном простом."""
    aux = aux_case_dims()
    assert aux.as_tuple() == (1, 2, 1)
    assert aux == dims(LocalCase.for_prime(REGULAR, 113, 5, alpha=113))
    assert aux.d1 == aux.d0 + aux.d2


def test_oracle_examples():
    """Тест оракула на примерах."""
    assert dims_unramified_oracle([[1, 0], [0, 1]], 11, 5) == (3, 3)
    assert dims_unramified_oracle([[2, 0], [0, 1]], 7, 5) == (1, 1)
    assert dims_unramified_oracle([[1, 1], [0, 1]], 11, 5) == (1, 1)
    with pytest.raises(ShapeError):
        dims_unramified_oracle([[1, 1], [1, 1]], 11, 5)


def _frobenius_matrices(p: int):
    units = range(1, p)
    for a, b in itertools.product(units, units):
        yield [[a, 0], [0, b]]
    for a in units:
        yield [[a, 1], [0, a]]
    # неприводимый характеристический многочлен: собственные значения в F_{p^2}
    for t, d in itertools.product(range(p), units):
        if all((x * x - t * x + d) % p for x in range(p)):
            yield [[0, (-d) % p], [1, t]]


@pytest.mark.parametrize("p", [5, 7])
def test_table_matches_oracle(p):
    """Тест: таблица совпадает с оракулом на всех формах Фробениуса и классах l."""
    for frob in _frobenius_matrices(p):
        for residue in range(1, p):
            ell = _prime_in_class(residue, p)
            case = frobenius_case(frob, ell, p)
            triple = dims(case)
            assert (triple.d0, triple.d2) == dims_unramified_oracle(frob, ell, p), (frob, ell)


def test_oracle_over_quadratic_extension():
    """Тест оракула на матрицах с элементами F_25."""
    field = QuadraticExtension(5)
    s = (0, 1)
    assert field.mul(s, field.inverse(s)) == (1, 0)
    frob = [[s, (0, 0)], [(0, 0), (1, 0)]]
    for ell in (3, 7, 11, 19):
        assert (dims(frobenius_case(frob, ell, 5)).d0, dims(frobenius_case(frob, ell, 5)).d2) == (
            dims_unramified_oracle(frob, ell, 5)
        )


def test_flat_subspace_dim():
    """Тест внешней константы плоского подпространства."""
    assert flat_subspace_dim(5) == 1
    with pytest.raises(ModformsError):
        flat_subspace_dim(7)
