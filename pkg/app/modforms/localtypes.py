"""
Локальные типы двумерных представлений G_l при l != p.

Вычетные представления классифицируются по образам ручных образующих
(sigma - Фробениус, tau - образующая ручного ветвления) с точностью до
твиста и сопряжения. Для целочисленных типов описано, к каким вычетным
типам они могут редуцироваться.
"""

from dataclasses import dataclass
from enum import Enum
from typing import FrozenSet, Optional

from app.modforms.arith import PrimePowerModulus, ResidueInt, ResidueMatrix, hensel_sqrt
from app.modforms.errors import InconsistentCaseError, InputError, ModformsError, ShapeError


class EllClass(str, Enum):
    """Класс l по модулю p: 1, -1 или прочие."""

    ONE = "1"
    MINUS_ONE = "-1"
    OTHER = "other"

    @classmethod
    def of(cls, ell: int, p: int) -> "EllClass":
        if ell % p == 1:
            return cls.ONE
        if ell % p == p - 1:
            return cls.MINUS_ONE
        return cls.OTHER


class FrobShape(str, Enum):
    SCALAR = "scalar"
    REGULAR = "regular-semisimple"
    UNIPOTENT = "unipotent"


class ResidualKind(str, Enum):
    PRINCIPAL_SERIES = "principal_series"
    UNRAMIFIED_TWIST_LINE = "unramified_twist_line"
    STEINBERG = "steinberg"
    INDUCED = "induced"
    UNRAMIFIED_FROB = "unramified_frob"


class ResidualVariant(str, Enum):
    """Грубые классы вычетных типов для таблицы редукций."""

    PRINCIPAL_SERIES = "principal_series"
    UNRAMIFIED = "unramified_principal_series"
    STEINBERG = "steinberg"
    INDUCED = "induced"


@dataclass(frozen=True)
class ResidualLocalType:
    """Вычетный локальный тип; флаги заполнены только для своего варианта."""

    kind: ResidualKind
    phi_ramified: Optional[bool] = None
    m_ramified: Optional[bool] = None
    shape: Optional[FrobShape] = None

    def __post_init__(self):
        if self.kind == ResidualKind.PRINCIPAL_SERIES and self.phi_ramified is None:
            raise InconsistentCaseError("для главной серии нужен флаг phi_ramified")
        if self.kind == ResidualKind.INDUCED and self.m_ramified is None:
            raise InconsistentCaseError("для индуцированного типа нужен флаг m_ramified")
        if self.kind == ResidualKind.UNRAMIFIED_FROB and self.shape is None:
            raise InconsistentCaseError("для неразветвленного типа нужна форма Фробениуса")

    @classmethod
    def principal_series(cls, phi_ramified: bool = True) -> "ResidualLocalType":
        return cls(ResidualKind.PRINCIPAL_SERIES, phi_ramified=phi_ramified)

    @classmethod
    def steinberg(cls) -> "ResidualLocalType":
        return cls(ResidualKind.STEINBERG)

    @classmethod
    def induced(cls, m_ramified: bool = False) -> "ResidualLocalType":
        return cls(ResidualKind.INDUCED, m_ramified=m_ramified)

    @classmethod
    def unramified(cls, shape: FrobShape) -> "ResidualLocalType":
        return cls(ResidualKind.UNRAMIFIED_FROB, shape=FrobShape(shape))

    @property
    def variant(self) -> ResidualVariant:
        if self.kind == ResidualKind.STEINBERG:
            return ResidualVariant.STEINBERG
        if self.kind == ResidualKind.INDUCED:
            return ResidualVariant.INDUCED
        if self.kind == ResidualKind.PRINCIPAL_SERIES and self.phi_ramified:
            return ResidualVariant.PRINCIPAL_SERIES
        return ResidualVariant.UNRAMIFIED

    @property
    def is_unramified(self) -> bool:
        return self.variant == ResidualVariant.UNRAMIFIED

    def to_json(self) -> dict:
        payload = {"type": self.kind.value}
        if self.phi_ramified is not None:
            payload["phi_ramified"] = self.phi_ramified
        if self.m_ramified is not None:
            payload["m_ramified"] = self.m_ramified
        if self.shape is not None:
            payload["shape"] = self.shape.value
        return payload

    @classmethod
    def from_json(cls, payload: dict) -> "ResidualLocalType":
        try:
            kind = ResidualKind(payload["type"])
            shape = payload.get("shape")
            return cls(
                kind,
                phi_ramified=payload.get("phi_ramified"),
                m_ramified=payload.get("m_ramified"),
                shape=FrobShape(shape) if shape is not None else None,
            )
        except (KeyError, ValueError) as e:
            if isinstance(e, ModformsError):
                raise
            raise InputError(f"некорректный вычетный тип {payload}: {e}") from e


class IntegralKind(str, Enum):
    PRINCIPAL_SERIES = "principal_series"
    STEINBERG = "steinberg"
    INDUCED = "induced"


@dataclass(frozen=True)
class IntegralLocalType:
    """
    Тип целочисленного представления с точностью до твиста и GL2-эквивалентности.

    Attributes:
        kind: Главная серия, Штейнберг или индуцированное
        lattice_exponent: Показатель решетки n (<= 0 для главной серии, >= 0 для Штейнберга)
        phi_ramified: Разветвлен ли характер главной серии
        m_ramified: Разветвлено ли квадратичное расширение M индуцированного типа
        descends_mod_p: Спускается ли редукция характера на G_l
    """

    kind: IntegralKind
    lattice_exponent: int = 0
    phi_ramified: bool = True
    m_ramified: bool = False
    descends_mod_p: bool = True

    def __post_init__(self):
        if self.kind == IntegralKind.PRINCIPAL_SERIES and self.lattice_exponent > 0:
            raise InconsistentCaseError(
                f"показатель решетки главной серии должен быть <= 0, получено {self.lattice_exponent}"
            )
        if self.kind == IntegralKind.STEINBERG and self.lattice_exponent < 0:
            raise InconsistentCaseError(
                f"показатель решетки Штейнберга должен быть >= 0, получено {self.lattice_exponent}"
            )

    def to_json(self) -> dict:
        payload = {"type": self.kind.value}
        if self.kind == IntegralKind.INDUCED:
            payload.update(m_ramified=self.m_ramified, descends_mod_p=self.descends_mod_p)
        else:
            payload["lattice_exponent"] = self.lattice_exponent
        if self.kind == IntegralKind.PRINCIPAL_SERIES:
            payload["phi_ramified"] = self.phi_ramified
        return payload

    @classmethod
    def from_json(cls, payload: dict) -> "IntegralLocalType":
        try:
            return cls(
                IntegralKind(payload["type"]),
                lattice_exponent=int(payload.get("lattice_exponent", 0)),
                phi_ramified=bool(payload.get("phi_ramified", True)),
                m_ramified=bool(payload.get("m_ramified", False)),
                descends_mod_p=bool(payload.get("descends_mod_p", True)),
            )
        except (KeyError, ValueError, TypeError) as e:
            if isinstance(e, ModformsError):
                raise
            raise InputError(f"некорректный целочисленный тип {payload}: {e}") from e


def inverse_2x2(m: ResidueMatrix) -> ResidueMatrix:
    """Обратная матрица 2x2 через присоединенную."""
    if m.data.shape != (2, 2):
        raise ShapeError(f"ожидается матрица 2x2, получено {m.data.shape}")
    a, b, c, d = (int(x) for x in m.data.ravel())
    det = m.modulus.residue(a * d - b * c)
    if not det.is_unit:
        raise ShapeError(f"вырожденная матрица {m.to_lists()}")
    return ResidueMatrix([[d, -b], [-c, a]], m.modulus).scale(det.inverse())


def matrix_power(m: ResidueMatrix, k: int) -> ResidueMatrix:
    if k < 0:
        return matrix_power(inverse_2x2(m), -k)
    result = ResidueMatrix.identity(m.rows, m.modulus)
    base = m
    while k:
        if k & 1:
            result = result @ base
        base = base @ base
        k >>= 1
    return result


def _trace(m: ResidueMatrix) -> int:
    return int(m.data[0, 0] + m.data[1, 1]) % m.modulus.order


def _det(m: ResidueMatrix) -> int:
    a, b, c, d = (int(x) for x in m.data.ravel())
    return (a * d - b * c) % m.modulus.order


def _is_scalar(m: ResidueMatrix) -> bool:
    return m.data[0, 1] == 0 and m.data[1, 0] == 0 and m.data[0, 0] == m.data[1, 1]


def _discriminant(m: ResidueMatrix) -> int:
    t = _trace(m)
    return (t * t - 4 * _det(m)) % m.modulus.order


@dataclass
class TameLocalData:
    """Образы ручных образующих (sigma_l, tau_l) над Z/p^n."""

    ell: int
    sigma: ResidueMatrix
    tau: ResidueMatrix

    def __post_init__(self):
        for name, m in (("sigma", self.sigma), ("tau", self.tau)):
            if m.data.shape != (2, 2):
                raise ShapeError(f"{name}: ожидается матрица 2x2, получено {m.data.shape}")
            if _det(m) % m.modulus.p == 0:
                raise ShapeError(f"{name}: вырожденная матрица {m.to_lists()}")
        if self.sigma.modulus != self.tau.modulus:
            raise ShapeError("sigma и tau над разными модулями")

    @property
    def modulus(self) -> PrimePowerModulus:
        return self.sigma.modulus

    @classmethod
    def from_lists(cls, ell: int, sigma, tau, modulus: PrimePowerModulus) -> "TameLocalData":
        return cls(ell, ResidueMatrix(sigma, modulus), ResidueMatrix(tau, modulus))

    def reduce(self, modulus: PrimePowerModulus) -> "TameLocalData":
        return TameLocalData(self.ell, self.sigma.reduce(modulus), self.tau.reduce(modulus))

    def conjugate(self, c: ResidueMatrix) -> "TameLocalData":
        """Данные C^-1 * rho * C."""
        c_inv = inverse_2x2(c)
        return TameLocalData(self.ell, c_inv @ self.sigma @ c, c_inv @ self.tau @ c)

    def to_json(self) -> dict:
        return {
            "ell": self.ell,
            "p": self.modulus.p,
            "n": self.modulus.n,
            "sigma": self.sigma.to_lists(),
            "tau": self.tau.to_lists(),
        }

    @classmethod
    def from_json(cls, payload: dict) -> "TameLocalData":
        try:
            modulus = PrimePowerModulus(int(payload["p"]), int(payload.get("n", 1)))
            return cls.from_lists(int(payload["ell"]), payload["sigma"], payload["tau"], modulus)
        except (KeyError, TypeError) as e:
            raise InputError(f"некорректные ручные данные: {e}") from e


def tame_relation_holds(data: TameLocalData) -> bool:
    """Проверяет sigma * tau * sigma^-1 = tau^l по рабочему модулю."""
    lhs = data.sigma @ data.tau @ inverse_2x2(data.sigma)
    return lhs == matrix_power(data.tau, data.ell)


def _check_prime(ell: int, p: int):
    if ell == p:
        raise ModformsError(f"l = p = {p}: классификация в p не поддерживается")
    if ell == 2:
        raise ModformsError("l = 2 исключено")


def _frobenius_shape(sigma: ResidueMatrix) -> FrobShape:
    if _is_scalar(sigma):
        return FrobShape.SCALAR
    if _discriminant(sigma) != 0:
        return FrobShape.REGULAR
    return FrobShape.UNIPOTENT


def classify_residual(data: TameLocalData) -> ResidualLocalType:
    """
    Тип вычетного представления по ручным данным (с точностью до твиста).

    Данные над Z/p^n сначала редуцируются по модулю p. Если tau скалярна,
    представление проективно неразветвлено и классифицируется форма Фробениуса.
    Иначе: tau с кратным собственным значением - Штейнберг; полупростая tau,
    коммутирующая с sigma, - разветвленная главная серия; sigma, переставляющая
    собственные прямые tau, - индуцированное с неразветвленным M.

    Raises:
        InconsistentCaseError: Если ручное соотношение нарушено
    """
    p = data.modulus.p
    _check_prime(data.ell, p)
    residual = data.reduce(data.modulus.with_exponent(1))
    if not tame_relation_holds(residual):
        raise InconsistentCaseError(f"sigma*tau*sigma^-1 != tau^{data.ell} по модулю {p}")

    sigma, tau = residual.sigma, residual.tau
    if _is_scalar(tau):
        return ResidualLocalType.unramified(_frobenius_shape(sigma))
    if _discriminant(tau) == 0:
        return ResidualLocalType.steinberg()
    if sigma @ tau == tau @ sigma:
        return ResidualLocalType.principal_series(phi_ramified=True)
    return ResidualLocalType.induced(m_ramified=False)


_RAMIFIED_SS = frozenset({ResidualVariant.UNRAMIFIED, ResidualVariant.STEINBERG})


def _allowed_by_class(t: IntegralLocalType, ell_class: EllClass) -> FrozenSet[ResidualVariant]:
    if t.kind == IntegralKind.PRINCIPAL_SERIES:
        if not t.phi_ramified:
            return frozenset({ResidualVariant.UNRAMIFIED})
        if ell_class == EllClass.ONE:
            return frozenset(
                {ResidualVariant.PRINCIPAL_SERIES, ResidualVariant.UNRAMIFIED, ResidualVariant.STEINBERG}
            )
        return frozenset({ResidualVariant.PRINCIPAL_SERIES})
    if t.kind == IntegralKind.STEINBERG:
        return frozenset({ResidualVariant.STEINBERG, ResidualVariant.UNRAMIFIED})
    if ell_class == EllClass.MINUS_ONE and t.descends_mod_p and not t.m_ramified:
        return frozenset(
            {ResidualVariant.INDUCED, ResidualVariant.STEINBERG, ResidualVariant.UNRAMIFIED}
        )
    return frozenset({ResidualVariant.INDUCED})


def allowed_reductions(t: IntegralLocalType, ell: int, p: int) -> FrozenSet[ResidualVariant]:
    """
    Вычетные типы, в которые может редуцироваться целочисленный тип.

    Главная серия дает главную серию, а при l = 1 mod p еще неразветвленную и
    Штейнберга; Штейнберг - себя или неразветвленную главную серию; индуцированное -
    себя, а при l = -1 mod p (M неразветвлено, характер спускается) еще Штейнберга
    и неразветвленную главную серию.
    """
    _check_prime(ell, p)
    return _allowed_by_class(t, EllClass.of(ell, p))


def integral_reduction_constraint(
    t: IntegralLocalType, coeffs_unramified: bool, p: int, ell: Optional[int] = None
) -> FrozenSet[ResidualVariant]:
    """
    Уточнение таблицы редукций для коэффициентов в W(F).

    При неразветвленных коэффициентах и p >= 5 полупростая редукция разветвленной
    главной серии и индуцированного типа разветвлена, поэтому неразветвленная
    редукция и Штейнберг исключаются. Без l возвращается объединение по классам l.
    """
    if p < 5:
        raise ModformsError(f"ожидается p >= 5, получено {p}")
    if ell is not None:
        allowed = allowed_reductions(t, ell, p)
    else:
        allowed = frozenset().union(*(_allowed_by_class(t, c) for c in EllClass))
    ramified_type = t.kind == IntegralKind.INDUCED or (
        t.kind == IntegralKind.PRINCIPAL_SERIES and t.phi_ramified
    )
    if coeffs_unramified and ramified_type:
        return allowed - _RAMIFIED_SS
    return allowed


def ramification_loss_possible(ell: int, p: int) -> bool:
    """Характер может потерять ветвление при редукции только если l = 1 mod p."""
    if ell == p:
        raise ModformsError(f"l = p = {p}")
    return ell % p == 1


def ramification_loss_witness(u: ResidueInt, ell: int) -> ResidueInt:
    """
    Квадратный корень r = 1 mod p из значения характера u = 1 mod p на инерции.

    Raises:
        ModformsError: Если l != 1 mod p или u != 1 mod p
    """
    p = u.modulus.p
    if not ramification_loss_possible(ell, p):
        raise ModformsError(f"{ell} != 1 mod {p}: ветвление не теряется")
    root = hensel_sqrt(u)
    if root * root != u:
        raise ModformsError(f"корень {root} не проходит проверку")  # pragma: no cover
    return root
