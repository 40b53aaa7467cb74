"""Эллиптические кривые над Q: коэффициенты a_l подсчетом точек и тип редукции."""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Dict, Iterable, List, Optional

import numpy as np
from sympy import legendre_symbol, primerange

from app.config import settings
from app.logger import log
from app.modforms.errors import (
    BadPrimeError,
    BoundExceededError,
    InputError,
    InsufficientDataError,
    ModformsError,
)

# Нормирование нуля
INFINITE_VALUATION = 10**9


class ReductionKind(str, Enum):
    """Тип редукции в простом."""

    GOOD = "good"
    SPLIT = "multiplicative-split"
    NONSPLIT = "multiplicative-nonsplit"
    ADDITIVE = "additive"

    @property
    def is_multiplicative(self) -> bool:
        return self in (ReductionKind.SPLIT, ReductionKind.NONSPLIT)


def _valuation(x: int, ell: int) -> int:
    if x == 0:
        return INFINITE_VALUATION
    v = 0
    while x % ell == 0:
        x //= ell
        v += 1
    return v


@dataclass(frozen=True)
class WeierstrassCurve:
    """Кривая y^2 + a1*xy + a3*y = x^3 + a2*x^2 + a4*x + a6."""

    a1: int
    a2: int
    a3: int
    a4: int
    a6: int
    label: Optional[str] = None

    def __post_init__(self):
        if self.discriminant == 0:
            raise ModformsError(f"вырожденная кривая {self.a_invariants}")

    @classmethod
    def from_invariants(cls, ainvs: Iterable[int], label: Optional[str] = None):
        values = [int(a) for a in ainvs]
        if len(values) != 5:
            raise InputError(f"ожидается 5 коэффициентов Вейерштрасса, получено {len(values)}")
        return cls(*values, label=label)

    @property
    def a_invariants(self) -> List[int]:
        return [self.a1, self.a2, self.a3, self.a4, self.a6]

    @property
    def b2(self) -> int:
        return self.a1**2 + 4 * self.a2

    @property
    def b4(self) -> int:
        return 2 * self.a4 + self.a1 * self.a3

    @property
    def b6(self) -> int:
        return self.a3**2 + 4 * self.a6

    @property
    def b8(self) -> int:
        a1, a2, a3, a4, a6 = self.a_invariants
        return a1**2 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3**2 - a4**2

    @property
    def c4(self) -> int:
        return self.b2**2 - 24 * self.b4

    @property
    def c6(self) -> int:
        return -self.b2**3 + 36 * self.b2 * self.b4 - 216 * self.b6

    @property
    def discriminant(self) -> int:
        b2, b4, b6, b8 = self.b2, self.b4, self.b6, self.b8
        return -(b2**2) * b8 - 8 * b4**3 - 27 * b6**2 + 9 * b2 * b4 * b6

    def transform(self, u: int, r: int, s: int, t: int) -> Optional["WeierstrassCurve"]:
        """
        Модель после замены x = u^2*x' + r, y = u^3*y' + s*u^2*x' + t.

        Returns:
            Новая кривая или None, если коэффициенты не целые
        """
        a1, a2, a3, a4, a6 = self.a_invariants
        numerators = [
            a1 + 2 * s,
            a2 - s * a1 + 3 * r - s * s,
            a3 + r * a1 + 2 * t,
            a4 - s * a3 + 2 * r * a2 - (t + r * s) * a1 + 3 * r * r - 2 * s * t,
            a6 + r * a4 + r * r * a2 + r**3 - t * a3 - t * t - r * t * a1,
        ]
        weights = (1, 2, 3, 4, 6)
        if any(num % u**w for num, w in zip(numerators, weights)):
            return None
        return WeierstrassCurve(*(num // u**w for num, w in zip(numerators, weights)), label=self.label)

    def minimal_model(self, ell: int) -> "WeierstrassCurve":
        """
        Модель, минимальная в ell = 2 или 3.

        Пока v(Δ) >= 12, ищется замена с u = ell; r, s, t достаточно перебрать
        по модулям ell^2, ell и ell^3.
        """
        if ell not in (2, 3):
            raise ModformsError(f"минимизация перебором только в 2 и 3, получено {ell}")
        return _minimal_model_at(self, ell)

    def minimal_invariants(self, ell: int) -> tuple:
        """
        Инварианты (c4, c6, Δ) минимальной модели в простом ell.

        Для ell >= 5 модель минимизируется заменой (c4, c6, Δ) -> (c4/ell^4, c6/ell^6, Δ/ell^12),
        для ell = 2, 3 инварианты берутся у minimal_model(ell).
        """
        if ell in (2, 3):
            model = self.minimal_model(ell)
            return model.c4, model.c6, model.discriminant
        c4, c6, disc = self.c4, self.c6, self.discriminant
        while (
            _valuation(c4, ell) >= 4 and _valuation(c6, ell) >= 6 and _valuation(disc, ell) >= 12
        ):
            c4 //= ell**4
            c6 //= ell**6
            disc //= ell**12
        return c4, c6, disc

    def to_json(self) -> dict:
        return {"a_invariants": self.a_invariants, "label": self.label}


@lru_cache(maxsize=None)
def _minimal_model_at(curve: WeierstrassCurve, ell: int) -> WeierstrassCurve:
    while _valuation(curve.discriminant, ell) >= 12:
        reduced = next(
            (
                model
                for r in range(ell**2)
                for s in range(ell)
                for t in range(ell**3)
                if (model := curve.transform(ell, r, s, t)) is not None
            ),
            None,
        )
        if reduced is None:
            break
        log.debug(f"Модель {curve.a_invariants} не минимальна в {ell}: {reduced.a_invariants}")
        curve = reduced
    return curve


def _raw_point_count(curve: WeierstrassCurve, ell: int) -> int:
    """Число точек (включая бесконечность и особую точку) полным перебором (x, y)."""
    a1, a2, a3, a4, a6 = curve.a_invariants
    count = 1
    for x in range(ell):
        rhs = (x**3 + a2 * x**2 + a4 * x + a6) % ell
        for y in range(ell):
            if (y * y + a1 * x * y + a3 * y - rhs) % ell == 0:
                count += 1
    return count


def _character_sum(coeffs: List[int], ell: int) -> int:
    """Сумма символов Лежандра многочлена по всем x из F_ell."""
    xs = np.arange(ell, dtype=np.int64)
    values = np.zeros(ell, dtype=np.int64)
    for c in coeffs:
        values = (values * xs + c) % ell
    squares = np.zeros(ell, dtype=bool)
    squares[(xs * xs) % ell] = True
    chi = np.where(values == 0, 0, np.where(squares[values], 1, -1))
    return int(chi.sum())


def reduction_kind(curve: WeierstrassCurve, ell: int) -> ReductionKind:
    """
    Тип редукции кривой в простом ell.

    Хорошая, если ell не делит минимальный дискриминант; мультипликативная, если
    делит дискриминант, но не c4; иначе аддитивная. Расщепимость узла для ell >= 5
    определяется квадратичным характером -c6 (наклоны касательных в узле лежат в F_ell),
    для ell = 2, 3 - знаком ell + 1 - #E(F_ell) с учетом особой точки.
    """
    c4, c6, disc = curve.minimal_invariants(ell)
    if disc % ell != 0:
        return ReductionKind.GOOD
    if c4 % ell == 0:
        return ReductionKind.ADDITIVE
    if ell in (2, 3):
        sign = ell + 1 - _raw_point_count(curve.minimal_model(ell), ell)
    else:
        sign = legendre_symbol((-c6) % ell, ell)
    return ReductionKind.SPLIT if sign == 1 else ReductionKind.NONSPLIT


def ap_of_prime(curve: WeierstrassCurve, ell: int) -> int:
    """
    Коэффициент a_ell = ell + 1 - #E(F_ell) в простом хорошей редукции.

    Для ell = 2, 3 точки перечисляются полностью, для ell >= 5 суммируются символы
    Лежандра правой части модели y^2 = x^3 - 27*c4*x - 54*c6 минимальной в ell.

    Raises:
        BadPrimeError: Если редукция в ell плохая
        BoundExceededError: Если ell больше границы подсчета
    """
    if ell > settings.counting_bound:
        raise BoundExceededError(f"простое {ell} больше границы подсчета {settings.counting_bound}")
    if reduction_kind(curve, ell) != ReductionKind.GOOD:
        raise BadPrimeError(ell)
    if ell in (2, 3):
        return ell + 1 - _raw_point_count(curve.minimal_model(ell), ell)
    c4, c6, _ = curve.minimal_invariants(ell)
    return -_character_sum([1, 0, (-27 * c4) % ell, (-54 * c6) % ell], ell)


def local_ap(curve: WeierstrassCurve, ell: int) -> int:
    """a_ell в любом простом: подсчет для хороших, +-1 для мультипликативных, 0 иначе."""
    kind = reduction_kind(curve, ell)
    if kind == ReductionKind.GOOD:
        return ap_of_prime(curve, ell)
    if kind == ReductionKind.SPLIT:
        return 1
    if kind == ReductionKind.NONSPLIT:
        return -1
    return 0


@dataclass
class ApTable:
    """Таблица коэффициентов a_l по простым."""

    coefficients: Dict[int, int]
    source: str = "counted"
    bad_primes: Dict[int, str] = field(default_factory=dict)
    level: Optional[int] = None

    def __post_init__(self):
        self.coefficients = {int(k): int(v) for k, v in sorted(self.coefficients.items())}
        self.bad_primes = {int(k): str(v) for k, v in sorted(self.bad_primes.items())}

    def __getitem__(self, ell: int) -> int:
        try:
            return self.coefficients[ell]
        except KeyError:
            raise InsufficientDataError(ell) from None

    def __contains__(self, ell: int) -> bool:
        return ell in self.coefficients

    @property
    def primes(self) -> List[int]:
        return list(self.coefficients)

    @property
    def max_prime(self) -> int:
        return max(self.coefficients, default=0)

    def is_bad(self, ell: int) -> bool:
        return ell in self.bad_primes

    def hasse_violations(self) -> List[int]:
        """Хорошие простые, где нарушена граница Хассе, и плохие с a_l вне {-1, 0, 1}."""
        bad = []
        for ell, a in self.coefficients.items():
            if self.is_bad(ell):
                if a not in (-1, 0, 1):
                    bad.append(ell)
            elif a * a > 4 * ell:
                bad.append(ell)
        return bad

    def replace(self, ell: int, value: int) -> "ApTable":
        coefficients = dict(self.coefficients)
        coefficients[ell] = value
        return ApTable(coefficients, "ingested", dict(self.bad_primes), self.level)

    def to_json(self) -> dict:
        payload = {str(ell): a for ell, a in self.coefficients.items()}
        payload["bad_primes"] = {str(ell): kind for ell, kind in self.bad_primes.items()}
        return payload


def ap_table(curve: WeierstrassCurve, bound: int, jobs: Optional[int] = None) -> ApTable:
    """
    Таблица a_l для всех простых l <= bound.

    Args:
        curve: Кривая
        bound: Граница по простым (>= 2)
        jobs: Число потоков для независимого подсчета по простым

    Returns:
        ApTable с отмеченными плохими простыми
    """
    if bound < 2:
        raise ModformsError(f"пустой диапазон простых: граница {bound}")
    if bound > settings.counting_bound:
        raise BoundExceededError(f"граница {bound} больше границы подсчета {settings.counting_bound}")
    primes = list(primerange(2, bound + 1))
    jobs = jobs or settings.jobs
    log.info(f"Подсчет a_l для {curve.label or curve.a_invariants}: {len(primes)} простых")

    def work(ell: int):
        kind = reduction_kind(curve, ell)
        return ell, kind, local_ap(curve, ell)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(work, primes))
    else:
        results = [work(ell) for ell in primes]

    coefficients = {ell: a for ell, _, a in results}
    bad = {ell: kind.value for ell, kind, _ in results if kind != ReductionKind.GOOD}
    return ApTable(coefficients, "counted", bad)
