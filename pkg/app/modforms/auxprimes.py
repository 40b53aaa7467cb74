"""Вспомогательные простые: критерий, поиск, порядок Фробениуса и проверка большого образа."""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Tuple, Union

from sympy import isprime, legendre_symbol, primerange

from app.config import settings
from app.logger import log
from app.modforms.arith import PrimePowerModulus, mult_order, quadratic_roots
from app.modforms.ellcurve import ApTable, WeierstrassCurve, ap_table
from app.modforms.errors import InsufficientDataError, ModformsError, NotSplitError


@dataclass(frozen=True)
class AuxPrimeCertificate:
    """Сертификат вспомогательного простого q со знаком sign: a_q = sign*(q+1) mod p^n."""

    q: int
    sign: int
    p: int
    n: int
    a_q: int
    checks: Dict[str, bool] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "q": self.q,
            "sign": self.sign,
            "p": self.p,
            "n": self.n,
            "a_q": self.a_q,
            "checks": dict(self.checks),
        }


def is_auxiliary(q: int, a_q: int, p: int, n: int, level: int) -> Optional[AuxPrimeCertificate]:
    """
    Проверяет, что q - вспомогательное простое для формы уровня N.

    Собственные значения Фробениуса alpha, beta с alpha*beta = q и alpha/beta = q
    дают beta^2 = 1, откуда a_q = +-(q+1). Требуется q != +-1 mod p.

    Args:
        q: Простое
        a_q: Коэффициент формы в q
        p: Простое модуля
        n: Показатель модуля
        level: Уровень N

    Returns:
        AuxPrimeCertificate или None

    Raises:
        ModformsError: Если q не простое или делит N*p
    """
    if not isprime(q):
        raise ModformsError(f"{q} не простое")
    if (level * p) % q == 0:
        raise ModformsError(f"{q} делит N*p = {level * p}")
    modulus = PrimePowerModulus(p, n)
    if q % p in (1, p - 1):
        return None
    order = modulus.order
    for sign in (-1, 1):
        if (a_q - sign * (q + 1)) % order == 0:
            return AuxPrimeCertificate(
                q=q,
                sign=sign,
                p=p,
                n=n,
                a_q=a_q,
                checks={"q_not_pm1": True, "a_q_congruent": True, "q_coprime_to_Np": True},
            )
    return None


def search_auxiliary(
    source: Union[ApTable, WeierstrassCurve],
    p: int,
    n: int,
    bound: int,
    level: int,
    jobs: Optional[int] = None,
) -> List[AuxPrimeCertificate]:
    """
    Все вспомогательные простые q <= bound по возрастанию.

    Источник - готовая таблица a_l или кривая, для которой таблица считается
    подсчетом точек. Простые, делящие N*p, пропускаются.
    """
    if bound < 2:
        return []
    if isinstance(source, WeierstrassCurve):
        table = ap_table(source, bound, jobs=jobs)
    else:
        table = source
    primes = [q for q in primerange(2, bound + 1) if (level * p) % q != 0]
    log.info(f"Поиск вспомогательных простых до {bound} по модулю {p}^{n}")

    def check(q: int) -> Optional[AuxPrimeCertificate]:
        return is_auxiliary(q, table[q], p, n, level)

    jobs = jobs or settings.jobs
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(check, primes))
    else:
        results = [check(q) for q in primes]
    found = [cert for cert in results if cert is not None]
    log.info(f"Найдено вспомогательных простых: {[c.q for c in found]}")
    return found


def frob_order_pair(q: int, a_q: int, p: int, n: int) -> Tuple[int, int]:
    """
    Порядок отношения корней x^2 - a_q*x + q по модулю p и по модулю p^n.

    Это порядок образа Фробениуса в PGL2.

    Raises:
        NotSplitError: Если многочлен не расщепляется с различными корнями mod p
    """
    modulus = PrimePowerModulus(p, n)
    r1, r2 = quadratic_roots(-a_q, q, modulus)
    ratio = r1 * r2.inverse()
    return mult_order(ratio.value % p, modulus.with_exponent(1)), mult_order(ratio)


@dataclass(frozen=True)
class FrobeniusCharpoly:
    """Характеристический многочлен x^2 + a1*x + a0 Фробениуса и его вид по модулю p."""

    a1: int
    a0: int
    split: bool
    distinct: bool

    def to_json(self) -> dict:
        return {"a1": self.a1, "a0": self.a0, "split": self.split, "distinct": self.distinct}


def frobenius_charpoly(a_ell: int, ell: int, modulus: PrimePowerModulus) -> FrobeniusCharpoly:
    """Многочлен x^2 - a_l*x + l по модулю p^n; split и distinct - по модулю p."""
    q = modulus.order
    a1, a0 = (-a_ell) % q, ell % q
    try:
        quadratic_roots(a1, a0, modulus)
        return FrobeniusCharpoly(a1, a0, split=True, distinct=True)
    except NotSplitError:
        disc = (a_ell * a_ell - 4 * ell) % modulus.p
        return FrobeniusCharpoly(a1, a0, split=disc == 0, distinct=False)


class BigImageVerdict(str, Enum):
    CONTAINS_SL2 = "contains_SL2"
    INCONCLUSIVE = "inconclusive"


def _projective_invariant(a_ell: int, ell: int, p: int) -> int:
    return (a_ell * a_ell * pow(ell, -1, p)) % p


def _exceptional_invariants(p: int) -> set:
    """Значения a^2/l для элементов PGL2 порядка 1, 2, 3, 4 и 5."""
    values = {0, 1, 2, 4 % p}
    values.update(u for u in range(p) if (u * u - 3 * u + 1) % p == 0)
    return values


def big_image_verdict(
    table: ApTable, level: int, p: int, depth: Optional[int] = None
) -> BigImageVerdict:
    """
    Проверка, что образ вычетного представления содержит SL2(F_p).

    Ищутся три свидетеля среди хороших простых l != p с a_l != 0 mod p:
    неприводимый многочлен Фробениуса (исключает борелевскую подгруппу и нормализатор
    расщепимого тора), расщепимый с различными корнями (исключает нормализатор
    нерасщепимого тора) и инвариант a_l^2/l вне значений элементов порядка <= 5
    (исключает A4, S4, A5). Отрицательный результат - inconclusive, а не ошибка.

    Raises:
        InsufficientDataError: Если в таблице нет ни одного пригодного простого;
            в ошибке - первое отсутствующее простое l <= depth, не делящее уровень и не равное p
    """
    depth = depth or settings.big_image_depth
    exceptional = _exceptional_invariants(p)
    irreducible = split = generic = False
    examined = [
        ell
        for ell in table.primes
        if ell <= depth and ell != p and level % ell != 0 and not table.is_bad(ell)
    ]
    if not examined:
        candidates = [ell for ell in primerange(2, depth + 1) if ell != p and level % ell != 0]
        missing = next((ell for ell in candidates if ell not in table), None)
        raise InsufficientDataError(missing if missing is not None else depth)
    for ell in examined:
        a = table[ell] % p
        if a == 0:
            continue
        disc = (a * a - 4 * ell) % p
        if disc != 0:
            if legendre_symbol(disc, p) == 1:
                split = True
            else:
                irreducible = True
        if _projective_invariant(a, ell, p) not in exceptional:
            generic = True
        if irreducible and split and generic:
            log.info(f"Образ содержит SL2(F_{p}); последнее простое {ell}")
            return BigImageVerdict.CONTAINS_SL2
    log.info(f"Проверка большого образа не дала результата до {examined[-1]}")
    return BigImageVerdict.INCONCLUSIVE
