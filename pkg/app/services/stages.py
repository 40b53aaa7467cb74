"""Этапы сквозной проверки примера 17a1: от большого образа до свидетеля."""

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Tuple

from app.models.schemas import StageResult
from app.modforms.adjgroup import verify_suite
from app.modforms.arith import PrimePowerModulus, modulus_exponent_bound
from app.modforms.auxprimes import BigImageVerdict, big_image_verdict, frob_order_pair, search_auxiliary
from app.modforms.congr import NewformData, eichler_shimura_check, level_raising_witness
from app.modforms.ellcurve import ApTable
from app.modforms.errors import ModformsError


@dataclass
class Expectations:
    """Ожидаемые значения этапов; None - проверяется только успешное вычисление."""

    aux_q: int = 113
    aux_sign: int = -1
    frob_orders: Optional[Tuple[int, int]] = (4, 20)
    exponent_bound: Optional[int] = 26


@dataclass
class StageContext:
    """Общие данные этапов и промежуточные результаты."""

    table: ApTable
    p: int = 5
    n: int = 2
    level: int = 17
    bound: int = 200
    label: Optional[str] = "17a1"
    jobs: Optional[int] = None
    expected: Expectations = field(default_factory=Expectations)
    results: Dict[str, Any] = field(default_factory=dict)

    @property
    def modulus(self) -> PrimePowerModulus:
        return PrimePowerModulus(self.p, self.n)


class BaseStage(ABC):
    """
    Абстрактный этап проверки.

    Этап читает и дополняет StageContext и возвращает StageResult. Исключение
    внутри run фиксируется сервисом как провал этапа.
    """

    name: str = ""

    @abstractmethod
    def run(self, context: StageContext) -> StageResult:
        """
        Выполнение этапа.

        Args:
            context: Общий контекст проверки

        Returns:
            Результат этапа
        """
        pass

    @classmethod
    @abstractmethod
    def get_description(cls) -> str:
        """
        Получение описания этапа.

        Returns:
            Описание этапа
        """
        pass

    def result(self, passed: bool, /, **payload) -> StageResult:
        return StageResult(name=self.name, passed=bool(passed), payload=payload)


class BigImageStage(BaseStage):
    name = "big-image"

    def run(self, context: StageContext) -> StageResult:
        verdict = big_image_verdict(context.table, context.level, context.p)
        return self.result(verdict == BigImageVerdict.CONTAINS_SL2, verdict=verdict.value)

    @classmethod
    def get_description(cls) -> str:
        return "Образ вычетного представления содержит SL2(F_p)"


class AuxSearchStage(BaseStage):
    name = "aux-search"

    def run(self, context: StageContext) -> StageResult:
        found = search_auxiliary(
            context.table, context.p, context.n, context.bound, context.level, jobs=context.jobs
        )
        context.results["certificates"] = found
        expected = context.expected
        hit = [c for c in found if c.q == expected.aux_q and c.sign == expected.aux_sign]
        return self.result(
            bool(hit),
            found=[c.to_json() for c in found],
            expected={"q": expected.aux_q, "sign": expected.aux_sign},
        )

    @classmethod
    def get_description(cls) -> str:
        return "Поиск вспомогательных простых q: a_q = +-(q+1) mod p^n, q != +-1 mod p"


class FrobOrderStage(BaseStage):
    name = "frob-order"

    def run(self, context: StageContext) -> StageResult:
        q = context.expected.aux_q
        orders = frob_order_pair(q, context.table[q], context.p, context.n)
        context.results["frob_orders"] = orders
        expected = context.expected.frob_orders
        passed = expected is None or tuple(orders) == tuple(expected)
        return self.result(passed, q=q, orders=list(orders), expected=list(expected) if expected else None)

    @classmethod
    def get_description(cls) -> str:
        return "Порядок отношения корней многочлена Фробениуса в q по модулю p и p^n"


class ModulusBoundStage(BaseStage):
    name = "modulus-bound"

    def run(self, context: StageContext) -> StageResult:
        orders = context.results.get("frob_orders")
        if orders is None:
            raise ModformsError("нет порядка Фробениуса: этап frob-order не выполнен")
        bound = modulus_exponent_bound(True, orders[1], context.p)
        expected = context.expected.exponent_bound
        return self.result(expected is None or bound == expected, e=orders[1], bound=bound, expected=expected)

    @classmethod
    def get_description(cls) -> str:
        return "Граница показателя простого над p в модуле расширения: floor(p*e/(p-1)) + 1"


class AdjgroupStage(BaseStage):
    name = "adjgroup"

    def run(self, context: StageContext) -> StageResult:
        report = verify_suite()
        return self.result(report.passed, **report.to_json())

    @classmethod
    def get_description(cls) -> str:
        return "Перебором проверяются утверждения о действии PGL2(F_5) на следе ноль"


class EichlerShimuraStage(BaseStage):
    name = "eichler-shimura"

    def run(self, context: StageContext) -> StageResult:
        form = NewformData(level=context.level, ap=context.table, label=context.label)
        check = eichler_shimura_check(form, context.modulus, bound=min(50, context.table.max_prime))
        return self.result(check.passed, **check.to_json())

    @classmethod
    def get_description(cls) -> str:
        return "След T_l на параболических символах уровня N равен 2*a_l"


class WitnessStage(BaseStage):
    name = "witness"

    def run(self, context: StageContext) -> StageResult:
        expected = context.expected
        form = NewformData(level=context.level, ap=context.table, label=context.label)
        report = level_raising_witness(
            form, context.level, expected.aux_q, context.modulus, expected.aux_sign
        )
        return self.result(report.new_witness, **report.to_json(), level=report.level, sturm=report.sturm)

    @classmethod
    def get_description(cls) -> str:
        return "Свидетель новой формы уровня N*q, сравнимой с исходной по модулю p^n"


STAGE_REGISTRY = {
    BigImageStage.name: BigImageStage,
    AuxSearchStage.name: AuxSearchStage,
    FrobOrderStage.name: FrobOrderStage,
    ModulusBoundStage.name: ModulusBoundStage,
    AdjgroupStage.name: AdjgroupStage,
    EichlerShimuraStage.name: EichlerShimuraStage,
    WitnessStage.name: WitnessStage,
}
