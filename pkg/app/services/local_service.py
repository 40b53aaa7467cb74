"""Сервис локального анализа: классификация, размерности, планы."""

from typing import Any, Dict, Optional, Sequence

from app.logger import log
from app.modforms.arith import PrimePowerModulus
from app.modforms.cohodim import DimTriple, LocalCase, dims
from app.modforms.deformplan import PlanEntry, aux_plan, delegated_plan, plan_for
from app.modforms.errors import InputError
from app.modforms.localtypes import TameLocalData, classify_residual, tame_relation_holds


class LocalAnalysisService:
    """Разбор локальных данных и вычисления в одном простом l."""

    def parse_tame_data(self, payload: Dict[str, Any]) -> TameLocalData:
        return TameLocalData.from_json(payload)

    def parse_case(self, payload: Dict[str, Any]) -> LocalCase:
        if not isinstance(payload, dict):
            raise InputError(f"ожидается объект локального случая, получено {payload!r}")
        return LocalCase.from_json(payload)

    def classify(self, payload: Dict[str, Any]) -> Dict[str, Any]:
        """
        Классифицирует ручные данные.

        Args:
            payload: {"ell", "p", "n", "sigma", "tau"}

        Returns:
            Вычетный тип и признак выполнения ручного соотношения по модулю p^n
        """
        data = self.parse_tame_data(payload)
        log.info(f"Классификация ручных данных: l = {data.ell}, модуль {data.modulus}")
        residual = classify_residual(data)
        result = residual.to_json()
        result["tame_relation"] = tame_relation_holds(data)
        return result

    def dims(self, payload: Dict[str, Any]) -> DimTriple:
        case = self.parse_case(payload)
        log.info(f"Размерности для случая {case.to_json()}")
        return dims(case)

    def plan(
        self,
        case_payload: Optional[Dict[str, Any]] = None,
        aux_q: Optional[int] = None,
        eigenvalues: Optional[Sequence[int]] = None,
        p: int = 5,
        n: int = 1,
    ) -> PlanEntry:
        """
        План C_l / N_l.

        Без случая и вспомогательного простого возвращается делегированный план
        для l = p.

        Raises:
            InputError: Если eigenvalues не пара
        """
        if aux_q is not None:
            log.info(f"План во вспомогательном простом {aux_q}")
            return aux_plan(aux_q)
        if case_payload is None:
            log.info(f"План в l = p = {p}: делегирован")
            return delegated_plan(p)
        case = self.parse_case(case_payload)
        pair = None
        if eigenvalues is not None:
            if len(eigenvalues) != 2:
                raise InputError(f"ожидается пара собственных значений, получено {list(eigenvalues)}")
            pair = (int(eigenvalues[0]), int(eigenvalues[1]), PrimePowerModulus(p, n))
        log.info(f"План для случая {case.to_json()}")
        return plan_for(case, eigenvalues=pair)
