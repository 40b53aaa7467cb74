"""Pydantic схемы для API, CLI и отчетов."""

from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field, field_validator, model_validator
from sympy import isprime


class HealthResponse(BaseModel):
    """Ответ проверки здоровья сервиса."""

    status: str = Field(..., description="Статус сервиса")
    version: str = Field(..., description="Версия приложения")
    bundled_data: bool = Field(..., description="Встроенные данные 17a1 доступны")
    default_modulus: str = Field(..., description="Модуль p^n по умолчанию")


class ModulusParams(BaseModel):
    """Модуль p^n."""

    p: int = Field(5, description="Простое p >= 5")
    n: int = Field(1, description="Показатель n >= 1")

    @model_validator(mode="after")
    def check_modulus(self):
        if self.p < 5 or not isprime(self.p):
            raise ValueError(f"p должно быть простым >= 5, получено {self.p}")
        if self.n < 1:
            raise ValueError(f"n должно быть >= 1, получено {self.n}")
        return self


class TameDataRequest(ModulusParams):
    """Ручные данные (sigma_l, tau_l) над Z/p^n."""

    ell: int = Field(..., description="Простое l != p")
    sigma: List[List[int]] = Field(..., description="Матрица 2x2 образа sigma_l")
    tau: List[List[int]] = Field(..., description="Матрица 2x2 образа tau_l")


class ResidualTypeResponse(BaseModel):
    """Вычетный локальный тип."""

    type: str
    phi_ramified: Optional[bool] = None
    m_ramified: Optional[bool] = None
    shape: Optional[str] = None
    tame_relation: bool = Field(True, description="Выполнено ли ручное соотношение по рабочему модулю")


class LocalCaseRequest(BaseModel):
    """Локальный случай: вычетный тип и класс l (или само l и p)."""

    residual: Dict[str, Any] = Field(..., description="Вычетный тип, например {'type': 'steinberg'}")
    ell_class: Optional[str] = Field(None, description="'1', '-1' или 'other'")
    ell: Optional[int] = None
    p: Optional[int] = None
    alpha: Optional[int] = Field(None, description="Собственное значение Фробениуса на линии")
    alpha_ell: bool = False
    alpha_ell_inverse: bool = False

    @model_validator(mode="after")
    def check_class_source(self):
        if self.ell_class is None and (self.ell is None or self.p is None):
            raise ValueError("нужно указать ell_class или пару (ell, p)")
        return self

    def to_payload(self) -> Dict[str, Any]:
        return self.model_dump(exclude_none=True)


class DimsResponse(BaseModel):
    """Размерности H^0, H^1, H^2."""

    d0: int
    d1: int
    d2: int


class PlanRequest(BaseModel):
    """Запрос плана C_l / N_l."""

    case: Optional[LocalCaseRequest] = Field(None, description="Локальный случай; пусто для l = p")
    aux_q: Optional[int] = Field(None, description="Вспомогательное простое q вместо случая")
    eigenvalues: Optional[List[int]] = Field(None, description="(alpha, beta) для ветви с сопряжением")
    p: int = 5
    n: int = 1


class CocycleModel(BaseModel):
    name: str
    sigma: List[List[int]]
    tau: List[List[int]]
    symbolic: bool = False


class PlanResponse(BaseModel):
    """План: семейство C_l и базис N_l."""

    case: Optional[Dict[str, Any]] = None
    family: Dict[str, str]
    basis: List[CocycleModel] = Field(default_factory=list)
    delegated: bool = False
    notes: List[str] = Field(default_factory=list)


class AuxSearchRequest(ModulusParams):
    """Поиск вспомогательных простых."""

    n: int = 2
    bound: int = Field(200, description="Граница поиска по q")
    level: int = Field(17, description="Уровень N формы")
    a_invariants: Optional[List[int]] = Field(None, description="Кривая; по умолчанию 17a1")
    ap: Optional[Dict[str, int]] = Field(None, description="Готовая таблица a_l вместо кривой")

    @field_validator("bound", "level")
    @classmethod
    def check_positive(cls, value: int) -> int:
        if value < 1:
            raise ValueError(f"ожидается положительное число, получено {value}")
        return value


class AuxCertificateModel(BaseModel):
    q: int
    sign: int
    p: int
    n: int
    a_q: int
    checks: Dict[str, bool] = Field(default_factory=dict)


class AuxSearchResponse(BaseModel):
    certificates: List[AuxCertificateModel]


class FrobOrderRequest(ModulusParams):
    """Порядок Фробениуса во вспомогательном простом."""

    n: int = 2
    q: int
    a_q: int


class FrobOrderResponse(BaseModel):
    order_mod_p: int
    order_mod_pn: int


class StageInfo(BaseModel):
    """Описание этапа проверки."""

    name: str
    description: str


class StageResult(BaseModel):
    """Результат этапа проверки; время выполнения хранится в отчете отдельно."""

    name: str
    passed: bool
    payload: Dict[str, Any] = Field(default_factory=dict)
    error: Optional[str] = None


class Report(BaseModel):
    """
    Отчет команды.

    payload детерминирован для одинаковых входов; время выполнения хранится
    отдельно в timing и не участвует в сравнении отчетов.
    """

    command: str
    params: Dict[str, Any] = Field(default_factory=dict)
    payload: Dict[str, Any] = Field(default_factory=dict)
    verdict: Optional[bool] = None
    timing: Dict[str, float] = Field(default_factory=dict)

    def deterministic_dump(self) -> Dict[str, Any]:
        return self.model_dump(exclude={"timing"})
