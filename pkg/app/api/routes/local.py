"""Эндпоинты локального анализа: классификация, размерности, планы."""

from fastapi import APIRouter, HTTPException, status

from app.logger import log
from app.models.schemas import (
    DimsResponse,
    LocalCaseRequest,
    PlanRequest,
    PlanResponse,
    ResidualTypeResponse,
    TameDataRequest,
)
from app.services import LocalAnalysisService

router = APIRouter()
local_service = LocalAnalysisService()


@router.post("/classify", response_model=ResidualTypeResponse)
async def classify(request: TameDataRequest):
    """
    Классифицирует ручные данные (sigma_l, tau_l) по модулю p.

    Args:
        request: Простое l, модуль p^n и две матрицы 2x2

    Returns:
        Вычетный тип и признак ручного соотношения по модулю p^n

    Raises:
        HTTPException: 400 при противоречивых данных, 500 при прочих ошибках
    """
    log.info(f"Запрос классификации: l = {request.ell}, p = {request.p}")
    try:
        return local_service.classify(request.model_dump())
    except ValueError as e:
        log.error(f"Ошибка валидации: {e}")
        raise HTTPException(status_code=status.HTTP_400_BAD_REQUEST, detail=str(e))
    except Exception as e:
        log.error(f"Ошибка при классификации: {e}")
        raise HTTPException(status_code=status.HTTP_500_INTERNAL_SERVER_ERROR, detail=str(e))


@router.post("/dims", response_model=DimsResponse)
async def local_dims(request: LocalCaseRequest):
    """
    Размерности (d0, d1, d2) локальных когомологий ad^0.

    Returns:
        DimsResponse
    """
    log.info("Запрос размерностей")
    try:
        return local_service.dims(request.to_payload()).to_json()
    except ValueError as e:
        log.error(f"Ошибка валидации: {e}")
        raise HTTPException(status_code=status.HTTP_400_BAD_REQUEST, detail=str(e))
    except Exception as e:
        log.error(f"Ошибка при вычислении размерностей: {e}")
        raise HTTPException(status_code=status.HTTP_500_INTERNAL_SERVER_ERROR, detail=str(e))


@router.post("/plan", response_model=PlanResponse)
async def local_plan(request: PlanRequest):
    """
    План: семейство C_l и подпространство N_l.

    Без случая и aux_q возвращается делегированный план для l = p.
    """
    log.info("Запрос плана")
    try:
        entry = local_service.plan(
            case_payload=request.case.to_payload() if request.case else None,
            aux_q=request.aux_q,
            eigenvalues=request.eigenvalues,
            p=request.p,
            n=request.n,
        )
        return entry.to_json()
    except ValueError as e:
        log.error(f"Ошибка валидации: {e}")
        raise HTTPException(status_code=status.HTTP_400_BAD_REQUEST, detail=str(e))
    except Exception as e:
        log.error(f"Ошибка при построении плана: {e}")
        raise HTTPException(status_code=status.HTTP_500_INTERNAL_SERVER_ERROR, detail=str(e))
