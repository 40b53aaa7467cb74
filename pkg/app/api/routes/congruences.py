"""Эндпоинты для вспомогательных простых и этапов проверки."""

from typing import List

from fastapi import APIRouter, HTTPException, status

from app.logger import log
from app.models.schemas import (
    AuxSearchRequest,
    AuxSearchResponse,
    FrobOrderRequest,
    FrobOrderResponse,
    StageInfo,
)
from app.modforms.auxprimes import frob_order_pair, search_auxiliary
from app.modforms.errors import BoundExceededError
from app.services import DataService, VerificationService

router = APIRouter()
data_service = DataService()
verification_service = VerificationService(data_service)


@router.post("/aux-search", response_model=AuxSearchResponse)
async def aux_search(request: AuxSearchRequest):
    """
    Поиск вспомогательных простых q <= bound.

    Источник a_l: таблица ap из запроса, кривая a_invariants или
    встроенная таблица 17a1.

    Raises:
        HTTPException: 404 без встроенных данных, 413 при превышении границ,
            400 при некорректном входе
    """
    log.info(f"Запрос поиска вспомогательных простых до {request.bound} по модулю {request.p}^{request.n}")
    try:
        if request.ap is not None:
            source = data_service.parse_ap_table({"ap": request.ap}, "request")
        elif request.a_invariants is not None:
            source = data_service.parse_curve({"a_invariants": request.a_invariants}, "request")
        else:
            source = data_service.load_ap_table("17a1", request.bound)
        found = search_auxiliary(source, request.p, request.n, request.bound, request.level)
        return AuxSearchResponse(certificates=[c.to_json() for c in found])
    except FileNotFoundError as e:
        log.error(f"Данные не найдены: {e}")
        raise HTTPException(status_code=status.HTTP_404_NOT_FOUND, detail=str(e))
    except BoundExceededError as e:
        log.error(f"Превышена граница: {e}")
        raise HTTPException(status_code=status.HTTP_413_REQUEST_ENTITY_TOO_LARGE, detail=str(e))
    except ValueError as e:
        log.error(f"Ошибка валидации: {e}")
        raise HTTPException(status_code=status.HTTP_400_BAD_REQUEST, detail=str(e))
    except Exception as e:
        log.error(f"Ошибка при поиске: {e}")
        raise HTTPException(status_code=status.HTTP_500_INTERNAL_SERVER_ERROR, detail=str(e))


@router.post("/frob-order", response_model=FrobOrderResponse)
async def frob_order(request: FrobOrderRequest):
    """
    Порядок отношения корней x^2 - a_q*x + q по модулю p и p^n.

    Raises:
        HTTPException: 400, если многочлен не расщепляется с различными корнями
    """
    log.info(f"Запрос порядка Фробениуса: q = {request.q}, a_q = {request.a_q}")
    try:
        order_p, order_pn = frob_order_pair(request.q, request.a_q, request.p, request.n)
        return FrobOrderResponse(order_mod_p=order_p, order_mod_pn=order_pn)
    except ValueError as e:
        log.error(f"Ошибка валидации: {e}")
        raise HTTPException(status_code=status.HTTP_400_BAD_REQUEST, detail=str(e))
    except Exception as e:
        log.error(f"Ошибка при вычислении порядка: {e}")
        raise HTTPException(status_code=status.HTTP_500_INTERNAL_SERVER_ERROR, detail=str(e))


@router.get("/verify-stages", response_model=List[StageInfo])
async def verify_stages():
    """
    Список этапов сквозной проверки.

    Сами вычисления на уровне 1921 через HTTP не запускаются.
    """
    log.info("Запрос списка этапов проверки")
    try:
        return verification_service.get_stages()
    except Exception as e:
        log.error(f"Ошибка при получении этапов: {e}")
        raise HTTPException(status_code=status.HTTP_500_INTERNAL_SERVER_ERROR, detail=str(e))
