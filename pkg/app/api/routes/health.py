"""Эндпоинты для проверки здоровья сервиса."""

from fastapi import APIRouter

from app import __version__
from app.config import settings
from app.logger import log
from app.models.schemas import HealthResponse

router = APIRouter()


@router.get("/health", response_model=HealthResponse)
async def health_check():
    """
    Проверка состояния сервиса.

    Returns:
        Статус, версия и наличие встроенной таблицы a_l
    """
    log.debug("Health check запрос")
    bundled = (settings.data_dir / "17a1_ap.json").is_file()
    return HealthResponse(
        status="ok" if bundled else "degraded",
        version=__version__,
        bundled_data=bundled,
        default_modulus=f"{settings.default_p}^{settings.default_n}",
    )
