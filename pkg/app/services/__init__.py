"""Сервисы приложения."""

from app.services.data_service import DataService
from app.services.local_service import LocalAnalysisService
from app.services.stages import STAGE_REGISTRY, BaseStage, Expectations, StageContext
from app.services.verification_service import VerificationService

__all__ = [
    "DataService",
    "LocalAnalysisService",
    "VerificationService",
    "BaseStage",
    "StageContext",
    "Expectations",
    "STAGE_REGISTRY",
]
