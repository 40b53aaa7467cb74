"""Конфигурация приложения."""

from pathlib import Path

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Настройки приложения."""

    # Основные настройки
    app_name: str = "Modforms Congruences API"
    debug: bool = False
    api_host: str = "0.0.0.0"
    api_port: int = 8000

    # Пути
    data_dir: Path = Field(default_factory=lambda: Path(__file__).parent / "data")
    reports_dir: Path = Field(default_factory=lambda: Path(__file__).parent.parent / "reports")
    logs_dir: Path = Field(default_factory=lambda: Path(__file__).parent.parent / "logs")

    # Арифметика по умолчанию
    default_p: int = 5
    default_n: int = 2

    # Ограничения на ресурсы
    counting_bound: int = 200_000
    level_bound: int = 10_000
    prime_bound: int = 400
    aux_search_bound: int = 200
    big_image_depth: int = 100
    p1_table_limit: int = 4096
    saturation_depth: int = 6

    # Параллелизм независимых вычислений по простым
    jobs: int = 1

    # Размерность плоского подпространства в точке 5 (внешняя таблица)
    flat_subspace_dim_at_5: int = 1

    model_config = SettingsConfigDict(
        env_file=".env",
        case_sensitive=False,
        extra="ignore",
    )

    def __init__(self, **kwargs):
        """Инициализация настроек с созданием необходимых директорий."""
        super().__init__(**kwargs)
        try:
            self.reports_dir.mkdir(parents=True, exist_ok=True)
            self.logs_dir.mkdir(parents=True, exist_ok=True)
        except (OSError, PermissionError):
            pass


settings = Settings()
