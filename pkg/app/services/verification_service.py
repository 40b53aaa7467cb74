"""Сервис сквозной проверки примера уровня 17 -> 17*113."""

import json
import time
from pathlib import Path
from typing import List, Optional, Sequence

from app.config import settings
from app.logger import log
from app.models.schemas import Report, StageInfo, StageResult
from app.modforms.ellcurve import ApTable
from app.services.data_service import DataService
from app.services.stages import STAGE_REGISTRY, Expectations, StageContext


class VerificationService:
    """Запуск этапов проверки и сохранение отчетов."""

    def __init__(self, data_service: Optional[DataService] = None):
        """Инициализация сервиса проверки."""
        self.reports_dir = settings.reports_dir
        self.data_service = data_service or DataService()

    def get_stages(self) -> List[StageInfo]:
        """
        Возвращает список этапов в порядке выполнения.

        Returns:
            Список StageInfo с именем и описанием каждого этапа
        """
        log.info("Получение списка этапов проверки")
        return [
            StageInfo(name=name, description=stage.get_description())
            for name, stage in STAGE_REGISTRY.items()
        ]

    def build_context(
        self,
        p: Optional[int] = None,
        n: Optional[int] = None,
        bound: Optional[int] = None,
        table: Optional[ApTable] = None,
        jobs: Optional[int] = None,
    ) -> StageContext:
        """
        Контекст проверки для кривой 17a1.

        Ожидаемые значения порядка Фробениуса и границы модуля заданы только
        для p = 5, n = 2; при других параметрах проверяется лишь вычислимость.
        """
        p = p or settings.default_p
        n = n or settings.default_n
        table = table or self.data_service.load_ap_table("17a1")
        expected = Expectations()
        if (p, n) != (5, 2):
            expected.frob_orders = None
            expected.exponent_bound = None
        return StageContext(
            table=table,
            p=p,
            n=n,
            bound=bound or settings.aux_search_bound,
            jobs=jobs,
            expected=expected,
        )

    def run(
        self,
        context: StageContext,
        stages: Optional[Sequence[str]] = None,
        command: str = "verify-paper-example",
        save: bool = True,
    ) -> Report:
        """
        Выполняет этапы по порядку.

        Провал или исключение этапа фиксируется, следующие этапы все равно
        выполняются. Итог - конъюнкция результатов.

        Args:
            context: Контекст проверки
            stages: Имена этапов (по умолчанию все из STAGE_REGISTRY)
            command: Имя команды для отчета
            save: Сохранять ли отчет в reports_dir

        Returns:
            Report с результатами и временем этапов

        Raises:
            ValueError: Если указан неизвестный этап
        """
        names = list(stages) if stages is not None else list(STAGE_REGISTRY)
        unknown = [name for name in names if name not in STAGE_REGISTRY]
        if unknown:
            raise ValueError(f"Неизвестные этапы: {unknown}. Доступны: {list(STAGE_REGISTRY)}")

        log.info(f"Проверка: {len(names)} этапов, модуль {context.p}^{context.n}")
        results: List[StageResult] = []
        timing = {}
        for name in names:
            stage = STAGE_REGISTRY[name]()
            started = time.perf_counter()
            try:
                result = stage.run(context)
            except Exception as e:
                log.error(f"Этап {name} завершился ошибкой: {e}")
                result = StageResult(name=name, passed=False, error=f"{type(e).__name__}: {e}")
            timing[name] = round(time.perf_counter() - started, 3)
            log.info(f"Этап {name}: {'OK' if result.passed else 'FAIL'} ({timing[name]} c)")
            results.append(result)

        failed = [r.name for r in results if not r.passed]
        report = Report(
            command=command,
            params={"p": context.p, "n": context.n, "bound": context.bound, "level": context.level},
            payload={"stages": [r.model_dump() for r in results], "failed": failed},
            verdict=not failed,
            timing=timing,
        )
        if failed:
            log.warning(f"Проверка не пройдена: {failed}")
        else:
            log.info("Все этапы пройдены")
        if save:
            self.save_report(report)
        return report

    def save_report(self, report: Report, path: Optional[Path] = None) -> Path:
        """Сохраняет отчет в JSON."""
        file_path = Path(path) if path else self.reports_dir / f"{report.command}.json"
        file_path.parent.mkdir(parents=True, exist_ok=True)
        with open(file_path, "w", encoding="utf-8") as f:
            json.dump(report.model_dump(), f, indent=2, ensure_ascii=False)
        log.info(f"Отчет сохранен: {file_path}")
        return file_path
