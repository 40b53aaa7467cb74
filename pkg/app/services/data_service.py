"""Сервис для работы с входными данными: кривые, таблицы a_l, собственные формы."""

import json
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Tuple, Union

from sympy import primerange

from app.config import settings
from app.logger import log
from app.modforms.congr import NewformData
from app.modforms.ellcurve import ApTable, WeierstrassCurve, ap_table
from app.modforms.errors import InputError


class DataService:
    """Сервис загрузки и выгрузки данных."""

    def __init__(self, data_dir: Optional[Path] = None):
        """Инициализация сервиса данных."""
        self.data_dir = Path(data_dir or settings.data_dir)

    def load_json(self, path: Union[str, Path]) -> Dict[str, Any]:
        """
        Читает JSON файл.

        Args:
            path: Путь к файлу или имя файла в каталоге данных

        Returns:
            Разобранный объект

        Raises:
            FileNotFoundError: Если файл не найден
            InputError: Если JSON некорректен (с номером строки)
        """
        file_path = self._find_data_file(str(path))
        if not file_path:
            raise FileNotFoundError(f"Файл {path} не найден")

        text = file_path.read_text(encoding="utf-8")
        try:
            payload = json.loads(text)
        except json.JSONDecodeError as e:
            raise InputError(f"{file_path.name}:{e.lineno}:{e.colno}: некорректный JSON: {e.msg}") from e
        if not isinstance(payload, dict):
            raise InputError(f"{file_path.name}:1: ожидается JSON объект")
        return payload

    def parse_curve(self, payload: Dict[str, Any], source: str = "<input>") -> WeierstrassCurve:
        try:
            ainvs = payload["a_invariants"]
        except KeyError:
            raise InputError(f"{source}: нет поля a_invariants") from None
        try:
            return WeierstrassCurve.from_invariants(ainvs, label=payload.get("label"))
        except (TypeError, ValueError) as e:
            if isinstance(e, InputError):
                raise InputError(f"{source}: {e}") from e
            raise InputError(f"{source}: некорректные коэффициенты {ainvs}: {e}") from e

    def parse_ap_table(self, payload: Dict[str, Any], source: str = "<input>") -> ApTable:
        """
        Разбор таблицы a_l.

        Принимаются {"ap": {...}, "bad_primes": {...}} и плоский вид ApTable.to_json().

        Raises:
            InputError: Если таблица некорректна или нарушает границу Хассе
        """
        raw = payload.get("ap", payload)
        bad = payload.get("bad_primes", raw.get("bad_primes", {}) if isinstance(raw, dict) else {})
        try:
            coefficients = {int(k): int(v) for k, v in raw.items() if k != "bad_primes"}
            bad_primes = {int(k): str(v) for k, v in bad.items()}
        except (AttributeError, TypeError, ValueError) as e:
            raise InputError(f"{source}: некорректная таблица a_l: {e}") from e
        table = ApTable(coefficients, payload.get("source", "ingested"), bad_primes, payload.get("level"))
        self._check_hasse(table, source)
        return table

    def parse_newform(self, payload: Dict[str, Any], source: str = "<input>") -> NewformData:
        form = NewformData.from_json(payload)
        self._check_hasse(form.ap, source)
        return form

    @staticmethod
    def _check_hasse(table: ApTable, source: str):
        violations = table.hasse_violations()
        if violations:
            raise InputError(f"{source}: нарушена граница Хассе в l = {violations[0]}")

    def parse_inputs(
        self, paths: Iterable[Union[str, Path]]
    ) -> Tuple[List[WeierstrassCurve], List[NewformData]]:
        """
        Разбирает входные файлы кривых и собственных форм.

        Файл с полем a_invariants - кривая, с полями level и ap - собственная форма.

        Returns:
            Пара (кривые, собственные формы)

        Raises:
            FileNotFoundError: Если файла нет
            InputError: Если файл не соответствует ни одной схеме
        """
        curves: List[WeierstrassCurve] = []
        newforms: List[NewformData] = []
        for path in paths:
            payload = self.load_json(path)
            name = Path(path).name
            if "a_invariants" in payload:
                curves.append(self.parse_curve(payload, name))
            elif "ap" in payload and "level" in payload:
                newforms.append(self.parse_newform(payload, name))
            else:
                raise InputError(f"{name}:1: ожидается кривая (a_invariants) или форма (level, ap)")
        log.info(f"Загружено кривых: {len(curves)}, собственных форм: {len(newforms)}")
        return curves, newforms

    def load_curve(self, name: str = "17a1") -> WeierstrassCurve:
        log.info(f"Загрузка кривой: {name}")
        return self.parse_curve(self.load_json(name), name)

    def load_ap_table(self, name: str = "17a1", bound: Optional[int] = None) -> ApTable:
        """
        Таблица a_l из каталога данных или подсчетом точек, если файла нет.

        Args:
            name: Метка кривой
            bound: Нужная глубина таблицы (по умолчанию prime_bound)

        Returns:
            ApTable
        """
        bound = bound or settings.prime_bound
        file_path = self._find_data_file(f"{name}_ap")
        if file_path:
            table = self.parse_ap_table(self.load_json(file_path), file_path.name)
            if all(ell in table for ell in primerange(2, bound + 1)):
                log.info(f"Таблица a_l {name} загружена: {len(table.primes)} простых")
                return table
        curve = self.load_curve(name)
        return ap_table(curve, bound)

    def export_ap_table(self, table: ApTable, path: Union[str, Path], label: Optional[str] = None) -> Path:
        """Сохраняет таблицу a_l в JSON."""
        file_path = Path(path)
        payload = {
            "label": label,
            "level": table.level,
            "source": table.source,
            "ap": {str(ell): a for ell, a in table.coefficients.items()},
            "bad_primes": {str(ell): kind for ell, kind in table.bad_primes.items()},
        }
        file_path.parent.mkdir(parents=True, exist_ok=True)
        with open(file_path, "w", encoding="utf-8") as f:
            json.dump(payload, f, indent=2, ensure_ascii=False)
        log.info(f"Таблица a_l сохранена: {file_path}")
        return file_path

    def regenerate_ap_table(
        self,
        curve: WeierstrassCurve,
        bound: int,
        out: Optional[Union[str, Path]] = None,
        jobs: Optional[int] = None,
        level: Optional[int] = None,
    ) -> Tuple[ApTable, Path]:
        """Пересчитывает таблицу a_l подсчетом точек и сохраняет ее."""
        table = ap_table(curve, bound, jobs=jobs)
        table.level = level
        label = curve.label or "curve"
        target = Path(out) if out else self.data_dir / f"{label}_ap.json"
        return table, self.export_ap_table(table, target, label=curve.label)

    def _find_data_file(self, name: str) -> Optional[Path]:
        """
        Поиск файла данных.

        Args:
            name: Путь, имя файла или имя без расширения .json

        Returns:
            Path к файлу или None, если файл не найден
        """
        direct = Path(name)
        if direct.is_file():
            return direct

        file_path = self.data_dir / name
        if file_path.is_file():
            return file_path

        if not name.endswith(".json"):
            file_path = self.data_dir / f"{name}.json"
            if file_path.is_file():
                return file_path

        return None
