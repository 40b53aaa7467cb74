"""
Командная строка modcongr.

Каждая команда вызывает одну группу операций ядра или сервисов и печатает
Report (JSON или текст). Коды возврата: 0 - все проверки пройдены,
1 - проверка не пройдена, 2 - ошибка входных данных, 3 - превышена граница.
"""

import argparse
import json
import sys
import time
from pathlib import Path
from typing import Callable, Dict, List, Optional

from pydantic import BaseModel, Field, ValidationError, field_validator
from sympy import factorint, isprime

from app.config import settings
from app.logger import setup_logger
from app.models.schemas import PlanRequest, Report
from app.modforms.adjgroup import verify_suite
from app.modforms.arith import PrimePowerModulus
from app.modforms.auxprimes import search_auxiliary
from app.modforms.congr import NewformData, congruent_mod_pn, level_raising_witness
from app.modforms.ellcurve import ap_table
from app.modforms.errors import BoundExceededError, ModformsError
from app.modforms.modsym import sturm_bound
from app.services import DataService, LocalAnalysisService, VerificationService

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INPUT = 2
EXIT_BOUND = 3


class RunConfig(BaseModel):
    """Параметры запуска, проверенные по флагам командной строки."""

    command: str
    p: int = Field(default_factory=lambda: settings.default_p)
    n: int = Field(default_factory=lambda: settings.default_n)
    inputs: List[Path] = Field(default_factory=list)
    bound: Optional[int] = None
    level: Optional[int] = None
    q: Optional[int] = None
    sign: int = -1
    stages: Optional[List[str]] = None
    prime_bound: int = Field(default_factory=lambda: settings.prime_bound)
    level_bound: int = Field(default_factory=lambda: settings.level_bound)
    counting_bound: int = Field(default_factory=lambda: settings.counting_bound)
    out: Optional[Path] = None
    format: str = "json"
    jobs: int = Field(default_factory=lambda: settings.jobs)

    @field_validator("p")
    @classmethod
    def check_p(cls, value: int) -> int:
        if value < 5 or not isprime(value):
            raise ValueError(f"p должно быть простым >= 5, получено {value}")
        return value

    @field_validator("n", "jobs", "prime_bound", "level_bound", "counting_bound")
    @classmethod
    def check_positive(cls, value: int) -> int:
        if value < 1:
            raise ValueError(f"ожидается положительное число, получено {value}")
        return value

    @field_validator("bound", "level", "q")
    @classmethod
    def check_optional_positive(cls, value: Optional[int]) -> Optional[int]:
        if value is not None and value < 1:
            raise ValueError(f"ожидается положительное число, получено {value}")
        return value

    @field_validator("sign")
    @classmethod
    def check_sign(cls, value: int) -> int:
        if value not in (-1, 1):
            raise ValueError(f"знак должен быть +-1, получено {value}")
        return value

    @property
    def modulus(self) -> PrimePowerModulus:
        return PrimePowerModulus(self.p, self.n)

    def echo(self) -> dict:
        return self.model_dump(
            mode="json",
            include={"p", "n", "inputs", "bound", "level", "q", "sign", "stages"},
            exclude_none=True,
        )


class Services:
    """Сервисы, общие для команд."""

    def __init__(self):
        self.data = DataService()
        self.local = LocalAnalysisService()
        self.verification = VerificationService(self.data)


def _single_input(config: RunConfig) -> Path:
    if len(config.inputs) != 1:
        raise ModformsError(f"команда {config.command} ожидает ровно один --in")
    return config.inputs[0]


def _newform(config: RunConfig, services: Services, index: int = 0) -> NewformData:
    """Собственная форма из --in или встроенная 17a1."""
    if len(config.inputs) > index:
        path = config.inputs[index]
        payload = services.data.load_json(path)
        if "a_invariants" in payload:
            curve = services.data.parse_curve(payload, path.name)
            if config.level is None:
                raise ModformsError("для кривой нужен --level")
            table = ap_table(curve, config.prime_bound, jobs=config.jobs)
            return NewformData(level=config.level, ap=table, label=curve.label)
        return services.data.parse_newform(payload, path.name)
    table = services.data.load_ap_table("17a1", config.prime_bound)
    return NewformData(level=17, ap=table, label="17a1")


def cmd_classify(config: RunConfig, services: Services) -> Report:
    payload = services.data.load_json(_single_input(config))
    return Report(command=config.command, params=config.echo(), payload=services.local.classify(payload))


def cmd_dims(config: RunConfig, services: Services) -> Report:
    payload = services.data.load_json(_single_input(config))
    triple = services.local.dims(payload)
    return Report(command=config.command, params=config.echo(), payload=triple.to_json())


def cmd_plan(config: RunConfig, services: Services) -> Report:
    try:
        request = PlanRequest.model_validate(services.data.load_json(_single_input(config)))
    except ValidationError as e:
        raise ModformsError(f"некорректный запрос плана: {e}") from e
    entry = services.local.plan(
        case_payload=request.case.to_payload() if request.case else None,
        aux_q=request.aux_q,
        eigenvalues=request.eigenvalues,
        p=request.p,
        n=request.n,
    )
    return Report(command=config.command, params=config.echo(), payload=entry.to_json())


def cmd_aux_search(config: RunConfig, services: Services) -> Report:
    bound = config.bound or settings.aux_search_bound
    form = _newform(config, services)
    level = config.level or form.level
    found = search_auxiliary(form.ap, config.p, config.n, bound, level, jobs=config.jobs)
    return Report(
        command=config.command,
        params=config.echo(),
        payload={"certificates": [c.to_json() for c in found]},
    )


def cmd_ap_table(config: RunConfig, services: Services) -> Report:
    bound = config.bound or config.prime_bound
    if bound > config.counting_bound:
        raise BoundExceededError(f"граница {bound} больше границы подсчета {config.counting_bound}")
    curve = (
        services.data.parse_curve(services.data.load_json(config.inputs[0]), config.inputs[0].name)
        if config.inputs
        else services.data.load_curve("17a1")
    )
    table, path = services.data.regenerate_ap_table(
        curve, bound, out=config.out, jobs=config.jobs, level=config.level
    )
    return Report(
        command=config.command,
        params=config.echo(),
        payload={"path": str(path), "primes": len(table.primes), "bad_primes": table.bad_primes},
    )


def cmd_congruence(config: RunConfig, services: Services) -> Report:
    if len(config.inputs) != 2:
        raise ModformsError("команда congruence ожидает два --in")
    f = _newform(config, services, 0)
    g = _newform(config, services, 1)
    sturm = config.bound or sturm_bound(max(f.level, g.level))
    excluded = sorted(int(ell) for ell in set(factorint(f.level)) | set(factorint(g.level)))
    result = congruent_mod_pn(f.ap, g.ap, config.modulus, sturm, excluded=excluded)
    return Report(
        command=config.command,
        params=config.echo(),
        payload={
            "congruent": result,
            "sturm": sturm,
            "excluded": excluded,
            "modulus": str(config.modulus),
        },
        verdict=result,
    )


def cmd_raise_witness(config: RunConfig, services: Services) -> Report:
    form = _newform(config, services)
    q = config.q or 113
    if form.level * q > config.level_bound:
        raise BoundExceededError(f"уровень {form.level * q} больше границы {config.level_bound}")
    report = level_raising_witness(form, form.level, q, config.modulus, config.sign)
    payload = report.to_json()
    payload.update({"level": report.level, "sturm": report.sturm, "constraints": report.constraints})
    return Report(command=config.command, params=config.echo(), payload=payload, verdict=report.new_witness)


def cmd_adjgroup_verify(config: RunConfig, services: Services) -> Report:
    suite = verify_suite()
    return Report(command=config.command, params=config.echo(), payload=suite.to_json(), verdict=suite.passed)


def cmd_verify_paper_example(config: RunConfig, services: Services) -> Report:
    table = None
    if config.inputs:
        table = services.data.parse_ap_table(services.data.load_json(config.inputs[0]), config.inputs[0].name)
    context = services.verification.build_context(
        p=config.p, n=config.n, bound=config.bound, table=table, jobs=config.jobs
    )
    return services.verification.run(context, stages=config.stages, command=config.command)


COMMANDS: Dict[str, Callable[[RunConfig, Services], Report]] = {
    "classify": cmd_classify,
    "dims": cmd_dims,
    "plan": cmd_plan,
    "aux-search": cmd_aux_search,
    "ap-table": cmd_ap_table,
    "congruence": cmd_congruence,
    "raise-witness": cmd_raise_witness,
    "adjgroup-verify": cmd_adjgroup_verify,
    "verify-paper-example": cmd_verify_paper_example,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="modcongr",
        description="Сравнения модулярных форм по модулю p^n",
    )
    parser.add_argument("command", choices=list(COMMANDS))
    parser.add_argument("--p", type=int, default=settings.default_p, help="простое p >= 5")
    parser.add_argument("--n", type=int, default=settings.default_n, help="показатель модуля")
    parser.add_argument("--bound", type=int, help="граница по простым для команды")
    parser.add_argument("--level", type=int, help="уровень N")
    parser.add_argument("--in", dest="inputs", action="append", default=[], help="входной JSON")
    parser.add_argument("--out", type=Path, help="файл для отчета")
    parser.add_argument("--format", choices=["json", "text"], default="json")
    parser.add_argument("--jobs", type=int, default=settings.jobs, help="число потоков")
    parser.add_argument("--q", type=int, help="вспомогательное простое")
    parser.add_argument("--sign", type=int, default=-1, help="знак собственного значения U_q")
    parser.add_argument("--stages", nargs="+", help="этапы verify-paper-example")
    return parser


def render(report: Report, fmt: str) -> str:
    """JSON или текстовое представление того же JSON."""
    data = report.model_dump(mode="json")
    if fmt == "json":
        return json.dumps(data, indent=2, ensure_ascii=False)
    lines = [f"{report.command}: {'OK' if report.verdict else 'FAIL' if report.verdict is False else '-'}"]
    for key, value in data["payload"].items():
        lines.append(f"  {key}: {json.dumps(value, ensure_ascii=False)}")
    return "\n".join(lines)


def main(argv: Optional[List[str]] = None) -> int:
    """
    Точка входа командной строки.

    Returns:
        Код возврата 0/1/2/3
    """
    log = setup_logger(sys.stderr)
    args = build_parser().parse_args(argv)
    try:
        config = RunConfig(**{k: v for k, v in vars(args).items() if v is not None})
    except ValidationError as e:
        log.error(f"Некорректные параметры: {e}")
        return EXIT_INPUT

    log.info(f"Команда {config.command}")
    started = time.perf_counter()
    try:
        report = COMMANDS[config.command](config, Services())
    except BoundExceededError as e:
        log.error(f"Превышена граница: {e}")
        return EXIT_BOUND
    except FileNotFoundError as e:
        log.error(f"Файл не найден: {e}")
        return EXIT_INPUT
    except ValueError as e:
        log.error(f"Ошибка входных данных: {e}")
        return EXIT_INPUT
    report.timing.setdefault("total", round(time.perf_counter() - started, 3))

    text = render(report, config.format)
    if config.out and config.command != "ap-table":
        config.out.parent.mkdir(parents=True, exist_ok=True)
        config.out.write_text(text + "\n", encoding="utf-8")
        log.info(f"Отчет сохранен: {config.out}")
    else:
        print(text)
    return EXIT_FAILED if report.verdict is False else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
