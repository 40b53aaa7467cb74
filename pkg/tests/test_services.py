"""Тесты для сервисов данных, локального анализа и сквозной проверки."""

import json

import pytest

from app.modforms.arith import PrimePowerModulus
from app.modforms.congr import congruent_mod_pn
from app.modforms.ellcurve import ap_table
from app.modforms.errors import InputError, InsufficientDataError
from app.services import DataService, LocalAnalysisService, VerificationService
from app.services.stages import STAGE_REGISTRY, BaseStage


@pytest.fixture(scope="module")
def data_service():
    """Фикстура с сервисом данных над встроенным каталогом."""
    return DataService()


@pytest.fixture
def verification_service(tmp_path, data_service):
    """Фикстура с сервисом проверки и временным каталогом отчетов."""
    service = VerificationService(data_service)
    service.reports_dir = tmp_path
    return service


def test_bundled_curve(data_service):
    """Тест встроенной кривой 17a1."""
    curve = data_service.load_curve("17a1")
    assert curve.a_invariants == [1, -1, 1, -1, -14]
    assert curve.label == "17a1"


def test_bundled_table_matches_counting(data_service):
    """Тест: встроенная таблица совпадает с подсчетом точек до 100."""
    bundled = data_service.load_ap_table("17a1")
    counted = ap_table(data_service.load_curve("17a1"), 100)
    for ell in counted.primes:
        assert bundled[ell] == counted[ell], ell
    assert bundled.bad_primes == counted.bad_primes
    assert bundled[113] == -14
    assert bundled.level == 17


def test_parse_inputs(tmp_path, data_service):
    """Тест разбора входных файлов обеих схем."""
    form = tmp_path / "form.json"
    form.write_text(json.dumps({"level": 11, "ap": {"2": -2, "3": -1}, "bad": {"11": 1}}), encoding="utf-8")
    curves, newforms = data_service.parse_inputs([data_service.data_dir / "17a1.json", form])
    assert [c.label for c in curves] == ["17a1"]
    assert newforms[0].level == 11 and newforms[0].ap[11] == 1


def test_parse_inputs_rejects(tmp_path, data_service):
    """Тест диагностик: JSON, схема, граница Хассе, отсутствие файла."""
    broken = tmp_path / "broken.json"
    broken.write_text('{\n  "level": 11,\n  "ap": \n}', encoding="utf-8")
    with pytest.raises(InputError, match="broken.json:4"):
        data_service.parse_inputs([broken])

    unknown = tmp_path / "unknown.json"
    unknown.write_text(json.dumps({"name": "x"}), encoding="utf-8")
    with pytest.raises(InputError):
        data_service.parse_inputs([unknown])

    hasse = tmp_path / "hasse.json"
    hasse.write_text(json.dumps({"level": 11, "ap": {"2": 1, "7": 9}}), encoding="utf-8")
    with pytest.raises(InputError, match="l = 7"):
        data_service.parse_inputs([hasse])

    with pytest.raises(FileNotFoundError):
        data_service.parse_inputs([tmp_path / "missing.json"])


def test_missing_prime_reported(data_service):
    """Тест: таблица без простого 2 при границе 3 - недостаточно данных."""
    table = data_service.parse_ap_table({"ap": {"3": 0}})
    with pytest.raises(InsufficientDataError, match="2"):
        congruent_mod_pn(table, table, PrimePowerModulus(5, 1), 3)


def test_export_and_parse(tmp_path, data_service):
    """Тест выгрузки таблицы и повторного чтения."""
    curve = data_service.load_curve("17a1")
    table, path = data_service.regenerate_ap_table(curve, 30, out=tmp_path / "t.json", level=17)
    again = data_service.parse_ap_table(data_service.load_json(path))
    assert again.coefficients == table.coefficients
    assert again.bad_primes == table.bad_primes
    flat = data_service.parse_ap_table(table.to_json())
    assert flat.coefficients == table.coefficients


def test_local_service():
    """Тест сервиса локального анализа."""
    service = LocalAnalysisService()
    result = service.classify(
        {"ell": 7, "p": 5, "n": 1, "sigma": [[6, 0], [0, 2]], "tau": [[1, 0], [0, 1]]}
    )
    assert result == {"type": "unramified_frob", "shape": "regular-semisimple", "tame_relation": True}
    assert service.dims({"residual": {"type": "induced", "m_ramified": False}, "ell": 19, "p": 5}).as_tuple() == (
        0,
        1,
        1,
    )
    assert service.plan().delegated
    with pytest.raises(InputError):
        service.plan({"residual": {"type": "steinberg"}, "ell_class": "1"}, eigenvalues=[1, 2, 3])
    with pytest.raises(InputError):
        service.dims([1, 2])


def test_stage_registry():
    """Тест реестра этапов."""
    assert list(STAGE_REGISTRY) == [
        "big-image",
        "aux-search",
        "frob-order",
        "modulus-bound",
        "adjgroup",
        "eichler-shimura",
        "witness",
    ]
    for name, stage in STAGE_REGISTRY.items():
        assert issubclass(stage, BaseStage)
        assert stage.name == name
        assert stage.get_description()


def test_verification_quick_stages(verification_service):
    """Тест быстрых этапов и сохранения отчета."""
    context = verification_service.build_context()
    report = verification_service.run(context, stages=["aux-search", "frob-order", "modulus-bound"])
    assert report.verdict is True
    stages = report.payload["stages"]
    assert stages[1]["payload"]["orders"] == [4, 20]
    assert stages[2]["payload"]["bound"] == 26
    assert (verification_service.reports_dir / "verify-paper-example.json").exists()


def test_verification_records_failures(verification_service):
    """Тест: ошибка этапа фиксируется, следующий этап выполняется."""
    context = verification_service.build_context()
    report = verification_service.run(context, stages=["modulus-bound", "frob-order"], save=False)
    assert report.verdict is False
    assert report.payload["failed"] == ["modulus-bound"]
    assert "frob-order" in report.payload["stages"][0]["error"]
    assert report.payload["stages"][1]["passed"] is True

    with pytest.raises(ValueError):
        verification_service.run(context, stages=["unknown"], save=False)


def test_verification_deterministic(verification_service):
    """Тест: отчеты совпадают без учета времени."""
    first = verification_service.run(
        verification_service.build_context(), stages=["aux-search"], save=False
    )
    second = verification_service.run(
        verification_service.build_context(), stages=["aux-search"], save=False
    )
    assert json.dumps(first.deterministic_dump(), sort_keys=True) == json.dumps(
        second.deterministic_dump(), sort_keys=True
    )


def test_eichler_shimura_stage(verification_service):
    """Тест этапа сравнения следов T_l на уровне 17."""
    report = verification_service.run(
        verification_service.build_context(), stages=["eichler-shimura"], save=False
    )
    assert report.verdict is True
    payload = report.payload["stages"][0]["payload"]
    assert payload["mismatches"] == [] and payload["level"] == 17


def test_verification_context_expectations(verification_service):
    """Тест ожиданий при нестандартном модуле."""
    context = verification_service.build_context(p=5, n=1)
    assert context.expected.frob_orders is None
    report = verification_service.run(context, stages=["frob-order"], save=False)
    assert report.verdict is True
