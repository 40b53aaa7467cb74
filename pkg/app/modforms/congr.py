"""Сравнения собственных систем по модулю p^n и свидетели повышения уровня."""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np
from sympy import factorint, primerange

from app.config import settings
from app.logger import log
from app.modforms.arith import (
    HowellForm,
    PrimePowerModulus,
    ResidueLike,
    howell_form,
    intersect,
    left_kernel,
    matmul_mod,
)
from app.modforms.auxprimes import is_auxiliary
from app.modforms.ellcurve import ApTable
from app.modforms.errors import InputError, ModformsError
from app.modforms.modsym import (
    HeckeMatrix,
    ManinSymbolSpace,
    build_space,
    hecke_operator,
    new_subspace,
    old_subspace,
    sturm_bound,
)


@dataclass
class NewformData:
    """Данные собственной формы: уровень, вес и таблица a_l."""

    level: int
    ap: ApTable
    weight: int = 2
    trivial_character: bool = True
    label: Optional[str] = None

    def __post_init__(self):
        if self.weight != 2:
            raise InputError(f"поддерживается только вес 2, получено {self.weight}")
        if not self.trivial_character:
            raise InputError("поддерживается только тривиальный характер")

    @classmethod
    def from_json(cls, payload: dict, label: Optional[str] = None) -> "NewformData":
        """
        Разбор JSON {"level": M, "weight": 2, "ap": {...}, "bad": {...}}.

        Коэффициенты в плохих простых берутся из "bad", если их нет в "ap".
        """
        try:
            level = int(payload["level"])
            ap = {int(k): int(v) for k, v in payload["ap"].items()}
            bad = {int(k): int(v) for k, v in payload.get("bad", {}).items()}
        except (KeyError, TypeError, ValueError) as e:
            raise InputError(f"некорректная таблица собственной формы: {e}") from e
        for ell, value in bad.items():
            ap.setdefault(ell, value)
        kinds = {ell: ("multiplicative" if v in (-1, 1) else "additive") for ell, v in bad.items()}
        return cls(
            level=level,
            ap=ApTable(ap, "ingested", kinds, level),
            weight=int(payload.get("weight", 2)),
            label=label or payload.get("label"),
        )

    def to_json(self) -> dict:
        bad = {str(ell): self.ap.coefficients.get(ell, 0) for ell in self.ap.bad_primes}
        ap = {str(ell): a for ell, a in self.ap.coefficients.items() if ell not in self.ap.bad_primes}
        return {"level": self.level, "weight": self.weight, "ap": ap, "bad": bad}


@dataclass(frozen=True)
class EigensystemConstraint:
    """Ограничение op = eigenvalue для оператора T_l или U_q."""

    operator: str
    eigenvalue: int

    @classmethod
    def of(cls, operator: str, eigenvalue: ResidueLike) -> "EigensystemConstraint":
        return cls(operator, int(eigenvalue))


@dataclass
class WitnessReport:
    """Итог проверки повышения уровня."""

    joint_dim: int
    old_dim: int
    modulus: PrimePowerModulus
    new_dim: int = 0
    new_exponent: int = 0
    level: int = 0
    constraints: int = 0
    sturm: int = 0
    sign: int = 0
    notes: List[str] = field(default_factory=list)

    @property
    def new_witness(self) -> bool:
        """Ядро на новой части содержит элемент порядка p^n."""
        return self.new_exponent >= self.modulus.n

    def to_json(self) -> dict:
        return {
            "joint_dim": self.joint_dim,
            "old_dim": self.old_dim,
            "new_dim": self.new_dim,
            "new_exponent": self.new_exponent,
            "new_witness": self.new_witness,
            "modulus": str(self.modulus),
        }


def congruent_mod_pn(
    f: ApTable,
    g: ApTable,
    modulus: PrimePowerModulus,
    sturm: int,
    excluded: Iterable[int] = (),
) -> bool:
    """
    Проверяет a_l(f) = a_l(g) mod p^n для всех простых l <= sturm вне excluded.

    Raises:
        InsufficientDataError: Если в одной из таблиц нет нужного простого
    """
    excluded = set(excluded)
    q = modulus.order
    for ell in primerange(2, sturm + 1):
        if ell in excluded:
            continue
        if (f[ell] - g[ell]) % q != 0:
            log.debug(f"Сравнение нарушено в {ell}: {f[ell]} и {g[ell]} по модулю {modulus}")
            return False
    return True


class HeckeCache:
    """Кэш матриц Гекке одного пространства; независимые простые считаются параллельно."""

    def __init__(self, space: ManinSymbolSpace, jobs: Optional[int] = None):
        self.space = space
        self.jobs = jobs or settings.jobs
        self._matrices: Dict[str, HeckeMatrix] = {}

    def get(self, label: str) -> HeckeMatrix:
        if label not in self._matrices:
            self._matrices[label] = hecke_operator(self.space, label)
        return self._matrices[label]

    def prefetch(self, labels: Sequence[str]):
        missing = [label for label in labels if label not in self._matrices]
        if self.jobs > 1 and len(missing) > 1:
            with ThreadPoolExecutor(max_workers=self.jobs) as pool:
                for label, matrix in zip(missing, pool.map(self.get_uncached, missing)):
                    self._matrices[label] = matrix
        else:
            for label in missing:
                self.get(label)

    def get_uncached(self, label: str) -> HeckeMatrix:
        return hecke_operator(self.space, label)


def eigensystem_kernel(
    space: ManinSymbolSpace,
    constraints: Sequence[EigensystemConstraint],
    cache: Optional[HeckeCache] = None,
) -> HowellForm:
    """
    Совместное ядро пересечения ker(op - lambda) по всем ограничениям.

    Ядро строится последовательным пересечением: текущий подмодуль W заменяется на
    {w in W : w (op - lambda) = 0}. Результат - форма Хауэлла в параболических
    координатах, не зависящая от порядка ограничений.

    Args:
        space: Пространство над Z/p^n
        constraints: Непустой список ограничений
        cache: Кэш матриц Гекке

    Returns:
        HowellForm совместного ядра
    """
    if not constraints:
        raise ModformsError("нужно хотя бы одно ограничение")
    modulus = space.modulus
    k = space.cuspidal_dimension
    cache = cache or HeckeCache(space)
    cache.prefetch([c.operator for c in constraints])

    current = howell_form(np.eye(k, dtype=np.int64), modulus, cols=k)
    for constraint in constraints:
        if current.rows.shape[0] == 0:
            break
        shifted = cache.get(constraint.operator).characteristic_shift(constraint.eigenvalue).data
        images = matmul_mod(current.rows, shifted, modulus)
        solutions = left_kernel(images, modulus)
        current = howell_form(matmul_mod(solutions.rows, current.rows, modulus), modulus, cols=k)
        log.debug(f"{constraint.operator} = {constraint.eigenvalue}: длина ядра {current.length}")

    # повторная проверка: каждый вектор ядра аннулируется каждым ограничением
    for constraint in constraints:
        shifted = cache.get(constraint.operator).characteristic_shift(constraint.eigenvalue).data
        if current.rows.shape[0] and matmul_mod(current.rows, shifted, modulus).any():
            raise ModformsError(f"вектор ядра не аннулируется {constraint.operator}")  # pragma: no cover
    return current


def _exponent(form: HowellForm) -> int:
    """Показатель модуля: наибольшее e, для которого есть элемент порядка p^e."""
    modulus = form.modulus
    if form.rows.shape[0] == 0:
        return 0
    return max(modulus.n - min(modulus.valuation(x) for x in row) for row in form.rows)


@dataclass
class TraceCheck:
    """Сравнение следов T_l на параболическом подпространстве с 2*a_l."""

    level: int
    modulus: PrimePowerModulus
    traces: Dict[int, int]
    expected: Dict[int, int]

    @property
    def mismatches(self) -> List[int]:
        return [ell for ell, trace in self.traces.items() if trace != self.expected[ell]]

    @property
    def passed(self) -> bool:
        return not self.mismatches

    def to_json(self) -> dict:
        return {
            "level": self.level,
            "modulus": str(self.modulus),
            "primes": list(self.traces),
            "mismatches": self.mismatches,
        }


def eichler_shimura_check(
    f: NewformData,
    modulus: PrimePowerModulus,
    bound: int = 50,
    space: Optional[ManinSymbolSpace] = None,
) -> TraceCheck:
    """
    След T_l на параболических символах уровня M равен 2*a_l(f) для l <= bound, l не делит M.

    Проверка применима, когда параболическое подпространство - две копии одной
    рациональной формы f (род X0(M) равен 1).

    Raises:
        ModformsError: Если параболическая размерность не равна 2
        InsufficientDataError: Если в таблице f нет нужного простого
    """
    space = space or build_space(f.level, modulus)
    if space.cuspidal_dimension != 2:
        raise ModformsError(
            f"уровень {f.level}: параболическая размерность {space.cuspidal_dimension}, ожидалась 2"
        )
    q = modulus.order
    primes = [ell for ell in primerange(2, bound + 1) if f.level % ell != 0]
    expected = {ell: (2 * f.ap[ell]) % q for ell in primes}
    cache = HeckeCache(space)
    cache.prefetch([f"T_{ell}" for ell in primes])
    traces = {ell: int(np.trace(cache.get(f"T_{ell}").matrix.data)) % q for ell in primes}
    check = TraceCheck(f.level, modulus, traces, expected)
    log.info(f"След T_l на уровне {f.level} до {bound}: расхождения {check.mismatches}")
    return check


def witness_constraints(
    f: NewformData, q: int, sign: int, target_level: int
) -> List[EigensystemConstraint]:
    """Ограничения T_l = a_l(f) до границы Штурма, U_q = sign и U_r = a_r(f) для r | M."""
    sturm = sturm_bound(target_level)
    constraints = [
        EigensystemConstraint(f"T_{ell}", f.ap[ell])
        for ell in primerange(2, sturm + 1)
        if target_level % ell != 0
    ]
    constraints.append(EigensystemConstraint(f"U_{q}", sign))
    for r in sorted(factorint(f.level)):
        constraints.append(EigensystemConstraint(f"U_{r}", f.ap[r]))
    return constraints


def level_raising_witness(
    f: NewformData,
    level: int,
    q: int,
    modulus: PrimePowerModulus,
    sign: int,
    source: Optional[ManinSymbolSpace] = None,
    target: Optional[ManinSymbolSpace] = None,
) -> WitnessReport:
    """
    Свидетель формы уровня M*q, сравнимой с f по модулю p^n.

    Совместное ядро ограничений пересекается со старой частью (насыщение образов
    alpha_1 и alpha_q) и с новой частью (общее ядро следов beta_1 и beta_q).
    При кратности один ядро по модулю p^n целиком лежит в старой части, поэтому
    свидетель - элемент порядка p^n в ядре на новой части. Это достаточное
    свидетельство; эквивалентность с когомологическим критерием не утверждается.

    Args:
        f: Собственная форма уровня M
        level: Уровень M
        q: Вспомогательное простое
        modulus: Модуль p^n
        sign: Знак +-1 собственного значения U_q

    Returns:
        WitnessReport
    """
    if level % q == 0:
        raise ModformsError(f"{q} делит уровень {level}")
    if sign not in (-1, 1):
        raise ModformsError(f"знак должен быть +-1, получено {sign}")
    certificate = is_auxiliary(q, f.ap[q], modulus.p, modulus.n, level)
    if certificate is None:
        raise ModformsError(f"{q} не вспомогательное простое по модулю {modulus}")
    if certificate.sign != sign:
        log.warning(f"Знак {sign} не совпадает со знаком сертификата {certificate.sign}")

    target_level = level * q
    log.info(f"Свидетель повышения уровня: {level} -> {target_level} по модулю {modulus}")
    constraints = witness_constraints(f, q, sign, target_level)
    source = source or build_space(level, modulus)
    target = target or build_space(target_level, modulus)

    joint = eigensystem_kernel(target, constraints)
    old = old_subspace(source, target, [1, q])
    meet = intersect(joint.rows, old, modulus) if joint.rows.shape[0] else joint
    new = new_subspace(source, target, [1, q])
    new_meet = intersect(joint.rows, new, modulus) if joint.rows.shape[0] else joint
    report = WitnessReport(
        joint_dim=joint.length,
        old_dim=meet.length,
        modulus=modulus,
        new_dim=new_meet.length,
        new_exponent=_exponent(new_meet),
        level=target_level,
        constraints=len(constraints),
        sturm=sturm_bound(target_level),
        sign=sign,
        notes=["элемент порядка p^n на новой части - достаточное свидетельство, не критерий"],
    )
    log.info(
        f"Длина совместного ядра {report.joint_dim}, старой части {report.old_dim}, "
        f"новой части {report.new_dim}, "
        f"новый свидетель: {report.new_witness}"
    )
    return report
