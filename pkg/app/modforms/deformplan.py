"""
Локальные семейства деформаций C_l и подпространства N_l.

Коциклы задаются значениями на ручных образующих (sigma_l, tau_l); на диком
ветвлении они равны нулю.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from app.logger import log
from app.modforms.arith import PrimePowerModulus, ResidueLike, ResidueMatrix
from app.modforms.cohodim import LocalCase, aux_case_dims, dims
from app.modforms.errors import ModformsError, ShapeError
from app.modforms.localtypes import (
    EllClass,
    FrobShape,
    ResidualKind,
    TameLocalData,
    inverse_2x2,
)

Matrix2 = Tuple[Tuple[int, int], Tuple[int, int]]

ZERO: Matrix2 = ((0, 0), (0, 0))
E12: Matrix2 = ((0, 1), (0, 0))
E21: Matrix2 = ((0, 0), (1, 0))
H: Matrix2 = ((1, 0), (0, -1))


def _as_matrix2(values) -> Matrix2:
    rows = tuple(tuple(int(x) for x in row) for row in values)
    if len(rows) != 2 or any(len(row) != 2 for row in rows):
        raise ShapeError(f"ожидается матрица 2x2, получено {values}")
    return rows  # type: ignore[return-value]


@dataclass(frozen=True)
class CocycleGen:
    """Коцикл со значениями следа ноль на sigma_l и tau_l."""

    name: str
    sigma: Matrix2 = ZERO
    tau: Matrix2 = ZERO
    symbolic: bool = False

    def __post_init__(self):
        object.__setattr__(self, "sigma", _as_matrix2(self.sigma))
        object.__setattr__(self, "tau", _as_matrix2(self.tau))
        for label, m in (("sigma", self.sigma), ("tau", self.tau)):
            if m[0][0] + m[1][1] != 0:
                raise ShapeError(f"{self.name}({label}) имеет ненулевой след")

    @staticmethod
    def combine(name: str, terms: Sequence[Tuple[int, "CocycleGen"]]) -> "CocycleGen":
        """Линейная комбинация sum c_i * g_i с целыми коэффициентами."""

        def mix(attr: str) -> Matrix2:
            return tuple(
                tuple(sum(c * getattr(g, attr)[i][j] for c, g in terms) for j in range(2))
                for i in range(2)
            )  # type: ignore[return-value]

        return CocycleGen(name, mix("sigma"), mix("tau"))

    def value(self, generator: str, modulus: PrimePowerModulus) -> ResidueMatrix:
        return ResidueMatrix(self.sigma if generator == "sigma" else self.tau, modulus)

    def act(self, rho: TameLocalData, coefficient: int) -> TameLocalData:
        """Данные (1 + coefficient * v) * rho."""
        modulus = rho.modulus
        identity = ResidueMatrix.identity(2, modulus)
        return TameLocalData(
            rho.ell,
            (identity + self.value("sigma", modulus).scale(coefficient)) @ rho.sigma,
            (identity + self.value("tau", modulus).scale(coefficient)) @ rho.tau,
        )

    def to_json(self) -> dict:
        payload = {
            "name": self.name,
            "sigma": [list(row) for row in self.sigma],
            "tau": [list(row) for row in self.tau],
        }
        if self.symbolic:
            payload["symbolic"] = True
        return payload


def h_cocycle() -> CocycleGen:
    """Неразветвленный диагональный коцикл h."""
    return CocycleGen("h", sigma=H)


def j_cocycle() -> CocycleGen:
    return CocycleGen("j", sigma=E12)


def u_cocycle() -> CocycleGen:
    return CocycleGen("u", tau=E12)


G1 = CocycleGen("g1", sigma=E21)
G2 = CocycleGen("g2", sigma=H)
G3 = CocycleGen("g3", tau=H)


@dataclass
class PlanEntry:
    """Семейство C_l и базис N_l."""

    case: Optional[LocalCase]
    family: Dict[str, str]
    basis: List[CocycleGen] = field(default_factory=list)
    delegated: bool = False
    notes: List[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "case": self.case.to_json() if self.case is not None else None,
            "family": dict(self.family),
            "basis": [g.to_json() for g in self.basis],
            "delegated": self.delegated,
            "notes": list(self.notes),
        }


def delegated_plan(p: Optional[int] = None, reason: Optional[str] = None) -> PlanEntry:
    """План в l = p: множество C_p берется из внешней конструкции, rho_p в нем лежит."""
    note = reason or f"l = p = {p}: делегировано"
    return PlanEntry(
        case=None,
        family={"C": "C_p внешней конструкции; rho_p лежит в C_p"},
        delegated=True,
        notes=[note],
    )


def conjugated_h(alpha: ResidueLike, beta: ResidueLike, modulus: PrimePowerModulus) -> Tuple[CocycleGen, ResidueMatrix]:
    """
    Образующая (alpha - beta) * C h C^-1 при C = (-beta, -alpha; 1, 1).

    Returns:
        Пара (коцикл, C)

    Raises:
        ModformsError: Если C diag(alpha, beta) C^-1 != (0, -alpha*beta; 1, alpha+beta)
    """
    a, b = int(alpha) % modulus.order, int(beta) % modulus.order
    if (a - b) % modulus.p == 0:
        raise ModformsError("собственные значения должны различаться по модулю p")
    c = ResidueMatrix([[-b, -a], [1, 1]], modulus)
    adjugate = ResidueMatrix([[1, a], [-1, -b]], modulus)
    companion = ResidueMatrix([[0, -a * b], [1, a + b]], modulus)
    if c @ ResidueMatrix([[a, 0], [0, b]], modulus) @ inverse_2x2(c) != companion:
        raise ModformsError("C не сопрягает diag(alpha, beta) в сопровождающую матрицу")  # pragma: no cover
    # (alpha - beta) C^-1 = adj(C), поэтому образ целый
    value = c @ ResidueMatrix(H, modulus) @ adjugate
    data = value.data
    sigma = ((int(data[0, 0]), int(data[0, 1])), (int(data[1, 0]), -int(data[0, 0])))
    return CocycleGen("(alpha-beta)ChC^-1", sigma=sigma), c


UPPER_FAMILY = {"sigma": "(l, *; 0, 1)", "tau": "(1, *; 0, 1)"}


def plan_for(
    case: LocalCase,
    eigenvalues: Optional[Tuple[ResidueLike, ResidueLike, PrimePowerModulus]] = None,
    v_element: Optional[CocycleGen] = None,
) -> PlanEntry:
    """
    Семейство C_l и подпространство N_l для локального случая.

    Args:
        case: Локальный случай (l != p)
        eigenvalues: (alpha, beta, модуль) для ветви главной серии без рациональной
            диагонализации
        v_element: Элемент v для неразветвленного скалярного случая

    Returns:
        PlanEntry; |N_basis| = d1 - d2
    """
    residual = case.residual
    one = case.ell_class == EllClass.ONE
    minus_one = case.ell_class == EllClass.MINUS_ONE
    notes: List[str] = []

    if residual.kind == ResidualKind.PRINCIPAL_SERIES and residual.phi_ramified:
        if not one:
            entry = PlanEntry(case, {"C": "все деформации", "sigma": "(phi, 0; 0, 1)"}, [h_cocycle()])
        elif eigenvalues is None:
            family = {"C": "diag(psi1*gamma, psi2*gamma^-1), gamma неразветвлен"}
            entry = PlanEntry(case, family, [h_cocycle()])
        else:
            generator, c = conjugated_h(*eigenvalues)
            family = {
                "C": "C diag(psi1*gamma, psi2*gamma^-1) C^-1",
                "conjugator": str(c.to_lists()),
            }
            entry = PlanEntry(case, family, [generator])
        notes.append("набор lambda*h*psi_s не моделируется")
    elif residual.kind == ResidualKind.STEINBERG:
        if one:
            entry = PlanEntry(case, dict(UPPER_FAMILY), [j_cocycle()])
        else:
            entry = PlanEntry(case, {"C": "{rho_l}"}, [])
            if minus_one:
                notes.append("N = {0}, корректировка любым элементом H^1")
    elif residual.kind == ResidualKind.INDUCED:
        entry = PlanEntry(case, {"C": "{rho_l}"}, [])
    elif case.shape == FrobShape.SCALAR:
        v = v_element or CocycleGen("v", symbolic=True)
        entry = PlanEntry(
            case,
            dict(UPPER_FAMILY),
            [CocycleGen("u1", sigma=E12), CocycleGen("u2", tau=E12), v],
        )
        if v_element is None:
            notes.append("v задается lemma_v_element по данным rho_m")
    elif case.shape in (FrobShape.REGULAR, FrobShape.UNIPOTENT):
        entry = PlanEntry(case, {"sigma": "rho_l(sigma)", "tau": "(1, *; 0, 1)"}, [u_cocycle()])
    else:
        return delegated_plan(reason="случай не покрыт таблицей: делегировано")

    entry.notes.extend(notes)
    triple = dims(case)
    if len(entry.basis) != triple.d1 - triple.d2:
        raise ModformsError(  # pragma: no cover
            f"|N| = {len(entry.basis)}, ожидалось d1 - d2 = {triple.d1 - triple.d2}"
        )
    return entry


def aux_plan(q: int) -> PlanEntry:
    """План во вспомогательном простом q: N_q = <u>, семейство (q, p*y; 0, 1), (1, p*x; 0, 1)."""
    triple = aux_case_dims()
    entry = PlanEntry(
        case=None,
        family={"sigma": f"({q}, p*y; 0, 1)", "tau": "(1, p*x; 0, 1)"},
        basis=[u_cocycle()],
        notes=[f"q = {q}"],
    )
    if len(entry.basis) != triple.d1 - triple.d2:
        raise ModformsError("размер N_q не равен d1 - d2")  # pragma: no cover
    return entry


def in_upper_family(rho: TameLocalData) -> bool:
    """rho(sigma) = (l, *; 0, 1) и rho(tau) = (1, *; 0, 1)."""
    s, t = rho.sigma.data, rho.tau.data
    ell = rho.ell % rho.modulus.order
    return (
        s[0, 0] == ell and s[1, 0] == 0 and s[1, 1] == 1
        and t[0, 0] == 1 and t[1, 0] == 0 and t[1, 1] == 1
    )


@dataclass
class LemmaVResult:
    """Элемент v, сопрягающая матрица C = I + p*gamma*E21 и номер случая (1..7)."""

    v: CocycleGen
    conjugator: ResidueMatrix
    case: int
    gamma: int


# (минимальные величины) -> (номер случая, ведущая величина)
_VALUATION_CASES = {
    frozenset({"y"}): (1, "y"),
    frozenset({"x"}): (2, "x"),
    frozenset({"l"}): (3, "l"),
    frozenset({"y", "l"}): (4, "l"),
    frozenset({"x", "y"}): (5, "x"),
    frozenset({"x", "l"}): (6, "l"),
    frozenset({"x", "y", "l"}): (7, "l"),
}

# знак ведущего условия: gamma*(l-1) = -p^(m-2), gamma*x = gamma*y = +p^(m-2)
_PIVOT_SIGN = {"l": -1, "x": 1, "y": 1}
_GENERATORS = {"l": G1, "x": G2, "y": G3}


def lemma_v_element(
    x: ResidueLike, y: ResidueLike, ell: int, modulus: PrimePowerModulus
) -> LemmaVResult:
    """
    Элемент v и матрица C с C^-1 rho_m C = (1 + p^(m-1) v) rho_m.

    Случай выбирается по нормированиям x, y и l - 1 (по модулю p^m). Для
    C = (1, 0; p*gamma, 1) условия по модулю p^(m-1):
    gamma*(l-1) = -c1*p^(m-2), gamma*x = c2*p^(m-2), gamma*y = c3*p^(m-2),
    где v = c1*g1 + c2*g2 + c3*g3. gamma нормируется по ведущей величине
    (минимальное нормирование e), остальные коэффициенты - отношения lambda
    при равных нормированиях и ноль при больших. В четвертом случае условие
    gamma*(l-1) = -p^(m-2) прочитано по аналогии с соседними случаями.

    Raises:
        ModformsError: Если y = 0, l != 1 mod p или e > m - 2
    """
    p, m = modulus.p, modulus.n
    q = modulus.order
    values = {"x": int(x) % q, "y": int(y) % q, "l": (ell - 1) % q}
    if values["y"] == 0:
        raise ModformsError("y = 0: элемент v не определен")
    if values["l"] % p != 0:
        raise ModformsError(f"l = {ell} != 1 mod {p}")
    valuations = {key: modulus.valuation(v) for key, v in values.items()}
    e = min(valuations.values())
    minimal = frozenset(key for key, v in valuations.items() if v == e)
    case, pivot = _VALUATION_CASES[minimal]
    if e > m - 2:
        raise ModformsError(f"нормирование {e} больше m - 2 = {m - 2}")

    small = p ** (m - 1)
    unit = values[pivot] // p**e
    sign = _PIVOT_SIGN[pivot]
    gamma = (sign * p ** (m - 2 - e) * pow(unit, -1, small)) % small

    terms = []
    for key in ("l", "x", "y"):
        product = (gamma * values[key]) % small
        coefficient = (product // p ** (m - 2)) % p
        if key == "l":
            coefficient = (-coefficient) % p
        if coefficient:
            terms.append((_signed(coefficient, p), _GENERATORS[key]))
    v = CocycleGen.combine("v", terms)
    conjugator = ResidueMatrix([[1, 0], [p * gamma, 1]], modulus)
    log.debug(f"lemma v: случай {case}, gamma = {gamma}, нормирования {valuations}")
    return LemmaVResult(v=v, conjugator=conjugator, case=case, gamma=gamma)


def _signed(c: int, p: int) -> int:
    return c - p if c > p // 2 else c


def verify_adjustment(
    rho_m: TameLocalData, v: CocycleGen, conjugator: ResidueMatrix, m: int
) -> bool:
    """
    Проверяет C^-1 rho_m(g) C = (1 + p^(m-1) v(g)) rho_m(g) для g = sigma, tau по модулю p^m.

    Raises:
        ShapeError: Если rho_m не имеет вида ((l, x; 0, 1), (1, y; 0, 1)) или модуль не p^m
    """
    modulus = rho_m.modulus
    if modulus.n != m or m < 2:
        raise ShapeError(f"ожидаются данные по модулю p^{m}, получено {modulus}")
    if not in_upper_family(rho_m):
        raise ShapeError("rho_m не лежит в семействе ((l, *; 0, 1), (1, *; 0, 1))")
    if conjugator.modulus != modulus:
        raise ShapeError("C над другим модулем")
    c_inv = inverse_2x2(conjugator)
    scale = modulus.p ** (m - 1)
    identity = ResidueMatrix.identity(2, modulus)
    for generator, image in (("sigma", rho_m.sigma), ("tau", rho_m.tau)):
        lhs = c_inv @ image @ conjugator
        rhs = (identity + v.value(generator, modulus).scale(scale)) @ image
        if lhs != rhs:
            return False
    return True


def cq_membership(data: TameLocalData, q: int) -> bool:
    """rho(tau_q) = (1, p*x; 0, 1) и rho(sigma_q) = (q, p*y; 0, 1) по модулю p^n."""
    if data.ell != q:
        return False
    p, order = data.modulus.p, data.modulus.order
    s, t = data.sigma.data, data.tau.data
    return bool(
        s[0, 0] == q % order and s[1, 0] == 0 and s[1, 1] == 1 and s[0, 1] % p == 0
        and t[0, 0] == 1 and t[1, 0] == 0 and t[1, 1] == 1 and t[0, 1] % p == 0
    )
