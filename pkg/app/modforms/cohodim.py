"""
Размерности локальных когомологий d_i = dim H^i(G_l, Ad0) при l != p.

Таблица хранится данными; для неразветвленных случаев есть независимый
оракул через ядра Ad0(Frob) - 1 и Ad0(Frob) - l.
"""

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from app.config import settings
from app.modforms.arith import PrimePowerModulus, howell_form
from app.modforms.errors import InconsistentCaseError, InputError, ModformsError, ShapeError
from app.modforms.localtypes import EllClass, FrobShape, ResidualKind, ResidualLocalType


@dataclass(frozen=True)
class DimTriple:
    """Тройка (d0, d1, d2) с d1 = d0 + d2."""

    d0: int
    d1: int
    d2: int

    def __post_init__(self):
        if min(self.d0, self.d1, self.d2) < 0:
            raise InconsistentCaseError(f"отрицательная размерность в {self.as_tuple()}")
        if self.d1 != self.d0 + self.d2:
            raise InconsistentCaseError(f"нарушена эйлерова характеристика: {self.as_tuple()}")

    def as_tuple(self) -> Tuple[int, int, int]:
        return self.d0, self.d1, self.d2

    def to_json(self) -> dict:
        return {"d0": self.d0, "d1": self.d1, "d2": self.d2}


@dataclass(frozen=True)
class LocalCase:
    """
    Описание локального случая.

    Attributes:
        residual: Вычетный тип
        ell_class: Класс l по модулю p
        alpha_ell: Отношение собственных значений Фробениуса alpha = l mod p
        alpha_ell_inverse: alpha = l^-1 mod p
    """

    residual: ResidualLocalType
    ell_class: EllClass
    alpha_ell: bool = False
    alpha_ell_inverse: bool = False

    def __post_init__(self):
        flags = self.alpha_ell or self.alpha_ell_inverse
        if flags and self.shape != FrobShape.REGULAR:
            raise InconsistentCaseError("соотношения для alpha заданы только для регулярного Фробениуса")
        if flags and self.ell_class == EllClass.ONE:
            raise InconsistentCaseError("alpha = l = 1 противоречит регулярности Фробениуса")
        if self.ell_class == EllClass.MINUS_ONE and self.alpha_ell != self.alpha_ell_inverse:
            raise InconsistentCaseError("при l = -1 условия alpha = l и alpha = l^-1 совпадают")
        if self.alpha_ell and self.alpha_ell_inverse and self.ell_class != EllClass.MINUS_ONE:
            raise InconsistentCaseError("alpha = l = l^-1 возможно только при l = -1")

    @property
    def shape(self):
        if self.residual.kind == ResidualKind.UNRAMIFIED_TWIST_LINE:
            return FrobShape.UNIPOTENT
        return self.residual.shape

    @classmethod
    def for_prime(
        cls, residual: ResidualLocalType, ell: int, p: int, alpha: Optional[int] = None
    ) -> "LocalCase":
        """Случай по простому l и (для регулярного Фробениуса) отношению alpha mod p."""
        if ell % p == 0:
            raise ModformsError(f"l = p = {p}")
        ell_class = EllClass.of(ell, p)
        if alpha is None:
            return cls(residual, ell_class)
        return cls(
            residual,
            ell_class,
            alpha_ell=(alpha - ell) % p == 0,
            alpha_ell_inverse=(alpha * ell - 1) % p == 0,
        )

    def to_json(self) -> dict:
        return {
            "residual": self.residual.to_json(),
            "ell_class": self.ell_class.value,
            "alpha_ell": self.alpha_ell,
            "alpha_ell_inverse": self.alpha_ell_inverse,
        }

    @classmethod
    def from_json(cls, payload: dict) -> "LocalCase":
        """Разбор {"residual": {...}, "ell_class": "1"} или {"residual": ..., "ell": 31, "p": 5, "alpha": 2}."""
        try:
            residual = ResidualLocalType.from_json(payload["residual"])
            if "ell" in payload:
                alpha = payload.get("alpha")
                return cls.for_prime(
                    residual,
                    int(payload["ell"]),
                    int(payload["p"]),
                    int(alpha) if alpha is not None else None,
                )
            return cls(
                residual,
                EllClass(str(payload["ell_class"])),
                alpha_ell=bool(payload.get("alpha_ell", False)),
                alpha_ell_inverse=bool(payload.get("alpha_ell_inverse", False)),
            )
        except (KeyError, TypeError, ValueError) as e:
            if isinstance(e, ModformsError):
                raise
            raise InputError(f"некорректный локальный случай: {e}") from e


# (группа случаев, условие) -> (d0, d1, d2)
DIMENSION_TABLE: Dict[Tuple[str, str], Tuple[int, int, int]] = {
    ("ramified_principal_series", "l=1"): (1, 2, 1),
    ("ramified_principal_series", "l!=1"): (1, 1, 0),
    ("steinberg", "l=1"): (1, 2, 1),
    ("steinberg", "l=-1"): (0, 1, 1),
    ("steinberg", "l!=+-1"): (0, 0, 0),
    ("induced", "l=-1, M unramified"): (0, 1, 1),
    ("induced", "otherwise"): (0, 0, 0),
    ("unramified_scalar", "l=1"): (3, 6, 3),
    ("unramified_scalar", "l!=1"): (3, 3, 0),
    ("unramified_regular", "l=-1, l=alpha^+-1"): (1, 3, 2),
    ("unramified_regular", "l=-1, l!=alpha^+-1"): (1, 1, 0),
    ("unramified_regular", "l!=-1, l in {alpha, alpha^-1, 1}"): (1, 2, 1),
    ("unramified_regular", "l!=-1, otherwise"): (1, 1, 0),
    ("unramified_unipotent", "l=1"): (1, 2, 1),
    ("unramified_unipotent", "l!=1"): (1, 1, 0),
}


def case_key(case: LocalCase) -> Tuple[str, str]:
    """Ключ таблицы размерностей для случая."""
    residual, cls = case.residual, case.ell_class
    one = cls == EllClass.ONE
    minus_one = cls == EllClass.MINUS_ONE
    if residual.kind == ResidualKind.PRINCIPAL_SERIES and residual.phi_ramified:
        return "ramified_principal_series", "l=1" if one else "l!=1"
    if residual.kind == ResidualKind.STEINBERG:
        return "steinberg", "l=1" if one else ("l=-1" if minus_one else "l!=+-1")
    if residual.kind == ResidualKind.INDUCED:
        if minus_one and not residual.m_ramified:
            return "induced", "l=-1, M unramified"
        return "induced", "otherwise"
    shape = case.shape
    if shape is None:
        raise InconsistentCaseError(
            "для неразветвленной главной серии нужна форма Фробениуса (unramified_frob)"
        )
    if shape == FrobShape.SCALAR:
        return "unramified_scalar", "l=1" if one else "l!=1"
    if shape == FrobShape.UNIPOTENT:
        return "unramified_unipotent", "l=1" if one else "l!=1"
    hits_alpha = case.alpha_ell or case.alpha_ell_inverse
    if minus_one:
        return "unramified_regular", "l=-1, l=alpha^+-1" if hits_alpha else "l=-1, l!=alpha^+-1"
    if hits_alpha or one:
        return "unramified_regular", "l!=-1, l in {alpha, alpha^-1, 1}"
    return "unramified_regular", "l!=-1, otherwise"


def dims(case: LocalCase) -> DimTriple:
    """
    Размерности (d0, d1, d2) для локального случая.

    Raises:
        InconsistentCaseError: Если случай противоречив или не покрыт таблицей
    """
    return DimTriple(*DIMENSION_TABLE[case_key(case)])


def aux_case_dims() -> DimTriple:
    """Размерности во вспомогательном простом: (1, 2, 1)."""
    return DimTriple(1, 2, 1)


def flat_subspace_dim(p: int) -> int:
    """Размерность плоского подпространства в p = 5 (внешняя константа)."""
    if p != 5:
        raise ModformsError(f"размерность плоского подпространства известна только для p = 5, получено {p}")
    return settings.flat_subspace_dim_at_5


# Элементы F_p или F_{p^2} = F_p(s), s^2 = d: пары (a, b) = a + b*s
FieldElement = Tuple[int, int]
MatrixEntry = Union[int, Sequence[int]]


class QuadraticExtension:
    """Поле F_{p^2} = F_p(s) с s^2 = d, d - квадратичный невычет."""

    def __init__(self, p: int):
        self.p = p
        self.d = next(x for x in range(2, p) if pow(x, (p - 1) // 2, p) == p - 1)

    def embed(self, x: MatrixEntry) -> FieldElement:
        if isinstance(x, (int, np.integer)):
            return int(x) % self.p, 0
        a, b = x
        return int(a) % self.p, int(b) % self.p

    def mul(self, x: FieldElement, y: FieldElement) -> FieldElement:
        p, d = self.p, self.d
        return (x[0] * y[0] + d * x[1] * y[1]) % p, (x[0] * y[1] + x[1] * y[0]) % p

    def sub(self, x: FieldElement, y: FieldElement) -> FieldElement:
        return (x[0] - y[0]) % self.p, (x[1] - y[1]) % self.p

    def inverse(self, x: FieldElement) -> FieldElement:
        norm = (x[0] * x[0] - self.d * x[1] * x[1]) % self.p
        if norm == 0:
            raise ShapeError("деление на ноль в F_{p^2}")
        k = pow(norm, -1, self.p)
        return (x[0] * k) % self.p, (-x[1] * k) % self.p

    def block(self, x: FieldElement) -> List[List[int]]:
        """Матрица умножения на x в базисе (1, s)."""
        a, b = x
        return [[a, (self.d * b) % self.p], [b, a]]

    def sqrt(self, x: FieldElement):
        for a in range(self.p):
            for b in range(self.p):
                if self.mul((a, b), (a, b)) == x:
                    return a, b
        return None


def _kernel_dim(matrix: np.ndarray, p: int) -> int:
    modulus = PrimePowerModulus(p, 1)
    rank = howell_form(np.asarray(matrix, dtype=np.int64) % p, modulus, cols=matrix.shape[1]).length
    return matrix.shape[1] - rank


def dims_unramified_oracle(frob: Sequence[Sequence[MatrixEntry]], ell: int, p: int) -> Tuple[int, int]:
    """
    Оракул (d0, d2) для неразветвленного представления.

    Ad(F): X -> F X F^-1 на M_2 = скаляры + Ad0 строится над F_p (элементы F_{p^2}
    раскрываются в блоки 2x2), d0 = dim ker(Ad0(F) - 1), d2 = dim ker(Ad0(F) - l).

    Args:
        frob: Матрица Фробениуса; элементы - целые (F_p) или пары (a, b) = a + b*s (F_{p^2})
        ell: Простое l (используется l mod p)
        p: Характеристика

    Raises:
        ShapeError: Если матрица вырождена
    """
    field = QuadraticExtension(p)
    f = [[field.embed(x) for x in row] for row in frob]
    if len(f) != 2 or any(len(row) != 2 for row in f):
        raise ShapeError("ожидается матрица 2x2")
    det = field.sub(field.mul(f[0][0], f[1][1]), field.mul(f[0][1], f[1][0]))
    if det == (0, 0):
        raise ShapeError(f"вырожденная матрица Фробениуса {frob}")
    k = field.inverse(det)
    f_inv = [
        [field.mul(f[1][1], k), field.mul(field.sub((0, 0), f[0][1]), k)],
        [field.mul(field.sub((0, 0), f[1][0]), k), field.mul(f[0][0], k)],
    ]

    # vec(F X F^-1) = kron(F, F^-T) vec(X) для построчной развертки
    conj = np.zeros((8, 8), dtype=np.int64)
    for i in range(2):
        for j in range(2):
            for a in range(2):
                for b in range(2):
                    entry = field.mul(f[i][a], f_inv[b][j])
                    row, col = 2 * i + j, 2 * a + b
                    conj[2 * row : 2 * row + 2, 2 * col : 2 * col + 2] = field.block(entry)

    def eigen_dim(value: int) -> int:
        shifted = conj - np.eye(8, dtype=np.int64) * (value % p)
        return _kernel_dim(shifted, p) // 2

    scalar_hits_ell = 1 if ell % p == 1 else 0
    return eigen_dim(1) - 1, eigen_dim(ell) - scalar_hits_ell


def frobenius_case(frob: Sequence[Sequence[MatrixEntry]], ell: int, p: int) -> LocalCase:
    """Неразветвленный LocalCase по явной матрице Фробениуса над F_p или F_{p^2}."""
    field = QuadraticExtension(p)
    f = [[field.embed(x) for x in row] for row in frob]
    if f[0][1] == (0, 0) and f[1][0] == (0, 0) and f[0][0] == f[1][1]:
        return LocalCase.for_prime(ResidualLocalType.unramified(FrobShape.SCALAR), ell, p)
    trace = ((f[0][0][0] + f[1][1][0]) % p, (f[0][0][1] + f[1][1][1]) % p)
    det = field.sub(field.mul(f[0][0], f[1][1]), field.mul(f[0][1], f[1][0]))
    disc = field.sub(field.mul(trace, trace), field.mul((4, 0), det))
    if disc == (0, 0):
        return LocalCase.for_prime(ResidualLocalType.unramified(FrobShape.UNIPOTENT), ell, p)
    root = field.sqrt(disc)
    if root is None:
        raise ShapeError("собственные значения вне F_{p^2}")  # pragma: no cover
    half = (pow(2, -1, p), 0)
    e1 = field.mul(field.sub(trace, (p - root[0], p - root[1])), half)
    e2 = field.mul(field.sub(trace, root), half)
    ratio = field.mul(e1, field.inverse(e2))
    ell_f = field.embed(ell)
    ell_inv = field.inverse(ell_f)
    return LocalCase(
        ResidualLocalType.unramified(FrobShape.REGULAR),
        EllClass.of(ell, p),
        alpha_ell=ratio == ell_f,
        alpha_ell_inverse=ratio == ell_inv,
    )
