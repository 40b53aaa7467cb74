"""Точная арифметика в Z/p^n: вычеты, матрицы, форма Хауэлла."""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from sympy import isprime, n_order
from sympy.ntheory import sqrt_mod

from app.modforms.errors import ModformsError, NotSplitError, ShapeError

# Выше этого модуля элементы хранятся как объекты Python (длинная арифметика)
INT64_LIMIT = 2**20


@dataclass(frozen=True)
class PrimePowerModulus:
    """Модуль p^n с простым p >= 5."""

    p: int
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ModformsError(f"показатель должен быть >= 1, получено {self.n}")
        if self.p < 5 or not isprime(self.p):
            raise ModformsError(f"ожидается простое p >= 5, получено {self.p}")

    @property
    def order(self) -> int:
        """Число p^n."""
        return self.p**self.n

    @property
    def dtype(self):
        return np.int64 if self.order <= INT64_LIMIT else object

    def residue(self, value: int) -> "ResidueInt":
        """Канонический вычет value по модулю p^n."""
        return ResidueInt(int(value) % self.order, self)

    def valuation(self, value: int) -> int:
        """
        p-адическое нормирование вычета.

        Returns:
            Число из [0, n]; n ровно для нуля
        """
        value = int(value) % self.order
        if value == 0:
            return self.n
        v = 0
        while value % self.p == 0:
            value //= self.p
            v += 1
        return v

    def with_exponent(self, n: int) -> "PrimePowerModulus":
        return PrimePowerModulus(self.p, n)

    def __str__(self) -> str:
        return f"{self.p}^{self.n}"


@dataclass(frozen=True)
class ResidueInt:
    """Элемент Z/p^n в канонической форме [0, p^n)."""

    value: int
    modulus: PrimePowerModulus

    def _coerce(self, other) -> int:
        if isinstance(other, ResidueInt):
            if other.modulus != self.modulus:
                raise ModformsError(f"разные модули: {self.modulus} и {other.modulus}")
            return other.value
        return int(other)

    def __add__(self, other) -> "ResidueInt":
        return self.modulus.residue(self.value + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other) -> "ResidueInt":
        return self.modulus.residue(self.value - self._coerce(other))

    def __rsub__(self, other) -> "ResidueInt":
        return self.modulus.residue(self._coerce(other) - self.value)

    def __mul__(self, other) -> "ResidueInt":
        return self.modulus.residue(self.value * self._coerce(other))

    __rmul__ = __mul__

    def __neg__(self) -> "ResidueInt":
        return self.modulus.residue(-self.value)

    def __pow__(self, k: int) -> "ResidueInt":
        if k < 0:
            return self.inverse() ** (-k)
        return self.modulus.residue(pow(self.value, k, self.modulus.order))

    def __int__(self) -> int:
        return self.value

    def inverse(self) -> "ResidueInt":
        if not self.is_unit:
            raise ModformsError(f"{self.value} не обратим по модулю {self.modulus}")
        return self.modulus.residue(pow(self.value, -1, self.modulus.order))

    @property
    def val(self) -> int:
        return self.modulus.valuation(self.value)

    @property
    def is_unit(self) -> bool:
        return self.value % self.modulus.p != 0

    def unit_part(self) -> "ResidueInt":
        """Единица u с self = u * p^val по модулю p^(n - val)."""
        if self.value == 0:
            raise ModformsError("у нуля нет единичной части")
        return self.modulus.residue(self.value // self.modulus.p**self.val)

    def __repr__(self) -> str:
        return f"{self.value} mod {self.modulus}"


ResidueLike = Union[ResidueInt, int]


def _as_residue(x: ResidueLike, modulus: PrimePowerModulus) -> ResidueInt:
    if isinstance(x, ResidueInt):
        if x.modulus != modulus:
            raise ModformsError(f"разные модули: {x.modulus} и {modulus}")
        return x
    return modulus.residue(x)


class ResidueMatrix:
    """
    Матрица над Z/p^n.

    Элементы хранятся в numpy-массиве в канонической форме; для больших модулей
    используется dtype=object.
    """

    def __init__(self, data, modulus: PrimePowerModulus):
        array = np.array(data, dtype=modulus.dtype)
        if array.ndim != 2:
            if array.size == 0:
                array = array.reshape(0, 0)
            else:
                raise ShapeError(f"ожидается двумерная матрица, получено ndim={array.ndim}")
        self.data = array % modulus.order
        self.modulus = modulus

    @classmethod
    def identity(cls, size: int, modulus: PrimePowerModulus) -> "ResidueMatrix":
        return cls(np.eye(size, dtype=np.int64), modulus)

    @classmethod
    def zeros(cls, rows: int, cols: int, modulus: PrimePowerModulus) -> "ResidueMatrix":
        return cls(np.zeros((rows, cols), dtype=np.int64), modulus)

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    def __getitem__(self, index: Tuple[int, int]) -> ResidueInt:
        return self.modulus.residue(self.data[index])

    def _check(self, other: "ResidueMatrix"):
        if other.modulus != self.modulus:
            raise ModformsError(f"разные модули: {self.modulus} и {other.modulus}")

    def __add__(self, other: "ResidueMatrix") -> "ResidueMatrix":
        self._check(other)
        return ResidueMatrix(self.data + other.data, self.modulus)

    def __sub__(self, other: "ResidueMatrix") -> "ResidueMatrix":
        self._check(other)
        return ResidueMatrix(self.data - other.data, self.modulus)

    def __matmul__(self, other: "ResidueMatrix") -> "ResidueMatrix":
        self._check(other)
        if self.cols != other.rows:
            raise ShapeError(f"несогласованные размеры {self.data.shape} и {other.data.shape}")
        return ResidueMatrix(matmul_mod(self.data, other.data, self.modulus), self.modulus)

    def scale(self, c: ResidueLike) -> "ResidueMatrix":
        return ResidueMatrix(self.data * int(c), self.modulus)

    def shift(self, c: ResidueLike) -> "ResidueMatrix":
        """Матрица self - c * I (квадратная)."""
        if self.rows != self.cols:
            raise ShapeError("сдвиг определен только для квадратных матриц")
        out = self.data.copy()
        idx = np.arange(self.rows)
        out[idx, idx] = out[idx, idx] - int(c)
        return ResidueMatrix(out, self.modulus)

    def transpose(self) -> "ResidueMatrix":
        return ResidueMatrix(self.data.T, self.modulus)

    def reduce(self, modulus: PrimePowerModulus) -> "ResidueMatrix":
        """Редукция к меньшему модулю того же простого."""
        if modulus.p != self.modulus.p or modulus.n > self.modulus.n:
            raise ModformsError(f"нельзя редуцировать {self.modulus} к {modulus}")
        return ResidueMatrix(np.array(self.data, dtype=object) % modulus.order, modulus)

    def to_lists(self) -> List[List[int]]:
        return [[int(x) for x in row] for row in self.data]

    def __eq__(self, other) -> bool:
        if not isinstance(other, ResidueMatrix):
            return NotImplemented
        return self.modulus == other.modulus and np.array_equal(self.data, other.data)

    def __repr__(self) -> str:
        return f"ResidueMatrix({self.to_lists()}, mod {self.modulus})"


def matmul_mod(a: np.ndarray, b: np.ndarray, modulus: PrimePowerModulus) -> np.ndarray:
    """Произведение матриц по модулю p^n без переполнения."""
    q = modulus.order
    if a.shape[0] == 0 or b.shape[1] == 0 or a.shape[1] == 0:
        return np.zeros((a.shape[0], b.shape[1]), dtype=modulus.dtype)
    if modulus.dtype is object or a.dtype == object or b.dtype == object:
        return np.dot(np.array(a, dtype=object), np.array(b, dtype=object)) % q
    bound = int(np.abs(a).max()) * int(np.abs(b).max()) * a.shape[1]
    if bound < 2**52:
        product = np.rint(a.astype(np.float64) @ b.astype(np.float64)).astype(np.int64)
        return product % q
    return (a.astype(np.int64) @ b.astype(np.int64)) % q


def _valuations(values: np.ndarray, modulus: PrimePowerModulus) -> np.ndarray:
    """Нормирования ненулевых вычетов (векторно)."""
    vals = np.zeros(len(values), dtype=np.int64)
    for k in range(1, modulus.n):
        vals += (values % modulus.p**k == 0).astype(np.int64)
    return vals


@dataclass
class HowellForm:
    """Форма Хауэлла: строки, столбцы ведущих элементов и их нормирования."""

    rows: np.ndarray
    pivot_cols: List[int]
    pivot_vals: List[int]
    modulus: PrimePowerModulus

    @property
    def length(self) -> int:
        """Длина модуля: log_p от числа элементов."""
        return sum(self.modulus.n - e for e in self.pivot_vals)

    @property
    def is_free(self) -> bool:
        return all(e == 0 for e in self.pivot_vals)


def howell_form(data, modulus: PrimePowerModulus, cols: Optional[int] = None) -> HowellForm:
    """
    Каноническая форма Хауэлла модуля, порожденного строками матрицы.

    Ведущий элемент каждой строки равен p^e, элементы над ним приведены в [0, p^e).
    При e > 0 строка, умноженная на p^(n-e), добавляется к оставшимся строкам,
    так что строки с нулями в первых j столбцах порождают всех таких элементов модуля.

    Args:
        data: Матрица (список строк или numpy-массив)
        modulus: Модуль p^n
        cols: Число столбцов для пустого входа

    Returns:
        HowellForm
    """
    q, p, n = modulus.order, modulus.p, modulus.n
    work = np.array(data, dtype=modulus.dtype)
    if work.size == 0:
        width = cols if cols is not None else (work.shape[1] if work.ndim == 2 else 0)
        return HowellForm(np.zeros((0, width), dtype=modulus.dtype), [], [], modulus)
    work = work % q
    width = work.shape[1]
    work = work[(work != 0).any(axis=1)]

    pivot_rows = []
    pivot_cols: List[int] = []
    pivot_vals: List[int] = []
    for j in range(width):
        if work.shape[0] == 0:
            break
        column = work[:, j]
        nonzero = np.nonzero(column != 0)[0]
        if nonzero.size == 0:
            continue
        vals = _valuations(column[nonzero], modulus)
        k = int(nonzero[int(np.argmin(vals))])
        e = int(vals.min())
        pe = p**e
        unit = int(work[k, j]) // pe
        pivot = (work[k] * pow(unit, -1, q)) % q
        rest = np.delete(work, k, axis=0)
        factors = rest[:, j] // pe
        rest = (rest - np.outer(factors, pivot)) % q
        if e > 0:
            annihilated = (pivot * p ** (n - e)) % q
            if (annihilated != 0).any():
                rest = np.vstack([rest, annihilated[None, :]])
        work = rest[(rest != 0).any(axis=1)] if rest.shape[0] else rest
        pivot_rows.append(pivot)
        pivot_cols.append(j)
        pivot_vals.append(e)

    if not pivot_rows:
        return HowellForm(np.zeros((0, width), dtype=modulus.dtype), [], [], modulus)
    rows = np.array(pivot_rows, dtype=modulus.dtype)
    for i, (j, e) in enumerate(zip(pivot_cols, pivot_vals)):
        if i == 0:
            continue
        factors = rows[:i, j] // p**e
        rows[:i] = (rows[:i] - np.outer(factors, rows[i])) % q
    return HowellForm(rows, pivot_cols, pivot_vals, modulus)


def left_kernel(data: np.ndarray, modulus: PrimePowerModulus) -> HowellForm:
    """Форма Хауэлла модуля {x : x * A = 0}."""
    a = np.array(data, dtype=modulus.dtype)
    r, c = a.shape
    augmented = np.hstack([a % modulus.order, np.eye(r, dtype=modulus.dtype)])
    form = howell_form(augmented, modulus, cols=r + c)
    keep = [i for i, j in enumerate(form.pivot_cols) if j >= c]
    return HowellForm(
        form.rows[keep][:, c:] if keep else np.zeros((0, r), dtype=modulus.dtype),
        [form.pivot_cols[i] - c for i in keep],
        [form.pivot_vals[i] for i in keep],
        modulus,
    )


def intersect(a: np.ndarray, b: np.ndarray, modulus: PrimePowerModulus) -> HowellForm:
    """Пересечение двух подмодулей, заданных порождающими строками."""
    a = np.array(a, dtype=modulus.dtype).reshape(-1, a.shape[-1])
    b = np.array(b, dtype=modulus.dtype).reshape(-1, a.shape[-1])
    width = a.shape[1]
    if a.shape[0] == 0 or b.shape[0] == 0:
        return howell_form(np.zeros((0, width), dtype=modulus.dtype), modulus, cols=width)
    top = np.hstack([a, a])
    bottom = np.hstack([b, np.zeros_like(b)])
    form = howell_form(np.vstack([top, bottom]), modulus, cols=2 * width)
    keep = [i for i, j in enumerate(form.pivot_cols) if j >= width]
    return HowellForm(
        form.rows[keep][:, width:] if keep else np.zeros((0, width), dtype=modulus.dtype),
        [form.pivot_cols[i] - width for i in keep],
        [form.pivot_vals[i] for i in keep],
        modulus,
    )


def howell_kernel(m: ResidueMatrix) -> List[Tuple[ResidueInt, ...]]:
    """
    Ядро {v : m * v = 0} в форме Хауэлла.

    Args:
        m: Матрица над Z/p^n

    Returns:
        Порождающие ядра; пустой список для тривиального ядра
    """
    form = left_kernel(m.data.T, m.modulus)
    return [tuple(m.modulus.residue(x) for x in row) for row in form.rows]


def hensel_sqrt(u: ResidueLike, modulus: Optional[PrimePowerModulus] = None) -> ResidueInt:
    """
    Квадратный корень из u = 1 mod p на ветви r = 1 mod p.

    Raises:
        ModformsError: если u не сравнимо с 1 по модулю p
    """
    if modulus is None:
        if not isinstance(u, ResidueInt):
            raise ModformsError("для целого аргумента нужен модуль")
        modulus = u.modulus
    u = _as_residue(u, modulus)
    if u.value % modulus.p != 1 % modulus.p:
        raise ModformsError(f"{u.value} не сравнимо с 1 по модулю {modulus.p}")
    roots = sqrt_mod(u.value, modulus.order, all_roots=True)
    for r in roots:
        if r % modulus.p == 1:
            return modulus.residue(r)
    raise ModformsError(f"корень из {u.value} не найден")  # pragma: no cover


def _lift_simple_root(r: int, a1: int, a0: int, modulus: PrimePowerModulus) -> int:
    q = modulus.order
    for _ in range(modulus.n):
        f = (r * r + a1 * r + a0) % q
        df = (2 * r + a1) % q
        r = (r - f * pow(df, -1, q)) % q
    return r


def quadratic_roots(
    a1: ResidueLike, a0: ResidueLike, modulus: Optional[PrimePowerModulus] = None
) -> Tuple[ResidueInt, ResidueInt]:
    """
    Корни x^2 + a1*x + a0, поднятые по Гензелю с F_p до Z/p^n.

    Returns:
        Пара корней по возрастанию канонических представителей

    Raises:
        NotSplitError: если редукция по модулю p неприводима или имеет кратный корень
    """
    modulus = modulus or getattr(a1, "modulus", None) or getattr(a0, "modulus", None)
    if modulus is None:
        raise ModformsError("для целых аргументов нужен модуль")
    a1r, a0r = _as_residue(a1, modulus), _as_residue(a0, modulus)
    p = modulus.p
    disc = (a1r.value**2 - 4 * a0r.value) % p
    if disc == 0:
        raise NotSplitError(f"x^2 + {a1r.value}x + {a0r.value}: кратный корень по модулю {p}")
    s = sqrt_mod(disc, p)
    if s is None:
        raise NotSplitError(f"x^2 + {a1r.value}x + {a0r.value} неприводим по модулю {p}")
    half = pow(2, -1, p)
    roots_mod_p = [((-a1r.value + s) * half) % p, ((-a1r.value - s) * half) % p]
    lifted = sorted(_lift_simple_root(r, a1r.value, a0r.value, modulus) for r in roots_mod_p)
    return modulus.residue(lifted[0]), modulus.residue(lifted[1])


def mult_order(a: ResidueLike, modulus: Optional[PrimePowerModulus] = None) -> int:
    """Мультипликативный порядок обратимого вычета."""
    modulus = modulus or getattr(a, "modulus", None)
    if modulus is None:
        raise ModformsError("для целого аргумента нужен модуль")
    a = _as_residue(a, modulus)
    if not a.is_unit:
        raise ModformsError(f"{a.value} делится на {modulus.p}")
    return int(n_order(a.value, modulus.order))


def modulus_exponent_bound(divides_p: bool, e: int, p: int) -> int:
    """
    Верхняя граница показателя простого в модуле (кондукторе) расширения.

    Args:
        divides_p: Лежит ли простое над p
        e: Индекс ветвления
        p: Простое

    Returns:
        1, если простое не над p, иначе floor(p*e/(p-1)) + 1
    """
    if e < 1:
        raise ModformsError(f"индекс ветвления должен быть >= 1, получено {e}")
    if not divides_p:
        return 1
    return (p * e) // (p - 1) + 1


def module_length(rows: Sequence[Sequence[int]], modulus: PrimePowerModulus) -> int:
    """Длина подмодуля, порожденного строками."""
    array = np.array(rows, dtype=modulus.dtype)
    if array.size == 0:
        return 0
    return howell_form(array, modulus).length
