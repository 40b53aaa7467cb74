"""
Модулярные символы веса 2 для Γ0(N) над Z/p^n.

Символы Манина нумеруются точками P^1(Z/N); пространство - фактор свободного
модуля по соотношениям x + xS = 0 и x + xT + xT^2 = 0. Операторы Гекке T_l
строятся по матрицам Хейльбронна (множество Мереля), U_q - по смежным классам
[[1, j], [0, q]] с переводом символов {a, b} в символы Манина цепными дробями.
"""

from dataclasses import dataclass
from math import gcd
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np
from sympy import divisors, factorint, isprime, totient

from app.config import settings
from app.logger import log
from app.modforms.arith import (
    HowellForm,
    PrimePowerModulus,
    ResidueMatrix,
    howell_form,
    left_kernel,
    matmul_mod,
)
from app.modforms.errors import BoundExceededError, ModformsError, ShapeError

Cusp = Tuple[int, int]


def gcdex(a: int, b: int) -> Tuple[int, int, int]:
    """Возвращает (x, y, g), где g = gcd(a, b) и a*x + b*y == g."""
    if b == 0:
        if a < 0:
            return -1, 0, -a
        return 1, 0, a
    q, r = divmod(a, b)
    x, y, g = gcdex(b, r)
    return y, x - y * q, g


def lift_unit(n: int, d: int, a: int) -> int:
    """По делителю d числа n и единице a по модулю d поднимает a до единицы по модулю n."""
    u, v = 1, n
    g = gcd(v, d)
    while g > 1:
        u *= g
        v //= g
        g = gcd(v, g)
    x, y, _ = gcdex(u, v)
    return (u * x + a * y * v) % n


def lift_to_sl2z(c: int, d: int, level: int) -> Tuple[int, int, int, int]:
    """
    Поднимает (c : d) из P^1(Z/N) до матрицы [[a, b], [c', d']] из SL2(Z).

    Returns:
        Четверка (a, b, c', d') с a*d' - b*c' = 1 и (c', d') = (c, d) mod N
    """
    c0, d0 = c % level, d % level
    if c0 == 0:
        c0 = level
    t = 0
    while gcd(c0, d0 + t * level) != 1:
        t += 1
    d1 = d0 + t * level
    a, b, g = gcdex(d1, -c0)
    if g != 1:
        raise ModformsError(f"не удалось поднять ({c} : {d}) уровня {level}")  # pragma: no cover
    return a, b, c0, d1


def index_gamma0(level: int) -> int:
    """Индекс [SL2(Z) : Γ0(N)] = N * prod(1 + 1/l)."""
    result = level
    for ell in factorint(level):
        result = result // ell * (ell + 1)
    return result


def _chi_minus4(ell: int) -> int:
    return 0 if ell == 2 else (1 if ell % 4 == 1 else -1)


def _chi_minus3(ell: int) -> int:
    return 0 if ell == 3 else (1 if ell % 3 == 1 else -1)


def cusp_count(level: int) -> int:
    return sum(int(totient(gcd(d, level // d))) for d in divisors(level))


def genus_x0(level: int) -> int:
    """Род X0(N) по формуле через индекс, эллиптические точки и каспы."""
    primes = list(factorint(level))
    nu2 = 0 if level % 4 == 0 else int(np.prod([1 + _chi_minus4(ell) for ell in primes]))
    nu3 = 0 if level % 9 == 0 else int(np.prod([1 + _chi_minus3(ell) for ell in primes]))
    twelve_g = 12 + index_gamma0(level) - 3 * nu2 - 4 * nu3 - 6 * cusp_count(level)
    return twelve_g // 12


def sturm_bound(level: int, weight: int = 2) -> int:
    """Граница Штурма ceil(k * [SL2(Z) : Γ0(N)] / 12)."""
    if weight != 2:
        raise ModformsError(f"поддерживается только вес 2, получено {weight}")
    return -(-weight * index_gamma0(level) // 12)


class P1Index:
    """
    Представители P^1(Z/N) и нормализация (c : d) -> индекс.

    Для N <= settings.p1_table_limit нормализация - поиск в таблице N x N,
    иначе - каноническая форма пары и словарь.
    """

    def __init__(self, level: int):
        self.level = level
        self._units = np.array(
            [u % level for u in range(1, level + 1) if gcd(u, level) == 1], dtype=np.int64
        )
        self._table: Optional[np.ndarray] = None
        self._lookup: Dict[Tuple[int, int], int] = {}
        if level <= settings.p1_table_limit:
            self._table = np.full((level, level), -1, dtype=np.int32)
        self.representatives: List[Tuple[int, int]] = []
        for g in divisors(level):
            c = g % level
            for d in range(level):
                if gcd(gcd(c, d), level) != 1:
                    continue
                if self._find(c, d) >= 0:
                    continue
                self._register(c, d)
        expected = index_gamma0(level)
        if len(self.representatives) != expected:
            raise ModformsError(  # pragma: no cover
                f"P^1(Z/{level}): найдено {len(self.representatives)} точек, ожидалось {expected}"
            )

    def __len__(self) -> int:
        return len(self.representatives)

    def _register(self, c: int, d: int):
        idx = len(self.representatives)
        self.representatives.append((c, d))
        if self._table is not None:
            self._table[(self._units * c) % self.level, (self._units * d) % self.level] = idx
        else:
            self._lookup[self.canonical(c, d)] = idx

    def _find(self, c: int, d: int) -> int:
        if self._table is not None:
            return int(self._table[c % self.level, d % self.level])
        try:
            return self._lookup.get(self.canonical(c, d), -1)
        except ValueError:
            return -1

    def canonical(self, c: int, d: int) -> Tuple[int, int]:
        """Каноническая форма пары (алгоритм 8.29 из книги Стейна)."""
        level = self.level
        u, v = c % level, d % level
        if u == 0:
            if gcd(level, v) == 1:
                return 0, 1
            raise ValueError
        _, s, g = gcdex(level, u)
        if gcd(g, v) > 1:
            raise ValueError
        s = lift_unit(level, level // g, s)
        u, v = g, (s * v) % level
        if g == 1:
            return 1, v
        v = min((v * t) % level for t in range(1, level, level // g) if gcd(level, t) == 1)
        return g, v

    def index(self, c: int, d: int) -> int:
        """Индекс точки (c : d); -1, если пара не лежит в P^1(Z/N)."""
        return self._find(c, d)

    def index_many(self, cs: np.ndarray, ds: np.ndarray) -> np.ndarray:
        if self._table is not None:
            return self._table[np.asarray(cs) % self.level, np.asarray(ds) % self.level]
        flat = [self._find(int(c), int(d)) for c, d in zip(np.ravel(cs), np.ravel(ds))]
        return np.array(flat, dtype=np.int64).reshape(np.shape(cs))


def cusps_equivalent(first: Cusp, second: Cusp, level: int) -> bool:
    """Эквивалентность каспов u1/v1 и u2/v2 относительно Γ0(N)."""
    u1, v1 = first
    u2, v2 = second
    s1 = gcdex(u1, v1)[0]
    s2 = gcdex(u2, v2)[0]
    return (s1 * v2 - s2 * v1) % gcd(level, (v1 * v2) % level) == 0


def merel(n: int) -> Iterator[Tuple[int, int, int, int]]:
    """Матрицы (a, b, c, d) множества Мереля X_n."""
    for a in range(1, n + 1):
        for d in range((n + a - 1) // a, n + 2 - a):
            bc = a * d - n
            if bc == 0:
                for b in range(a):
                    yield a, b, 0, d
                for c in range(1, d):
                    yield a, 0, c, d
            else:
                for b in range((bc - 1) // (d - 1) + 1, a):
                    if bc % b == 0:
                        yield a, b, bc // b, d


def _convergent_symbols(num: int, den: int) -> List[Tuple[int, int]]:
    """
    Символы Манина (c, d) с {0, num/den} = сумма g_k{0, oo}.

    Слагаемое k соответствует паре подходящих дробей p_{k-1}/q_{k-1}, p_k/q_k
    и символу ((-1)^(k-1) q_k : q_{k-1}); k = -1 дает {0, oo} = (0 : 1).
    """
    if den == 0:
        return [(0, 1)]
    if num == 0:
        return []
    g = gcd(num, den)
    num, den = num // g, den // g
    if den < 0:
        num, den = -num, -den
    symbols = [(0, 1)]
    q_prev2, q_prev = 1, 0
    k = 0
    while True:
        a_k, rem = divmod(num, den)
        q_k = a_k * q_prev + q_prev2
        sign = 1 if k % 2 == 1 else -1
        symbols.append((sign * q_k, q_prev))
        if rem == 0:
            break
        num, den = den, rem
        q_prev2, q_prev = q_prev, q_k
        k += 1
    return symbols


@dataclass
class ManinSymbolSpace:
    """
    Пространство модулярных символов веса 2 уровня N над Z/p^n.

    Attributes:
        level: Уровень N
        modulus: Модуль коэффициентов
        p1: Точки P^1(Z/N)
        generators: Индексы точек P^1, образующих свободный фактор
        relation_matrix: Матрица mu x r: выражение каждого символа Манина через образующие
        relation_rank: Ранг матрицы соотношений после 2-членных соотношений
        cusps: Представители каспов, встретившихся в граничном отображении
        boundary: Матрица граничного отображения (каспы x r)
        cuspidal: Форма Хауэлла параболического подпространства (строки длины r)
    """

    level: int
    modulus: PrimePowerModulus
    p1: P1Index
    generators: List[int]
    relation_matrix: np.ndarray
    relation_rank: int
    cusps: List[Cusp]
    boundary: np.ndarray
    cuspidal: HowellForm

    @property
    def symbol_count(self) -> int:
        return len(self.p1)

    @property
    def dimension(self) -> int:
        return len(self.generators)

    @property
    def cuspidal_dimension(self) -> int:
        return self.cuspidal.rows.shape[0]

    @property
    def cuspidal_basis(self) -> np.ndarray:
        return self.cuspidal.rows

    def generator_pair(self, i: int) -> Tuple[int, int]:
        return self.p1.representatives[self.generators[i]]

    def symbol_vector(self, c: int, d: int) -> np.ndarray:
        """Координаты символа Манина (c : d) в образующих."""
        idx = self.p1.index(c, d)
        if idx < 0:
            raise ModformsError(f"({c} : {d}) не лежит в P^1(Z/{self.level})")
        return self.relation_matrix[idx]

    def modular_symbol(self, alpha: Cusp, beta: Cusp) -> np.ndarray:
        """Координаты символа {alpha, beta}; касп задается парой (числитель, знаменатель)."""
        counts = np.zeros(self.symbol_count, dtype=np.int64)
        self._accumulate(counts, beta, 1)
        self._accumulate(counts, alpha, -1)
        return matmul_mod(counts[None, :], self.relation_matrix, self.modulus)[0]

    def _accumulate(self, counts: np.ndarray, cusp: Cusp, sign: int):
        for c, d in _convergent_symbols(*cusp):
            counts[self.p1.index(c, d)] += sign

    def cuspidal_coordinates(self, vectors: np.ndarray) -> np.ndarray:
        """
        Координаты векторов параболического подпространства в базисе Хауэлла.

        Raises:
            ShapeError: Если вектор не лежит в параболическом подпространстве
        """
        vectors = np.atleast_2d(vectors) % self.modulus.order
        coords = vectors[:, self.cuspidal.pivot_cols]
        rebuilt = matmul_mod(coords, self.cuspidal_basis, self.modulus)
        if not np.array_equal(rebuilt, vectors):
            raise ShapeError(f"вектор не лежит в параболическом подпространстве уровня {self.level}")
        return coords

    def reduce(self, modulus: PrimePowerModulus) -> "ManinSymbolSpace":
        """Редукция пространства к меньшему модулю того же простого."""
        if modulus.p != self.modulus.p or modulus.n > self.modulus.n:
            raise ModformsError(f"нельзя редуцировать {self.modulus} к {modulus}")
        q = modulus.order
        return ManinSymbolSpace(
            level=self.level,
            modulus=modulus,
            p1=self.p1,
            generators=list(self.generators),
            relation_matrix=np.array(self.relation_matrix % q, dtype=modulus.dtype),
            relation_rank=self.relation_rank,
            cusps=list(self.cusps),
            boundary=np.array(self.boundary % q, dtype=modulus.dtype),
            cuspidal=howell_form(
                self.cuspidal.rows % q, modulus, cols=self.cuspidal.rows.shape[1]
            ),
        )


def _two_term_classes(p1: P1Index) -> Tuple[np.ndarray, np.ndarray, List[int]]:
    """Классы по 2-членным соотношениям: столбец и знак каждого символа."""
    mu = len(p1)
    column = np.full(mu, -1, dtype=np.int64)
    sign = np.zeros(mu, dtype=np.int64)
    free: List[int] = []
    for i, (c, d) in enumerate(p1.representatives):
        if column[i] >= 0 or sign[i] != 0:
            continue
        j = p1.index(d, -c)
        if j == i:
            continue
        column[i] = column[j] = len(free)
        sign[i], sign[j] = 1, -1
        free.append(i)
    return column, sign, free


def build_space(level: int, modulus: PrimePowerModulus) -> ManinSymbolSpace:
    """
    Строит пространство модулярных символов веса 2 уровня N над Z/p^n.

    Args:
        level: Уровень N (1 <= N <= settings.level_bound)
        modulus: Модуль коэффициентов

    Returns:
        ManinSymbolSpace с граничным отображением и параболическим подпространством

    Raises:
        BoundExceededError: Если уровень вне допустимых границ
    """
    if level < 1:
        raise ModformsError(f"уровень должен быть >= 1, получено {level}")
    if level > settings.level_bound:
        raise BoundExceededError(f"уровень {level} больше границы {settings.level_bound}")
    log.info(f"Построение модулярных символов уровня {level} по модулю {modulus}")

    p1 = P1Index(level)
    mu = len(p1)
    column, sign, free2 = _two_term_classes(p1)

    # 3-членные соотношения на классах 2-членных
    rows = []
    visited = np.zeros(mu, dtype=bool)
    for i, (c, d) in enumerate(p1.representatives):
        if visited[i]:
            continue
        j = p1.index(d, -c - d)
        k = p1.index(-c - d, c)
        orbit = [i, j, k]
        visited[orbit] = True
        row = np.zeros(len(free2), dtype=np.int64)
        for idx in orbit:
            if sign[idx] != 0:
                row[column[idx]] += sign[idx]
        if row.any():
            rows.append(row)

    width = len(free2)
    relations = howell_form(
        np.array(rows, dtype=np.int64).reshape(len(rows), width), modulus, cols=width
    )
    if not relations.is_free:
        raise ModformsError(f"неединичный ведущий элемент в соотношениях уровня {level}")
    pivots = set(relations.pivot_cols)
    free_cols = [j for j in range(width) if j not in pivots]

    q = modulus.order
    expression = np.zeros((width, len(free_cols)), dtype=modulus.dtype)
    for pos, j in enumerate(free_cols):
        expression[j, pos] = 1
    for row, j in zip(relations.rows, relations.pivot_cols):
        expression[j] = (-row[free_cols]) % q

    relation_matrix = np.zeros((mu, len(free_cols)), dtype=modulus.dtype)
    nonzero = np.nonzero(sign)[0]
    relation_matrix[nonzero] = (sign[nonzero, None] * expression[column[nonzero]]) % q
    generators = [free2[j] for j in free_cols]

    # граница: g{0, oo} -> [g(oo)] - [g(0)] = [a/c] - [b/d]
    cusps: List[Cusp] = []

    def cusp_index(cusp: Cusp) -> int:
        for pos, known in enumerate(cusps):
            if cusps_equivalent(cusp, known, level):
                return pos
        cusps.append(cusp)
        return len(cusps) - 1

    entries = []
    for col, idx in enumerate(generators):
        c, d = p1.representatives[idx]
        a, b, c1, d1 = lift_to_sl2z(c, d, level)
        entries.append((cusp_index((a, c1)), col, 1))
        entries.append((cusp_index((b, d1)), col, -1))
    boundary = np.zeros((len(cusps), len(generators)), dtype=modulus.dtype)
    for row_idx, col, value in entries:
        boundary[row_idx, col] = (boundary[row_idx, col] + value) % q

    cuspidal = left_kernel(boundary.T, modulus)
    if not cuspidal.is_free:
        raise ModformsError(f"параболическое подпространство уровня {level} не свободно")

    space = ManinSymbolSpace(
        level=level,
        modulus=modulus,
        p1=p1,
        generators=generators,
        relation_matrix=relation_matrix,
        relation_rank=len(relations.pivot_cols),
        cusps=cusps,
        boundary=boundary,
        cuspidal=cuspidal,
    )
    log.info(
        f"Уровень {level}: символов {mu}, размерность {space.dimension}, "
        f"параболическая {space.cuspidal_dimension}, каспов {len(cusps)}"
    )
    return space


@dataclass
class HeckeMatrix:
    """Оператор Гекке на параболическом базисе (строка i - образ i-го базисного вектора)."""

    name: str
    prime: int
    matrix: ResidueMatrix

    def characteristic_shift(self, eigenvalue: int) -> ResidueMatrix:
        return self.matrix.shift(eigenvalue)


def parse_operator(label: str) -> Tuple[str, int]:
    """Разбирает метку вида 'T_2', 'T2', 'U_113'."""
    text = label.strip().upper().replace("_", "")
    if len(text) < 2 or text[0] not in "TU" or not text[1:].isdigit():
        raise ModformsError(f"некорректная метка оператора: {label}")
    return text[0], int(text[1:])


def _merel_counts(space: ManinSymbolSpace, ell: int) -> np.ndarray:
    """Матрица r x mu: сколько раз символ Манина входит в T_ell(образующая)."""
    level = space.level
    pairs = np.array([space.generator_pair(i) for i in range(space.dimension)], dtype=np.int64)
    counts = np.zeros((space.dimension, space.symbol_count), dtype=np.int64)
    if space.dimension == 0:
        return counts
    cs, ds = pairs[:, 0], pairs[:, 1]
    mats = np.array(list(merel(ell)), dtype=np.int64)
    gen_idx = np.broadcast_to(np.arange(space.dimension), (mats.shape[0], space.dimension))
    a, b, c, d = (mats[:, k][:, None] for k in range(4))
    new_c = (a * cs[None, :] + c * ds[None, :]) % level
    new_d = (b * cs[None, :] + d * ds[None, :]) % level
    idx = space.p1.index_many(new_c, new_d)
    valid = idx >= 0
    np.add.at(counts, (gen_idx[valid], idx[valid]), 1)
    return counts


def _coset_counts(space: ManinSymbolSpace, ell: int) -> np.ndarray:
    """
    Матрица r x mu для суммы по смежным классам [[1, j], [0, ell]], j < ell.

    Для ell, не делящего N, добавляется класс [[ell, 0], [0, 1]] (T_ell), иначе это U_ell.
    """
    counts = np.zeros((space.dimension, space.symbol_count), dtype=np.int64)
    extra = space.level % ell != 0

    def add(i: int, upper: Cusp, lower: Cusp):
        # g{0, oo} -> {lower, upper}
        for cc, dd in _convergent_symbols(*upper):
            counts[i, space.p1.index(cc, dd)] += 1
        for cc, dd in _convergent_symbols(*lower):
            counts[i, space.p1.index(cc, dd)] -= 1

    for i in range(space.dimension):
        c, d = space.generator_pair(i)
        a, b, c1, d1 = lift_to_sl2z(c, d, space.level)
        for j in range(ell):
            add(i, (a + j * c1, ell * c1), (b + j * d1, ell * d1))
        if extra:
            add(i, (ell * a, c1), (ell * b, d1))
    return counts


def hecke_on_generators(space: ManinSymbolSpace, kind: str, ell: int, method: str = "auto"):
    """
    Матрица оператора на образующих всего пространства (r x r, строки - образы).

    Args:
        method: 'merel', 'cosets' или 'auto' (Мерель для T, смежные классы для U)
    """
    if method == "auto":
        method = "merel" if kind == "T" else "cosets"
    counts = _merel_counts(space, ell) if method == "merel" else _coset_counts(space, ell)
    return matmul_mod(counts % space.modulus.order, space.relation_matrix, space.modulus)


def hecke_operator(space: ManinSymbolSpace, label: str, method: str = "auto") -> HeckeMatrix:
    """
    Матрица оператора Гекке на параболическом подпространстве.

    Args:
        space: Пространство модулярных символов
        label: 'T_l' для l, не делящего N, или 'U_q' для q | N

    Returns:
        HeckeMatrix

    Raises:
        ModformsError: Если метка не согласована с уровнем
    """
    kind, ell = parse_operator(label)
    if not isprime(ell):
        raise ModformsError(f"{ell} не простое")
    divides = space.level % ell == 0
    if kind == "T" and divides:
        raise ModformsError(f"T_{ell}: {ell} делит уровень {space.level}, нужен U_{ell}")
    if kind == "U" and not divides:
        raise ModformsError(f"U_{ell}: {ell} не делит уровень {space.level}, нужен T_{ell}")
    log.debug(f"Оператор {kind}_{ell} на уровне {space.level}")
    full = hecke_on_generators(space, kind, ell, method)
    images = matmul_mod(space.cuspidal_basis, full, space.modulus)
    coords = space.cuspidal_coordinates(images)
    return HeckeMatrix(f"{kind}_{ell}", ell, ResidueMatrix(coords, space.modulus))


def _gamma0_cosets_trivial(source: int, target: int) -> List[Tuple[int, int, int, int]]:
    """Представители Γ0(target)\\Γ0(source) по нижним строкам (c : d) с source | c."""
    p1 = P1Index(target)
    reps = []
    for c, d in p1.representatives:
        if c % source != 0:
            continue
        reps.append(lift_to_sl2z(c, d, target))
    expected = index_gamma0(target) // index_gamma0(source)
    if len(reps) != expected:
        raise ModformsError(  # pragma: no cover
            f"найдено {len(reps)} смежных классов, ожидалось {expected}"
        )
    return reps


def _gamma0_cosets_upper(source: int, t: int) -> List[Tuple[int, int, int, int]]:
    """Представители (Γ0(M) ∩ Γ^0(t))\\Γ0(M) по верхним строкам (a : b) из P^1(Z/t)."""
    if not isprime(t) or source % t == 0:
        raise ModformsError(f"alpha_{t}: нужно простое d, не делящее уровень {source}")
    reps = [(1, j, 0, 1) for j in range(t)]
    x, y, _ = gcdex(t, -source)
    # [[t, y], [M, x]]: t*x - y*M = 1
    reps.append((t, y, source, x))
    return reps


def _mul(m1, m2):
    a1, b1, c1, d1 = m1
    a2, b2, c2, d2 = m2
    return (a1 * a2 + b1 * c2, a1 * b2 + b1 * d2, c1 * a2 + d1 * c2, c1 * b2 + d1 * d2)


def degeneracy_map(
    source: ManinSymbolSpace, target: ManinSymbolSpace, d: int
) -> ResidueMatrix:
    """
    Отображение вырождения alpha_d на параболических подпространствах уровня M -> N.

    alpha_1(x) = сумма gamma*x по Γ0(N)\\Γ0(M); alpha_d(x) = сумма [[1,0],[0,d]]*gamma*x
    по (Γ0(M) ∩ Γ^0(d))\\Γ0(M) для простого d = N/M, не делящего M.

    Returns:
        Матрица (dim S_M) x (dim S_N); строки - образы базиса уровня M

    Raises:
        ModformsError: Если M не делит N или d не делит N/M
    """
    M, N = source.level, target.level
    if N % M != 0:
        raise ModformsError(f"{M} не делит {N}")
    if (N // M) % d != 0:
        raise ModformsError(f"{d} не делит {N // M}")
    if source.modulus != target.modulus:
        raise ModformsError("пространства над разными модулями")
    log.info(f"Отображение вырождения alpha_{d}: уровень {M} -> {N}")

    counts = np.zeros((source.dimension, target.symbol_count), dtype=np.int64)
    if d == 1:
        cosets = _gamma0_cosets_trivial(M, N)
        for i in range(source.dimension):
            g = lift_to_sl2z(*source.generator_pair(i), M)
            for gamma in cosets:
                _, _, c, dd = _mul(gamma, g)
                counts[i, target.p1.index(c, dd)] += 1
    else:
        if N // M != d:
            raise ModformsError(f"поддерживается d = 1 или d = N/M, получено {d}")
        cosets = _gamma0_cosets_upper(M, d)
        for i in range(source.dimension):
            g = lift_to_sl2z(*source.generator_pair(i), M)
            for gamma in cosets:
                a, b, c, dd = _mul(gamma, g)
                # [[1, 0], [0, d]] * h: {b/(d*dd), a/(d*c)}
                for cc, ddd in _convergent_symbols(a, d * c):
                    counts[i, target.p1.index(cc, ddd)] += 1
                for cc, ddd in _convergent_symbols(b, d * dd):
                    counts[i, target.p1.index(cc, ddd)] -= 1

    on_generators = matmul_mod(counts % target.modulus.order, target.relation_matrix, target.modulus)
    images = matmul_mod(source.cuspidal_basis, on_generators, target.modulus)
    return ResidueMatrix(target.cuspidal_coordinates(images), target.modulus)


def trace_map(target: ManinSymbolSpace, source: ManinSymbolSpace, d: int) -> ResidueMatrix:
    """
    Отображение beta_d уровня N -> M: {a, b} -> {d*a, d*b} на параболических подпространствах.

    Returns:
        Матрица (dim S_N) x (dim S_M); строки - образы базиса уровня N

    Raises:
        ModformsError: Если M не делит N или d не делит N/M
    """
    M, N = source.level, target.level
    if N % M != 0:
        raise ModformsError(f"{M} не делит {N}")
    if (N // M) % d != 0:
        raise ModformsError(f"{d} не делит {N // M}")
    if source.modulus != target.modulus:
        raise ModformsError("пространства над разными модулями")
    log.info(f"Отображение следа beta_{d}: уровень {N} -> {M}")

    counts = np.zeros((target.dimension, source.symbol_count), dtype=np.int64)
    for i in range(target.dimension):
        a, b, c, dd = lift_to_sl2z(*target.generator_pair(i), N)
        for cc, ddd in _convergent_symbols(d * a, c):
            counts[i, source.p1.index(cc, ddd)] += 1
        for cc, ddd in _convergent_symbols(d * b, dd):
            counts[i, source.p1.index(cc, ddd)] -= 1

    on_generators = matmul_mod(counts % source.modulus.order, source.relation_matrix, source.modulus)
    images = matmul_mod(target.cuspidal_basis, on_generators, source.modulus)
    return ResidueMatrix(source.cuspidal_coordinates(images), source.modulus)


def _image_length(image: np.ndarray, modulus: PrimePowerModulus, j: int) -> int:
    """Длина образа по модулю p^j; для j = 0 длина нулевая."""
    if j == 0:
        return 0
    reduced = modulus.with_exponent(j)
    return howell_form(image % reduced.order, reduced, cols=image.shape[1]).length


def _saturating_image(
    source: ManinSymbolSpace,
    target: ManinSymbolSpace,
    rank: int,
    image_of: Callable[[ManinSymbolSpace, ManinSymbolSpace], np.ndarray],
) -> Tuple[int, PrimePowerModulus, np.ndarray]:
    """
    Подбирает точность p^(n+k), при которой все элементарные делители образа не больше p^k.

    Образ строится с точностью p^(n+k) для k = 0, 1, ...; длины образа по модулям
    p^(k+1) и p^k отличаются на число элементарных делителей, не больших p^k,
    и равенство этой разности рангу завершает поиск.

    Raises:
        BoundExceededError: Если точность не найдена до p^(n + saturation_depth)
    """
    modulus = target.modulus
    for k in range(settings.saturation_depth + 1):
        if k == 0:
            lifted, src, tgt = modulus, source, target
        else:
            lifted = modulus.with_exponent(modulus.n + k)
            src, tgt = build_space(source.level, lifted), build_space(target.level, lifted)
        image = image_of(src, tgt)
        if _image_length(image, modulus, k + 1) - _image_length(image, modulus, k) == rank:
            return k, lifted, image
        log.debug(f"Уровень {target.level}: элементарные делители больше {modulus.p}^{k}")
    raise BoundExceededError(
        f"насыщение для уровня {target.level} не найдено до точности "
        f"{modulus.p}^{modulus.n + settings.saturation_depth}"
    )


def old_subspace(
    source: ManinSymbolSpace, target: ManinSymbolSpace, divisors_: Sequence[int]
) -> np.ndarray:
    """
    Старая часть уровня N: насыщение образа отображений вырождения.

    Образ может иметь индекс, делящийся на p, в своем насыщении (старые формы
    сравнимы между собой), и тогда образ по модулю p^n меньше старой части.
    Старая часть равна {v : p^k v в образе} по модулю p^n, где p^k - наибольший
    элементарный делитель образа.

    Returns:
        Строки формы Хауэлла старой части в параболических координатах уровня N
    """
    modulus = target.modulus
    width = target.cuspidal_dimension
    if not divisors_:
        return np.zeros((0, width), dtype=modulus.dtype)

    def image_of(src: ManinSymbolSpace, tgt: ManinSymbolSpace) -> np.ndarray:
        return np.vstack([degeneracy_map(src, tgt, d).data for d in divisors_])

    k, lifted, image = _saturating_image(
        source, target, source.cuspidal_dimension * len(divisors_), image_of
    )
    if k == 0:
        return howell_form(image, modulus, cols=width).rows
    scaled = np.eye(width, dtype=lifted.dtype) * modulus.p**k
    colon = left_kernel(np.vstack([scaled, image]), lifted).rows[:, :width] % modulus.order
    log.info(f"Старая часть уровня {target.level} насыщена с точностью {lifted}")
    return howell_form(colon, modulus, cols=width).rows


def new_subspace(
    source: ManinSymbolSpace, target: ManinSymbolSpace, divisors_: Sequence[int]
) -> np.ndarray:
    """
    Новая часть уровня N относительно уровня M: общее ядро отображений следа beta_d.

    Ядро по модулю p^n может быть больше редукции ядра над Z_p, если коядро следа
    имеет кручение; тогда ядро берется с точностью p^(n+k) и редуцируется.

    Returns:
        Строки формы Хауэлла новой части в параболических координатах уровня N
    """
    modulus = target.modulus
    width = target.cuspidal_dimension
    if not divisors_:
        return howell_form(np.eye(width, dtype=modulus.dtype), modulus, cols=width).rows

    def image_of(src: ManinSymbolSpace, tgt: ManinSymbolSpace) -> np.ndarray:
        return np.hstack([trace_map(tgt, src, d).data for d in divisors_])

    k, lifted, image = _saturating_image(
        source, target, source.cuspidal_dimension * len(divisors_), image_of
    )
    kernel = left_kernel(image, lifted).rows % modulus.order
    if k:
        log.info(f"Новая часть уровня {target.level} найдена с точностью {lifted}")
    return howell_form(kernel, modulus, cols=width).rows
