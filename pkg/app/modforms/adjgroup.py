"""
Действие PGL2(F_5) ~ S_5 на матрицах следа ноль перебором.

Все утверждения проверяются полным перечислением: группа из 120 элементов,
модуль из 125 векторов. Внутри используются таблицы индексов (умножение,
обращение, действие), чтобы перебор полупрямых произведений шел через numpy.
"""

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from math import lcm
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from app.logger import log
from app.modforms.errors import ShapeError

P = 5

# (c1, c2, c3) <-> c1*(1,0;0,4) + c2*(0,1;0,0) + c3*(0,0;1,0)
TraceZeroVec = Tuple[int, int, int]
VECTORS: Tuple[TraceZeroVec, ...] = tuple(product(range(P), repeat=3))
ZERO_VEC: TraceZeroVec = (0, 0, 0)


def vec(*coords: int) -> TraceZeroVec:
    if len(coords) != 3:
        raise ShapeError(f"вектор следа ноль задается тремя координатами, получено {coords}")
    return tuple(int(c) % P for c in coords)  # type: ignore[return-value]


def _vec_index(m: TraceZeroVec) -> int:
    return m[0] * P * P + m[1] * P + m[2]


def _to_matrix(m: TraceZeroVec) -> np.ndarray:
    c1, c2, c3 = m
    return np.array([[c1, c2], [c3, -c1]], dtype=np.int64) % P


def _from_matrix(m: np.ndarray) -> TraceZeroVec:
    m = m % P
    if (m[0, 0] + m[1, 1]) % P:
        raise ShapeError(f"след матрицы {m.tolist()} не равен нулю")
    return int(m[0, 0]), int(m[0, 1]), int(m[1, 0])


@dataclass(frozen=True, order=True)
class PGL2F5Element:
    """Элемент PGL2(F_5): представитель с первым ненулевым элементом 1."""

    entries: Tuple[int, int, int, int]

    @classmethod
    def of(cls, a: int, b: int, c: int, d: int) -> "PGL2F5Element":
        a, b, c, d = (int(x) % P for x in (a, b, c, d))
        if (a * d - b * c) % P == 0:
            raise ShapeError(f"вырожденная матрица ({a},{b};{c},{d})")
        lead = next(x for x in (a, b, c, d) if x)
        s = pow(lead, -1, P)
        return cls(tuple((s * x) % P for x in (a, b, c, d)))  # type: ignore[arg-type]

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "PGL2F5Element":
        (a, b), (c, d) = rows
        return cls.of(a, b, c, d)

    @property
    def matrix(self) -> np.ndarray:
        return np.array(self.entries, dtype=np.int64).reshape(2, 2)

    def __mul__(self, other: "PGL2F5Element") -> "PGL2F5Element":
        product_ = (self.matrix @ other.matrix) % P
        return PGL2F5Element.of(*product_.ravel())

    def inverse(self) -> "PGL2F5Element":
        a, b, c, d = self.entries
        return PGL2F5Element.of(d, -b, -c, a)

    def order(self) -> int:
        k, power = 1, self
        while power != IDENTITY:
            power = power * self
            k += 1
        return k

    def __repr__(self) -> str:
        a, b, c, d = self.entries
        return f"({a},{b};{c},{d})"


IDENTITY = PGL2F5Element((1, 0, 0, 1))


@lru_cache(maxsize=None)
def elements() -> Tuple[PGL2F5Element, ...]:
    """Все 120 элементов PGL2(F_5) в каноническом порядке."""
    found = set()
    for a, b, c, d in product(range(P), repeat=4):
        if (a * d - b * c) % P:
            found.add(PGL2F5Element.of(a, b, c, d))
    return tuple(sorted(found))


def adjoint_action(g: PGL2F5Element, m: TraceZeroVec) -> TraceZeroVec:
    """
    Координаты g*M*g^-1 в базисе {(1,0;0,4), (0,1;0,0), (0,0;1,0)}.

    g^-1 - обратная матрица того же представителя, поэтому скаляр сокращается.
    """
    a, b, c, d = g.entries
    det_inv = pow((a * d - b * c) % P, -1, P)
    inverse = (np.array([[d, -b], [-c, a]], dtype=np.int64) * det_inv) % P
    image = g.matrix @ _to_matrix(m) @ inverse
    return _from_matrix(image)


@dataclass(frozen=True)
class _Tables:
    elements: Tuple[PGL2F5Element, ...]
    index: Dict[PGL2F5Element, int]
    mult: np.ndarray
    inv: np.ndarray
    act: np.ndarray
    coords: np.ndarray
    identity: int


@lru_cache(maxsize=None)
def _tables() -> _Tables:
    elems = elements()
    index = {g: i for i, g in enumerate(elems)}
    mult = np.array([[index[a * b] for b in elems] for a in elems], dtype=np.int64)
    inv = np.array([index[g.inverse()] for g in elems], dtype=np.int64)
    act = np.array(
        [[_vec_index(adjoint_action(g, m)) for m in VECTORS] for g in elems], dtype=np.int64
    )
    coords = np.array(VECTORS, dtype=np.int64)
    log.debug(f"Таблицы PGL2(F_{P}) построены: {len(elems)} элементов")
    return _Tables(elems, index, mult, inv, act, coords, index[IDENTITY])


def _indices(group: Iterable[PGL2F5Element]) -> np.ndarray:
    t = _tables()
    return np.array(sorted(t.index[g] for g in group), dtype=np.int64)


def _vectors_to_indices(coords: np.ndarray) -> np.ndarray:
    coords = coords % P
    return coords[..., 0] * P * P + coords[..., 1] * P + coords[..., 2]


def span(vectors: Iterable[TraceZeroVec]) -> FrozenSet[TraceZeroVec]:
    """Все векторы подпространства, натянутого на vectors."""
    result = {ZERO_VEC}
    for v in vectors:
        v = vec(*v)
        result = {
            vec(*(s[i] + c * v[i] for i in range(3))) for s in result for c in range(P)
        }
    return frozenset(result)


def _dimension(subspace: FrozenSet[TraceZeroVec]) -> int:
    size, d = len(subspace), 0
    while size > 1:
        size //= P
        d += 1
    return d


def generate(gens: Iterable[PGL2F5Element], limit: Optional[int] = None) -> Optional[FrozenSet[PGL2F5Element]]:
    """
    Подгруппа, порожденная gens.

    Returns:
        Множество элементов или None, если размер превысил limit
    """
    t = _tables()
    gen_idx = [t.index[g] for g in gens]
    group = {t.identity}
    frontier = [t.identity]
    while frontier:
        nxt = []
        for a in frontier:
            for b in gen_idx:
                c = int(t.mult[a, b])
                if c not in group:
                    group.add(c)
                    nxt.append(c)
                    if limit is not None and len(group) > limit:
                        return None
        frontier = nxt
    return frozenset(t.elements[i] for i in group)


def _check_complement(v1: FrozenSet[TraceZeroVec], v2: FrozenSet[TraceZeroVec]):
    if v1 & v2 != {ZERO_VEC} or len(v1) * len(v2) != P**3:
        raise ShapeError("V1 и V2 не дополняют друг друга в M_2^0(F_5)")


def _preserves(g: PGL2F5Element, subspace: FrozenSet[TraceZeroVec]) -> bool:
    return all(adjoint_action(g, m) in subspace for m in subspace)


def invariant_decomposition_check(
    gens: Sequence[PGL2F5Element],
    v1: Sequence[TraceZeroVec],
    v2: Sequence[TraceZeroVec],
) -> bool:
    """
    Проверяет, что каждый образующий сохраняет V1 и V2.

    Raises:
        ShapeError: Если V1 + V2 != M или V1 и V2 пересекаются
    """
    s1, s2 = span(v1), span(v2)
    _check_complement(s1, s2)
    return all(_preserves(g, s1) and _preserves(g, s2) for g in gens)


def stabilizer_in(subgroup: Iterable[PGL2F5Element], m: TraceZeroVec) -> FrozenSet[PGL2F5Element]:
    m = vec(*m)
    return frozenset(g for g in subgroup if adjoint_action(g, m) == m)


def acts_trivially(group: Iterable[PGL2F5Element], v1: Sequence[TraceZeroVec]) -> bool:
    s1 = span(v1)
    return all(adjoint_action(g, m) == m for g in group for m in s1)


@dataclass(frozen=True)
class SemidirectElement:
    """Элемент H x| M с умножением (g, m)(h, w) = (gh, m + g*w)."""

    g: PGL2F5Element
    m: TraceZeroVec

    def __mul__(self, other: "SemidirectElement") -> "SemidirectElement":
        w = adjoint_action(self.g, other.m)
        return SemidirectElement(self.g * other.g, vec(*(a + b for a, b in zip(self.m, w))))

    def inverse(self) -> "SemidirectElement":
        g_inv = self.g.inverse()
        return SemidirectElement(g_inv, vec(*(-x for x in adjoint_action(g_inv, self.m))))


def semidirect_normal(
    big: Iterable[PGL2F5Element],
    small: Iterable[PGL2F5Element],
    module: FrozenSet[TraceZeroVec],
    submodule: FrozenSet[TraceZeroVec],
) -> bool:
    """
    Перебором проверяет small x| submodule ⊴ big x| module.

    Сопряжение (g, m)(h, w)(g, m)^-1 = (ghg^-1, m + g*w - (ghg^-1)*m)
    вычисляется для всех пар сразу по таблицам индексов.
    """
    t = _tables()
    big_idx, small_idx = _indices(big), _indices(small)
    small_mask = np.zeros(len(t.elements), dtype=bool)
    small_mask[small_idx] = True
    sub_mask = np.zeros(P**3, dtype=bool)
    sub_mask[[_vec_index(m) for m in submodule]] = True
    module_idx = np.array(sorted(_vec_index(m) for m in module), dtype=np.int64)
    sub_idx = np.array(sorted(_vec_index(m) for m in submodule), dtype=np.int64)

    for g in big_idx:
        g_inv = t.inv[g]
        for h in small_idx:
            k = t.mult[t.mult[g, h], g_inv]
            if not small_mask[k]:
                return False
            gw = t.coords[t.act[g, sub_idx]]
            m_part = t.coords[module_idx] - t.coords[t.act[k, module_idx]]
            images = _vectors_to_indices(m_part[:, None, :] + gw[None, :, :])
            if not sub_mask[images].all():
                return False
    return True


def normality_check(
    group: Iterable[PGL2F5Element],
    v1: Sequence[TraceZeroVec],
    v2: Sequence[TraceZeroVec],
) -> bool:
    """
    Перебором проверяет H x| V2 ⊴ H x| (V1 + V2).

    Результат совпадает с предикатом "H действует на V1 тривиально"; расхождение
    пишется в лог как ошибка.

    Raises:
        ShapeError: Если V1 не одномерно или H не сохраняет разложение
    """
    group = frozenset(group)
    s1, s2 = span(v1), span(v2)
    if _dimension(s1) != 1:
        raise ShapeError("V1 должно быть одномерным")
    _check_complement(s1, s2)
    if not all(_preserves(g, s1) and _preserves(g, s2) for g in group):
        raise ShapeError("H не сохраняет разложение V1 + V2")
    normal = semidirect_normal(group, group, frozenset(VECTORS), s2)
    if normal != acts_trivially(group, v1):
        log.error("Нормальность не совпала с тривиальностью действия на V1")  # pragma: no cover
    return normal


# Отпечаток (порядок, абелева, экспонента, порядок центра) -> тип
ISOMORPHISM_LABELS: Dict[Tuple[int, bool, int, int], str] = {
    (1, True, 1, 1): "1",
    (2, True, 2, 2): "C2",
    (3, True, 3, 3): "C3",
    (4, True, 4, 4): "C4",
    (4, True, 2, 4): "C2xC2",
    (6, False, 6, 1): "S3",
    (6, True, 6, 6): "C6",
    (8, False, 4, 2): "D8",
    (12, False, 6, 2): "S3xC2",
    (12, False, 6, 1): "A4",
    (24, False, 12, 1): "S4",
}


def fingerprint(group: Iterable[PGL2F5Element]) -> Tuple[int, bool, int, int]:
    t = _tables()
    idx = _indices(group)
    table = t.mult[np.ix_(idx, idx)]
    commutes = table == table.T
    abelian = bool(commutes.all())
    center = int(commutes.all(axis=1).sum())
    exponent = 1
    for i in idx:
        exponent = lcm(exponent, t.elements[i].order())
    return len(idx), abelian, exponent, center


def label_of(group: Iterable[PGL2F5Element]) -> str:
    key = fingerprint(group)
    try:
        return ISOMORPHISM_LABELS[key]
    except KeyError:
        return f"order {key[0]}"


def _conjugacy_key(idx: np.ndarray) -> Tuple[int, ...]:
    t = _tables()
    best = None
    for g in range(len(t.elements)):
        conj = tuple(sorted(int(x) for x in t.mult[t.mult[g, idx], t.inv[g]]))
        if best is None or conj < best:
            best = conj
    return best  # type: ignore[return-value]


@lru_cache(maxsize=None)
def subgroup_classes_prime_to_5() -> Tuple[Tuple[str, int], ...]:
    """
    Классы сопряженности подгрупп порядка, взаимно простого с 5.

    Каждая такая подгруппа S_5 порождается двумя элементами, поэтому
    перебираются пары элементов порядка, не делящегося на 5.

    Returns:
        Пары (тип, порядок) по одной на класс сопряженности
    """
    t = _tables()
    candidates = [g for g in t.elements if g.order() % P]
    subgroups = set()
    for i, a in enumerate(candidates):
        for b in candidates[i:]:
            group = generate((a, b), limit=24)
            if group is not None and len(group) % P:
                subgroups.add(group)
    classes = {}
    for group in subgroups:
        key = _conjugacy_key(_indices(group))
        classes.setdefault(key, group)
    result = sorted((label_of(g), len(g)) for g in classes.values())
    log.info(f"Классов подгрупп порядка, взаимно простого с {P}: {len(result)}")
    return tuple(sorted(result, key=lambda x: (x[1], x[0])))


def subgroups_prime_to_5() -> List[str]:
    """Типы изоморфизма подгрупп S_5 порядка, взаимно простого с 5, по возрастанию порядка."""
    seen: Dict[str, int] = {}
    for label, order in subgroup_classes_prime_to_5():
        seen.setdefault(label, order)
    return sorted(seen, key=lambda label: (seen[label], label))


S3XC2_GENERATORS: Tuple[PGL2F5Element, ...] = (
    PGL2F5Element.of(1, 2, 2, 0),
    PGL2F5Element.of(4, 2, 1, 1),
    PGL2F5Element.of(3, 2, 2, 2),
)
V2_BASIS: Tuple[TraceZeroVec, ...] = ((3, 1, 0), (3, 0, 1))
V1_BASIS: Tuple[TraceZeroVec, ...] = ((4, 1, 1),)


def invariant_subspaces(gens: Sequence[PGL2F5Element]) -> List[FrozenSet[TraceZeroVec]]:
    """Собственные ненулевые подпространства, инвариантные относительно gens."""
    nonzero = [v for v in VECTORS if v != ZERO_VEC]
    candidates = {span([v]) for v in nonzero}
    candidates |= {span([v, w]) for i, v in enumerate(nonzero) for w in nonzero[i + 1 :]}
    proper = [s for s in candidates if 1 < len(s) < P**3]
    return [s for s in proper if all(_preserves(g, s) for g in gens)]


@dataclass
class ClaimResult:
    claim: str
    passed: bool
    detail: str = ""

    def to_json(self) -> dict:
        return {"claim": self.claim, "passed": self.passed, "detail": self.detail}


@dataclass
class SuiteReport:
    claims: List[ClaimResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.claims)

    def add(self, claim: str, passed: bool, detail: str = ""):
        self.claims.append(ClaimResult(claim, bool(passed), detail))
        log.info(f"{'OK' if passed else 'FAIL'}: {claim} {detail}".rstrip())

    def to_json(self) -> dict:
        return {"passed": self.passed, "claims": [c.to_json() for c in self.claims]}


EXPECTED_PRIME_TO_5 = ["1", "C2", "C3", "C2xC2", "C4", "C6", "S3", "D8", "A4", "S3xC2", "S4"]


def verify_suite() -> SuiteReport:
    """Полный набор проверок действия PGL2(F_5) на M_2^0(F_5)."""
    report = SuiteReport()
    group = elements()
    report.add("|PGL2(F_5)| = 120", len(group) == 120, str(len(group)))

    basis = [vec(1, 0, 0), vec(0, 1, 0), vec(0, 0, 1)]
    is_action = all(
        adjoint_action(g * h, m) == adjoint_action(g, adjoint_action(h, m))
        for g in group
        for h in group
        for m in basis
    )
    report.add("(gh)*m = g*(h*m)", is_action)

    kernel = [g for g in group if all(adjoint_action(g, m) == m for m in basis)]
    report.add("действие точное", kernel == [IDENTITY], f"ядро: {len(kernel)}")

    report.add("действие S_5 неприводимо", not invariant_subspaces(group))

    s3xc2 = generate(S3XC2_GENERATORS) or frozenset()
    report.add("|S3 x C2| = 12", len(s3xc2) == 12 and label_of(s3xc2) == "S3xC2", str(len(s3xc2)))

    report.add(
        "M = <(3,1,0),(3,0,1)> + <(4,1,1)> инвариантно",
        invariant_decomposition_check(S3XC2_GENERATORS, V1_BASIS, V2_BASIS),
    )

    c6 = stabilizer_in(s3xc2, V1_BASIS[0])
    report.add("стабилизатор (4,1,1) в S3 x C2 - C6", label_of(c6) == "C6", str(len(c6)))

    report.add(
        "действие S3 x C2 на V1 нетривиально, нормальности нет",
        not acts_trivially(s3xc2, V1_BASIS) and not normality_check(s3xc2, V1_BASIS, V2_BASIS),
    )
    report.add("C6 x| V2 нормальна в C6 x| M", normality_check(c6, V1_BASIS, V2_BASIS))
    report.add(
        "(C3 x C2) x| V2 нормальна в (S3 x C2) x| M",
        semidirect_normal(s3xc2, c6, frozenset(VECTORS), span(V2_BASIS)),
    )

    labels = subgroups_prime_to_5()
    report.add(
        "подгруппы порядка, взаимно простого с 5",
        sorted(labels) == sorted(EXPECTED_PRIME_TO_5),
        ", ".join(labels),
    )
    return report
