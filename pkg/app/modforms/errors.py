"""Исключения вычислительного ядра."""


class ModformsError(ValueError):
    """Базовая ошибка предметной области."""


class NotSplitError(ModformsError):
    """Квадратный многочлен не раскладывается на различные множители по модулю p."""


class BadPrimeError(ModformsError):
    """Простое плохой редукции там, где нужна хорошая."""

    def __init__(self, prime: int):
        self.prime = prime
        super().__init__(f"плохое простое: {prime}")


class BoundExceededError(ModformsError):
    """Превышено ограничение на ресурсы (граница подсчета, уровень)."""


class InsufficientDataError(ModformsError):
    """В таблице коэффициентов нет нужного простого."""

    def __init__(self, prime: int):
        self.prime = prime
        super().__init__(f"недостаточно данных: {prime}")


class InconsistentCaseError(ModformsError):
    """Противоречивое описание локального случая или ручных данных."""


class ShapeError(ModformsError):
    """Матрица или коцикл не того вида."""


class InputError(ModformsError):
    """Некорректный входной файл."""
