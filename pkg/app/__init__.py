"""Modforms Congruences - сравнения модулярных форм по модулю степеней простого."""

__version__ = "0.1.0"
