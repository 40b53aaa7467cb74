"""Тесты для проекта."""

