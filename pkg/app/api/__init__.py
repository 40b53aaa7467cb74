"""API модуль."""
