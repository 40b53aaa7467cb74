"""API роуты."""
