"""Utility helpers - hashing, atomic writes, formatters, validators."""
