"""Tests for turbidvar."""
