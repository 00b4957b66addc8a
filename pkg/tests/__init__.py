"""Tests for pincushion_lab."""
