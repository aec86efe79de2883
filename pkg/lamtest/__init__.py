"""Executable K-models and the λ-calculus with D-tests."""
