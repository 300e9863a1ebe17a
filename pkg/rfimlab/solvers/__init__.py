"""Exact flow solvers."""
