"""Packaged pipeline layouts."""
