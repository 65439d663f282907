"""Pytest configuration file."""
