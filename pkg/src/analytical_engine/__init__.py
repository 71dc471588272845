"""Exact-arithmetic emulator for Analytical Engine card decks."""

__version__ = "0.1.0"
