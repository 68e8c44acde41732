"""freefam test suite."""
