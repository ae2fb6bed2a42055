"""Limit cycles of the delayed Duffing-type oscillator x'' + a x' + x(t-T) + x^3 = 0."""

__version__ = "0.1.0"
