"""Condensate formation kinetics in harmonic traps."""

from becsim._core import *  # noqa: F401,F403

__version__ = "0.1.0"
