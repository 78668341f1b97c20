"""Hotelling T-squared data-quality chart for panel data with missing
observations: robust phase-1 estimation, Monte-Carlo control limits, and
signal decomposition. Thin wrapper over the native _t2qc extension."""

from _t2qc import *  # noqa: F401,F403
from _t2qc import __version__  # noqa: F401
