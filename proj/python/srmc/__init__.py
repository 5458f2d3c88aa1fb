"""Structurally random matrix sensing, measurement statistics and coding."""

from ._srmc import *  # noqa: F401,F403
from ._srmc import __doc__  # noqa: F401
