"""Relay-mediated dipolar interaction engineering for atom arrays."""

from ._core import *  # noqa: F401,F403
from ._core import __doc__  # noqa: F401
