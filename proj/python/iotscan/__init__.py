"""Device-discovery simulator and discovery-time model."""

from ._iotscan import *  # noqa: F401,F403
from ._iotscan import __version__  # noqa: F401
