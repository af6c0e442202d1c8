"""Estimators for translocal entropy, local entropy and topological pressure."""

from ._translocal import *  # noqa: F401,F403
from ._translocal import __doc__  # noqa: F401
