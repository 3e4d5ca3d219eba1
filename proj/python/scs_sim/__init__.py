"""Python access to the satellite-cluster simulator core."""

from ._scs import *  # noqa: F401,F403
from ._scs import __doc__  # noqa: F401
