from ._llgblow import *  # noqa: F401,F403
from ._llgblow import __doc__  # noqa: F401
