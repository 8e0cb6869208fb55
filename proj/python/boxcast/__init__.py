"""Non-signalling boxes, steering assemblages and their relative entropies."""
from ._core import *  # noqa: F401,F403
from ._core import Error, __doc__  # noqa: F401
