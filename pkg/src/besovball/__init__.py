"""Holomorphic function spaces on the unit ball of C^N at desk scale.

Truncated homogeneous expansions (:mod:`besovball.holopoly`), sphere and
radial quadrature (:mod:`besovball.quad`), dyadic blocks and best
approximation (:mod:`besovball.lpblocks`), moduli of smoothness
(:mod:`besovball.moduli`) and a verification harness
(:mod:`besovball.harness`).
"""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .holopoly import *  # noqa: F401,F403
from .lpblocks import *  # noqa: F401,F403
from .moduli import *  # noqa: F401,F403
from .quad import *  # noqa: F401,F403
from . import errors, harness, holopoly, lpblocks, moduli, quad  # noqa: F401

__all__ = (
    ["__version__", "harness"]
    + errors.__all__
    + holopoly.__all__
    + quad.__all__
    + lpblocks.__all__
    + moduli.__all__
)
