"""Compound Poisson representation of sparse random graph component profiles.

Exact laws, conditioned jump ensembles, deviation rate constants and
Monte Carlo checks, backed by the C++ core in the `_gelation` extension.
"""

try:
    # installed layout: the extension lives inside the package
    from ._gelation import *  # noqa: F401,F403
except ImportError:
    # build-tree layout: the extension sits next to the package on sys.path
    from _gelation import *  # noqa: F401,F403

__version__ = "0.1.0"
