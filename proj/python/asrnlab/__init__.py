"""Variance-difference bandit lab.

Deterministic multi-armed bandit simulations with tabular Q-learning,
Boring-Areas-Trap telemetry and adaptive symmetric reward noising. The
heavy lifting lives in the compiled `_asrnlab` extension; this package
re-exports its public surface.
"""

from ._asrnlab import *  # noqa: F401,F403
from ._asrnlab import __doc__ as _core_doc  # noqa: F401
