"""Forward-mode differentiation and gradient verification.

The loss gradient suite lives in ``grad.checks`` and is imported from there
directly, since it depends on the loss package.
"""

from .dual import DualScalar, seed_parameters
from .engine import grad, fd_check

__all__ = [
    'DualScalar',
    'seed_parameters',
    'grad',
    'fd_check',
]
