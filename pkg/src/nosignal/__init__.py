"""Linear-algebra audits of one-sided signalling devices, two-level
tunnelling dynamics and binomial signal statistics."""

__version__ = "0.1.0"

from .qcore import ValidationError  # noqa: E402,F401
