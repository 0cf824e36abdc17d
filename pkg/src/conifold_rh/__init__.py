"""Numerical solution of the resolved-conifold Riemann-Hilbert problems.

Modules: ``numlib`` (Bernoulli numbers, polylogarithms, zeta values),
``contour`` (contour quadrature), ``msine`` (double and triple sine type
functions, K and tau), ``bps`` (BPS data and wall-crossing automorphisms),
``rhverify`` (solution and its checks), ``asym`` (asymptotic expansions) and
``cli``.
"""

from .errors import (ConifoldError, DomainError, NoConvergence, NoRepresentation, PoleHit,
                     PoleTooClose, TruncationOverflow)

__version__ = "0.1.0"

__all__ = ["ConifoldError", "DomainError", "NoConvergence", "NoRepresentation", "PoleHit",
           "PoleTooClose", "TruncationOverflow", "__version__"]
