"""Exception types raised by the numerical routines.

Numerical failures (a divisor touching the curve, a tangential intersection,
an exhausted root search) derive from :class:`NumericalError`; the CLI maps
them to exit status 2.
"""

from __future__ import annotations


class ProjLinkError(Exception):
    """Base class for all package errors."""


class ValidationError(ProjLinkError, ValueError):
    """Malformed input: bad file, wrong dimensions, invalid curve."""


class NumericalError(ProjLinkError):
    """A computation whose hypotheses fail numerically."""


class ZeroOnCurve(NumericalError):
    """The section (nearly) vanishes on the curve, so the integrand is singular."""


class NonTransversal(NumericalError):
    """A divisor meets a 2-chain non-transversally or at a degenerate point."""


class SeedExhaustion(NumericalError):
    """Newton seeding failed to account for every zero found by the argument principle."""


class SingularPoint(NumericalError):
    """A quasi-psh function was probed on its singular locus."""


class AllStartsRejected(NumericalError):
    """Every random start of an optimizer was inadmissible."""


class NonIntegral(NumericalError):
    """A quantity that must be an integer did not round cleanly."""
