"""Exception types shared across the package."""

from __future__ import annotations


class CmTwistError(Exception):
    """Base class for all package errors."""


class NoPrimaryAssociate(CmTwistError):
    pass


class NotCoprime(CmTwistError):
    pass


class BadModulus(CmTwistError):
    pass


class NotPrime(CmTwistError):
    pass


class PrecisionUnachievable(CmTwistError):
    pass


class PoleAtLatticePoint(CmTwistError):
    pass


class BadPrime(CmTwistError):
    pass


class BadReduction(CmTwistError):
    pass


class RecognitionFailed(CmTwistError):
    pass


class ZeroValuation(CmTwistError):
    pass


class TooLarge(CmTwistError):
    pass


class EmptyTwist(CmTwistError):
    pass


class InvalidSpec(CmTwistError):
    pass


class GoodReduction(CmTwistError):
    pass


class VanishingLValue(CmTwistError):
    pass


class IdentityFailed(CmTwistError):
    pass
