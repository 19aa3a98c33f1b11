"""Exception types raised across the package."""


class RaincloudError(ValueError):
    """Base class for all errors raised by :mod:`rainclouds`."""


class EmptySample(RaincloudError):
    """An operation needed at least one data value and got none."""

    def __init__(self, message="empty sample"):
        super().__init__(message)


class InvalidParameter(RaincloudError):
    pass


class InsufficientData(RaincloudError):
    pass


class BandTooThin(RaincloudError):
    pass


class ShapeMismatch(RaincloudError):
    pass
