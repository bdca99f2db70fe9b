"""Simulated LTE uplink channel measurement: pilot grid, LS estimation,
int16 lane-packed traces and channel-prediction evaluation."""

from .errors import (ConditioningError, DegenerateInputError, FormatError, NumericalError,
                     RejectedInputError, UlcsiError, UnsupportedVersionError)

__version__ = "0.1.0"

__all__ = ["ConditioningError", "DegenerateInputError", "FormatError", "NumericalError",
           "RejectedInputError", "UlcsiError", "UnsupportedVersionError"]
