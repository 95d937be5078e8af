"""Lorentz-invariant two-photon helicity wave packets."""

from . import bell, contour, helicity, kinematics, little_group, wavepacket
from .errors import (
    ConsistencyError,
    DomainError,
    EmptyPacketError,
    ExcludedDirectionError,
    NullOutcomeError,
    RangeError,
    SingularityError,
)

__version__ = "0.1.0"

__all__ = [
    "bell",
    "contour",
    "helicity",
    "kinematics",
    "little_group",
    "wavepacket",
    "ConsistencyError",
    "DomainError",
    "EmptyPacketError",
    "ExcludedDirectionError",
    "NullOutcomeError",
    "RangeError",
    "SingularityError",
]
