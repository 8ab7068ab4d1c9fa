"""Fast-escaping-set toolkit: growth scales, escape levels, web certificates."""

from fastescape.magnitude import LOG_OVERFLOW, OVERFLOW, Magnitude, normalize_pair

__all__ = [
    "LOG_OVERFLOW",
    "OVERFLOW",
    "Magnitude",
    "normalize_pair",
]

__version__ = "0.1.0"
