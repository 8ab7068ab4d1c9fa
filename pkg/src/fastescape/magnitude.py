"""Overflow-safe magnitudes as iterated-exponential towers.

Iterating an entire function drives moduli far beyond the double range
within a handful of steps, so magnitudes are stored as a pair
``(depth, mantissa)`` denoting ``exp(exp(...exp(mantissa)))`` with
``depth`` nested exponentials.  The canonical band keeps the pair unique:
depth 0 holds ordinary doubles in ``[0, OVERFLOW)``, and every deeper
level keeps its mantissa in ``[LOG_OVERFLOW, OVERFLOW)``.  On that
canonical form the denoted values compare lexicographically, which is
what the escape tests rely on.

``normalize_pair`` is the plain-tuple core shared with the raster kernel
(the compiled twin reproduces it operation for operation); ``Magnitude``
is the friendly wrapper used everywhere else.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

OVERFLOW = 1e300
LOG_OVERFLOW = math.log(OVERFLOW)

# exp(x) is finite in double precision up to ~709.78; the demotion loop
# below only exponentiates mantissas < LOG_OVERFLOW, which is safe.
_EXP_FLOAT_MAX = 709.782712893384


def normalize_pair(depth: int, value: float) -> tuple[int, float]:
    """Return the canonical ``(depth, mantissa)`` for ``exp^depth(value)``.

    Mantissas at or above ``OVERFLOW`` are replaced by their log one level
    up; mantissas below ``LOG_OVERFLOW`` at positive depth are
    exponentiated back down.  Raises ``ValueError`` for non-finite input.
    """
    if not math.isfinite(value):
        raise ValueError(f"non-finite tower mantissa: {value!r}")
    if depth < 0:
        raise ValueError(f"negative tower depth: {depth}")
    while value >= OVERFLOW:
        value = math.log(value)
        depth += 1
    while depth > 0 and value < LOG_OVERFLOW:
        value = math.exp(value)
        depth -= 1
    return depth, value


@dataclass(frozen=True, slots=True)
class Magnitude:
    """A nonnegative magnitude stored as a canonical exponential tower.

    ``Magnitude(depth, mantissa)`` denotes ``exp^depth(mantissa)``; the
    constructor normalizes, so any finite pair is accepted.  Ordinary
    numbers live at depth 0.
    """

    depth: int
    mantissa: float

    def __post_init__(self) -> None:
        depth, value = normalize_pair(self.depth, float(self.mantissa))
        if depth == 0 and value < 0.0:
            raise ValueError(f"magnitude must be nonnegative, got {value!r}")
        object.__setattr__(self, "depth", depth)
        object.__setattr__(self, "mantissa", value)

    @classmethod
    def from_real(cls, x: float) -> "Magnitude":
        """Magnitude of an ordinary nonnegative number."""
        return cls(0, float(x))

    @classmethod
    def from_log(cls, log_x: float) -> "Magnitude":
        """Magnitude with natural log ``log_x``; ``-inf`` denotes zero."""
        log_x = float(log_x)
        if math.isinf(log_x) and log_x < 0:
            return cls(0, 0.0)
        if log_x >= LOG_OVERFLOW:
            return cls(1, log_x)
        return cls(0, math.exp(log_x))

    @property
    def is_zero(self) -> bool:
        return self.depth == 0 and self.mantissa == 0.0

    def exp(self) -> "Magnitude":
        """e raised to this magnitude."""
        return Magnitude(self.depth + 1, self.mantissa)

    def log(self) -> "Magnitude":
        """Natural log, defined while the result is still a magnitude (>= 0)."""
        if self.depth > 0:
            return Magnitude(self.depth - 1, self.mantissa)
        if self.mantissa < 1.0:
            raise ValueError("log of a magnitude below 1 is negative")
        return Magnitude(0, math.log(self.mantissa))

    def mul(self, factor: float) -> "Magnitude":
        """Multiply by a positive ordinary number.

        At depth >= 2 the factor is below the representation's resolution
        and is absorbed.
        """
        factor = float(factor)
        if not (factor > 0.0 and math.isfinite(factor)):
            raise ValueError(f"factor must be positive and finite: {factor!r}")
        if self.is_zero:
            return self
        if self.depth == 0:
            log_product = math.log(self.mantissa) + math.log(factor)
            if log_product >= LOG_OVERFLOW:
                return Magnitude(1, log_product)
            return Magnitude(0, self.mantissa * factor)
        if self.depth == 1:
            return Magnitude(1, self.mantissa + math.log(factor))
        return self

    def pow(self, exponent: float) -> "Magnitude":
        """Raise to a positive ordinary power."""
        exponent = float(exponent)
        if not (exponent > 0.0 and math.isfinite(exponent)):
            raise ValueError(f"exponent must be positive and finite: {exponent!r}")
        if self.is_zero:
            return self
        if self.depth == 0:
            log_power = exponent * math.log(self.mantissa)
            if log_power >= LOG_OVERFLOW:
                return Magnitude(1, log_power)
            return Magnitude(0, math.pow(self.mantissa, exponent))
        # x^p = exp(p * log x); at depth >= 1 the log is itself a magnitude.
        return self.log().mul(exponent).exp()

    def to_float(self) -> float:
        """Collapse to a double; towers beyond the double range become inf."""
        if self.depth == 0:
            return self.mantissa
        if self.depth == 1 and self.mantissa <= _EXP_FLOAT_MAX:
            return math.exp(self.mantissa)
        return math.inf

    def __float__(self) -> float:
        return self.to_float()

    def _key(self) -> tuple[int, float]:
        return (self.depth, self.mantissa)

    @staticmethod
    def _coerce(other: object) -> "Magnitude | None":
        if isinstance(other, Magnitude):
            return other
        if isinstance(other, (int, float)):
            return Magnitude.from_real(float(other))
        return None

    def __eq__(self, other: object) -> bool:
        coerced = self._coerce(other)
        if coerced is None:
            return NotImplemented
        return self._key() == coerced._key()

    def __lt__(self, other: object) -> bool:
        coerced = self._coerce(other)
        if coerced is None:
            return NotImplemented
        return self._key() < coerced._key()

    def __le__(self, other: object) -> bool:
        coerced = self._coerce(other)
        if coerced is None:
            return NotImplemented
        return self._key() <= coerced._key()

    def __gt__(self, other: object) -> bool:
        coerced = self._coerce(other)
        if coerced is None:
            return NotImplemented
        return self._key() > coerced._key()

    def __ge__(self, other: object) -> bool:
        coerced = self._coerce(other)
        if coerced is None:
            return NotImplemented
        return self._key() >= coerced._key()

    def __hash__(self) -> int:
        return hash(self._key())

    def __str__(self) -> str:
        if self.depth == 0:
            return f"{self.mantissa:.6g}"
        if self.depth == 1:
            return f"exp({self.mantissa:.6g})"
        return f"exp^{self.depth}({self.mantissa:.6g})"

    def __repr__(self) -> str:
        return f"Magnitude(depth={self.depth}, mantissa={self.mantissa!r})"
