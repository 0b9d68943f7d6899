"""Real values with a certified error radius."""

from __future__ import annotations

import math
from dataclasses import dataclass

import gmpy2

# Relative slack added to every floating radius so that round-off in the
# radius arithmetic itself can only make a radius larger.
_SLACK = 1e-12
_LOG2 = math.log(2.0)


@dataclass(frozen=True)
class HeightEstimate:
    """``|value - true| <= radius``; ``exact`` marks values known exactly.

    ``converged`` is False when an iterative estimator ran out of budget
    before reaching the requested tolerance; the radius is still honest.
    """

    value: float
    radius: float = 0.0
    exact: bool = False
    converged: bool = True

    def __post_init__(self) -> None:
        if not math.isfinite(self.radius) or self.radius < 0:
            raise ValueError(f"radius must be finite and >= 0, got {self.radius}")
        if self.exact and self.radius != 0.0:
            raise ValueError("exact estimates carry radius 0")

    @classmethod
    def zero(cls) -> HeightEstimate:
        return cls(0.0, 0.0, exact=True)

    @property
    def lower(self) -> float:
        return self.value - self.radius

    @property
    def upper(self) -> float:
        return self.value + self.radius

    def is_zero(self) -> bool:
        return self.exact and self.value == 0.0

    def scaled(self, factor: float) -> HeightEstimate:
        f = abs(factor)
        if self.exact and self.value == 0.0:
            return self
        return HeightEstimate(self.value * factor, widen(self.radius * f, self.value * factor),
                              converged=self.converged)

    def __add__(self, other: HeightEstimate) -> HeightEstimate:
        v = self.value + other.value
        if self.exact and other.exact and self.value == 0.0 and other.value == 0.0:
            return HeightEstimate.zero()
        return HeightEstimate(v, widen(self.radius + other.radius, v),
                              converged=self.converged and other.converged)

    def __sub__(self, other: HeightEstimate) -> HeightEstimate:
        return self + other.scaled(-1.0)

    def to_dict(self) -> dict:
        return {"value": self.value, "radius": self.radius, "exact": self.exact}


def widen(radius: float, value: float = 0.0) -> float:
    """Pad a radius for the rounding error of the float that carries it."""
    return radius * (1.0 + _SLACK) + abs(value) * 4.5e-16 + 1e-300


def log_abs_int(n) -> float:
    """``log|n|`` for an arbitrarily large nonzero integer (relative error ~1e-16)."""
    n = abs(gmpy2.mpz(n))
    if n == 0:
        raise ValueError("log of zero")
    bl = n.bit_length()
    if bl <= 1000:
        return math.log(int(n))
    shift = bl - 64
    return math.log(int(n >> shift)) + shift * _LOG2
