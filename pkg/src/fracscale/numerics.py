"""Shared numerical primitives.

Finite differences, accelerated sequence limits, gamma access, and exact
scalar representations used throughout the package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

__all__ = [
    "ContractError",
    "DomainError",
    "EstimationError",
    "EvaluationError",
    "ExactScalar",
    "FracOrder",
    "HypothesisViolationError",
    "LimitResult",
    "central_diff",
    "frac_part",
    "gamma",
    "limit_extrapolate",
    "numeric_derivative",
]


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ContractError(ValueError):
    """A structural precondition (e.g. a required derivative) is missing."""


class HypothesisViolationError(ValueError):
    """Input data violate a hypothesis the result depends on."""


class EstimationError(RuntimeError):
    """An estimation procedure could not produce a usable answer."""


class EvaluationError(ArithmeticError):
    """A function evaluation returned a non-finite value.

    The offending abscissae are carried in :attr:`points`.
    """

    def __init__(self, message: str, points: tuple[float, ...] = ()):
        super().__init__(message)
        self.points = points


def frac_part(order: float) -> float:
    """Fractional part ``{order}`` with the convention ``{1.0} == 0``.

    Integer orders map to 0 so normalizing factors of the form
    ``1 / (1 - {order})`` degenerate to 1 instead of blowing up.
    """
    return order - math.floor(order)


@dataclass(frozen=True)
class FracOrder:
    """A mixed differentiation order ``n + beta``.

    ``n`` is the integer part (>= 0) and ``beta`` the fractional part,
    constrained to (0, 1] so a total order of 2 is represented as
    ``FracOrder(1, 1.0)``.
    """

    n: int = 0
    beta: float = 1.0

    def __post_init__(self) -> None:
        if self.n < 0 or self.n != int(self.n):
            raise DomainError(f"integer part must be a non-negative integer: {self.n}")
        if not 0.0 < self.beta <= 1.0:
            raise DomainError(f"fractional part must lie in (0, 1]: {self.beta}")

    @classmethod
    def from_total(cls, order: float) -> "FracOrder":
        """Split a positive total order into ``n + beta`` with beta in (0, 1]."""
        if order <= 0:
            raise DomainError(f"total order must be positive: {order}")
        n = math.ceil(order) - 1
        return cls(n, order - n)

    def total(self) -> float:
        return self.n + self.beta

    def frac_part(self) -> float:
        """``{n + beta}``; equals ``beta`` except that ``{integer} == 0``."""
        return frac_part(self.total())


@dataclass(frozen=True)
class ExactScalar:
    """An exactly represented rational scalar.

    Built either from an explicit rational p/q or a dyadic p/2^k; stored as
    a normalized :class:`fractions.Fraction` (gcd reduction preserves the
    value, so construction is lossless).
    """

    fraction: Fraction

    @classmethod
    def rational(cls, p: int, q: int) -> "ExactScalar":
        if q <= 0:
            raise DomainError(f"denominator must be positive: {q}")
        return cls(Fraction(p, q))

    @classmethod
    def dyadic(cls, p: int, k: int) -> "ExactScalar":
        """The dyadic rational p / 2^k."""
        if k < 0:
            raise DomainError(f"dyadic exponent must be non-negative: {k}")
        return cls(Fraction(p, 2**k))

    @classmethod
    def from_float(cls, v: float) -> "ExactScalar":
        """Exact value of a finite float (every float is a dyadic rational)."""
        if not math.isfinite(v):
            raise DomainError(f"not a finite value: {v}")
        return cls(Fraction(v))

    def value(self) -> float:
        return float(self.fraction)

    def is_dyadic(self) -> bool:
        q = self.fraction.denominator
        return q & (q - 1) == 0

    def dyadic_exponent(self) -> int:
        """k such that the reduced denominator is 2^k (requires is_dyadic)."""
        if not self.is_dyadic():
            raise DomainError(f"not a dyadic rational: {self.fraction}")
        return self.fraction.denominator.bit_length() - 1

    def __float__(self) -> float:
        return self.value()


@dataclass
class LimitResult:
    """Outcome of a numerical limit process.

    ``residuals`` holds the successive differences of the accelerated
    sequence; when ``converged`` is true the last one is below the
    tolerance that was supplied to the extrapolator.
    """

    value: float
    converged: bool
    residuals: list[float] = field(default_factory=list)
    terms_used: int = 0
    diagnostic: str | None = None


def central_diff(f: Callable[[float], float], t: float, h: float) -> float:
    """Symmetric difference quotient (f(t+h) - f(t-h)) / (2h)."""
    if h <= 0:
        raise DomainError(f"step must be positive: {h}")
    hi, lo = f(t + h), f(t - h)
    if not (math.isfinite(hi) and math.isfinite(lo)):
        raise EvaluationError(
            f"non-finite evaluation while differencing at t={t}, h={h}",
            points=(t - h, t + h),
        )
    return (hi - lo) / (2.0 * h)


def numeric_derivative(f: Callable[[float], float], t: float, delta: float = 1e-6) -> float:
    """Central-difference derivative with relative step max(delta*|t|, delta).

    The step balances truncation against rounding for double precision.
    """
    return central_diff(f, t, max(delta * abs(t), delta))


def _aitken(v0: float, v1: float, v2: float) -> float:
    # One Aitken delta-squared step; falls back to the raw value when the
    # second difference is too small to divide by safely.
    denom = v2 - 2.0 * v1 + v0
    scale = abs(v0) + abs(v1) + abs(v2)
    if abs(denom) <= 1e-14 * max(scale, 1e-300):
        return v2
    return v2 - (v2 - v1) ** 2 / denom


def limit_extrapolate(
    seq: Callable[[int], float],
    tol: float = 1e-6,
    max_terms: int = 32,
) -> LimitResult:
    """Accelerated limit of ``seq(0), seq(1), ...``.

    Successive terms are accelerated with Aitken's delta-squared process
    (one extrapolation level, which removes a geometrically decaying
    leading error term such as the eps_k = eps0 * 2^-k tails produced by
    the scale operators).  Convergence is declared as soon as two
    consecutive accelerated values differ by less than ``tol``.

    Divergence is declared after three raw residuals that grow strictly in
    magnitude; three avoids false alarms from pre-asymptotic wobble.  The
    check runs on the raw differences because acceleration can map a
    geometrically diverging sequence onto a spurious constant.
    """
    if tol <= 0:
        raise DomainError(f"tolerance must be positive: {tol}")
    if max_terms < 2:
        raise DomainError(f"need at least 2 terms: {max_terms}")

    values: list[float] = []
    raw_diffs: list[float] = []
    accelerated: list[float] = []
    acc_diffs: list[float] = []

    for k in range(max_terms):
        v = seq(k)
        if not math.isfinite(v):
            raise EvaluationError(f"sequence returned non-finite value at k={k}", points=(float(k),))
        values.append(v)
        if k >= 1:
            raw_diffs.append(values[-1] - values[-2])
        accelerated.append(_aitken(*values[-3:]) if k >= 2 else v)
        if k >= 1:
            acc_diffs.append(accelerated[-1] - accelerated[-2])
            if abs(acc_diffs[-1]) < tol:
                return LimitResult(accelerated[-1], True, acc_diffs, k + 1)
        if k >= 3:
            r1, r2, r3 = (abs(d) for d in raw_diffs[-3:])
            if r3 > r2 > r1 > 0.0:
                return LimitResult(
                    accelerated[-1],
                    False,
                    acc_diffs,
                    k + 1,
                    diagnostic="diverging: residual magnitudes grew for 3 consecutive terms",
                )

    return LimitResult(
        accelerated[-1],
        False,
        acc_diffs,
        len(values),
        diagnostic=f"no convergence within {max_terms} terms",
    )


def gamma(x: float) -> float:
    """Euler gamma function (poles at non-positive integers raise)."""
    if x <= 0 and x == math.floor(x):
        raise DomainError(f"gamma pole at non-positive integer: {x}")
    try:
        return math.gamma(x)
    except ValueError as exc:  # pragma: no cover - guarded above
        raise DomainError(f"gamma undefined at {x}") from exc
