"""Signal families and the tiny command-line expression grammar.

Grammar (used by the CLI ``--f`` flag):

    poly:c_n,...,c_0    polynomial with coefficients from highest degree down
    pow:alpha           t^alpha on t >= 0
    abs-pow:alpha@x0    |t - x0|^alpha
    derham:a@depth      depth-limited De Rham curve with weight a
    sin                 sin t
    exp                 e^t

Analytic first and second derivatives are attached where the family has
them (poly, pow away from 0, sin, exp); the singular families carry none.
"""

from __future__ import annotations

import math

from . import derham
from .numerics import DomainError, EvaluationError
from .scaleops import Signal

__all__ = [
    "abs_power",
    "de_rham",
    "exponential",
    "parse_signal",
    "polynomial",
    "power",
    "sine",
]


def _horner(coeffs: tuple[float, ...], t: float) -> float:
    acc = 0.0
    for c in coeffs:
        acc = acc * t + c
    return acc


def _poly_derivative(coeffs: tuple[float, ...]) -> tuple[float, ...]:
    n = len(coeffs) - 1
    return tuple(c * (n - i) for i, c in enumerate(coeffs[:-1])) or (0.0,)


def polynomial(*coeffs: float) -> Signal:
    """Polynomial signal from coefficients c_n, ..., c_0 (highest first)."""
    if not coeffs:
        raise DomainError("polynomial needs at least one coefficient")
    c0 = tuple(float(c) for c in coeffs)
    c1 = _poly_derivative(c0)
    c2 = _poly_derivative(c1)
    return Signal(
        eval=lambda t: _horner(c0, t),
        derivative_stack=(lambda t: _horner(c1, t), lambda t: _horner(c2, t)),
    )


def power(alpha: float) -> Signal:
    """t^alpha on the half line t >= 0."""
    if alpha <= 0:
        raise DomainError(f"power exponent must be positive: {alpha}")

    def ev(t: float) -> float:
        if t < 0:
            raise EvaluationError(f"t^{alpha} undefined for t < 0: {t}", points=(t,))
        return t**alpha

    def d1(t: float) -> float:
        if t <= 0:
            raise EvaluationError(f"derivative of t^{alpha} singular at {t}", points=(t,))
        return alpha * t ** (alpha - 1.0)

    return Signal(eval=ev, derivative_stack=(d1,))


def abs_power(alpha: float, x0: float = 0.0) -> Signal:
    """|t - x0|^alpha; a cusp at x0, no derivative stack."""
    if alpha <= 0:
        raise DomainError(f"power exponent must be positive: {alpha}")
    return Signal(eval=lambda t: abs(t - x0) ** alpha)


def sine() -> Signal:
    return Signal(eval=math.sin, derivative_stack=(math.cos, lambda t: -math.sin(t)))


def exponential() -> Signal:
    return Signal(eval=math.exp, derivative_stack=(math.exp, math.exp))


def de_rham(a: float, depth: int = 30) -> Signal:
    """Depth-limited De Rham curve with weight a (singular, no stack)."""
    return derham.signal(a, depth)


def parse_signal(text: str) -> Signal:
    """Parse the CLI grammar into a :class:`Signal`."""
    name, _, arg = text.partition(":")
    name = name.strip().lower()
    try:
        if name == "poly":
            return polynomial(*(float(c) for c in arg.split(",")))
        if name == "pow":
            return power(float(arg))
        if name == "abs-pow":
            exponent, _, centre = arg.partition("@")
            return abs_power(float(exponent), float(centre) if centre else 0.0)
        if name == "derham":
            weight, _, depth = arg.partition("@")
            return de_rham(float(weight), int(depth) if depth else 30)
        if name == "sin":
            return sine()
        if name == "exp":
            return exponential()
    except (TypeError, ValueError) as exc:
        raise DomainError(f"malformed signal expression {text!r}: {exc}") from exc
    raise DomainError(
        f"unknown signal family {name!r}; expected poly:, pow:, abs-pow:, derham:, sin, exp"
    )
