"""De Rham curve machinery.

The De Rham function R_a on [0, 1] is the singular function fixed by the
two-branch self-affine system

    R_a(x) = a * R_a(2x)               for x < 1/2,
    R_a(x) = (1 - a) * R_a(2x - 1) + a for x >= 1/2,

with R_a(0) = 0 and R_a(1) = 1.  Equivalently it is the CDF of a binary
expansion whose digits come from a biased coin.  This module provides the
exact dyadic toolkit around it: binary expansions, the recursive and the
Lomnicki-Ulam digit-series evaluators, the closed-form velocity table on
dyadic rationals, the auxiliary velocity recursions d_n and the
re-parametrized iteration r_n, scale-regularizing sequences, a numeric
velocity estimator, and a Monte Carlo oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence, Union

import numpy as np

from .numerics import (
    DomainError,
    ExactScalar,
    HypothesisViolationError,
    LimitResult,
    limit_extrapolate,
)
from .scaleops import Signal

__all__ = [
    "DeRhamParams",
    "DyadicNumber",
    "DyadicVelocityEstimate",
    "MCEstimate",
    "ScaleSequence",
    "dn_normalized",
    "dn_recursion",
    "dyadic_expand",
    "eval_arithmetic",
    "eval_recursive",
    "mc_estimate",
    "rn_iterate",
    "scale_regularizing_sequence",
    "signal",
    "velocity_dyadic_exact",
    "velocity_numeric",
]

Scalar = Union[ExactScalar, Fraction, float, int]


def _as_fraction(x: Scalar) -> Fraction:
    if isinstance(x, ExactScalar):
        return x.fraction
    if isinstance(x, Fraction):
        return x
    return Fraction(x)


@dataclass(frozen=True)
class DeRhamParams:
    """Weight parameter of the curve together with its derived exponent.

    The associated velocity/Hoelder order is beta = -log2(a).  The balanced
    weight a = 1/2 is excluded here because it makes the curve the identity
    and the exponent degenerate; the evaluation routines still accept the
    bare weight 1/2 directly.
    """

    a: float

    def __post_init__(self) -> None:
        if not 0.0 < self.a < 1.0:
            raise DomainError(f"weight must lie in (0, 1): {self.a}")
        if self.a == 0.5:
            raise DomainError("weight 1/2 is the degenerate identity case")

    def beta(self) -> float:
        return -math.log2(self.a)


def _weight(a: "float | DeRhamParams") -> float:
    w = a.a if isinstance(a, DeRhamParams) else float(a)
    if not 0.0 < w < 1.0:
        raise DomainError(f"weight must lie in (0, 1): {w}")
    return w


@dataclass(frozen=True)
class DyadicNumber:
    """A truncated binary expansion 0.d1 d2 ... dn of a number in [0, 1].

    ``terminating`` records whether the expansion is exact (no nonzero
    digits beyond ``depth``).  Note x = 1 has no finite expansion of this
    form; it is returned as the all-ones truncation with
    ``terminating=False``.
    """

    digits: tuple[int, ...]
    terminating: bool

    @property
    def depth(self) -> int:
        return len(self.digits)

    def digit_sum(self) -> int:
        return sum(self.digits)

    def value(self) -> float:
        return float(self.fraction())

    def fraction(self) -> Fraction:
        return sum((Fraction(d, 2**k) for k, d in enumerate(self.digits, 1)), Fraction(0))


def dyadic_expand(x: Scalar, depth: int) -> DyadicNumber:
    """First ``depth`` binary digits of x in [0, 1], truncated (never rounded up)."""
    if depth < 1:
        raise DomainError(f"depth must be at least 1: {depth}")
    rem = _as_fraction(x)
    if not 0 <= rem <= 1:
        raise DomainError(f"expansion requires x in [0, 1]: {rem}")
    digits = []
    for _ in range(depth):
        rem *= 2
        d = 1 if rem >= 1 else 0
        rem -= d
        digits.append(d)
    return DyadicNumber(tuple(digits), terminating=(rem == 0))


def eval_recursive(x: Scalar, a: "float | DeRhamParams", depth: int = 48) -> float:
    """Evaluate the curve by unrolling the two-branch recursion ``depth`` times.

    Terminates early on exact 0 or 1, so dyadic rationals of depth <= depth
    are evaluated exactly.  When the budget runs out the remaining factor is
    closed with the identity (the exact fixed point of the balanced case),
    giving an absolute error bound max(a, 1-a)^depth; for a = 1/2 the
    result is exact for every input up to rounding.
    """
    w = _weight(a)
    exact = isinstance(x, (ExactScalar, Fraction, int))
    cur = _as_fraction(x) if exact else float(x)
    if not 0 <= cur <= 1:
        raise DomainError(f"curve is defined on [0, 1]: {x}")
    half = Fraction(1, 2) if exact else 0.5
    scale, offset = 1.0, 0.0
    for _ in range(depth):
        if cur == 0:
            return offset
        if cur == 1:
            return offset + scale
        if cur < half:
            scale *= w
            cur = 2 * cur
        else:
            offset += scale * w
            scale *= 1.0 - w
            cur = 2 * cur - 1
    return offset + scale * float(cur)


def eval_arithmetic(x: DyadicNumber, a: "float | DeRhamParams") -> float:
    """Lomnicki-Ulam digit series over the available digits.

    Each digit contributes a/(1-a) * a^(k - s_k) * (1 - a)^(s_k) with k the
    digit position and s_k the running digit sum; for a terminating
    expansion the finite sum is the exact curve value, and for a truncated
    one the tail it discards is bounded by
    a/(1-a) * max(a, 1-a)^depth / (1 - max(a, 1-a)).
    """
    if x.depth < 1:
        raise DomainError("expansion must carry at least one digit")
    w = _weight(a)
    s = 0
    acc = 0.0
    for k, d in enumerate(x.digits, 1):
        if d:
            s += 1
            acc += w ** (k - s) * (1.0 - w) ** s
    return w / (1.0 - w) * acc


def velocity_dyadic_exact(x: Scalar, params: DeRhamParams, depth: int = 53) -> float:
    """Closed-form fractional velocity table of order beta = -log2(a).

    Returns (2^beta - 1)^(s-1) when x has a terminating expansion within
    ``depth`` (s its digit sum) and 0 otherwise: the velocity is nonzero
    exactly on the dyadic rationals.  The table is stated for interior
    points (s >= 1); at x = 0 the formula yields the reciprocal factor.
    """
    beta = params.beta()
    frac = _as_fraction(x)
    if not 0 <= frac < 1:
        raise DomainError(f"velocity table is defined on [0, 1): {frac}")
    if frac == 0:
        return (2.0**beta - 1.0) ** -1
    expansion = dyadic_expand(frac, depth)
    if not expansion.terminating:
        return 0.0
    return (2.0**beta - 1.0) ** (expansion.digit_sum() - 1)


def dn_recursion(x: Scalar, a_exp: float, n: int) -> float:
    """Velocity-factor recursion d_n: d_0 = 1, one factor (2^a - 1) per
    upper-branch visit of the doubling orbit of x.

    Equals (2^a - 1)^(s_n) with s_n the digit sum of x's first n binary
    digits; this carries one factor more than the closed-form table, see
    :func:`dn_normalized`.
    """
    if a_exp <= 0:
        raise DomainError(f"exponent must be positive: {a_exp}")
    if n < 0:
        raise DomainError(f"iteration count must be non-negative: {n}")
    exact = isinstance(x, (ExactScalar, Fraction, int))
    cur = _as_fraction(x) if exact else float(x)
    if not 0 <= cur <= 1:
        raise DomainError(f"recursion is defined on [0, 1]: {x}")
    half = Fraction(1, 2) if exact else 0.5
    factor = 2.0**a_exp - 1.0
    out = 1.0
    for _ in range(n):
        if cur < half:
            cur = 2 * cur
        else:
            out *= factor
            cur = 2 * cur - 1
    return out


def dn_normalized(x: Scalar, a_exp: float, n: int) -> float:
    """d_n divided by one unit factor (2^a - 1), matching the closed-form
    dyadic velocity table (2^a - 1)^(s_n - 1)."""
    return dn_recursion(x, a_exp, n) / (2.0**a_exp - 1.0)


def rn_iterate(x: Scalar, a_exp: float, n: int) -> float:
    """n-fold application of the branch recursion bottoming out at x^a.

    The weight is 1/2^a, so the iterates converge pointwise to the curve
    with weight 2^(-a); a = 1 is the balanced identity case.
    """
    if not 0.0 < a_exp <= 1.0:
        raise DomainError(f"exponent must lie in (0, 1]: {a_exp}")
    if n < 0:
        raise DomainError(f"iteration count must be non-negative: {n}")
    exact = isinstance(x, (ExactScalar, Fraction, int))
    cur = _as_fraction(x) if exact else float(x)
    if not 0 <= cur <= 1:
        raise DomainError(f"iteration is defined on [0, 1]: {x}")
    half = Fraction(1, 2) if exact else 0.5
    w = 2.0**-a_exp
    scale, offset = 1.0, 0.0
    for _ in range(n):
        if cur < half:
            scale *= w
            cur = 2 * cur
        else:
            offset += scale * w
            scale *= 1.0 - w
            cur = 2 * cur - 1
    return offset + scale * float(cur) ** a_exp


@dataclass(frozen=True)
class ScaleSequence:
    """A strictly decreasing null sequence of scales tied to an order."""

    epsilons: tuple[float, ...]
    alpha: float

    def __post_init__(self) -> None:
        if any(e <= 0 for e in self.epsilons):
            raise DomainError("scales must be positive")
        if any(b >= a for a, b in zip(self.epsilons, self.epsilons[1:])):
            raise DomainError("scales must decrease strictly")


def scale_regularizing_sequence(derivative_factors: Sequence[float], alpha: float) -> ScaleSequence:
    """Scales eps_n = (prod_{k<=n} factors_k)^(-1/alpha) from the expansion
    factors of a contractive recursion.

    Every factor must exceed 1 (the expansion hypothesis); then the prefix
    products grow and the sequence decreases strictly to 0, which is what
    makes it scale-regularizing for the recursion's velocity limits.
    """
    if not 0.0 < alpha <= 1.0:
        raise DomainError(f"order must lie in (0, 1]: {alpha}")
    if not derivative_factors:
        raise DomainError("need at least one factor")
    eps = []
    prod = 1.0
    for k, factor in enumerate(derivative_factors):
        if factor <= 1.0:
            raise HypothesisViolationError(
                f"factor {factor} at position {k} violates the expansion hypothesis (> 1)"
            )
        prod *= factor
        eps.append(prod ** (-1.0 / alpha))
    return ScaleSequence(tuple(eps), alpha)


def signal(a: "float | DeRhamParams", depth: int = 30) -> Signal:
    """The depth-limited curve as a scan-ready signal (no derivative stack)."""
    w = _weight(a)
    return Signal(eval=lambda t: eval_recursive(t, w, depth))


@dataclass
class DyadicVelocityEstimate:
    """Numeric velocity of the curve along the dyadic scale sequence.

    ``value`` is reported in units of the single-digit velocity
    (2^beta - 1): the raw limit of the order-beta difference quotient at a
    terminating dyadic of digit sum s is (2^beta - 1)^s, one such factor
    per binary digit including the increment's own trailing digit, so the
    normalized value reproduces the closed-form table (2^beta - 1)^(s-1)
    of :func:`velocity_dyadic_exact`.  ``raw`` carries the unnormalized
    limit process.
    """

    value: float
    raw: LimitResult
    beta: float
    eps0: float

    @property
    def converged(self) -> bool:
        return self.raw.converged


def velocity_numeric(
    x: Scalar,
    params: DeRhamParams,
    signal_depth: int = 30,
    eps0: float | None = None,
    tol: float = 1e-6,
    max_terms: int = 48,
) -> DyadicVelocityEstimate:
    """Estimate the curve's velocity of order beta = -log2(a) at x from
    forward increments along eps_k = eps0 * 2^-k.

    The quotient is the pure power-law form (f(x+eps) - f(x)) / eps^beta
    (beta may exceed 1 for a < 1/2; no Taylor correction applies since the
    curve has zero derivative wherever the derivative exists).  Increments
    are taken on the dyadic grid so the depth-limited evaluation is exact
    at every sample; see :class:`DyadicVelocityEstimate` for the reported
    normalization.
    """
    beta = params.beta()
    xv = float(_as_fraction(x))
    if not 0.0 <= xv < 1.0:
        raise DomainError(f"velocity estimation requires x in [0, 1): {xv}")
    if eps0 is None:
        eps0 = 2.0**-4
    if eps0 <= 0:
        raise DomainError(f"initial scale must be positive: {eps0}")
    while xv + eps0 > 1.0:
        eps0 /= 2.0
    f = signal(params.a, signal_depth)
    fx = f.eval(xv)

    def quotient(k: int) -> float:
        eps = eps0 * 2.0**-k
        return (f.eval(xv + eps) - fx) / eps**beta

    raw = limit_extrapolate(quotient, tol=tol, max_terms=max_terms)
    unit = 2.0**beta - 1.0
    return DyadicVelocityEstimate(value=raw.value / unit, raw=raw, beta=beta, eps0=eps0)


class MCEstimate(NamedTuple):
    estimate: float
    stderr: float


def mc_estimate(x: float, a: float, trials: int, flips: int, seed: int) -> MCEstimate:
    """Monte Carlo value of the curve as the CDF of a biased binary expansion.

    Each trial draws ``flips`` binary digits with P(digit = 1) = 1 - a
    (heads, with probability a, map to digit 0; this encoding is what
    reproduces the recursive evaluation) and records whether the resulting
    number t = 0.b1 b2 ... is <= x.  Returns the hit fraction and its
    binomial standard error sqrt(p(1-p)/trials).  Truncating at ``flips``
    digits biases the estimate by at most max(a, 1-a)^flips.
    """
    w = _weight(a)
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"evaluation point must lie in [0, 1]: {x}")
    if trials < 1 or flips < 1:
        raise DomainError(f"need trials >= 1 and flips >= 1: {trials}, {flips}")
    rng = np.random.default_rng(seed)
    digits = rng.random((trials, flips)) < (1.0 - w)
    weights = 2.0 ** -np.arange(1, flips + 1)
    t = digits @ weights
    p = float(np.count_nonzero(t <= x)) / trials
    return MCEstimate(p, math.sqrt(p * (1.0 - p) / trials))
