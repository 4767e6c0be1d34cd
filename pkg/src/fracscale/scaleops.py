"""Scale-space operators for real-valued signals.

The two operator families measured here quantify non-linear growth at a
point: the fractal variation (a difference quotient of mixed order n+beta
built on the Taylor remainder) and the scale velocity (a normalized
epsilon-derivative of the scale embedding f(x +/- eps)).  Their limits
agree for C^1 signals with non-vanishing derivative, which is what
:func:`limit_equivalence_check` verifies numerically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Literal, Sequence

import numpy as np

from .numerics import (
    ContractError,
    DomainError,
    EstimationError,
    EvaluationError,
    ExactScalar,
    FracOrder,
    LimitResult,
    central_diff,
    frac_part,
    limit_extrapolate,
    numeric_derivative,
)

__all__ = [
    "EquivalenceResult",
    "HolderFit",
    "ScaleSample",
    "Side",
    "Signal",
    "VelocityEstimate",
    "fractional_velocity",
    "fracvar",
    "holder_exponent",
    "limit_equivalence_check",
    "scale_profile",
    "scale_velocity",
    "set_of_change_scan",
]

Side = Literal["forward", "backward"]
_SIDES = ("forward", "backward")


def _as_float(x) -> float:
    if isinstance(x, ExactScalar):
        return x.value()
    if isinstance(x, Fraction):
        return float(x)
    return float(x)


@dataclass(frozen=True)
class Signal:
    """A real-valued signal with optional analytic derivatives.

    ``derivative_stack[j]`` is the (j+1)-th derivative, so the stack reads
    (f', f'', ...).  Derivatives are only required by operations of integer
    order n > 0 and by the analytic path of :func:`scale_velocity`.
    """

    eval: Callable[[float], float]
    derivative_stack: tuple[Callable[[float], float], ...] | None = None

    def derivative(self, j: int = 1) -> Callable[[float], float] | None:
        """The j-th derivative map when available, else None."""
        if self.derivative_stack is None or len(self.derivative_stack) < j:
            return None
        return self.derivative_stack[j - 1]

    def validate_derivatives(self, points: Iterable[float], rel_tol: float = 1e-3) -> None:
        """Spot-check the stack against central differences at sample points."""
        if not self.derivative_stack:
            return
        lower = [self.eval, *self.derivative_stack[:-1]]
        for base, deriv in zip(lower, self.derivative_stack):
            for t in points:
                approx = numeric_derivative(base, t)
                exact = deriv(t)
                if abs(approx - exact) > rel_tol * max(abs(exact), 1.0):
                    raise ContractError(
                        f"derivative stack inconsistent at t={t}: analytic {exact}, numeric {approx}"
                    )


@dataclass(frozen=True)
class ScaleSample:
    """One point (x, eps, value) of a signal's scale embedding."""

    x: float
    epsilon: float
    value: float

    def __post_init__(self) -> None:
        if self.epsilon <= 0:
            raise DomainError(f"scale must be positive: {self.epsilon}")


@dataclass
class VelocityEstimate:
    """Result of a fractional-velocity limit process."""

    order: FracOrder
    side: Side
    result: LimitResult

    @property
    def value(self) -> float:
        return self.result.value

    @property
    def converged(self) -> bool:
        return self.result.converged


@dataclass
class EquivalenceResult:
    """Paired limits of the two operator families plus an agreement flag."""

    v_frac: LimitResult
    v_scale: LimitResult
    agree: bool
    hypothesis_violated: bool = False
    note: str | None = None


@dataclass
class HolderFit:
    """Log-log regression estimate of a pointwise Hoelder exponent."""

    alpha_hat: float
    r_squared: float
    samples_used: int


def _check_side(side: str) -> None:
    if side not in _SIDES:
        raise DomainError(f"side must be one of {_SIDES}: {side!r}")


def _eval_checked(f: Signal, t: float) -> float:
    v = f.eval(t)
    if not math.isfinite(v):
        raise EvaluationError(f"signal evaluated to non-finite value at t={t}", points=(t,))
    return v


def _taylor(f: Signal, x: float, e: float, n: int) -> float:
    # Taylor polynomial of degree n about x, evaluated at offset e.
    acc = _eval_checked(f, x)
    for k in range(1, n + 1):
        acc += f.derivative_stack[k - 1](x) / math.factorial(k) * e**k
    return acc


def fracvar(f: Signal, x, order: FracOrder, epsilon: float, side: Side = "forward") -> float:
    """Fractal variation of mixed order n+beta at scale ``epsilon``.

    Forward: (n+1)! * (f(x+eps) - T_n(x, eps)) / eps^(n+beta); backward
    carries the extra (-1)^n and differences against T_n(x, -eps), with
    T_n the Taylor polynomial of f about x.  Orders with n > 0 require the
    signal to supply f', ..., f^(n) analytically.
    """
    _check_side(side)
    if epsilon <= 0:
        raise DomainError(f"scale must be positive: {epsilon}")
    xv = _as_float(x)
    n = order.n
    if n > 0 and (f.derivative_stack is None or len(f.derivative_stack) < n):
        raise ContractError(f"order n={n} requires {n} analytic derivative(s) in the stack")
    fact = math.factorial(n + 1)
    denom = epsilon ** order.total()
    if side == "forward":
        return fact * (_eval_checked(f, xv + epsilon) - _taylor(f, xv, epsilon, n)) / denom
    return (-1.0) ** n * fact * (_taylor(f, xv, -epsilon, n) - _eval_checked(f, xv - epsilon)) / denom


def fractional_velocity(
    f: Signal,
    x,
    order: FracOrder,
    side: Side = "forward",
    eps0: float = 0.25,
    tol: float = 1e-6,
    max_terms: int = 48,
) -> VelocityEstimate:
    """Limit of the fractal variation along eps_k = eps0 * 2^-k.

    The dyadic scale sequence matches the scale-regularizing sequences
    produced by binary self-affine recursions, so singular signals built
    from such recursions converge along it.  Divergence is reported via
    ``converged=False`` on the embedded :class:`LimitResult`, never as a
    value.
    """
    _check_side(side)
    if eps0 <= 0:
        raise DomainError(f"initial scale must be positive: {eps0}")
    xv = _as_float(x)
    result = limit_extrapolate(
        lambda k: fracvar(f, xv, order, eps0 * 2.0**-k, side), tol=tol, max_terms=max_terms
    )
    return VelocityEstimate(order=order, side=side, result=result)


def scale_velocity(
    f: Signal,
    x,
    beta: float,
    epsilon: float,
    side: Side = "forward",
    step_factor: float = 1e-3,
) -> float:
    """Scale velocity (1 / (1 - {beta})) * eps^beta * d f(x +/- eps) / d eps.

    The epsilon-derivative uses the analytic f' when the signal carries
    one; otherwise a central difference with step ``step_factor * epsilon``
    (relative so the stencil never crosses eps = 0, and large enough that
    truncation dominates evaluation noise).  ``{1} == 0`` so beta = 1
    reduces to eps * f'(x + eps).
    """
    _check_side(side)
    if not 0.0 < beta <= 1.0:
        raise DomainError(f"scale-velocity order must lie in (0, 1]: {beta}")
    if epsilon <= 0:
        raise DomainError(f"scale must be positive: {epsilon}")
    xv = _as_float(x)
    sign = 1.0 if side == "forward" else -1.0
    fp = f.derivative(1)
    if fp is not None:
        deriv = sign * fp(xv + sign * epsilon)
    else:
        deriv = central_diff(lambda e: f.eval(xv + sign * e), epsilon, step_factor * epsilon)
    return epsilon**beta * deriv / (1.0 - frac_part(beta))


def limit_equivalence_check(
    f: Signal,
    x,
    beta: float,
    eps0: float = 0.25,
    tol: float = 1e-6,
    max_terms: int = 64,
) -> EquivalenceResult:
    """Check that the order-(1-beta) variation limit equals the order-beta
    scale-velocity limit (forward side).

    The identity requires f' continuous and non-vanishing on (x, x+eps0];
    that hypothesis is sampled and a violation is carried as a warning
    flag, not an exception.  ``agree`` demands both limits converged and
    within 10*tol of each other.
    """
    if not 0.0 < beta < 1.0:
        raise DomainError(f"order must lie in (0, 1): {beta}")
    xv = _as_float(x)

    violated = False
    note = None
    fp = f.derivative(1)
    probe = fp if fp is not None else (lambda t: numeric_derivative(f.eval, t))
    for j in range(1, 9):
        t = xv + eps0 * j / 8.0
        if abs(probe(t)) < 1e-12:
            violated = True
            note = f"f' vanishes near t={t}; the equivalence hypothesis fails"
            break

    v_frac = fractional_velocity(f, xv, FracOrder(0, 1.0 - beta), "forward", eps0, tol, max_terms).result
    v_scale = limit_extrapolate(
        lambda k: scale_velocity(f, xv, beta, eps0 * 2.0**-k, "forward"), tol=tol, max_terms=max_terms
    )
    agree = v_frac.converged and v_scale.converged and abs(v_frac.value - v_scale.value) < 10.0 * tol
    return EquivalenceResult(v_frac, v_scale, agree, violated, note)


def set_of_change_scan(
    f: Signal,
    grid: Sequence,
    order: FracOrder,
    side: Side = "forward",
    eps0: float = 0.25,
    tol: float = 1e-6,
    threshold: float = 1e-4,
    max_terms: int = 48,
) -> list[tuple[object, VelocityEstimate]]:
    """Grid points whose fractional velocity converges to a value above
    ``threshold`` in magnitude, with their estimates.

    The threshold is strictly positive (default 1e-4) because floating
    point estimates of a vanishing velocity never land exactly on zero.
    """
    if threshold <= 0:
        raise DomainError(f"threshold must be positive: {threshold}")
    hits = []
    for point in grid:
        estimate = fractional_velocity(f, point, order, side, eps0, tol, max_terms)
        if estimate.converged and abs(estimate.value) > threshold:
            hits.append((point, estimate))
    return hits


def scale_profile(f: Signal, x, epsilons: Sequence[float], side: Side = "forward") -> list[ScaleSample]:
    """Evaluate the scale embedding f(x +/- eps) over a set of scales."""
    _check_side(side)
    xv = _as_float(x)
    sign = 1.0 if side == "forward" else -1.0
    return [ScaleSample(xv, e, _eval_checked(f, xv + sign * e)) for e in epsilons]


def holder_exponent(
    f: Signal,
    x,
    eps_range: tuple[float, float],
    points: int = 12,
    side: Side = "forward",
) -> HolderFit:
    """Pointwise Hoelder exponent by log-log regression of |f(x+/-eps)-f(x)|.

    Scales are geometrically spaced across ``eps_range``.  Zero increments
    (exact at some dyadic offsets of singular signals) are dropped rather
    than failing the fit; fewer than 4 surviving samples is an error.
    """
    eps_min, eps_max = eps_range
    if not 0.0 < eps_min < eps_max:
        raise DomainError(f"need 0 < eps_min < eps_max: {eps_range}")
    if points < 4:
        raise DomainError(f"need at least 4 sample scales: {points}")
    xv = _as_float(x)
    f0 = _eval_checked(f, xv)
    epsilons = np.geomspace(eps_max, eps_min, points)
    samples = scale_profile(f, xv, epsilons, side)
    logs = [
        (math.log(s.epsilon), math.log(abs(s.value - f0)))
        for s in samples
        if s.value != f0
    ]
    if len(logs) < 4:
        raise EstimationError(
            f"only {len(logs)} nonzero increments out of {points}; cannot fit an exponent"
        )
    le = np.array([p[0] for p in logs])
    li = np.array([p[1] for p in logs])
    slope, intercept = np.polyfit(le, li, 1)
    fit = slope * le + intercept
    ss_res = float(np.sum((li - fit) ** 2))
    ss_tot = float(np.sum((li - li.mean()) ** 2))
    r_squared = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return HolderFit(float(slope), r_squared, len(logs))
