"""Running approximation-ratio certificates and the admissible step-size bound.

Two trackers are maintained along a run. The one-parameter tracker accumulates
lambda with per-step increments (sum_k alpha_k O_k dt) / <Q>, certifying the
ratio lambda - lambda0. The two-parameter tracker evolves (x, y) by

    x' = x b<Q> / c,   y' = y + x g / c,   c = b<Q> - a g,

with g = sum_k alpha_k O_k dt, certifying (y - y0) / x. A negative g breaks
the lower-bound argument, so it is never folded in silently: the increment is
clamped to zero and the violation counted. A non-positive c means the bound
collapsed; callers freeze the tracker at its last valid value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .hamiltonian import NormBounds


class DenominatorCollapse(RuntimeError):
    """Two-parameter update denominator c = b<Q> - a*gain dropped to <= 0."""

    def __init__(self, q_exp: float, gain: float, c: float):
        super().__init__(f"two-parameter denominator collapsed: q_exp={q_exp}, gain={gain}, c={c}")
        self.q_exp = q_exp
        self.gain = gain
        self.c = c


@dataclass
class OneParamTracker:
    lam: float = 0.0
    lam0: float = 0.0
    history: list[float] = field(default_factory=list)
    violations: int = 0
    last_violated: bool = False

    @property
    def lower_bound(self) -> float:
        return self.lam - self.lam0


@dataclass
class TwoParamTracker:
    x: float = 1.0
    y: float = 0.0
    x0: float = 1.0
    y0: float = 0.0
    violations: int = 0
    last_violated: bool = False
    frozen: bool = False


def _gain(alpha_k: Sequence[float], o_k: Sequence[float], dt: float) -> float:
    if len(alpha_k) != len(o_k):
        raise ValueError(f"length mismatch: {len(alpha_k)} alphas vs {len(o_k)} observables")
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    return sum(a * o for a, o in zip(alpha_k, o_k)) * dt


def one_param_step(
    tracker: OneParamTracker,
    alpha_k: Sequence[float],
    o_k: Sequence[float],
    dt: float,
    q_exp: float,
) -> OneParamTracker:
    """Apply one discrete certificate increment gain / q_exp."""
    if q_exp <= 0:
        raise ValueError(f"q_exp must be positive, got {q_exp}")
    gain = _gain(alpha_k, o_k, dt)
    tracker.last_violated = gain < 0
    if gain < 0:
        tracker.violations += 1
        gain = 0.0
    increment = gain / q_exp
    tracker.lam += increment
    tracker.history.append(increment)
    return tracker


def two_param_step(
    tracker: TwoParamTracker,
    alpha_k: Sequence[float],
    o_k: Sequence[float],
    dt: float,
    q_exp: float,
    a: float,
    b: float,
) -> TwoParamTracker:
    """Apply the discrete (x, y) update; raises DenominatorCollapse when c <= 0."""
    if q_exp <= 0:
        raise ValueError(f"q_exp must be positive, got {q_exp}")
    if a < 0 or b <= 0:
        raise ValueError(f"need a >= 0 and b > 0, got a={a}, b={b}")
    if tracker.frozen:
        return tracker
    gain = _gain(alpha_k, o_k, dt)
    tracker.last_violated = gain < 0
    if gain < 0:
        tracker.violations += 1
        gain = 0.0
    c = b * q_exp - a * gain
    if c <= 0:
        raise DenominatorCollapse(q_exp=q_exp, gain=gain, c=c)
    new_x = tracker.x * (b * q_exp) / c
    new_y = tracker.y + tracker.x * gain / c
    tracker.x, tracker.y = new_x, new_y
    return tracker


def two_param_lower_bound(tracker: TwoParamTracker) -> float:
    if tracker.x <= 0:
        raise ValueError(f"x must stay positive, got {tracker.x}")
    return (tracker.y - tracker.y0) / tracker.x


def max_step_size(bounds: NormBounds, epsilon: float, x_next: float = 1.0) -> float:
    """Largest admissible step: epsilon / (B x + C epsilon + sqrt(A x epsilon)).

    With x_next = 1 this is the one-parameter bound. All-zero constants make
    the bound vacuous; that degenerate case returns +inf.
    """
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    if x_next <= 0:
        raise ValueError(f"x_next must be positive, got {x_next}")
    if min(bounds.A, bounds.B, bounds.C) < 0:
        raise ValueError("norm constants must be nonnegative")
    denom = bounds.B * x_next + bounds.C * epsilon + math.sqrt(bounds.A * x_next * epsilon)
    if denom == 0.0:
        return math.inf
    return epsilon / denom


def potential_value(hf_exp: float, optimum: float, tracker) -> float:
    """Potential at the current step, for monotonicity tests against an oracle optimum."""
    if optimum <= 0:
        raise ValueError(f"optimum must be positive, got {optimum}")
    if isinstance(tracker, OneParamTracker):
        return hf_exp - tracker.lam * optimum
    if isinstance(tracker, TwoParamTracker):
        return tracker.x * hf_exp - tracker.y * optimum
    raise TypeError(f"unsupported tracker type {type(tracker)!r}")


def trapezoidal_bounds(traces, m: int, dt: float) -> tuple[float, float]:
    """Diagnostic: trapezoidal integration of the continuous certificate formulas.

    Uses the per-step integrand f = beta O^2 / <Q> sampled at the left step
    endpoints recorded in a trace (the final endpoint is not recorded, so the
    last interval is left out; the comparison stays first order in dt). The
    two-parameter path uses <Q> = m - <H_f> with a = b = 1 and running
    trapezoids for x(s) inside the y integral.
    """
    if not traces:
        return 0.0, 0.0
    f_one = []
    f_two = []
    hf_prev = m / 2.0
    for row in traces:
        num = row.beta * row.O * row.O
        f_one.append(num / m)
        q_two = m - hf_prev
        f_two.append(num / q_two if q_two > 0 else 0.0)
        hf_prev = row.hf_exp

    lam_trap = sum((f_one[i] + f_one[i + 1]) / 2.0 * dt for i in range(len(f_one) - 1))

    # Running exponent integral gives x at each node; then trapezoid x*f for y.
    exponents = [0.0]
    for i in range(len(f_two) - 1):
        exponents.append(exponents[-1] + (f_two[i] + f_two[i + 1]) / 2.0 * dt)
    xs = [math.exp(e) for e in exponents]
    y_trap = sum((xs[i] * f_two[i] + xs[i + 1] * f_two[i + 1]) / 2.0 * dt for i in range(len(f_two) - 1))
    x_final = xs[-1]
    return lam_trap, y_trap / x_final
