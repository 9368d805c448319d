"""Saturation operating point: couple the per-node chain with the collision model."""

from __future__ import annotations

import operator
from dataclasses import dataclass

from .dtmc import check_probability, tau_closed_form
from .errors import ConvergenceError
from .protocol_params import UserPriority, up_parameters

MAX_ITER = 200
TOL = 1e-12


@dataclass(frozen=True)
class OperatingPoint:
    up: UserPriority
    n: int
    tau: float
    p: float
    residual: float


def _check_nodes(n) -> int:
    try:
        n = operator.index(n)
    except TypeError:
        raise ValueError(f"node count must be an integer, got {n!r}") from None
    if n < 1:
        raise ValueError(f"node count must be >= 1, got {n}")
    return n


def collision_probability(tau, n) -> float:
    """Probability that at least one of the other ``n - 1`` nodes transmits."""
    check_probability(tau, "tau")
    n = _check_nodes(n)
    return 1.0 - (1.0 - float(tau)) ** (n - 1)


def _g(up, n, tau):
    return tau_closed_form(up, collision_probability(tau, n))


def solve(up, n) -> OperatingPoint:
    """Find the unique ``tau`` with ``tau = tau_closed_form(up, p(tau))``.

    ``h(tau) = tau - g(tau)`` is strictly increasing with ``h(0) < 0 <= h(1)``,
    so bisection on ``[0, 1]`` always converges.
    """
    up = UserPriority(up)
    n = _check_nodes(n)
    if n == 1:
        return OperatingPoint(up, 1, float(up_parameters(up).cp_max), 0.0, 0.0)

    lo, hi = 0.0, 1.0
    for _ in range(MAX_ITER):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if mid - _g(up, n, mid) > 0:
            hi = mid
        else:
            lo = mid
    # pick whichever endpoint has the smaller residual
    tau = min((lo, hi), key=lambda t: abs(t - _g(up, n, t)))
    residual = abs(tau - _g(up, n, tau))
    if residual > TOL:
        raise ConvergenceError(f"bisection stalled for UP {int(up)}, n={n}: residual {residual:.3e}")
    return OperatingPoint(up, n, tau, collision_probability(tau, n), residual)


def solve_damped(up, n, damping: float = 0.5, tol: float = 1e-14, max_iter: int = 10_000) -> OperatingPoint:
    """Damped fixed-point iteration ``tau <- (1-w) tau + w g(tau)``.

    Slower than :func:`solve` and kept as a cross-check.  Plain iteration
    (``damping=1``) can oscillate for aggressive priorities.
    """
    up = UserPriority(up)
    n = _check_nodes(n)
    if not 0 < damping <= 1:
        raise ValueError(f"damping must be in (0, 1], got {damping}")
    tau = float(up_parameters(up).cp_max)
    for _ in range(max_iter):
        nxt = (1 - damping) * tau + damping * _g(up, n, tau)
        if abs(nxt - tau) < tol:
            tau = nxt
            residual = abs(tau - _g(up, n, tau))
            return OperatingPoint(up, n, tau, collision_probability(tau, n), residual)
        tau = nxt
    raise ConvergenceError(f"damped iteration did not converge for UP {int(up)}, n={n}")
