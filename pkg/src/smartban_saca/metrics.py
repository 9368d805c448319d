"""Saturation throughput and mean head-of-line delay.

Delay is measured in slots from the moment a packet reaches the head of the
queue up to and including its successful slot, so the minimum is 1.  There
is no retry limit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .dtmc import check_probability
from .errors import DelayDomainError
from .fixed_point import _check_nodes, collision_probability, solve
from .protocol_params import UserPriority, schedule, up_parameters


@dataclass(frozen=True)
class PerformanceMetrics:
    up: UserPriority
    n: int
    tau: float
    p: float
    throughput: float
    delay_slots: float


def saturation_throughput(n, tau, p=None) -> float:
    """Fraction of slots carrying exactly one transmission, ``n tau (1-tau)^(n-1)``.

    ``p`` is optional; when given it must agree with the collision model for
    ``(tau, n)``.
    """
    n = _check_nodes(n)
    check_probability(tau, "tau")
    tau = float(tau)
    if p is not None:
        check_probability(p)
        expected = collision_probability(tau, n)
        if not math.isclose(float(p), expected, rel_tol=1e-9, abs_tol=1e-12):
            raise ValueError(f"p={p} inconsistent with tau={tau}, n={n} (expected {expected})")
    return n * tau * (1.0 - tau) ** (n - 1)


def _check_delay_p(p):
    check_probability(p)
    if p == 1:
        raise DelayDomainError("mean delay diverges at p = 1: the packet never succeeds")


def expected_delay_series(up, p, tail_epsilon: float = 1e-12) -> float:
    """Mean delay by summing over the stage at which the packet finally succeeds.

    Stage-``r`` retransmissions form an infinite tail.  It is truncated once the
    analytic bound on the remaining mass,
    ``p^(r+i+1) * (sum_{j<r} 1/alpha_j + (i+2) / ((1-p) alpha_r))``,
    drops below ``tail_epsilon``.
    """
    _check_delay_p(p)
    if not tail_epsilon > 0:
        raise ValueError(f"tail_epsilon must be positive, got {tail_epsilon}")
    p = float(p)
    inv = [1.0 / float(a) for a in schedule(up)]
    r = len(inv) - 1

    terms = []
    cum = 0.0
    for i in range(r):
        cum += inv[i]
        terms.append(p**i * (1 - p) * cum)
    head = cum  # sum of 1/alpha_j for j < r

    if p > 0:
        i = 0
        pr = p**r
        while True:
            terms.append(pr * (1 - p) * (head + (i + 1) * inv[r]))
            pr *= p
            if pr * (head + (i + 2) * inv[r] / (1 - p)) < tail_epsilon:
                break
            i += 1
    return math.fsum(terms)


def expected_delay_closed(up, p) -> float:
    _check_delay_p(p)
    up = UserPriority(up)
    p = float(p)
    cp_max = float(up_parameters(up).cp_max)
    p2 = p * p
    if up in (UserPriority.LOW, UserPriority.EMERGENCY):
        num = 1 + p2
    else:
        num = 1 + p2 + 2 * p2 * p2
    return num / (cp_max * (1 - p))


def expected_delay_reciprocal(tau, p) -> float:
    """``1 / P_s`` with ``P_s = tau (1 - p)`` the tagged node's per-slot success probability."""
    check_probability(tau, "tau")
    check_probability(p)
    ps = float(tau) * (1 - float(p))
    if ps <= 0:
        raise DelayDomainError(f"no measurable delay: tau={tau}, p={p} gives zero success probability")
    return 1.0 / ps


def performance(up, n) -> PerformanceMetrics:
    """Solve the operating point for ``(up, n)`` and evaluate both metrics."""
    op = solve(up, n)
    return PerformanceMetrics(
        up=op.up,
        n=op.n,
        tau=op.tau,
        p=op.p,
        throughput=saturation_throughput(op.n, op.tau, op.p),
        delay_slots=expected_delay_closed(op.up, op.p),
    )


__all__ = [
    "PerformanceMetrics",
    "expected_delay_closed",
    "expected_delay_reciprocal",
    "expected_delay_series",
    "performance",
    "saturation_throughput",
]
