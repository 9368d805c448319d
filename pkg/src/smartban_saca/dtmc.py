"""Two-dimensional DTMC of a single saturated node.

States are ``(stage, mode)`` with ``stage`` in ``[0, r]`` and ``mode`` either
transmit (0) or defer (1).  Matrices and vectors use the fixed ordering
``(0,T), (0,D), (1,T), (1,D), ...``.

All functions accept ``float`` or :class:`~fractions.Fraction` collision
probabilities; with a ``Fraction`` the stationary vector and both tau forms
are computed exactly.
"""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

from .errors import InvalidProbability, SingularityError
from .protocol_params import UserPriority, schedule, up_parameters


class Mode(enum.IntEnum):
    TRANSMIT = 0
    DEFER = 1


class SacaState(NamedTuple):
    stage: int
    mode: Mode

    @property
    def index(self) -> int:
        return 2 * self.stage + int(self.mode)

    def __str__(self):
        return f"({self.stage},{int(self.mode)})"


def states(up) -> list[SacaState]:
    r = up_parameters(up).r
    return [SacaState(k, m) for k in range(r + 1) for m in Mode]


def check_probability(p, name="p"):
    if isinstance(p, bool) or not isinstance(p, (int, float, Fraction, np.floating, np.integer)):
        raise InvalidProbability(f"{name} must be a real number, got {p!r}")
    if not 0 <= p <= 1:  # also rejects NaN
        raise InvalidProbability(f"{name} must lie in [0, 1], got {p!r}")


def _defer_ratios(up) -> list[Fraction]:
    # (1 - alpha_k) / alpha_k; small integers for every standard UP
    return [(1 - a) / a for a in schedule(up)]


def transition_matrix(up, p, exact: bool = False) -> np.ndarray:
    """One-step transition matrix (row = source state).

    After a collision at stage ``k`` the node moves to stage ``min(k+1, r)``
    and transmits there with that stage's contention probability.  After a
    success (any stage, including stage 0) it returns to stage 0.

    With ``exact=True`` an object array of ``Fraction`` entries is returned.
    """
    check_probability(p)
    alphas = schedule(up)
    r = len(alphas) - 1
    if exact:
        p = Fraction(p)
        m = np.full((2 * (r + 1), 2 * (r + 1)), Fraction(0), dtype=object)
    else:
        p = float(p)
        alphas = [float(a) for a in alphas]
        m = np.zeros((2 * (r + 1), 2 * (r + 1)))

    t = lambda k: 2 * k  # noqa: E731
    d = lambda k: 2 * k + 1  # noqa: E731
    a0 = alphas[0]
    for k in range(r + 1):
        nk = min(k + 1, r)
        m[t(k), t(nk)] = alphas[nk] * p
        m[t(k), d(nk)] = (1 - alphas[nk]) * p
        m[t(k), t(0)] = (1 - p) * a0
        m[t(k), d(0)] = (1 - p) * (1 - a0)
        m[d(k), t(k)] = alphas[k]
        m[d(k), d(k)] = 1 - alphas[k]
    return m


@dataclass(frozen=True)
class StationaryDistribution:
    up: UserPriority
    p: float | Fraction
    probs: tuple

    def __getitem__(self, state) -> float | Fraction:
        stage, mode = state
        return self.probs[2 * stage + int(mode)]

    @property
    def transmit(self) -> tuple:
        return self.probs[0::2]

    @property
    def defer(self) -> tuple:
        return self.probs[1::2]

    def as_array(self) -> np.ndarray:
        return np.array([float(x) for x in self.probs])


def stationary_distribution(up, p) -> StationaryDistribution:
    """Closed-form stationary vector of the chain for collision probability ``p``."""
    check_probability(p)
    if p == 1:
        raise SingularityError("stationary distribution is undefined at p = 1")
    up = UserPriority(up)
    c = _defer_ratios(up)
    r = len(c) - 1
    if not isinstance(p, Fraction):
        p = float(p)
        c = [float(x) for x in c]

    tail = p**r / (1 - p)
    s00 = 1 / (1 / (1 - p) + c[r] * tail + sum(c[k] * p**k for k in range(r)))

    probs = [0] * (2 * (r + 1))
    probs[0] = s00
    probs[1] = c[0] * s00
    for k in range(1, r):
        probs[2 * k] = p**k * s00
        probs[2 * k + 1] = c[k] * p**k * s00
    probs[2 * r] = tail * s00
    probs[2 * r + 1] = c[r] * tail * s00
    return StationaryDistribution(up, p, tuple(probs))


def _tau_denominator_coeffs(up) -> list[Fraction]:
    c = _defer_ratios(up)
    r = len(c) - 1
    coeffs = [Fraction(0)] * (r + 2)
    coeffs[0] += 1
    for k in range(r + 1):
        coeffs[k] += c[k]
    for k in range(r):
        coeffs[k + 1] -= c[k]
    return coeffs


def _horner(coeffs: Sequence, x):
    acc = 0
    for a in reversed(coeffs):
        acc = acc * x + a
    return acc


def tau_general(up, p):
    """Per-slot transmission probability from the full stage sums.

    The denominator is expanded into a polynomial in ``p`` with exact rational
    coefficients, so it stays finite (and accurate) up to ``p = 1``.
    """
    check_probability(p)
    coeffs = _tau_denominator_coeffs(up)
    if isinstance(p, Fraction):
        return 1 / _horner(coeffs, p)
    return 1.0 / _horner([float(a) for a in coeffs], float(p))


def tau_closed_form(up, p):
    check_probability(p)
    up = UserPriority(up)
    cp_max = up_parameters(up).cp_max
    if not isinstance(p, Fraction):
        p = float(p)
        cp_max = float(cp_max)
    p2 = p * p
    if up in (UserPriority.LOW, UserPriority.EMERGENCY):
        return cp_max / (1 + p2)
    return cp_max / (1 + p2 + 2 * p2 * p2)


def export_transition_csv(up, p, fh) -> None:
    """Write non-zero transitions as ``from,to,probability`` rows (debugging aid)."""
    m = transition_matrix(up, p)
    st = states(up)
    w = csv.writer(fh)
    w.writerow(["from", "to", "probability"])
    for i, j in zip(*np.nonzero(m)):
        w.writerow([str(st[i]), str(st[j]), repr(float(m[i, j]))])


def is_row_stochastic(m: np.ndarray, atol: float = 1e-12) -> bool:
    rows = m.sum(axis=1)
    if m.dtype == object:
        return all(x == 1 for x in rows)
    return bool(np.all(m >= 0) and np.all(m <= 1) and np.all(np.abs(rows - 1) <= atol))


__all__ = [
    "Mode",
    "SacaState",
    "StationaryDistribution",
    "check_probability",
    "export_transition_csv",
    "is_row_stochastic",
    "states",
    "stationary_distribution",
    "tau_closed_form",
    "tau_general",
    "transition_matrix",
]
