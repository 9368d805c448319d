"""SmartBAN user priorities and the slotted-Aloha contention schedule.

Contention probabilities are kept as exact :class:`fractions.Fraction` values.
They are all dyadic, so converting to ``float`` at a numeric boundary is exact.
"""

from __future__ import annotations

import enum
import operator
from dataclasses import dataclass
from fractions import Fraction

from .errors import StageOutOfRange


class UserPriority(enum.IntEnum):
    LOW = 0
    MID = 1
    HIGH = 2
    EMERGENCY = 3


@dataclass(frozen=True)
class CPParams:
    """Contention parameters for one user priority.

    ``r`` is the retransmission stage at which the contention probability
    bottoms out at ``cp_min``.
    """

    cp_max: Fraction
    cp_min: Fraction
    r: int

    def __post_init__(self):
        if not (0 < self.cp_min <= self.cp_max <= 1):
            raise ValueError(f"need 0 < cp_min <= cp_max <= 1, got {self.cp_min}, {self.cp_max}")
        ratio = self.cp_max / self.cp_min
        if ratio.denominator != 1 or ratio != self.r:
            raise ValueError(f"r must equal cp_max/cp_min exactly, got r={self.r}, ratio={ratio}")
        if self.r & (self.r - 1):
            raise ValueError(f"cp_max/cp_min must be a power of two, got {self.r}")


_TABLE = {
    UserPriority.LOW: CPParams(Fraction(1, 8), Fraction(1, 16), 2),
    UserPriority.MID: CPParams(Fraction(1, 4), Fraction(1, 16), 4),
    UserPriority.HIGH: CPParams(Fraction(1, 2), Fraction(1, 8), 4),
    UserPriority.EMERGENCY: CPParams(Fraction(1), Fraction(1, 2), 2),
}


def up_parameters(up) -> CPParams:
    return _TABLE[UserPriority(up)]


def contention_probability(up, k: int) -> Fraction:
    """Contention probability used at retransmission stage ``k``.

    The probability halves after every second consecutive failure:
    ``alpha_k = CP_max / 2**(k // 2)`` for ``0 <= k <= r``.
    """
    params = up_parameters(up)
    try:
        k = operator.index(k)
    except TypeError:
        raise StageOutOfRange(f"stage must be an integer, got {k!r}") from None
    if not 0 <= k <= params.r:
        raise StageOutOfRange(f"stage {k!r} outside [0, {params.r}] for UP {int(up)}")
    return params.cp_max / 2 ** (k // 2)


def schedule(up) -> list[Fraction]:
    """All stage probabilities ``[alpha_0, ..., alpha_r]``."""
    return [contention_probability(up, k) for k in range(up_parameters(up).r + 1)]
