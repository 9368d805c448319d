"""Slot-level Monte-Carlo simulation of ``n`` saturated SmartBAN nodes.

Every node always has a single-slot frame ready.  At each slot boundary a
node transmits with its current contention probability ``alpha``; exactly one
transmitter is a success, two or more collide.  With NACK acknowledgement and
an error-free channel there is no acknowledgement traffic to model.

Contention rules per node:

* after a success, ``failures = 0`` and ``alpha = CP_max``;
* after a collision, ``failures += 1``; if ``failures`` is now even and
  ``alpha >= 2 * CP_min`` then ``alpha`` is halved.

Randomness comes from one PCG64 stream per node, keyed on ``(seed, node)``.
The bulk loop runs in a compiled kernel when it is importable and falls back
to pure Python otherwise; both consume the same draws and give bit-identical
results.  Set ``SMARTBAN_SACA_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import enum
import math
import operator
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

from . import _kernel_py
from .protocol_params import UserPriority, contention_probability, up_parameters

try:
    from . import _kernel as _kernel_c
except ImportError:  # extension not built
    _kernel_c = None

KERNELS = {"python": _kernel_py.run_chunk}
if _kernel_c is not None:
    KERNELS["cython"] = _kernel_c.run_chunk

if _kernel_c is not None and not os.environ.get("SMARTBAN_SACA_PURE_PYTHON"):
    DEFAULT_BACKEND = "cython"
else:
    DEFAULT_BACKEND = "python"

MAX_NODES = 16
DEFAULT_SLOTS = 100_000
CHUNK_SLOTS = 8192


@dataclass
class NodeState:
    failures: int = 0
    alpha: Fraction = Fraction(1)
    head_of_line_slot: int = 0

    @classmethod
    def fresh(cls, up) -> "NodeState":
        return cls(0, up_parameters(up).cp_max, 0)


class Outcome(enum.Enum):
    IDLE = "idle"
    SUCCESS = "success"
    COLLISION = "collision"


class SlotOutcome(NamedTuple):
    kind: Outcome
    nodes: tuple[int, ...] = ()
    delay: int | None = None


def step(nodes: Sequence[NodeState], rngs, slot: int, up) -> SlotOutcome:
    """Advance all nodes through one slot, mutating ``nodes`` in place.

    ``rngs`` holds one generator per node; each contributes exactly one
    uniform draw per slot whether or not the node transmits.
    """
    params = up_parameters(up)
    tx = tuple(i for i, (node, rng) in enumerate(zip(nodes, rngs, strict=True)) if rng.random() < node.alpha)
    if not tx:
        return SlotOutcome(Outcome.IDLE)
    if len(tx) == 1:
        node = nodes[tx[0]]
        delay = slot - node.head_of_line_slot + 1
        node.failures = 0
        node.alpha = params.cp_max
        node.head_of_line_slot = slot + 1
        return SlotOutcome(Outcome.SUCCESS, tx, delay)
    for i in tx:
        node = nodes[i]
        node.failures += 1
        if node.failures % 2 == 0 and node.alpha >= 2 * params.cp_min:
            node.alpha /= 2
    return SlotOutcome(Outcome.COLLISION, tx)


@dataclass(frozen=True)
class SimConfig:
    up: UserPriority
    n: int
    slots: int = DEFAULT_SLOTS
    seed: int = 1

    def __post_init__(self):
        object.__setattr__(self, "up", UserPriority(self.up))
        for name in ("n", "slots", "seed"):
            object.__setattr__(self, name, operator.index(getattr(self, name)))
        if not 1 <= self.n <= MAX_NODES:
            raise ValueError(f"n must be in [1, {MAX_NODES}], got {self.n}")
        if self.slots < 1:
            raise ValueError(f"slots must be >= 1, got {self.slots}")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be a non-negative 64-bit integer, got {self.seed}")


@dataclass(frozen=True)
class SimMetrics:
    config: SimConfig
    attempts: int
    collided_attempts: int
    success_slots: int
    collision_slots: int
    idle_slots: int
    delay_sum: int
    delay_samples: int
    backend: str = field(default=DEFAULT_BACKEND, compare=False)

    @property
    def tau_hat(self) -> float:
        return self.attempts / (self.config.n * self.config.slots)

    @property
    def p_hat(self) -> float:
        return self.collided_attempts / self.attempts if self.attempts else math.nan

    @property
    def throughput_hat(self) -> float:
        return self.success_slots / self.config.slots

    @property
    def mean_delay_slots(self) -> float:
        # packets still in flight at the end are censored
        return self.delay_sum / self.delay_samples if self.delay_samples else math.nan


def node_streams(seed: int, n: int) -> list[np.random.Generator]:
    return [np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(i,)))) for i in range(n)]


def run(config: SimConfig, backend: str | None = None, chunk_slots: int = CHUNK_SLOTS) -> SimMetrics:
    """Simulate ``config.slots`` slots from a cold start and aggregate counts."""
    backend = backend or DEFAULT_BACKEND
    try:
        kernel = KERNELS[backend]
    except KeyError:
        raise ValueError(f"unknown or unavailable backend {backend!r}; have {sorted(KERNELS)}") from None

    params = up_parameters(config.up)
    n = config.n
    rngs = node_streams(config.seed, n)
    failures = np.zeros(n, dtype=np.int64)
    alpha = np.full(n, float(params.cp_max))
    hol = np.zeros(n, dtype=np.int64)
    counters = np.zeros(7, dtype=np.int64)
    draws = np.empty((n, chunk_slots))

    slot = 0
    while slot < config.slots:
        length = min(chunk_slots, config.slots - slot)
        block = draws[:, :length] if length == chunk_slots else np.empty((n, length))
        for i, rng in enumerate(rngs):
            rng.random(out=block[i])
        kernel(block, slot, failures, alpha, hol, float(params.cp_max), float(params.cp_min), counters)
        slot += length

    return SimMetrics(config, *(int(x) for x in counters), backend=backend)


def alpha_for_failures(up, failures: int) -> Fraction:
    """Contention probability a node holds after ``failures`` consecutive failures."""
    return contention_probability(up, min(failures, up_parameters(up).r))
