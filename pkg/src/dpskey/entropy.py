"""Binary entropy and photon-number tail probabilities of a three-pulse block."""

from __future__ import annotations

import math
from dataclasses import dataclass

BLOCK_PULSES = 3


@dataclass(frozen=True)
class SourceSpec:
    """Coherent source emitting blocks of three pulses.

    Attributes:
        mu: Mean photon number per pulse.
        block_pulses: Pulses per block. Only 3 is supported.
    """

    mu: float
    block_pulses: int = BLOCK_PULSES

    def __post_init__(self):
        if not (math.isfinite(self.mu) and self.mu > 0):
            raise ValueError(f"mu must be a positive finite number, got {self.mu!r}")
        if self.block_pulses != BLOCK_PULSES:
            raise ValueError("only three-pulse blocks are supported")

    @property
    def block_mean(self) -> float:
        return self.block_pulses * self.mu

    def q(self, n: int) -> float:
        """Probability that a block carries ``n`` or more photons."""
        return poisson_block_tail(self, n)


def binary_entropy(x: float) -> float:
    """Binary entropy in bits, capped at 1 for ``x > 1/2``.

    >>> binary_entropy(0.5)
    1.0
    >>> binary_entropy(0.7)
    1.0
    """
    if not math.isfinite(x) or x < 0:
        raise ValueError(f"binary_entropy needs a finite x >= 0, got {x!r}")
    if x == 0:
        return 0.0
    if x > 0.5:
        return 1.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)


def poisson_tail(mean: float, n: int) -> float:
    """``P[X >= n]`` for ``X ~ Poisson(mean)``.

    Below the mean the finite complement ``1 - sum_{k<n} p_k`` is used. Above
    it that complement cancels catastrophically, so the upper series is summed
    instead; its terms shrink geometrically and it is stopped once they drop
    below one part in 2**60 of the running sum.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    if n == 0:
        return 1.0
    if n == 1:
        return -math.expm1(-mean)
    if n > mean:
        term = math.exp(n * math.log(mean) - mean - math.lgamma(n + 1))
        terms = []
        k = n
        while term > 0.0:
            terms.append(term)
            k += 1
            term *= mean / k
            if term < 2.0**-60 * terms[0]:
                break
        return min(1.0, math.fsum(terms))
    head = [math.exp(k * math.log(mean) - mean - math.lgamma(k + 1)) if k else math.exp(-mean)
            for k in range(n)]
    return min(1.0, max(0.0, 1.0 - math.fsum(head)))


def poisson_block_tail(spec: SourceSpec, n: int) -> float:
    """Probability ``q_n`` that one block holds at least ``n`` photons.

    The block photon number is Poisson with mean ``3 * mu``.
    """
    if not isinstance(spec, SourceSpec):
        raise TypeError("spec must be a SourceSpec")
    if int(n) != n or n < 0:
        raise ValueError(f"n must be a non-negative integer, got {n!r}")
    return poisson_tail(spec.block_mean, int(n))
