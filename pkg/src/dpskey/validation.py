"""Monte Carlo checks of the concentration bounds and of the count model.

Randomness comes from numpy's PCG64. A run's ``SeedSequence(seed)`` is
spawned into one child stream per block of ``TRIAL_BLOCK`` trials (plus one
for schedules), so results do not depend on how blocks are distributed over
workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channel import ChannelSpec, detection_probability
from .concentration import chernoff_gamma, kato_star, log_inv
from .finite_key import ObservedCounts

TRIAL_BLOCK = 2000
MAX_SAMPLED_BLOCKS = 10**8

LAWS = ("constant", "scheduled", "adaptive")


@dataclass(frozen=True)
class MartingaleProcess:
    """Bernoulli sequence with predictable success probabilities.

    Attributes:
        n_steps: Sequence length.
        p: Mean success probability per step.
        law: ``"constant"`` uses ``p`` at every step; ``"scheduled"`` draws a
            fixed per-step schedule uniformly on ``[0, 2p]`` from the seed;
            ``"adaptive"`` switches between ``p/2`` and ``3p/2`` depending on
            whether the successes so far trail ``i * p``.
        seed: Root seed.
    """

    n_steps: int
    p: float
    law: str = "constant"
    seed: int = 0

    def __post_init__(self):
        if self.n_steps < 1:
            raise ValueError("n_steps must be positive")
        if not 0 <= self.p <= 1:
            raise ValueError("p must lie in [0, 1]")
        if self.law not in LAWS:
            raise ValueError(f"law must be one of {LAWS}")
        if self.law != "constant" and self.p > 0.5:
            raise ValueError("scheduled and adaptive laws need p <= 1/2")

    def _streams(self, n_blocks):
        children = np.random.SeedSequence(self.seed).spawn(n_blocks + 1)
        return children[0], children[1:]

    def schedule(self) -> np.ndarray:
        """Per-step probabilities for the non-adaptive laws."""
        if self.law == "constant":
            return np.full(self.n_steps, self.p)
        if self.law == "scheduled":
            sched_seed, _ = self._streams(0)
            return 2.0 * self.p * np.random.default_rng(sched_seed).random(self.n_steps)
        raise ValueError("adaptive law has no fixed schedule")

    def _run_block(self, seed_seq, size, sched):
        rng = np.random.default_rng(seed_seq)
        n = self.n_steps
        if self.law == "constant":
            return rng.binomial(n, self.p, size=size).astype(float), np.full(size, n * self.p)
        if self.law == "scheduled":
            hits = np.zeros(size)
            for lo in range(0, n, 1000):
                chunk = sched[lo:lo + 1000]
                hits += (rng.random((size, chunk.size)) < chunk).sum(axis=1)
            return hits, np.full(size, sched.sum())
        hits = np.zeros(size)
        psum = np.zeros(size)
        lo_p, hi_p = 0.5 * self.p, 1.5 * self.p
        for i in range(n):
            p_i = np.where(hits < i * self.p, hi_p, lo_p)
            hits += rng.random(size) < p_i
            psum += p_i
        return hits, psum

    def sample(self, trials: int, workers: int = 1) -> tuple[np.ndarray, np.ndarray]:
        """Return ``(successes, sum of conditional means)`` for each trial."""
        n_blocks = -(-trials // TRIAL_BLOCK)
        _, blocks = self._streams(n_blocks)
        sizes = [min(TRIAL_BLOCK, trials - k * TRIAL_BLOCK) for k in range(n_blocks)]
        sched = None if self.law != "scheduled" else self.schedule()
        if workers > 1:
            with ThreadPoolExecutor(workers) as pool:
                parts = list(pool.map(lambda a: self._run_block(a[0], a[1], sched),
                                      zip(blocks, sizes)))
        else:
            parts = [self._run_block(s, k, sched) for s, k in zip(blocks, sizes)]
        return (np.concatenate([p[0] for p in parts]),
                np.concatenate([p[1] for p in parts]))


@dataclass(frozen=True)
class CoverageResult:
    """Violation count of a one-sided bound over repeated trials."""

    violations: int
    trials: int
    eps: float

    @property
    def frequency(self) -> float:
        return self.violations / self.trials

    @property
    def stderr(self) -> float:
        """Binomial standard error of the frequency at the nominal ``eps``."""
        return math.sqrt(self.eps * (1.0 - self.eps) / self.trials)

    @property
    def limit(self) -> float:
        return self.eps + 3.0 * self.stderr

    @property
    def ok(self) -> bool:
        return self.frequency <= self.limit


def coverage_azuma(proc: MartingaleProcess, eps: float, trials: int,
                   workers: int = 1) -> CoverageResult:
    """How often the centred sum reaches ``sqrt(2 n ln(1/eps))``."""
    hits, psum = proc.sample(trials, workers)
    threshold = math.sqrt(2.0 * proc.n_steps * log_inv(eps))
    return CoverageResult(int(np.count_nonzero(hits - psum >= threshold)), trials, eps)


def coverage_kato(proc: MartingaleProcess, prediction: float, eps: float, trials: int,
                  workers: int = 1) -> CoverageResult:
    """How often the sum of conditional means reaches the Kato bound.

    The bound uses coefficients built for ``prediction`` and stays valid for
    any prediction; only its tightness depends on it.
    """
    n = proc.n_steps
    k = kato_star(n, prediction, eps)
    hits, psum = proc.sample(trials, workers)
    bound = hits + (k.b_star + k.a_star * (2.0 * hits / n - 1.0)) * math.sqrt(n)
    return CoverageResult(int(np.count_nonzero(psum >= bound)), trials, eps)


def coverage_chernoff(q: float, t: float, n_em: int, eps2: float, trials: int,
                      seed: int = 0) -> CoverageResult:
    """How often ``Binomial(n_em, t q)`` exceeds ``t q n_em + gamma``."""
    bound = t * q * n_em + chernoff_gamma(q, t, n_em, eps2)
    n_blocks = -(-trials // TRIAL_BLOCK)
    violations = 0
    for k, ss in enumerate(np.random.SeedSequence(seed).spawn(n_blocks)):
        size = min(TRIAL_BLOCK, trials - k * TRIAL_BLOCK)
        m = np.random.default_rng(ss).binomial(int(n_em), t * q, size=size)
        violations += int(np.count_nonzero(m > bound))
    return CoverageResult(violations, trials, eps2)


def sample_protocol_tallies(spec: ChannelSpec, mu: float, t: float, n_em: int,
                            seed: int = 0) -> ObservedCounts:
    """Draw integer tallies of one protocol run under the channel model.

    Detection, the code/sample split and sample bit errors are independent
    Bernoulli events per block, drawn here as the equivalent binomials.
    """
    if n_em > MAX_SAMPLED_BLOCKS:
        raise ValueError(f"n_em above {MAX_SAMPLED_BLOCKS:.0e}; use expected_counts")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    n_det = int(rng.binomial(int(n_em), detection_probability(spec.eta, mu)))
    n_code = int(rng.binomial(n_det, t))
    n_samp = n_det - n_code
    errors = int(rng.binomial(n_samp, spec.e_bit)) if n_samp else 0
    return ObservedCounts(n_det, n_code, n_samp, errors / n_samp if n_samp else 0.0)
