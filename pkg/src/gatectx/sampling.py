"""Finite-shot sampling of probability matrices and reproducible RNG streams.

Stream-splitting rule: every independently sampled matrix draws from its own
generator, derived from the run seed and an integer key path via
``numpy.random.SeedSequence(seed, spawn_key=key)``.  The convention used by
the simulation drivers is key = (experiment index r, sequence index, role),
with entries inside one matrix consumed in row-major order.  Results are
therefore bit-identical no matter how work is distributed over experiments
or sequences.
"""

from __future__ import annotations

import warnings

import numpy as np

from .tomography import ProbMatrix

__all__ = ["substream", "sample_probmatrix", "sample_entries", "bootstrap_variance"]


def substream(seed: int, *key: int) -> np.random.Generator:
    """Generator for the substream identified by an integer key path."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))


def sample_entries(entries: np.ndarray, n_s: int, rng: np.random.Generator) -> np.ndarray:
    """Relative frequencies n_{k|i} / N_s with binomial counts, row-major order."""
    return rng.binomial(n_s, entries) / n_s


def sample_probmatrix(p: ProbMatrix, n_s: int, seed_or_rng) -> ProbMatrix:
    """Finite-shot estimate of a true probability matrix.

    Each entry is drawn independently as Bin(N_s, P_{k|i}) / N_s.  Pass a
    seed for a one-off draw or a Generator positioned on the substream that
    owns this matrix.
    """
    if n_s < 1:
        raise ValueError("n_s must be at least 1")
    rng = seed_or_rng if isinstance(seed_or_rng, np.random.Generator) else substream(int(seed_or_rng))
    return ProbMatrix(sample_entries(p.entries, n_s, rng), "sampled", n_s)


def bootstrap_variance(p_hat: ProbMatrix, statistic, b: int, seed_or_rng) -> float:
    """Parametric bootstrap variance of ``statistic`` over ``b`` replicas.

    Replicas resample every entry from Bin(N_s, P-hat_{k|i}).  Replicas on
    which the statistic is undefined (singular matrix, etc.) are skipped and
    reported through a warning.
    """
    if b < 100:
        raise ValueError("use at least 100 bootstrap replicas")
    if p_hat.kind != "sampled" or p_hat.n_s is None:
        raise ValueError("bootstrap resampling needs a sampled matrix with its shot count")
    rng = seed_or_rng if isinstance(seed_or_rng, np.random.Generator) else substream(int(seed_or_rng))
    n_s = p_hat.n_s
    values = []
    skipped = 0
    for _ in range(b):
        replica = ProbMatrix(sample_entries(p_hat.entries, n_s, rng), "sampled", n_s)
        try:
            values.append(float(statistic(replica)))
        except (np.linalg.LinAlgError, ArithmeticError, ValueError, RuntimeError):
            skipped += 1
    if skipped:
        warnings.warn(f"bootstrap skipped {skipped} of {b} replicas (statistic undefined)")
    if len(values) < 2:
        raise ValueError("too few valid bootstrap replicas to estimate a variance")
    return float(np.var(values, ddof=1))
