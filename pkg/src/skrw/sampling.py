"""Seeded random parameter tuples for sweeps and property tests.

All draws go through Python's random.Random (Mersenne Twister). Each
sample index gets its own child generator seeded with the string
"{seed}:{index}", so sample i is the same regardless of how many other
samples a run requests. String seeding hashes via sha512 (seed version
2) and is stable across platforms and Python versions.

Numerators are drawn uniformly from [-20, 20], denominators from
[1, 10]; parameters that must not vanish redraw until nonzero.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Callable

from .realization import (DependentSError, RealizationError, SingularOperatorError,
                          SklyaninParams, ZeroDenominatorError, realize)

# benign sample degeneracies worth a redraw; anything else propagates
RESAMPLE_ERRORS = (ZeroDenominatorError, DependentSError, SingularOperatorError)

RNG_ALGORITHM = "Mersenne Twister (random.Random)"
NUMERATOR_BOUND = 20
DENOMINATOR_BOUND = 10


def child_rng(seed: int, index: int) -> random.Random:
    """Per-index generator; independent of the total sample count."""
    return random.Random(f"{seed}:{index}")


def sample_rational(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(-NUMERATOR_BOUND, NUMERATOR_BOUND),
                    rng.randint(1, DENOMINATOR_BOUND))


def sample_nonzero(rng: random.Random) -> Fraction:
    while True:
        v = sample_rational(rng)
        if v:
            return v


def sample_general(rng: random.Random) -> SklyaninParams:
    """All six parameters free, alpha/gamma/zeta nonzero."""
    return SklyaninParams(
        alpha=sample_nonzero(rng), beta=sample_rational(rng),
        gamma=sample_nonzero(rng), delta=sample_rational(rng),
        epsilon=sample_rational(rng), zeta=sample_nonzero(rng))


def sample_locus(rng: random.Random) -> SklyaninParams:
    """beta = delta = epsilon = 0 with the other three nonzero."""
    return SklyaninParams(
        alpha=sample_nonzero(rng), beta=Fraction(0),
        gamma=sample_nonzero(rng), delta=Fraction(0),
        epsilon=Fraction(0), zeta=sample_nonzero(rng))


def sample_scalar_q(rng: random.Random) -> SklyaninParams:
    """Locus points with alpha^2 = gamma^2 = zeta^2 (Q scalar, F_i = 0)."""
    a = sample_nonzero(rng)
    return SklyaninParams(
        alpha=a, beta=Fraction(0),
        gamma=rng.choice((a, -a)), delta=Fraction(0),
        epsilon=Fraction(0), zeta=rng.choice((a, -a)))


def sample_realizable(rng: random.Random,
                      sampler: Callable[[random.Random], SklyaninParams],
                      max_tries: int = 50):
    """Draw until realize() succeeds; returns (params, realization).

    Realization can fail on unlucky tuples (zero rewrite denominator,
    dependent S triple, singular solve operator); redrawing from the
    same child generator keeps the result a pure function of the seed.
    Substantive failures (dual-path mismatch, inconsistent system) are
    not retried.
    """
    for _ in range(max_tries):
        p = sampler(rng)
        try:
            return p, realize(p)
        except RESAMPLE_ERRORS:
            continue
    raise RealizationError(f"no realizable tuple in {max_tries} draws")
