"""Structure-preserving maps between colour algebras, with stochastic checks.

A homomorphism h sends colours of one algebra to colours of another so
that updating commutes with the map: h(a >_s b) = h(a) >_h(s) h(b).
The three maps shipped here all arise from the weighted-geometric-mean
algebra of unnormalized Gaussian densities:

* ``ci_homomorphism`` projects a density onto its (mean, cov) estimate
  pair, recovering the covariance intersection rule.
* ``entropy_homomorphism`` sends a typical-sequence density value
  2**(-N*H) to the entropy H via -(1/N)*log2.
* ``fisher_homomorphism`` sends a density to its observed information
  over a fixed Gaussian prior.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .algebra import OpParam, fisher_observed, fuse
from .colours import (
    Colour,
    DensityVal,
    EntropyVal,
    GaussianEstimate,
    UnnormalizedGaussian,
    colour_distance,
)
from .errors import NonPositiveDensity, QnetError
from .sampling import random_unnormalized_gaussian


@dataclass(frozen=True)
class Homomorphism:
    name: str
    map_colour: Callable[[Colour], Colour]
    map_op: Callable[[OpParam], OpParam]
    sample_source: Callable[[np.random.Generator], Colour]


@dataclass(frozen=True)
class HomReport:
    name: str
    samples: int
    max_violation: float
    skipped: int

    def ok(self, tol: float) -> bool:
        return self.max_violation < tol


def verify_homomorphism(h: Homomorphism, n_samples: int, seed: int) -> HomReport:
    """Compare h(a >_s b) with h(a) >_h(s) h(b) on random source pairs."""
    if n_samples <= 0:
        raise ValueError("n_samples must be positive")
    rng = np.random.default_rng(seed)
    worst = 0.0
    skipped = 0
    for _ in range(n_samples):
        a = h.sample_source(rng)
        b = h.sample_source(rng)
        op = OpParam(float(rng.uniform(0.0, 0.95)))
        try:
            through_source = h.map_colour(fuse(a, op, b))
            through_target = fuse(h.map_colour(a), h.map_op(op), h.map_colour(b))
        except QnetError:
            skipped += 1
            continue
        worst = max(worst, colour_distance(through_source, through_target))
    return HomReport(name=h.name, samples=n_samples, max_violation=worst, skipped=skipped)


def ci_homomorphism(dim: int = 3) -> Homomorphism:
    """Project unnormalized Gaussians onto estimate pairs, dropping the scale."""

    def project(c: Colour) -> GaussianEstimate:
        assert isinstance(c, UnnormalizedGaussian)
        return GaussianEstimate(c.mean, c.cov)

    return Homomorphism(
        name=f"ci-projection-{dim}d",
        map_colour=project,
        map_op=lambda op: op,
        sample_source=lambda rng: random_unnormalized_gaussian(rng, dim),
    )


def entropy_homomorphism(block_length: int) -> Homomorphism:
    """Map a typical-sequence density value 2**(-N*H) to the entropy H."""
    if block_length <= 0:
        raise ValueError("block length must be positive")
    n = float(block_length)

    def to_entropy(c: Colour) -> EntropyVal:
        if not isinstance(c, DensityVal):
            raise NonPositiveDensity(f"expected a DensityVal, got {type(c).__name__}")
        return EntropyVal(-math.log2(c.value) / n)

    def sample(rng: np.random.Generator) -> DensityVal:
        bits = float(rng.uniform(0.0, 4.0))
        return DensityVal(2.0 ** (-n * bits))

    return Homomorphism(
        name=f"entropy-N{block_length}",
        map_colour=to_entropy,
        map_op=lambda op: op,
        sample_source=sample,
    )


def fisher_homomorphism(g_prior: UnnormalizedGaussian) -> Homomorphism:
    """Map a density to its observed information over a fixed prior."""
    dim = g_prior.dim
    return Homomorphism(
        name=f"fisher-{dim}d",
        map_colour=lambda c: fisher_observed(c, g_prior),
        map_op=lambda op: op,
        sample_source=lambda rng: random_unnormalized_gaussian(rng, dim),
    )
