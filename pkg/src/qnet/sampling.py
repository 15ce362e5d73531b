"""Seeded random colour generators with bounded conditioning.

Means have standard normal entries; covariances are A @ A.T + 0.1*I for
normal A, which keeps condition numbers small enough that the algebraic
law checks stay far from their tolerances.
"""

from __future__ import annotations

import numpy as np

from .colours import (
    Colour,
    DensityVal,
    EntropyVal,
    GaussianEstimate,
    InfoMatrix,
    UnnormalizedGaussian,
    Vec,
)


def random_spd(rng: np.random.Generator, dim: int) -> np.ndarray:
    a = rng.standard_normal((dim, dim))
    return a @ a.T + 0.1 * np.eye(dim)


def random_vec(rng: np.random.Generator, dim: int = 3) -> Vec:
    return Vec(rng.standard_normal(dim))


def random_gaussian_estimate(rng: np.random.Generator, dim: int = 3) -> GaussianEstimate:
    return GaussianEstimate(rng.standard_normal(dim), random_spd(rng, dim))


def random_unnormalized_gaussian(rng: np.random.Generator, dim: int = 3) -> UnnormalizedGaussian:
    return UnnormalizedGaussian(
        rng.standard_normal(dim), random_spd(rng, dim), float(rng.normal(0.0, 1.0))
    )


def random_info_matrix(rng: np.random.Generator, dim: int = 3) -> InfoMatrix:
    return InfoMatrix(random_spd(rng, dim))


def random_entropy(rng: np.random.Generator, dim: int = 1) -> EntropyVal:
    return EntropyVal(float(rng.uniform(0.0, 8.0)))


def random_density(rng: np.random.Generator, dim: int = 1) -> DensityVal:
    return DensityVal(float(np.exp(rng.uniform(-40.0, 0.0))))


SAMPLERS = {
    "vec": random_vec,
    "ci": random_gaussian_estimate,
    "gaussian": random_unnormalized_gaussian,
    "info": random_info_matrix,
    "entropy": random_entropy,
    "density": random_density,
}


def random_colour(rng: np.random.Generator, kind: str, dim: int = 3) -> Colour:
    try:
        sampler = SAMPLERS[kind]
    except KeyError:
        raise ValueError(f"unknown quandloid kind {kind!r}") from None
    return sampler(rng, dim)
