"""Colour types: the pieces of information carried on network edges.

A colour is one of a small tagged family, each living in its own update
algebra:

* ``Vec`` -- plain real vector, convex-combination updates.
* ``GaussianEstimate`` -- estimate/covariance pair fused by covariance
  intersection.
* ``UnnormalizedGaussian`` -- unnormalized Gaussian density with an explicit
  log peak value, fused by weighted geometric mixing.
* ``InfoMatrix`` -- observed information matrix, linear updates on the
  positive semidefinite cone.
* ``EntropyVal`` -- nonnegative entropy in bits, linear updates.
* ``DensityVal`` -- positive scalar density value, geometric updates (the
  carrier used by the entropy homomorphism).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, NonPositiveDensity, VariantMismatch

TOL_SYM = 1e-9
TOL_PD = 1e-10


def _as_vector(x) -> np.ndarray:
    v = np.atleast_1d(np.asarray(x, dtype=float))
    if v.ndim != 1:
        raise DimensionMismatch(f"expected a vector, got shape {v.shape}")
    return v


def _as_square(x, n: int | None = None) -> np.ndarray:
    m = np.asarray(x, dtype=float)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {m.shape}")
    if n is not None and m.shape[0] != n:
        raise DimensionMismatch(f"matrix is {m.shape[0]}x{m.shape[0]}, expected {n}x{n}")
    return m


def check_symmetric(m: np.ndarray, tol: float = TOL_SYM) -> None:
    skew = float(np.max(np.abs(m - m.T))) if m.size else 0.0
    if skew > tol:
        raise ValueError(f"matrix asymmetry {skew:.3e} exceeds {tol:.0e}")


def min_eigenvalue(m: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(m)[0])


@dataclass(frozen=True)
class Vec:
    v: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "v", _as_vector(self.v))

    @property
    def dim(self) -> int:
        return self.v.shape[0]


@dataclass(frozen=True)
class GaussianEstimate:
    """Estimate/covariance pair; cov must be symmetric positive definite."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = _as_vector(self.mean)
        cov = _as_square(self.cov, mean.shape[0])
        check_symmetric(cov)
        if min_eigenvalue(cov) <= TOL_PD:
            raise ValueError("covariance is not positive definite")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def dim(self) -> int:
        return self.mean.shape[0]


@dataclass(frozen=True)
class UnnormalizedGaussian:
    """Gaussian-shaped density; its value at the mode is exp(log_scale)."""

    mean: np.ndarray
    cov: np.ndarray
    log_scale: float = 0.0

    def __post_init__(self):
        mean = _as_vector(self.mean)
        cov = _as_square(self.cov, mean.shape[0])
        check_symmetric(cov)
        if min_eigenvalue(cov) <= TOL_PD:
            raise ValueError("covariance is not positive definite")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)
        object.__setattr__(self, "log_scale", float(self.log_scale))

    @property
    def dim(self) -> int:
        return self.mean.shape[0]

    def log_density(self, x) -> float:
        """Log of the density at x. Used by tests as an independent probe."""
        x = _as_vector(x)
        d = x - self.mean
        prec = np.linalg.inv(self.cov)
        return self.log_scale - 0.5 * float(d @ prec @ d)


@dataclass(frozen=True)
class InfoMatrix:
    """Observed information matrix; symmetric, eigenvalues >= -TOL_PD."""

    mat: np.ndarray

    def __post_init__(self):
        mat = _as_square(self.mat)
        check_symmetric(mat)
        if min_eigenvalue(mat) < -TOL_PD:
            raise ValueError("information matrix is not positive semidefinite")
        object.__setattr__(self, "mat", mat)

    @property
    def dim(self) -> int:
        return self.mat.shape[0]


@dataclass(frozen=True)
class EntropyVal:
    bits: float

    def __post_init__(self):
        b = float(self.bits)
        if not np.isfinite(b) or b < 0:
            raise ValueError(f"entropy must be finite and nonnegative, got {b}")
        object.__setattr__(self, "bits", b)

    @property
    def dim(self) -> int:
        return 1


@dataclass(frozen=True)
class DensityVal:
    """A positive scalar density value, e.g. the mass of a typical sequence."""

    value: float

    def __post_init__(self):
        v = float(self.value)
        if not np.isfinite(v) or v <= 0:
            raise NonPositiveDensity(f"density value must be positive, got {v}")
        object.__setattr__(self, "value", v)

    @property
    def dim(self) -> int:
        return 1


Colour = Vec | GaussianEstimate | UnnormalizedGaussian | InfoMatrix | EntropyVal | DensityVal

#: quandloid kind name -> colour class, as used in network files
KIND_TO_CLASS = {
    "vec": Vec,
    "ci": GaussianEstimate,
    "gaussian": UnnormalizedGaussian,
    "info": InfoMatrix,
    "entropy": EntropyVal,
    "density": DensityVal,
}
CLASS_TO_KIND = {cls: kind for kind, cls in KIND_TO_CLASS.items()}


def colour_distance(a: Colour, b: Colour) -> float:
    """Max-abs distance between two colours of the same variant."""
    if type(a) is not type(b):
        raise VariantMismatch(f"{type(a).__name__} vs {type(b).__name__}")
    if isinstance(a, Vec):
        return float(np.max(np.abs(a.v - b.v)))
    if isinstance(a, GaussianEstimate):
        return max(
            float(np.max(np.abs(a.mean - b.mean))),
            float(np.max(np.abs(a.cov - b.cov))),
        )
    if isinstance(a, UnnormalizedGaussian):
        return max(
            float(np.max(np.abs(a.mean - b.mean))),
            float(np.max(np.abs(a.cov - b.cov))),
            abs(a.log_scale - b.log_scale),
        )
    if isinstance(a, InfoMatrix):
        return float(np.max(np.abs(a.mat - b.mat)))
    if isinstance(a, EntropyVal):
        return abs(a.bits - b.bits)
    if isinstance(a, DensityVal):
        return abs(a.value - b.value)
    raise TypeError(f"unknown colour type {type(a)!r}")


def colours_equal(a: Colour, b: Colour, tol: float = 1e-9) -> bool:
    if type(a) is not type(b):
        return False
    if a.dim != b.dim:
        return False
    return colour_distance(a, b) <= tol
