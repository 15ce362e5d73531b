"""Update and discount operations for every colour variant.

The binary update ``fuse(a, op, b)`` reads "a updated by agent b with
weight op.s".  Linear variants combine convexly, ``(1-s)*a + s*b``.
Estimate pairs combine their precisions the same way (covariance
intersection), and unnormalized Gaussian densities combine as the
pointwise weighted geometric mean ``p^(1-s) * q^s``, which is again
Gaussian-shaped once the square is completed.

``discount`` is the exact left inverse: ``discount(fuse(a, op, b), op, b)``
returns ``a`` whenever both sides are defined.  Where the algebraic
inverse leaves the valid colour set (non-PD covariance, negative
entropy), ``NotInvertibleHere`` is raised instead of returning an
invalid colour.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .colours import (
    TOL_PD,
    Colour,
    DensityVal,
    EntropyVal,
    GaussianEstimate,
    InfoMatrix,
    UnnormalizedGaussian,
    Vec,
    min_eigenvalue,
)
from .errors import (
    DimensionMismatch,
    InvalidWeight,
    NotInvertibleHere,
    SingularCovariance,
    VariantMismatch,
)


@dataclass(frozen=True)
class OpParam:
    """An update operation, identified by its real weight.

    Weight 1 is excluded (it would destroy the left input and break
    invertibility); weight 0 is the identity operation.
    """

    s: float

    def __post_init__(self):
        s = float(self.s)
        if s == 1.0:
            raise InvalidWeight("weight 1 is not an admissible update")
        object.__setattr__(self, "s", s)

    @property
    def is_identity(self) -> bool:
        return self.s == 0.0

    def inverse_weight(self) -> float:
        """Weight s' with a >_s' b realizing the discount, for linear variants."""
        return -self.s / (1.0 - self.s)


IDENTITY_OP = OpParam(0.0)


def symmetrize(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.T)


def spd_inverse(m: np.ndarray) -> np.ndarray:
    """Inverse of a symmetric positive definite matrix via Cholesky."""
    try:
        chol = np.linalg.cholesky(m)
    except np.linalg.LinAlgError as exc:
        raise SingularCovariance("matrix is not positive definite") from exc
    ident = np.eye(m.shape[0])
    inv = np.linalg.solve(chol.T, np.linalg.solve(chol, ident))
    return symmetrize(inv)


def _spd_solve(m: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    try:
        chol = np.linalg.cholesky(m)
    except np.linalg.LinAlgError as exc:
        raise SingularCovariance("matrix is not positive definite") from exc
    return np.linalg.solve(chol.T, np.linalg.solve(chol, rhs))


def _check_pair(a: Colour, b: Colour) -> None:
    if type(a) is not type(b):
        raise VariantMismatch(f"{type(a).__name__} vs {type(b).__name__}")
    if a.dim != b.dim:
        raise DimensionMismatch(f"dimension {a.dim} vs {b.dim}")


def _cone_precision(p: np.ndarray, what: str) -> np.ndarray:
    # precision produced by an affine combination; must stay PD
    p = symmetrize(p)
    if min_eigenvalue(p) <= TOL_PD:
        raise NotInvertibleHere(f"{what} leaves the positive definite cone")
    return p


def fuse(a: Colour, op: OpParam, b: Colour) -> Colour:
    """Update colour a by agent colour b with weight op.s."""
    _check_pair(a, b)
    s = op.s
    if s == 1.0:
        raise InvalidWeight("weight 1 is not an admissible update")
    if s == 0.0:
        return a
    t = 1.0 - s

    if isinstance(a, Vec):
        return Vec(t * a.v + s * b.v)

    if isinstance(a, EntropyVal):
        bits = t * a.bits + s * b.bits
        if bits < 0 or not np.isfinite(bits):
            raise NotInvertibleHere("entropy update leaves the nonnegative range")
        return EntropyVal(bits)

    if isinstance(a, DensityVal):
        return DensityVal(float(np.exp(t * np.log(a.value) + s * np.log(b.value))))

    if isinstance(a, InfoMatrix):
        mat = symmetrize(t * a.mat + s * b.mat)
        if min_eigenvalue(mat) < -TOL_PD:
            raise NotInvertibleHere("information update leaves the PSD cone")
        return InfoMatrix(mat)

    if isinstance(a, GaussianEstimate):
        prec_a = spd_inverse(a.cov)
        prec_b = spd_inverse(b.cov)
        prec = _cone_precision(t * prec_a + s * prec_b, "intersected precision")
        eta = t * prec_a @ a.mean + s * prec_b @ b.mean
        mean = _spd_solve(prec, eta)
        return GaussianEstimate(mean, spd_inverse(prec))

    if isinstance(a, UnnormalizedGaussian):
        prec_a = spd_inverse(a.cov)
        prec_b = spd_inverse(b.cov)
        prec = _cone_precision(t * prec_a + s * prec_b, "mixed precision")
        eta = t * prec_a @ a.mean + s * prec_b @ b.mean
        mean = _spd_solve(prec, eta)
        # residual of completing the square in the mixed exponent
        kappa = (
            t * float(a.mean @ prec_a @ a.mean)
            + s * float(b.mean @ prec_b @ b.mean)
            - float(mean @ prec @ mean)
        )
        log_scale = t * a.log_scale + s * b.log_scale - 0.5 * kappa
        return UnnormalizedGaussian(mean, spd_inverse(prec), log_scale)

    raise TypeError(f"unsupported colour type {type(a)!r}")


def discount(c: Colour, op: OpParam, b: Colour) -> Colour:
    """Return the unique colour a with fuse(a, op, b) == c."""
    _check_pair(c, b)
    s = op.s
    if s == 1.0:
        raise InvalidWeight("weight 1 is not an admissible update")
    if s == 0.0:
        return c
    t = 1.0 - s

    if isinstance(c, Vec):
        return Vec((c.v - s * b.v) / t)

    if isinstance(c, EntropyVal):
        bits = (c.bits - s * b.bits) / t
        if bits < 0 or not np.isfinite(bits):
            raise NotInvertibleHere("discounted entropy would be negative")
        return EntropyVal(bits)

    if isinstance(c, DensityVal):
        return DensityVal(float(np.exp((np.log(c.value) - s * np.log(b.value)) / t)))

    if isinstance(c, InfoMatrix):
        mat = symmetrize((c.mat - s * b.mat) / t)
        if min_eigenvalue(mat) < -TOL_PD:
            raise NotInvertibleHere("discounted information matrix is indefinite")
        return InfoMatrix(mat)

    if isinstance(c, GaussianEstimate):
        prec_c = spd_inverse(c.cov)
        prec_b = spd_inverse(b.cov)
        prec_a = symmetrize((prec_c - s * prec_b) / t)
        if min_eigenvalue(prec_a) <= TOL_PD:
            raise NotInvertibleHere("discounted precision is not positive definite")
        eta = (prec_c @ c.mean - s * prec_b @ b.mean) / t
        mean = _spd_solve(prec_a, eta)
        return GaussianEstimate(mean, spd_inverse(prec_a))

    if isinstance(c, UnnormalizedGaussian):
        prec_c = spd_inverse(c.cov)
        prec_b = spd_inverse(b.cov)
        prec_a = symmetrize((prec_c - s * prec_b) / t)
        if min_eigenvalue(prec_a) <= TOL_PD:
            raise NotInvertibleHere("discounted precision is not positive definite")
        eta = (prec_c @ c.mean - s * prec_b @ b.mean) / t
        mean = _spd_solve(prec_a, eta)
        kappa = (
            t * float(mean @ prec_a @ mean)
            + s * float(b.mean @ prec_b @ b.mean)
            - float(c.mean @ prec_c @ c.mean)
        )
        log_scale = (c.log_scale - s * b.log_scale + 0.5 * kappa) / t
        return UnnormalizedGaussian(mean, spd_inverse(prec_a), log_scale)

    raise TypeError(f"unsupported colour type {type(c)!r}")


def apply_transition(colour: Colour, op: OpParam, agent: Colour, mode: str) -> Colour:
    """Forward patient transition: update fuses, discount inverts."""
    if mode == "update":
        return fuse(colour, op, agent)
    if mode == "discount":
        return discount(colour, op, agent)
    raise ValueError(f"unknown transition mode {mode!r}")


@dataclass(frozen=True)
class ConsistencyReport:
    margin: float
    ok: bool


def consistent(est: GaussianEstimate, true_cov) -> ConsistencyReport:
    """Check that the claimed covariance dominates the true covariance.

    The margin is the smallest eigenvalue of ``est.cov - true_cov``;
    the estimate is consistent when the difference is positive
    semidefinite (margin >= -TOL_PD).
    """
    if not isinstance(est, GaussianEstimate):
        raise VariantMismatch(f"expected GaussianEstimate, got {type(est).__name__}")
    true_cov = np.asarray(true_cov, dtype=float)
    if true_cov.ndim == 0:
        true_cov = true_cov.reshape(1, 1)
    if true_cov.shape != est.cov.shape:
        raise DimensionMismatch(f"{true_cov.shape} vs {est.cov.shape}")
    margin = min_eigenvalue(symmetrize(est.cov - true_cov))
    return ConsistencyReport(margin=margin, ok=margin >= -TOL_PD)


def fisher_observed(p: UnnormalizedGaussian, g_prior: UnnormalizedGaussian) -> InfoMatrix:
    """Observed information of the joint density p(x|m)*g(m) in m.

    For Gaussian shapes the second derivative of the log joint in the
    location parameter is constant, so the observed information equals
    the sum of the two precisions.
    """
    if not isinstance(p, UnnormalizedGaussian) or not isinstance(g_prior, UnnormalizedGaussian):
        raise VariantMismatch("fisher_observed expects UnnormalizedGaussian inputs")
    if p.dim != g_prior.dim:
        raise DimensionMismatch(f"dimension {p.dim} vs {g_prior.dim}")
    return InfoMatrix(symmetrize(spd_inverse(p.cov) + spd_inverse(g_prior.cov)))
