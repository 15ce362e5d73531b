import numpy as np
import pytest

from qnet import (
    DensityVal,
    EntropyVal,
    GaussianEstimate,
    InfoMatrix,
    NonPositiveDensity,
    UnnormalizedGaussian,
    Vec,
    VariantMismatch,
    colour_distance,
    colours_equal,
)


def test_gaussian_estimate_requires_symmetry():
    with pytest.raises(ValueError, match="asymmetry"):
        GaussianEstimate([0.0, 0.0], [[1.0, 0.5], [0.2, 1.0]])


def test_gaussian_estimate_requires_positive_definite():
    with pytest.raises(ValueError, match="positive definite"):
        GaussianEstimate([0.0], [[0.0]])
    with pytest.raises(ValueError, match="positive definite"):
        GaussianEstimate([0.0, 0.0], [[1.0, 2.0], [2.0, 1.0]])


def test_dimension_checks():
    with pytest.raises(Exception):
        GaussianEstimate([0.0, 1.0], [[1.0]])


def test_info_matrix_allows_psd_boundary():
    InfoMatrix([[1.0, 0.0], [0.0, 0.0]])
    with pytest.raises(ValueError):
        InfoMatrix([[-1.0]])


def test_entropy_nonnegative_finite():
    EntropyVal(0.0)
    with pytest.raises(ValueError):
        EntropyVal(-0.1)
    with pytest.raises(ValueError):
        EntropyVal(float("inf"))


def test_density_positive():
    DensityVal(1e-30)
    with pytest.raises(NonPositiveDensity):
        DensityVal(0.0)
    with pytest.raises(NonPositiveDensity):
        DensityVal(-1.0)


def test_scalar_inputs_promote_to_arrays():
    c = GaussianEstimate([1.0], [[2.0]])
    assert c.mean.shape == (1,)
    assert c.cov.shape == (1, 1)
    assert c.dim == 1


def test_colour_distance_and_equality():
    a = Vec([1.0, 2.0])
    b = Vec([1.0, 2.0 + 1e-12])
    assert colour_distance(a, b) == pytest.approx(1e-12, abs=1e-15)
    assert colours_equal(a, b)
    assert not colours_equal(a, Vec([1.0, 3.0]))
    with pytest.raises(VariantMismatch):
        colour_distance(a, EntropyVal(1.0))


def test_unnormalized_gaussian_log_density_at_mode():
    p = UnnormalizedGaussian([1.0], [[2.0]], log_scale=-0.25)
    assert p.log_density([1.0]) == pytest.approx(-0.25)
    assert p.log_density([3.0]) == pytest.approx(-0.25 - 0.5 * 4.0 / 2.0)
