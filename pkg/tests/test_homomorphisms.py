import numpy as np
import pytest

from qnet import (
    DensityVal,
    EntropyVal,
    GaussianEstimate,
    Homomorphism,
    NonPositiveDensity,
    OpParam,
    UnnormalizedGaussian,
    ci_homomorphism,
    colour_distance,
    entropy_homomorphism,
    fisher_homomorphism,
    fuse,
    verify_homomorphism,
)
from qnet.sampling import random_unnormalized_gaussian


class TestCiProjection:
    def test_projection_drops_scale(self):
        h = ci_homomorphism(dim=1)
        img = h.map_colour(UnnormalizedGaussian([1.5], [[2.0]], log_scale=-3.7))
        assert isinstance(img, GaussianEstimate)
        assert img.mean[0] == 1.5
        assert img.cov[0, 0] == 2.0

    def test_commutes_on_random_scalars(self, rng):
        h = ci_homomorphism(dim=1)
        for _ in range(100):
            p = random_unnormalized_gaussian(rng, 1)
            q = random_unnormalized_gaussian(rng, 1)
            op = OpParam(rng.uniform(0.0, 0.95))
            lhs = h.map_colour(fuse(p, op, q))
            rhs = fuse(h.map_colour(p), op, h.map_colour(q))
            assert colour_distance(lhs, rhs) < 1e-9

    def test_identity_weight_both_paths(self, rng):
        h = ci_homomorphism(dim=2)
        p = random_unnormalized_gaussian(rng, 2)
        q = random_unnormalized_gaussian(rng, 2)
        op = OpParam(0.0)
        assert colour_distance(h.map_colour(fuse(p, op, q)), h.map_colour(p)) == 0.0
        assert colour_distance(
            fuse(h.map_colour(p), op, h.map_colour(q)), h.map_colour(p)
        ) == 0.0

    def test_verified_stochastically(self):
        report = verify_homomorphism(ci_homomorphism(dim=3), 500, seed=13)
        assert report.ok(1e-7)


class TestEntropyMap:
    def test_defining_value(self):
        h = entropy_homomorphism(8)
        img = h.map_colour(DensityVal(2.0 ** (-8 * 1.0)))
        assert isinstance(img, EntropyVal)
        assert img.bits == pytest.approx(1.0, abs=1e-12)

    def test_mixing_sources(self):
        h = entropy_homomorphism(16)
        x = DensityVal(2.0 ** (-16 * 1.0))   # one bit per symbol
        y = DensityVal(2.0 ** (-16 * 0.0001)) ** 0 if False else DensityVal(2.0 ** (-16 * 1e-9))
        z = h.map_colour(fuse(x, OpParam(0.25), y))
        assert z.bits == pytest.approx(0.75, abs=1e-9)

    def test_identity_weight(self):
        h = entropy_homomorphism(4)
        x = DensityVal(2.0 ** (-4 * 2.0))
        y = DensityVal(2.0 ** (-4 * 0.5))
        assert h.map_colour(fuse(x, OpParam(0.0), y)).bits == pytest.approx(2.0)

    def test_verified_stochastically(self):
        report = verify_homomorphism(entropy_homomorphism(8), 500, seed=21)
        assert report.ok(1e-12)

    def test_rejects_wrong_variant(self):
        h = entropy_homomorphism(8)
        with pytest.raises(NonPositiveDensity):
            h.map_colour(EntropyVal(1.0))

    def test_block_length_validation(self):
        with pytest.raises(ValueError):
            entropy_homomorphism(0)


class TestFisherMap:
    def test_commutes_on_random_scalars(self, rng):
        g = UnnormalizedGaussian([0.0], [[2.0]])
        h = fisher_homomorphism(g)
        for _ in range(100):
            p = random_unnormalized_gaussian(rng, 1)
            q = random_unnormalized_gaussian(rng, 1)
            op = OpParam(rng.uniform(0.0, 0.95))
            lhs = h.map_colour(fuse(p, op, q))
            rhs = fuse(h.map_colour(p), op, h.map_colour(q))
            assert colour_distance(lhs, rhs) < 1e-9

    def test_verified_stochastically(self, rng):
        g = random_unnormalized_gaussian(rng, 2)
        report = verify_homomorphism(fisher_homomorphism(g), 500, seed=31)
        assert report.ok(1e-9)


def test_broken_map_is_detected():
    # dropping the weight transport (mapping every op to a fixed one)
    # must produce a visible violation on generic inputs
    base = ci_homomorphism(dim=1)
    broken = Homomorphism(
        name="broken",
        map_colour=base.map_colour,
        map_op=lambda op: OpParam(0.5),
        sample_source=base.sample_source,
    )
    report = verify_homomorphism(broken, 200, seed=5)
    assert report.max_violation > 0.01


def test_sample_count_validation():
    with pytest.raises(ValueError):
        verify_homomorphism(ci_homomorphism(1), 0, seed=1)
