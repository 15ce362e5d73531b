import math

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from qnet import (
    DensityVal,
    DimensionMismatch,
    EntropyVal,
    GaussianEstimate,
    InfoMatrix,
    InvalidWeight,
    NotInvertibleHere,
    OpParam,
    UnnormalizedGaussian,
    Vec,
    VariantMismatch,
    colour_distance,
    consistent,
    discount,
    fisher_observed,
    fuse,
)
from qnet.sampling import random_gaussian_estimate, random_unnormalized_gaussian

from helpers import ci_scalar


def ge(mean, cov):
    return GaussianEstimate([mean], [[cov]])


class TestFuseEstimates:
    def test_scalar_example(self):
        # hand computation: precisions 1 and 1 at weight 1/2 give
        # precision 1 and mean (0 + 2)/2
        z = fuse(ge(0.0, 1.0), OpParam(0.5), ge(2.0, 1.0))
        assert z.mean[0] == pytest.approx(1.0, abs=1e-12)
        assert z.cov[0, 0] == pytest.approx(1.0, abs=1e-12)

    def test_matches_scalar_reference(self, rng):
        for _ in range(50):
            ma, ca = rng.normal(), rng.uniform(0.2, 3.0)
            mb, cb = rng.normal(), rng.uniform(0.2, 3.0)
            s = rng.uniform(0.0, 0.95)
            z = fuse(ge(ma, ca), OpParam(s), ge(mb, cb))
            mean_ref, cov_ref = ci_scalar(ma, ca, s, mb, cb)
            assert z.mean[0] == pytest.approx(mean_ref, abs=1e-12)
            assert z.cov[0, 0] == pytest.approx(cov_ref, abs=1e-12)

    def test_identity_weight_returns_left(self, rng):
        a, b = random_gaussian_estimate(rng), random_gaussian_estimate(rng)
        assert fuse(a, OpParam(0.0), b) is a

    def test_self_update_is_neutral(self, rng):
        a = random_gaussian_estimate(rng)
        for s in (0.1, 0.5, 0.9):
            assert colour_distance(fuse(a, OpParam(s), a), a) < 1e-12

    def test_weight_one_rejected(self):
        with pytest.raises(InvalidWeight):
            OpParam(1.0)

    def test_variant_and_dimension_errors(self):
        with pytest.raises(VariantMismatch):
            fuse(ge(0, 1), OpParam(0.5), Vec([0.0]))
        with pytest.raises(DimensionMismatch):
            fuse(ge(0, 1), OpParam(0.5), GaussianEstimate([0.0, 0.0], np.eye(2)))


class TestDiscount:
    def test_inverts_first_example(self):
        a = discount(ge(1.0, 1.0), OpParam(0.5), ge(2.0, 1.0))
        assert a.mean[0] == pytest.approx(0.0, abs=1e-12)
        assert a.cov[0, 0] == pytest.approx(1.0, abs=1e-12)

    def test_partial_domain_scalar_precisions(self):
        # (1/c - s/cb)/(1-s): with cb=3 the result precision is 5/3
        a = discount(ge(0.0, 1.0), OpParam(0.5), ge(0.0, 3.0))
        assert a.cov[0, 0] == pytest.approx(3.0 / 5.0, abs=1e-12)
        # with cb=0.4 it would be 2*(1 - 1.25) = -0.5: undefined
        with pytest.raises(NotInvertibleHere):
            discount(ge(0.0, 1.0), OpParam(0.5), ge(0.0, 0.4))

    def test_left_inverse_random_scalars(self, rng):
        for _ in range(200):
            a = ge(rng.normal(), rng.uniform(0.2, 3.0))
            b = ge(rng.normal(), rng.uniform(0.2, 3.0))
            s = rng.uniform(0.0, 0.95)
            back = discount(fuse(a, OpParam(s), b), OpParam(s), b)
            assert colour_distance(back, a) < 1e-9

    def test_identity_weight(self, rng):
        c, b = random_gaussian_estimate(rng), random_gaussian_estimate(rng)
        assert discount(c, OpParam(0.0), b) is c


class TestLogLinearGaussian:
    def test_fused_density_matches_pointwise_powers(self, rng):
        # independent oracle: evaluate p^(1-s) q^s on a grid of points
        for _ in range(25):
            p = random_unnormalized_gaussian(rng, 1)
            q = random_unnormalized_gaussian(rng, 1)
            s = rng.uniform(0.05, 0.95)
            z = fuse(p, OpParam(s), q)
            for x in np.linspace(-3, 3, 13):
                want = (1 - s) * p.log_density([x]) + s * q.log_density([x])
                assert z.log_density([x]) == pytest.approx(want, abs=1e-9)

    def test_fused_density_matches_pointwise_powers_3d(self, rng):
        for _ in range(10):
            p = random_unnormalized_gaussian(rng, 3)
            q = random_unnormalized_gaussian(rng, 3)
            s = rng.uniform(0.05, 0.95)
            z = fuse(p, OpParam(s), q)
            for _ in range(5):
                x = rng.normal(size=3)
                want = (1 - s) * p.log_density(x) + s * q.log_density(x)
                assert z.log_density(x) == pytest.approx(want, abs=1e-8)

    def test_peak_value_tracks_residual(self):
        # equal unit covariances, modes 0 and 2, weight 1/2: the mixed
        # exponent leaves a residual of 1/2 * s(1-s) * 2^2 = 1/2 at the
        # new mode
        p = UnnormalizedGaussian([0.0], [[1.0]], 0.0)
        q = UnnormalizedGaussian([2.0], [[1.0]], 0.0)
        z = fuse(p, OpParam(0.5), q)
        assert z.log_scale == pytest.approx(-0.5, abs=1e-12)
        assert z.mean[0] == pytest.approx(1.0)
        assert z.cov[0, 0] == pytest.approx(1.0)

    def test_discount_restores_density(self, rng):
        for _ in range(50):
            p = random_unnormalized_gaussian(rng, 2)
            q = random_unnormalized_gaussian(rng, 2)
            s = rng.uniform(0.0, 0.95)
            back = discount(fuse(p, OpParam(s), q), OpParam(s), q)
            assert colour_distance(back, p) < 1e-9


class TestLinearVariants:
    @given(
        st.lists(st.floats(-1e6, 1e6), min_size=2, max_size=2),
        st.lists(st.floats(-1e6, 1e6), min_size=2, max_size=2),
        st.lists(st.floats(-1e6, 1e6), min_size=2, max_size=2),
        st.floats(0.0, 0.95),
        st.floats(0.0, 0.95),
    )
    @settings(max_examples=200, deadline=None)
    def test_vec_self_distributive(self, xs, ys, zs, s, t):
        a, b, c = Vec(xs), Vec(ys), Vec(zs)
        lhs = fuse(fuse(a, OpParam(s), b), OpParam(t), c)
        rhs = fuse(fuse(a, OpParam(t), c), OpParam(s), fuse(b, OpParam(t), c))
        scale = max(1.0, *(abs(v) for v in xs + ys + zs))
        assert colour_distance(lhs, rhs) < 1e-9 * scale

    def test_info_matrix_convex(self):
        a = InfoMatrix(np.eye(2))
        b = InfoMatrix(2 * np.eye(2))
        z = fuse(a, OpParam(0.25), b)
        assert np.allclose(z.mat, 1.25 * np.eye(2))

    def test_entropy_discount_can_fail(self):
        with pytest.raises(NotInvertibleHere):
            discount(EntropyVal(0.1), OpParam(0.5), EntropyVal(3.0))

    def test_density_geometric(self):
        z = fuse(DensityVal(math.exp(-2.0)), OpParam(0.25), DensityVal(math.exp(-6.0)))
        assert math.log(z.value) == pytest.approx(-3.0, abs=1e-12)


class TestDistributivitySymbolic:
    def test_scalar_ci_distributivity_expands_to_zero(self):
        # symbolic oracle, independent of the numeric path: expand both
        # sides of the law in precision coordinates
        pa, pb, pc, na, nb, nc, s, t = sympy.symbols(
            "pa pb pc na nb nc s t", positive=True
        )

        def upd(p1, n1, p2, n2, w):
            return (1 - w) * p1 + w * p2, (1 - w) * n1 + w * n2

        # precisions p*, precision-weighted means n*
        lhs = upd(*upd(pa, na, pb, nb, s), pc, nc, t)
        rhs = upd(*upd(pa, na, pc, nc, t), *upd(pb, nb, pc, nc, t), s)
        assert sympy.simplify(lhs[0] - rhs[0]) == 0
        assert sympy.simplify(lhs[1] - rhs[1]) == 0


class TestConsistency:
    def test_equal_covariance_is_boundary(self):
        rep = consistent(GaussianEstimate([0.0, 0.0], np.eye(2)), np.eye(2))
        assert rep.margin == pytest.approx(0.0, abs=1e-12)
        assert rep.ok

    def test_inflated_covariance(self):
        rep = consistent(GaussianEstimate([0.0, 0.0], 2 * np.eye(2)), np.eye(2))
        assert rep.margin == pytest.approx(1.0, abs=1e-12)
        assert rep.ok

    def test_deflated_covariance(self):
        rep = consistent(GaussianEstimate([0.0, 0.0], 0.5 * np.eye(2)), np.eye(2))
        assert rep.margin == pytest.approx(-0.5, abs=1e-12)
        assert not rep.ok

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            consistent(ge(0.0, 1.0), np.eye(2))

    def test_fusion_preserves_consistency(self, rng):
        # both inputs dominating a common truth implies the fusion does
        truth = np.eye(2)
        for _ in range(100):
            bump_a = rng.standard_normal((2, 2))
            bump_b = rng.standard_normal((2, 2))
            a = GaussianEstimate(rng.normal(size=2), truth + bump_a @ bump_a.T)
            b = GaussianEstimate(rng.normal(size=2), truth + bump_b @ bump_b.T)
            s = rng.uniform(0.0, 0.95)
            z = fuse(a, OpParam(s), b)
            assert consistent(z, truth).margin >= -1e-8


class TestFisher:
    def test_unit_case(self):
        p = UnnormalizedGaussian([0.0, 0.0], np.eye(2))
        g = UnnormalizedGaussian([0.0, 0.0], np.eye(2))
        assert np.allclose(fisher_observed(p, g).mat, 2 * np.eye(2))

    def test_identity_weight_keeps_left_information(self, rng):
        p = random_unnormalized_gaussian(rng, 2)
        q = random_unnormalized_gaussian(rng, 2)
        g = random_unnormalized_gaussian(rng, 2)
        fused = fuse(p, OpParam(0.0), q)
        assert colour_distance(fisher_observed(fused, g), fisher_observed(p, g)) < 1e-12

    def test_joint_log_density_second_derivative_symbolic(self):
        # scalar oracle: -d^2/dm^2 log(p(x|m)^(1-s) q(x|m)^s g(m)) is
        # constant and equals the convex precision mix plus the prior's
        x, m, cp, cq, cg, s, mp_, mq_, mg_ = sympy.symbols(
            "x m cp cq cg s mp mq mg", positive=True
        )
        logp = -((x - m) ** 2) / (2 * cp)
        logq = -((x - m) ** 2) / (2 * cq)
        logg = -((m - mg_) ** 2) / (2 * cg)
        joint = (1 - s) * logp + s * logq + logg
        observed = -sympy.diff(joint, m, 2)
        want = (1 - s) / cp + s / cq + 1 / cg
        assert sympy.simplify(observed - want) == 0
