import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from helicity_packets import bell as bl
from helicity_packets import kinematics as kin
from helicity_packets import little_group as lg
from helicity_packets.errors import ConsistencyError, DomainError, ExcludedDirectionError, NullOutcomeError
from helicity_packets.helicity import triad_components

interior = st.floats(0.05, math.pi - 0.05)
phis = st.floats(0.0, 2 * math.pi, exclude_max=True)
ALL_TAGS = bl.PHI_TAGS + bl.PSI_TAGS


class TestPartners:
    def test_phi_a(self):
        assert bl.fixed_point_partner(math.pi / 4, math.pi / 6, "Phi-a") == pytest.approx((math.pi / 4, 2 * math.pi - math.pi / 6))

    @given(st.floats(0, math.pi), phis)
    def test_psi_d_is_identity(self, theta, phi):
        assert bl.fixed_point_partner(theta, phi, "Psi-d") == pytest.approx(kin.canonical_angles(theta, phi))

    def test_phi_c_is_antipodal(self):
        t2, p2 = bl.fixed_point_partner(math.pi / 4, math.pi / 6, "Phi-c")
        assert (t2, p2) == pytest.approx((3 * math.pi / 4, 7 * math.pi / 6))
        np.testing.assert_allclose(kin.from_angles(t2, p2).direction, -kin.from_angles(math.pi / 4, math.pi / 6).direction, atol=1e-15)

    def test_unknown(self):
        with pytest.raises(DomainError):
            bl.fixed_point_partner(1, 1, "Phi-z")

    def test_offsets(self):
        off = bl.fixed_point_offsets(0.9, 0.7, "Phi")
        assert off["a"] == pytest.approx((2 * math.pi - 1.4, 0.0))
        assert bl.fixed_point_offsets(0.9, 0.7, "Psi")["d"] == (0.0, 0.0)


class TestPairs:
    def test_correlation_checked(self):
        p1 = kin.from_angles(0.5, 0.2)
        with pytest.raises(DomainError):
            bl.MomentumPair(p1, kin.from_angles(0.5, 0.3), "Phi-a")
        bl.MomentumPair(p1, kin.from_angles(0.5, 0.3))

    def test_phi_rejects_k(self):
        k = kin.from_angles(0, 0)
        with pytest.raises(ExcludedDirectionError):
            bl.MomentumPair(k, k, "Phi-a")
        bl.MomentumPair(k, k, "Psi-d")

    def test_bell_requires_p_not_k(self):
        k = kin.from_angles(0, 0)
        with pytest.raises(ExcludedDirectionError):
            bl.bell(bl.MomentumPair(k, kin.from_angles(1, 1)), "Phi+")

    @given(interior, phis)
    def test_norms_and_orthogonality(self, theta, phi):
        pair = bl.correlated_pair(theta, phi, "Phi-a")
        vecs = {w: bl.bell(pair, w).vector() for w in bl.BELL_COEFFS}
        for v in vecs.values():
            assert np.linalg.norm(v) == pytest.approx(1.0, abs=1e-12)
        gram = np.array([[np.vdot(a, b) for b in vecs.values()] for a in vecs.values()])
        np.testing.assert_allclose(gram, np.eye(4), atol=1e-12)

    def test_component_expansion(self):
        pair = bl.correlated_pair(math.pi / 4, math.pi / 6, "Phi-a")
        plus1 = triad_components(math.pi / 4, math.pi / 6, 1)
        minus1 = triad_components(math.pi / 4, math.pi / 6, -1)
        plus2 = triad_components(math.pi / 4, -math.pi / 6, 1)
        minus2 = triad_components(math.pi / 4, -math.pi / 6, -1)
        expected = (np.kron(plus1, plus2) + np.kron(minus1, minus2)) / math.sqrt(2)
        np.testing.assert_allclose(bl.bell(pair, "Phi+").vector(), expected, atol=1e-15)


class TestResidual:
    def test_phi_a_reference(self):
        for w in (0.3, 0.7, 1.2):
            assert abs(bl.fixed_point_residual(w, 0.9, 0.7, -1.4, 0.0, "Phi")) < 1e-12

    def test_psi_identity(self):
        assert bl.fixed_point_residual(0.5, 0.9, 0.7, 0.0, 0.0, "Psi") == 0.0

    def test_phi_equal_momenta_not_a_fixed_point(self):
        assert abs(bl.fixed_point_residual(0.5, 0.9, 0.7, 0.0, 0.0, "Phi")) > 0.1

    def test_all_tags_on_grid(self):
        vals = np.linspace(0.05, 3.0, 20)
        W, T, P = np.meshgrid(vals, vals, np.linspace(0.0, 6.2, 20), indexing="ij")
        for tag in ALL_TAGS:
            family = tag[:3]
            t2, p2 = bl.raw_partner(T, P, tag)
            res = bl.fixed_point_residual(W, T, P, p2 - P, t2 - T, family)
            cleared = bl.fixed_point_residual(W, T, P, p2 - P, t2 - T, family, cleared=True)
            assert np.max(np.abs(cleared)) < 1e-12, tag
            # rounding in the ratio form grows like tan^2 near the poles
            n1, d1 = lg.ry_terms(W, T, P)
            ok = np.abs(d1) > 1e-6
            scale = 1.0 + (n1[ok] / d1[ok]) ** 2
            assert np.max(np.abs(res[ok]) / scale) < 1e-12, tag

    def test_singular_points_are_nan(self):
        # theta1 = pi/2, varpi = pi/2 makes the first-mode denominator vanish
        val = bl.fixed_point_residual(math.pi / 2, math.pi / 2, 0.0, 0.0, 0.0, "Phi")
        assert bl.is_singular(val)


class TestCurves:
    @pytest.mark.parametrize("family", ["Phi", "Psi"])
    def test_curves_meet_fixed_points(self, family):
        cs = bl.fixed_point_curves([0.3, 0.7, 1.2], 0.9, 0.7, family, grid=128)
        from helicity_packets.contour import point_to_polyline_distance

        for w in (0.3, 0.7, 1.2):
            lines = cs.curves_for(w)
            assert lines
            for label, pt in cs.points.items():
                d = min(point_to_polyline_distance(pt, line, period=2 * math.pi) for line in lines)
                assert d <= cs.cell_size, (w, label)

    def test_psi_centre(self):
        assert bl.fixed_point_curves([0.5], 1.1, 0.4, "Psi", grid=64).points["d"] == (0.0, 0.0)

    def test_vertices_lie_on_zero_set(self):
        cs = bl.fixed_point_curves([0.7], 0.9, 0.7, "Phi", grid=128)
        h = cs.cell_size
        for _, _, line in cs.curves:
            vals = bl.fixed_point_residual(0.7, 0.9, 0.7, line[:, 0], line[:, 1], "Phi", cleared=True)
            # linear interpolation error is O(h^2 * curvature) on an O(1) field
            assert np.max(np.abs(vals)) < 5 * h * h

    def test_tiny_grid(self):
        cs = bl.fixed_point_curves([0.3], 0.9, 0.7, "Phi", grid=2)
        assert cs.grid == 2
        with pytest.raises(DomainError):
            bl.fixed_point_curves([0.3], 0.9, 0.7, "Phi", grid=1)

    def test_threads_give_identical_output(self):
        a = bl.fixed_point_curves([0.3, 0.7, 1.2, 2.0], 0.9, 0.7, "Phi", grid=64, threads=1)
        b = bl.fixed_point_curves([0.3, 0.7, 1.2, 2.0], 0.9, 0.7, "Phi", grid=64, threads=4)
        assert len(a.curves) == len(b.curves)
        for (w1, c1, l1), (w2, c2, l2) in zip(a.curves, b.curves):
            assert (w1, c1) == (w2, c2) and np.array_equal(l1, l2)


class TestTransform:
    def test_rz_keeps_amplitudes(self):
        st_ = bl.bell(bl.correlated_pair(0.8, 0.3, "Phi-a"), "Phi+")
        out = bl.transform_bell(st_, kin.rz(0.9))
        np.testing.assert_allclose(out.amps, st_.amps, atol=1e-12)
        assert out.pair.p1.phi == pytest.approx(1.2)
        assert out.pair.p2.phi == pytest.approx(2 * math.pi - 0.3 + 0.9 - 2 * math.pi)

    @given(interior, phis, st.floats(-math.pi, math.pi))
    def test_ry_phi_a(self, theta, phi, varpi):
        pair = bl.correlated_pair(theta, phi, "Phi-a")
        for which in ("Phi+", "Phi-"):
            st_ = bl.bell(pair, which)
            out = bl.transform_bell(st_, kin.ry(varpi))
            np.testing.assert_allclose(out.amps, st_.amps, atol=1e-10)

    def test_uncorrelated_pair_dephases(self):
        pair = bl.MomentumPair(kin.from_angles(0.8, 0.3), kin.from_angles(1.3, 2.0))
        st_ = bl.bell(pair, "Phi+")
        out = bl.transform_bell(st_, kin.ry(0.9))
        assert np.max(np.abs(out.amps - st_.amps)) > 1e-3

    def test_normal_form_invariance(self, rng):
        for _ in range(100):
            lam = kin.normal_form(*rng.uniform(-math.pi, math.pi, 2), rng.uniform(-3, 3))
            pair = bl.correlated_pair(rng.uniform(0.05, math.pi - 0.05), rng.uniform(0, 2 * math.pi), "Phi-a")
            for which in ("Phi+", "Phi-"):
                st_ = bl.bell(pair, which)
                np.testing.assert_allclose(bl.transform_bell(st_, lam).amps, st_.amps, atol=1e-10)

    @pytest.mark.parametrize("tag", ALL_TAGS)
    def test_every_tag_under_rotations(self, tag, rng):
        # extrapolated coverage: the non-displayed solutions behave like Phi-a / Psi-d
        which = "Phi+" if tag.startswith("Phi") else "Psi+"
        for _ in range(30):
            pair = bl.correlated_pair(rng.uniform(0.05, math.pi - 0.05), rng.uniform(0, 2 * math.pi), tag)
            st_ = bl.bell(pair, which)
            out = bl.transform_bell(st_, kin.ry(rng.uniform(-math.pi, math.pi)))
            np.testing.assert_allclose(out.amps, st_.amps, atol=1e-10)

    @pytest.mark.parametrize("tag", bl.BOOST_STABLE_TAGS)
    def test_boost_stable_tags(self, tag, rng):
        which = "Phi-" if tag.startswith("Phi") else "Psi-"
        for _ in range(30):
            lam = kin.normal_form(*rng.uniform(-math.pi, math.pi, 2), rng.uniform(-3, 3))
            pair = bl.correlated_pair(rng.uniform(0.05, math.pi - 0.05), rng.uniform(0, 2 * math.pi), tag)
            st_ = bl.bell(pair, which)
            np.testing.assert_allclose(bl.transform_bell(st_, lam).amps, st_.amps, atol=1e-10)

    def test_antipodal_partner_loses_cancellation_under_boosts(self):
        pair = bl.correlated_pair(0.7, 0.4, "Phi-c")
        lam = kin.normal_form(0.0, 0.8, 1.5)
        a1 = lg.wigner_angle_numeric(lam, pair.p1)
        a2 = lg.wigner_angle_numeric(lam, pair.p2)
        assert bl.net_phase_deviation("Phi-c", a1, a2) > 1e-3
        # no invariance is claimed for this combination, so no error is raised
        bl.transform_bell(bl.bell(pair, "Phi+"), lam)

    def test_consistency_error_on_broken_claim(self, monkeypatch):
        pair = bl.correlated_pair(0.7, 0.4, "Phi-a")
        monkeypatch.setattr(lg, "wigner_angle_numeric", lambda lam, p: 0.1)
        with pytest.raises(ConsistencyError):
            bl.transform_bell(bl.bell(pair, "Phi+"), kin.ry(0.5))


class TestProjection:
    def test_phi_minus_direction(self):
        out = bl.pt_project(bl.bell(bl.correlated_pair(math.pi / 4, 0.4, "Phi-a"), "Phi-"))
        np.testing.assert_allclose(out.amps, np.array([1, 0, 0, -1]) / math.sqrt(2), atol=1e-12)
        assert out.norm_weight == pytest.approx(0.5, abs=1e-12)

    @given(phis)
    def test_phi_plus_equator(self, phi):
        out = bl.pt_project(bl.bell(bl.correlated_pair(math.pi / 2, phi, "Phi-a"), "Phi+"))
        expected = np.array([1, -np.exp(-2j * phi), -np.exp(2j * phi), 1]) / 2
        np.testing.assert_allclose(out.amps, expected, atol=1e-12)

    def test_phi_minus_equator_is_null(self):
        with pytest.raises(NullOutcomeError):
            bl.pt_project(bl.bell(bl.correlated_pair(math.pi / 2, 0.3, "Phi-a"), "Phi-"))

    def test_normalization_factors(self):
        for theta in np.linspace(0.05, math.pi - 0.05, 50):
            if abs(theta - math.pi / 2) < 1e-3:
                continue
            for which in ("Phi+", "Phi-"):
                v = bl.correlated_projection(which, theta, 0.3) * bl.correlated_normalization(which, theta)
                assert np.linalg.norm(v) == pytest.approx(1.0, abs=1e-12)

    @given(interior, phis, interior, phis)
    def test_closed_form_matches_projection(self, t1, p1, t2, p2):
        pair = bl.MomentumPair(kin.from_angles(t1, p1), kin.from_angles(t2, p2))
        for which in bl.BELL_COEFFS:
            raw = bl.two_mode_vector(bl.BELL_COEFFS[which], pair, transverse=True)
            closed = bl.projected_bell_closed_form(which, t1, p1, t2, p2)
            # floored kets carry 1/sqrt((1 + c^2)/2) each; the closed form drops the Bell 1/sqrt(2)
            w1, w2 = (1 + math.cos(t1) ** 2) / 2, (1 + math.cos(t2) ** 2) / 2
            np.testing.assert_allclose(raw * math.sqrt(2) / math.sqrt(w1 * w2), closed, atol=1e-12)

    def test_general_form_specializes_to_mirror_pair(self):
        for theta in np.linspace(0.05, math.pi - 0.05, 50):
            for which in ("Phi+", "Phi-"):
                general = bl.projected_bell_closed_form(which, theta, 0.7, theta, -0.7)
                np.testing.assert_allclose(general, bl.correlated_projection(which, theta, 0.7), atol=1e-12)

    def test_norm_weight_decreases(self, rng):
        for _ in range(50):
            pair = bl.correlated_pair(rng.uniform(0.05, 3.0), rng.uniform(0, 6), "Phi-a")
            for which in ("Phi+", "Psi+", "Psi-"):
                assert bl.pt_project(bl.bell(pair, which)).norm_weight <= 1.0 + 1e-12

    def test_joint_detection_weight(self, rng):
        for theta in rng.uniform(0.05, 3.0, 20):
            c = math.cos(theta)
            pair = bl.correlated_pair(theta, 0.9, "Phi-a")
            assert bl.pt_project(bl.bell(pair, "Phi+")).norm_weight == pytest.approx((1 + c**4) / 2, abs=1e-12)
            if abs(c) > 1e-3:
                assert bl.pt_project(bl.bell(pair, "Phi-")).norm_weight == pytest.approx(c * c, abs=1e-12)

    def test_product_of_floor_weights_is_not_the_joint_weight(self):
        # the cross terms of the projected ++ and -- parts survive
        c = math.cos(0.8)
        joint = bl.pt_project(bl.bell(bl.correlated_pair(0.8, 0.2, "Phi-a"), "Phi+")).norm_weight
        assert abs(joint - (1 + c * c) ** 2 / 4) > 1e-2


class TestOverlap:
    def test_phi_a_orthogonal(self):
        pair = bl.correlated_pair(1.0, 0.5, "Phi-a")
        a, b = (bl.pt_project(bl.bell(pair, w)) for w in ("Phi+", "Phi-"))
        assert abs(bl.floored_overlap(a, b)) < 1e-12
        assert bl.floored_overlap(a, a) == pytest.approx(1.0)

    def test_uncorrelated_orthogonal_until_transformed(self):
        pair = bl.MomentumPair(kin.from_angles(1.0, 0.5), kin.from_angles(1.3, 0.5))
        a, b = (bl.pt_project(bl.bell(pair, w)) for w in ("Phi+", "Phi-"))
        # the ++/-- cross terms of the projected pair cancel identically at rest
        assert abs(bl.floored_overlap(a, b)) < 1e-12
        a, b = (bl.pt_project(bl.transform_bell(bl.bell(pair, w), kin.ry(0.9))) for w in ("Phi+", "Phi-"))
        assert abs(bl.floored_overlap(a, b)) > 1e-3

    def test_mismatched_pairs(self):
        a = bl.pt_project(bl.bell(bl.correlated_pair(1.0, 0.5, "Phi-a"), "Phi+"))
        b = bl.pt_project(bl.bell(bl.correlated_pair(1.1, 0.5, "Phi-a"), "Phi-"))
        with pytest.raises(DomainError):
            bl.floored_overlap(a, b)
        with pytest.raises(DomainError):
            bl.floored_overlap(bl.bell(a.pair, "Phi+"), a)

    def test_orthogonal_after_transform(self, rng):
        for _ in range(100):
            lam = kin.normal_form(*rng.uniform(-math.pi, math.pi, 2), rng.uniform(-3, 3))
            pair = bl.correlated_pair(rng.uniform(0.05, math.pi - 0.05), rng.uniform(0, 2 * math.pi), "Phi-a")
            a, b = (bl.pt_project(bl.transform_bell(bl.bell(pair, w), lam)) for w in ("Phi+", "Phi-"))
            assert abs(bl.floored_overlap(a, b)) < 1e-10

    @given(interior, phis)
    def test_triplet_expansion(self, theta, phi):
        assume(abs(theta - math.pi / 2) > 1e-6)
        out = bl.pt_project(bl.bell(bl.correlated_pair(theta, phi, "Phi-a"), "Phi+"))
        a = np.array(bl.triplet_coefficients(out))
        assert np.max(np.abs(a.imag)) < 1e-12
        assert np.sum(a.real**2) == pytest.approx(1.0, abs=1e-12)
