import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from helicity_packets import kinematics as kin
from helicity_packets.errors import DomainError, RangeError

thetas = st.floats(0.0, math.pi)
phis = st.floats(0.0, 2 * math.pi, exclude_max=True)
angles = st.floats(-math.pi, math.pi)
rapidities = st.floats(-4.0, 4.0)


def random_factor(rng):
    kind = rng.integers(3)
    if kind == 0:
        return kin.rz(rng.uniform(-math.pi, math.pi))
    if kind == 1:
        return kin.ry(rng.uniform(-math.pi, math.pi))
    return kin.bz(rng.uniform(-2, 2))


class TestFromAngles:
    def test_pole_is_standard_momentum(self):
        p = kin.from_angles(0.0, 2.3)
        assert np.array_equal(p.vector, kin.STANDARD_MOMENTUM)
        assert p.phi == 0.0
        assert p.is_standard()

    def test_equator(self):
        np.testing.assert_allclose(kin.from_angles(math.pi / 2, 0.0).vector, [1, 1, 0, 0], atol=1e-15)

    def test_round_trip(self):
        p = kin.from_angles(math.pi / 3, math.pi / 4)
        s = math.sin(math.pi / 3) / math.sqrt(2)
        np.testing.assert_allclose(p.vector, [1, s, s, 0.5], atol=1e-15)
        theta, phi, d = kin.angles_of(p.vector)
        assert theta == pytest.approx(math.pi / 3, abs=1e-15)
        assert phi == pytest.approx(math.pi / 4, abs=1e-15)
        assert d == 1.0

    def test_phi_reduced(self):
        assert kin.from_angles(1.0, -0.5).phi == pytest.approx(2 * math.pi - 0.5)
        assert kin.from_angles(1.0, 7.0).phi == pytest.approx(7.0 - 2 * math.pi)

    @pytest.mark.parametrize("bad", [(-0.1, 0.0), (4.0, 0.0), (math.nan, 0.0), (1.0, math.inf)])
    def test_rejects(self, bad):
        with pytest.raises(DomainError):
            kin.from_angles(*bad)

    @given(thetas, phis)
    def test_null(self, theta, phi):
        v = kin.from_angles(theta, phi).vector
        assert abs(kin.minkowski(v, v)) < 1e-12
        assert v[0] == 1.0


class TestGenerators:
    def test_zero_parameters_are_identity(self):
        for g in (kin.rz(0), kin.ry(0), kin.bz(0)):
            assert np.array_equal(g.m, np.eye(4))

    def test_boost_along_k(self):
        v = kin.bz(math.atanh(0.5)).m @ kin.STANDARD_MOMENTUM
        np.testing.assert_allclose(v / v[0], kin.STANDARD_MOMENTUM, atol=1e-15)

    def test_quarter_rotation_maps_z_to_x(self):
        q = kin.apply(kin.ry(math.pi / 2), kin.from_angles(0.0, 0.0))
        np.testing.assert_allclose(q.vector, [1, 1, 0, 0], atol=1e-15)

    def test_rapidity_limit(self):
        kin.bz(kin.MAX_RAPIDITY)
        with pytest.raises(RangeError):
            kin.bz(kin.MAX_RAPIDITY + 1)
        with pytest.raises(DomainError):
            kin.rz(math.nan)

    def test_describe(self):
        assert kin.identity().describe() == "identity"
        lam = kin.normal_form(0.4, 0.9, 0.6)
        assert lam.describe() == "rz(0.40000000000000002)*ry(0.90000000000000002)*bz(0.59999999999999998)"
        assert lam.is_normal_form()
        assert not kin.compose(kin.bz(1), kin.ry(1)).is_normal_form()

    def test_matrix_is_read_only(self):
        with pytest.raises(ValueError):
            kin.ry(0.3).m[0, 0] = 2.0


class TestGroup:
    def test_inverse(self, rng):
        for _ in range(20):
            a = kin.normal_form(*rng.uniform(-3, 3, 3))
            np.testing.assert_allclose(kin.compose(a, kin.inverse(a)).m, np.eye(4), atol=1e-12 * np.abs(a.m).max() ** 2)

    @given(angles, angles)
    def test_rz_abelian(self, a, b):
        np.testing.assert_allclose(kin.compose(kin.rz(a), kin.rz(b)).m, kin.rz(a + b).m, atol=1e-12)

    def test_ry_bz_do_not_commute(self):
        ab = kin.compose(kin.ry(0.7), kin.bz(0.5)).m
        ba = kin.compose(kin.bz(0.5), kin.ry(0.7)).m
        assert np.max(np.abs(ab - ba)) > 0.1

    def test_metric_preserved_for_long_products(self, rng):
        for _ in range(50):
            a = kin.identity()
            for _ in range(rng.integers(1, 9)):
                a = a @ random_factor(rng)
            assert kin.is_lorentz(a)

    def test_overflow(self):
        big = kin.bz(50)
        acc = big
        with pytest.raises(RangeError):
            for _ in range(20):
                acc = kin.compose(acc, big)


class TestApply:
    @given(rapidities, phis)
    def test_boost_keeps_pole(self, eta, phi):
        assert kin.apply(kin.bz(eta), kin.from_angles(0.0, phi)).theta == 0.0

    def test_boost_of_equator(self):
        q, doppler = kin.apply_with_doppler(kin.bz(math.atanh(0.5)), kin.from_angles(math.pi / 2, 0.3))
        assert math.cos(q.theta) == pytest.approx(0.5, abs=1e-15)
        assert q.theta == pytest.approx(math.pi / 3, abs=1e-15)
        assert doppler == pytest.approx(1 / math.sqrt(0.75), abs=1e-15)

    @given(st.floats(0.01, math.pi - 0.01), phis, angles)
    def test_rz_shifts_azimuth(self, theta, phi, lam):
        q = kin.apply(kin.rz(lam), kin.from_angles(theta, phi))
        assert q.theta == pytest.approx(theta, abs=1e-12)
        diff = (q.phi - phi - lam) % (2 * math.pi)
        assert min(diff, 2 * math.pi - diff) < 1e-12

    def test_boost_closed_form_grid(self):
        theta = np.linspace(0, math.pi, 100)
        eta = np.linspace(-5, 5, 100)
        T, E = np.meshgrid(theta, eta)
        expected = kin.boosted_cos_theta(np.cos(T), E)
        v = kin.null_vectors(T, 0.0 * T)
        for i, e in enumerate(eta):
            got, _, _ = kin.angles_of(v[i] @ kin.bz_matrix(e).T)
            np.testing.assert_allclose(np.cos(got), expected[i], atol=1e-12)

    def test_group_action(self, rng):
        for _ in range(100):
            a, b = random_factor(rng) @ random_factor(rng), random_factor(rng)
            p = kin.from_angles(rng.uniform(0, math.pi), rng.uniform(0, 2 * math.pi))
            lhs = kin.apply(kin.compose(a, b), p).vector
            rhs = kin.apply(a, kin.apply(b, p)).vector
            np.testing.assert_allclose(lhs, rhs, atol=1e-12)

    @given(thetas, phis, angles, angles, rapidities)
    def test_result_is_null(self, theta, phi, lam, varpi, eta):
        q = kin.apply(kin.normal_form(lam, varpi, eta), kin.from_angles(theta, phi))
        assert abs(kin.minkowski(q.vector, q.vector)) < 1e-12

    def test_apply_many_matches_scalar(self, rng):
        lam = kin.normal_form(0.3, -1.1, 0.8)
        theta, phi = rng.uniform(0, math.pi, 30), rng.uniform(0, 2 * math.pi, 30)
        t2, p2, d = kin.apply_many(lam, theta, phi)
        for i in range(30):
            q, di = kin.apply_with_doppler(lam, kin.from_angles(theta[i], phi[i]))
            assert (q.theta, q.phi, di) == pytest.approx((t2[i], p2[i], d[i]), abs=1e-14)


def test_canonical_angles():
    assert kin.canonical_angles(-0.3, 0.2) == pytest.approx((0.3, 0.2 + math.pi))
    assert kin.canonical_angles(math.pi + 0.3, 0.2) == pytest.approx((math.pi - 0.3, 0.2 + math.pi))
    assert kin.canonical_angles(2 * math.pi, 1.0) == (0.0, 0.0)
